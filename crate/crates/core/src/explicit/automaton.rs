//! L-automata: states joined by edges labelled with flows, and the least
//! flow above a seed labelling.

use std::sync::Arc;

use super::{FlowRelation, Lattice};
use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct Edge {
    pub src: usize,
    pub dst: usize,
    pub label: FlowRelation,
}

#[derive(Clone, Debug)]
pub struct LAutomaton {
    lat: Arc<Lattice>,
    states: usize,
    edges: Vec<Edge>,
}

impl LAutomaton {
    pub fn new(lat: &Arc<Lattice>, states: usize) -> Self {
        LAutomaton { lat: lat.clone(), states, edges: Vec::new() }
    }

    pub fn edge(mut self, src: usize, dst: usize, label: &FlowRelation) -> Result<Self> {
        if !Arc::ptr_eq(&self.lat, label.lattice()) {
            return Err(Error::LatticeMismatch);
        }
        assert!(src < self.states && dst < self.states);
        self.edges.push(Edge { src, dst, label: label.clone() });
        Ok(self)
    }

    pub fn states(&self) -> usize {
        self.states
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn lattice(&self) -> &Arc<Lattice> {
        &self.lat
    }

    /// Is the labelling stable along every edge?
    pub fn is_flow(&self, labels: &[u32]) -> bool {
        self.edges.iter().all(|e| e.label.contains(labels[e.src], labels[e.dst]))
    }
}

/// The pointwise-least flow above `seed`: push every edge's closure until
/// nothing moves.  Each step is forced, so the fixpoint is the least flow.
pub fn least_flow(a: &LAutomaton, seed: &[u32]) -> Vec<u32> {
    assert_eq!(seed.len(), a.states);
    let lat = &a.lat;
    let join = |x: u32, y: u32| lat.index_of(&lat.elem(x).join(lat.elem(y)));
    let mut f = seed.to_vec();
    loop {
        let mut moved = false;
        for e in &a.edges {
            let (x, y) = e.label.closure(f[e.src], f[e.dst]);
            // on a self-loop x and y land on the same state: keep both
            let before = (f[e.src], f[e.dst]);
            f[e.src] = join(f[e.src], x);
            f[e.dst] = join(f[e.dst], y);
            moved |= (f[e.src], f[e.dst]) != before;
        }
        if !moved {
            return f;
        }
    }
}

/// Stable pairs {(qF, q'F) : F a flow on A}.
pub fn sample2(a: &LAutomaton, q: usize, q2: usize) -> Result<FlowRelation> {
    if q == q2 {
        return Err(Error::SameState(q));
    }
    let lat = &a.lat;
    let b = lat.bottom();
    let mut pairs = Vec::new();
    let mut seed = vec![b; a.states];
    for x in 0..lat.len() as u32 {
        for y in 0..lat.len() as u32 {
            seed[q] = x;
            seed[q2] = y;
            let f = least_flow(a, &seed);
            if f[q] == x && f[q2] == y {
                pairs.push((x, y));
            }
        }
    }
    Ok(FlowRelation::from_pairs(lat, pairs))
}

/// {qF : F a flow on A}, as a one-variable closure.
pub fn sample1(a: &LAutomaton, q: usize) -> FlowRelation {
    let lat = &a.lat;
    let mut seed = vec![lat.bottom(); a.states];
    let fixed: Vec<u32> = (0..lat.len() as u32)
        .filter(|&x| {
            seed[q] = x;
            least_flow(a, &seed)[q] == x
        })
        .collect();
    FlowRelation::diagonal(lat, fixed)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup() -> (Arc<Lattice>, FlowRelation, FlowRelation) {
        let l = Lattice::new(2).unwrap();
        let f = FlowRelation::free(&l, &[Some(1), Some(1)]);
        let g = FlowRelation::free(&l, &[Some(1), None]);
        (l, f, g)
    }

    #[test]
    fn one_edge_samples_to_its_label() {
        let (l, f, _) = setup();
        let a = LAutomaton::new(&l, 2).edge(0, 1, &f).unwrap();
        assert_eq!(sample2(&a, 0, 1).unwrap(), f);
    }

    #[test]
    fn chain_samples_to_the_product() {
        let (l, f, g) = setup();
        let a = LAutomaton::new(&l, 3).edge(0, 1, &f).unwrap().edge(1, 2, &g).unwrap();
        assert_eq!(sample2(&a, 0, 2).unwrap(), f.then(&g));
    }

    #[test]
    fn loop_after_edge_is_star() {
        let (l, f, g) = setup();
        let a = LAutomaton::new(&l, 2).edge(0, 1, &f).unwrap().edge(1, 1, &g).unwrap();
        assert_eq!(sample2(&a, 0, 1).unwrap(), f.then(&g.star()));
    }

    #[test]
    fn all_top_is_a_flow() {
        let (l, f, g) = setup();
        let a = LAutomaton::new(&l, 2).edge(0, 1, &f).unwrap().edge(1, 0, &g).unwrap();
        let top = vec![l.top(); 2];
        assert_eq!(least_flow(&a, &top), top);
    }

    #[test]
    fn same_state_is_refused() {
        let (l, f, _) = setup();
        let a = LAutomaton::new(&l, 2).edge(0, 1, &f).unwrap();
        assert!(matches!(sample2(&a, 1, 1), Err(Error::SameState(1))));
    }
}
