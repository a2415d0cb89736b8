//! The n-flow monoid M_n(L), its vacuum F_n, and the exact F_n-states, all
//! computed by brute-force saturation over explicit relations.

use std::collections::{HashMap, HashSet};
use std::sync::Arc;

use super::{FlowRelation, Lattice};
use crate::error::{Error, Result};
use crate::monoid::{FiniteMonoid, GroupMappingCert, PartialAction};
use crate::sp::{self, SetPartition};
use crate::symbolic::FlowTerm;

/// A materialized lattice together with the letters acting on its points.
#[derive(Clone, Debug)]
pub struct FlowSystem {
    lat: Arc<Lattice>,
    names: Vec<String>,
    letters: Vec<(String, Vec<Option<usize>>)>,
    letter_flows: Vec<FlowRelation>,
}

impl FlowSystem {
    /// `letters`: name and partial map on the n points.
    pub fn new(
        n: usize,
        point_names: Vec<String>,
        letters: Vec<(String, Vec<Option<usize>>)>,
        bound: usize,
    ) -> Result<Self> {
        let lat = Lattice::with_bound(n, bound)?;
        let letter_flows = letters.iter().map(|(_, m)| FlowRelation::free(&lat, m)).collect();
        Ok(FlowSystem { lat, names: point_names, letters, letter_flows })
    }

    /// SP(M,X) for a group mapping monoid, refusing |R| above `bound`.
    pub fn from_monoid(m: &FiniteMonoid, cert: &GroupMappingCert, bound: usize) -> Result<Self> {
        Self::on_points(m, &cert.distinguished_r, bound)
    }

    /// The letters of M acting on an arbitrary subset of its elements
    /// (products leaving the subset are undefined).  Taking a prefix of R
    /// gives the small sub-instances the law suite runs on.
    pub fn on_points(m: &FiniteMonoid, points: &[usize], bound: usize) -> Result<Self> {
        if points.len() > bound {
            return Err(Error::TooLarge(points.len(), bound));
        }
        let act = PartialAction::right_on(m, points);
        let letters = m.generators().iter().map(|(x, &g)| (x.clone(), act.map_of(g))).collect();
        let names = points.iter().map(|&p| m.name(p)).collect();
        Self::new(points.len(), names, letters, bound)
    }

    pub fn lattice(&self) -> &Arc<Lattice> {
        &self.lat
    }

    pub fn point_names(&self) -> &[String] {
        &self.names
    }

    pub fn letters(&self) -> impl Iterator<Item = (&str, &FlowRelation)> {
        self.letters.iter().map(|(x, _)| x.as_str()).zip(&self.letter_flows)
    }

    pub fn letter(&self, x: &str) -> Result<&FlowRelation> {
        self.letters
            .iter()
            .position(|(y, _)| y == x)
            .map(|i| &self.letter_flows[i])
            .ok_or_else(|| Error::UnknownLetter(x.to_string()))
    }

    pub fn letter_map(&self, x: &str) -> Option<&[Option<usize>]> {
        self.letters.iter().find(|(y, _)| y == x).map(|(_, m)| m.as_slice())
    }

    /// Composite of the letter flows along a word.
    pub fn word_flow<S: AsRef<str>>(&self, word: &[S]) -> Result<FlowRelation> {
        let mut f = FlowRelation::identity(&self.lat);
        for x in word {
            f = f.then(self.letter(x.as_ref())?);
        }
        Ok(f)
    }

    /// F·τΥ·F: the standard interpretation of a formula with `vacuum`
    /// inserted around every letter.
    pub fn interpret(&self, t: &FlowTerm, vacuum: &FlowRelation) -> Result<FlowRelation> {
        Ok(match t {
            FlowTerm::Epsilon => vacuum.clone(),
            FlowTerm::Letter(x) => vacuum.then(self.letter(x)?).then(vacuum),
            FlowTerm::Concat(ts) => {
                let mut f = vacuum.clone();
                for s in ts {
                    f = f.then(&self.interpret(s, vacuum)?);
                }
                f
            }
            FlowTerm::OmegaStar(s) => self.interpret(s, vacuum)?.omega_star(),
        })
    }
}

/// Which elements the (Loops) axiom may be applied to.
#[derive(Clone, Debug)]
pub enum LoopRule {
    /// Level 0: every element is 0-loopable.
    Everything,
    /// Higher levels: only the listed word flows (partial maps of elements
    /// certified n-loopable in M).
    Words(Vec<Vec<Option<usize>>>),
}

/// Saturate `gens` under composition and a unary rule.  Elements come out
/// in discovery order, starting with `identity`.
fn saturate(
    identity: FlowRelation,
    mut gens: Vec<FlowRelation>,
    unary: impl Fn(&FlowRelation) -> Vec<FlowRelation>,
    limit: usize,
) -> Result<Vec<FlowRelation>> {
    let mut elems = vec![identity.clone()];
    let mut seen: HashSet<FlowRelation> = HashSet::from([identity]);
    let mut gen_seen: HashSet<FlowRelation> = gens.iter().cloned().collect();
    let mut done = vec![0usize];
    let mut unary_done = 0;
    loop {
        let mut i = 0;
        while i < elems.len() {
            while done[i] < gens.len() {
                let p = elems[i].then(&gens[done[i]]);
                done[i] += 1;
                if seen.insert(p.clone()) {
                    if elems.len() >= limit {
                        return Err(Error::BudgetExhausted(format!("flow monoid exceeds {limit} elements")));
                    }
                    elems.push(p);
                    done.push(0);
                }
            }
            i += 1;
        }
        let mut fresh = Vec::new();
        for e in &elems[unary_done..] {
            for u in unary(e) {
                if gen_seen.insert(u.clone()) {
                    fresh.push(u);
                }
            }
        }
        unary_done = elems.len();
        if fresh.is_empty() {
            return Ok(elems);
        }
        gens.extend(fresh);
    }
}

/// Default cap on the number of relations a saturation may produce.
pub const FLOW_MONOID_LIMIT: usize = 200_000;

/// M_n(L) and its vacuum.
#[derive(Clone, Debug)]
pub struct NFlowMonoid {
    pub elements: Vec<FlowRelation>,
    /// F_n as a partial identity.
    pub vacuum: FlowRelation,
    /// The F_n-stable elements of L.
    pub stable: Vec<u32>,
}

impl NFlowMonoid {
    pub fn generate(sys: &FlowSystem, rule: &LoopRule, limit: usize) -> Result<Self> {
        let lat = &sys.lat;
        let mut gens: Vec<FlowRelation> = sys.letter_flows.clone();
        let everything = matches!(rule, LoopRule::Everything);
        if let LoopRule::Words(maps) = rule {
            for m in maps {
                gens.push(FlowRelation::free(lat, m).omega_star());
            }
        }
        let elements = saturate(
            FlowRelation::identity(lat),
            gens,
            |e| {
                let mut out = vec![e.backflow()];
                if everything {
                    out.push(e.omega_star());
                }
                out
            },
            limit,
        )?;
        let mut dom: Vec<bool> = vec![true; lat.len()];
        for e in &elements {
            let d: HashSet<u32> = e.domain().into_iter().collect();
            for (a, keep) in dom.iter_mut().enumerate() {
                *keep &= d.contains(&(a as u32));
            }
        }
        let stable: Vec<u32> = (0..lat.len() as u32).filter(|&a| dom[a as usize]).collect();
        let vacuum = FlowRelation::diagonal(lat, stable.iter().copied());
        Ok(NFlowMonoid { elements, vacuum, stable })
    }

    pub fn is_stable(&self, a: u32) -> bool {
        self.stable.binary_search(&a).is_ok()
    }
}

/// st_n computed exactly: the monoid of standard interpretations, the
/// forward images of points under it, and the F_n-stable elements below.
#[derive(Clone, Debug)]
pub struct ExactStates {
    /// Ω(X)Υ as relations.
    pub interpretations: Vec<FlowRelation>,
    /// {(r,r)·h}: every state lies below one of these.
    pub tops: Vec<u32>,
    /// All of st_n.
    pub states: Vec<u32>,
}

impl ExactStates {
    pub fn generate(sys: &FlowSystem, nflow: &NFlowMonoid, rule: &LoopRule, limit: usize) -> Result<Self> {
        let lat = &sys.lat;
        let f = &nflow.vacuum;
        let mut gens: Vec<FlowRelation> = sys.letter_flows.iter().map(|x| f.then(x).then(f)).collect();
        let everything = matches!(rule, LoopRule::Everything);
        if let LoopRule::Words(maps) = rule {
            for m in maps {
                gens.push(f.then(&FlowRelation::free(lat, m)).then(f).omega_star());
            }
        }
        let interpretations =
            saturate(f.clone(), gens, |e| if everything { vec![e.omega_star()] } else { vec![] }, limit)?;
        let n = lat.points();
        let mut tops: Vec<u32> = Vec::new();
        let mut seen = HashSet::new();
        for r in 0..n {
            let p = lat.index_of(&SetPartition::point(n, r));
            for h in &interpretations {
                let t = h.forward(p);
                if seen.insert(t) {
                    tops.push(t);
                }
            }
        }
        tops.sort_unstable();
        let states = nflow.stable.iter().copied().filter(|&a| tops.iter().any(|&t| lat.leq(a, t))).collect();
        Ok(ExactStates { interpretations, tops, states })
    }

    /// Pairs of distinct points sharing a block in some state and related
    /// by `h_related`.
    pub fn bad_pairs(&self, lat: &Lattice, h_related: impl Fn(usize, usize) -> bool) -> Vec<(usize, usize, u32)> {
        let mut out = Vec::new();
        let mut seen = HashMap::new();
        for &t in &self.tops {
            let p = lat.elem(t);
            for &b in p.blocks() {
                let pts: Vec<usize> = sp::points_of(b).collect();
                for (i, &r) in pts.iter().enumerate() {
                    for &s in &pts[i + 1..] {
                        if h_related(r, s) && seen.insert((r, s), t).is_none() {
                            out.push((r, s, t));
                        }
                    }
                }
            }
        }
        out.sort_unstable();
        out
    }
}
