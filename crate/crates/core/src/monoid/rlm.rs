use std::collections::HashMap;

use super::{green_classes, FiniteMonoid, GroupMappingCert, PartialAction};
use crate::error::Result;

/// M acting on the L-classes of its distinguished ideal, and the faithful
/// quotient that action induces.
#[derive(Clone, Debug)]
pub struct Rlm {
    /// The L-classes of I (nonzero part), ordered by least element.
    pub l_classes: Vec<Vec<usize>>,
    /// `λ·m` is the L-class of `s·m` for any `s ∈ λ`, undefined when the
    /// product falls to zero.
    pub action: PartialAction,
    pub monoid: FiniteMonoid,
    /// M → RLM(M).
    pub quotient: Vec<usize>,
}

pub fn rlm(m: &FiniteMonoid, cert: &GroupMappingCert) -> Result<Rlm> {
    let green = green_classes(m);
    let mut l_classes: Vec<Vec<usize>> = Vec::new();
    for &s in &cert.j_class {
        if !l_classes.iter().any(|c| c.contains(&s)) {
            l_classes.push(green.l.class(s).to_vec());
        }
    }
    let of = |e: usize| l_classes.iter().position(|c| c.contains(&e));
    let mut act = Vec::with_capacity(l_classes.len() * m.size());
    for c in &l_classes {
        for s in 0..m.size() {
            act.push(of(m.mul(c[0], s)));
        }
    }
    let action = PartialAction::from_table(l_classes.len(), m.size(), act);

    let mut maps: Vec<Vec<Option<usize>>> = Vec::new();
    let mut index: HashMap<Vec<Option<usize>>, usize> = HashMap::new();
    let mut quotient = Vec::with_capacity(m.size());
    let mut names = Vec::new();
    for s in 0..m.size() {
        let f = action.map_of(s);
        let k = *index.entry(f.clone()).or_insert_with(|| {
            maps.push(f);
            names.push(m.name(s));
            maps.len() - 1
        });
        quotient.push(k);
    }
    let generators = m.generators().iter().map(|(x, &g)| (x.clone(), quotient[g])).collect();
    let monoid = FiniteMonoid::from_elements(
        &maps,
        quotient[m.identity()],
        |f, g| f.iter().map(|p| p.and_then(|q| g[q])).collect(),
        generators,
        Some(names),
    )?;
    Ok(Rlm { l_classes, action, monoid, quotient })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::monoid::check_group_mapping;

    #[test]
    fn m1_acts_on_two_columns() {
        let m = crate::fixtures::m1();
        let cert = check_group_mapping(&m).unwrap();
        let r = rlm(&m, &cert).unwrap();
        assert_eq!(r.l_classes, vec![vec![2, 4, 6, 8], vec![3, 5, 7, 9]]);
        // identity, empty map, and the two constant maps
        assert_eq!(r.monoid.size(), 4);
        assert!(r.monoid.size() < m.size());
        // a triple sends every column to its own column
        let t = m.element_by_name("a1.g.b0").unwrap();
        assert_eq!(r.action.map_of(t), vec![Some(0), Some(0)]);
        assert_eq!(r.action.map_of(cert.zero), vec![None, None]);
    }

    #[test]
    fn quotient_is_a_homomorphism() {
        let m = crate::fixtures::m1();
        let cert = check_group_mapping(&m).unwrap();
        let r = rlm(&m, &cert).unwrap();
        for a in 0..m.size() {
            for b in 0..m.size() {
                assert_eq!(r.quotient[m.mul(a, b)], r.monoid.mul(r.quotient[a], r.quotient[b]));
            }
        }
    }
}
