//! Rees matrix coordinates for a regular J-class.

use std::collections::{BTreeMap, HashMap};

use super::{FiniteMonoid, Green, GroupMappingCert};
use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct ReesCoordinates {
    /// The maximal subgroup H_e, as a monoid in its own right.
    pub group: FiniteMonoid,
    /// Ambient element for each group index; index 0 is e.
    pub group_elems: Vec<usize>,
    /// R-classes of the J-class; row 0 contains e.
    pub rows: Vec<Vec<usize>>,
    /// L-classes of the J-class; column 0 contains e.
    pub cols: Vec<Vec<usize>>,
    /// `sandwich[b][a]` = C(b, a) as a group index, `None` for zero.
    pub sandwich: Vec<Vec<Option<usize>>>,
    coords: HashMap<usize, (usize, usize, usize)>,
    elems: HashMap<(usize, usize, usize), usize>,
}

impl ReesCoordinates {
    pub fn triple(&self, x: usize) -> Option<(usize, usize, usize)> {
        self.coords.get(&x).copied()
    }

    pub fn element(&self, a: usize, g: usize, b: usize) -> usize {
        self.elems[&(a, g, b)]
    }

    /// (a,g,b)(a',g',b') in coordinates; `None` is zero.
    pub fn mul(
        &self,
        (a, g, b): (usize, usize, usize),
        (a2, g2, b2): (usize, usize, usize),
    ) -> Option<(usize, usize, usize)> {
        self.sandwich[b][a2].map(|c| (a, self.group.mul(self.group.mul(g, c), g2), b2))
    }

    pub fn inverse(&self, g: usize) -> usize {
        (0..self.group.size()).find(|&h| self.group.mul(g, h) == self.group.identity()).unwrap()
    }
}

pub fn rees_coordinatize(m: &FiniteMonoid, cert: &GroupMappingCert) -> Result<ReesCoordinates> {
    let green = super::green_classes(m);
    rees_coordinatize_at(m, &green, &cert.j_class, cert.group_identity)
}

/// Coordinatize the J-class `j_class` around the idempotent `e` in it.
pub fn rees_coordinatize_at(m: &FiniteMonoid, green: &Green, j_class: &[usize], e: usize) -> Result<ReesCoordinates> {
    if !m.is_idempotent(e) || !j_class.contains(&e) {
        return Err(Error::NotRegular(format!("{} is not an idempotent of the class", m.name(e))));
    }
    let mut rows: Vec<Vec<usize>> = vec![green.r.class(e).to_vec()];
    let mut cols: Vec<Vec<usize>> = vec![green.l.class(e).to_vec()];
    for &s in j_class {
        if !rows.iter().any(|c| c.contains(&s)) {
            rows.push(green.r.class(s).to_vec());
        }
        if !cols.iter().any(|c| c.contains(&s)) {
            cols.push(green.l.class(s).to_vec());
        }
    }
    let mut group_elems = green.h.class(e).to_vec();
    group_elems.retain(|&x| x != e);
    group_elems.insert(0, e);
    let gpos: HashMap<usize, usize> = group_elems.iter().enumerate().map(|(i, &x)| (x, i)).collect();
    let gn = group_elems.len();
    let table = group_elems
        .iter()
        .flat_map(|&a| group_elems.iter().map(move |&b| (a, b)))
        .map(|(a, b)| gpos[&m.mul(a, b)])
        .collect();
    let names: Vec<String> = group_elems.iter().map(|&x| m.name(x)).collect();
    let gens: BTreeMap<String, usize> = names.iter().cloned().zip(0..gn).collect();
    let group = FiniteMonoid::new(gn, table, 0, gens, Some(names))?;
    let inv = |g: usize| (0..gn).find(|&h| group.mul(g, h) == 0).unwrap();

    let le = green.l.class(e);
    let re = green.r.class(e);
    let mut r_rep: Vec<usize> = rows
        .iter()
        .map(|row| if row.contains(&e) { e } else { *row.iter().find(|x| le.contains(x)).unwrap() })
        .collect();
    let mut l_rep: Vec<usize> = cols
        .iter()
        .map(|col| if col.contains(&e) { e } else { *col.iter().find(|x| re.contains(x)).unwrap() })
        .collect();
    let entry = |l: usize, r: usize| gpos.get(&m.mul(l, r)).copied();

    // normalize the first row of C, then the first column
    let l0 = l_rep[0];
    for r in r_rep.iter_mut() {
        if let Some(c) = entry(l0, *r) {
            *r = m.mul(*r, group_elems[inv(c)]);
        }
    }
    let r0 = r_rep[0];
    for l in l_rep.iter_mut() {
        if let Some(d) = entry(*l, r0) {
            *l = m.mul(group_elems[inv(d)], *l);
        }
    }
    let sandwich: Vec<Vec<Option<usize>>> =
        (0..cols.len()).map(|b| (0..rows.len()).map(|a| entry(l_rep[b], r_rep[a])).collect()).collect();
    if let Some(b) = sandwich.iter().position(|row| row.iter().all(Option::is_none)) {
        return Err(Error::NotRegular(format!("sandwich row for column {b} is all zero")));
    }
    if let Some(a) = (0..rows.len()).find(|&a| sandwich.iter().all(|row| row[a].is_none())) {
        return Err(Error::NotRegular(format!("sandwich column for row {a} is all zero")));
    }

    let mut coords = HashMap::new();
    let mut elems = HashMap::new();
    for (a, &ra) in r_rep.iter().enumerate() {
        for (b, &lb) in l_rep.iter().enumerate() {
            for (g, &x) in group_elems.iter().enumerate() {
                let t = m.mul(m.mul(ra, x), lb);
                coords.insert(t, (a, g, b));
                elems.insert((a, g, b), t);
            }
        }
    }
    if coords.len() != j_class.len() || !j_class.iter().all(|x| coords.contains_key(x)) {
        return Err(Error::NotRegular("coordinates do not cover the J-class bijectively".into()));
    }
    Ok(ReesCoordinates { group, group_elems, rows, cols, sandwich, coords, elems })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::monoid::{check_group_mapping, cyclic_group, green_classes, rees_with_identity, ReesElem};

    #[test]
    fn m1_recovers_its_sandwich() {
        let m = crate::fixtures::m1();
        let cert = check_group_mapping(&m).unwrap();
        let rc = rees_coordinatize(&m, &cert).unwrap();
        assert_eq!((rc.rows.len(), rc.cols.len(), rc.group.size()), (2, 2, 2));
        // normalized: first row and column are the identity, the corner is g
        assert_eq!(rc.sandwich, vec![vec![Some(0), Some(0)], vec![Some(0), Some(1)]]);
    }

    #[test]
    fn m1_embedding_respects_products() {
        let m = crate::fixtures::m1();
        let cert = check_group_mapping(&m).unwrap();
        let rc = rees_coordinatize(&m, &cert).unwrap();
        for &x in &cert.j_class {
            for &y in &cert.j_class {
                let want = rc.mul(rc.triple(x).unwrap(), rc.triple(y).unwrap());
                assert_eq!(rc.triple(m.mul(x, y)), want);
                let (a, g, b) = rc.triple(x).unwrap();
                assert_eq!(rc.element(a, g, b), x);
            }
        }
    }

    #[test]
    fn one_by_one_rees_monoid() {
        let z = rees_with_identity(
            &cyclic_group(2),
            1,
            1,
            &[vec![Some(0)]],
            &[("g", ReesElem::Triple(0, 1, 0)), ("z", ReesElem::Zero)],
        )
        .unwrap();
        let green = green_classes(&z);
        let rc = rees_coordinatize_at(&z, &green, &[2, 3], 2).unwrap();
        assert_eq!((rc.rows.len(), rc.cols.len(), rc.group.size()), (1, 1, 2));
        assert_eq!(rc.sandwich, vec![vec![Some(0)]]);
    }
}
