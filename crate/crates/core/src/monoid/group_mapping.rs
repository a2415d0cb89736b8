use serde::Serialize;

use super::{green_classes, FiniteMonoid, Green};
use crate::error::{Error, GmReason, Result};

/// Evidence that M is a group mapping monoid, plus the choices made along
/// the way (ideal, distinguished R-class, maximal subgroup).
#[derive(Clone, Debug, Serialize)]
pub struct GroupMappingCert {
    /// The 0-minimal ideal I, zero included, sorted.
    pub ideal: Vec<usize>,
    pub zero: usize,
    /// I without its zero: a single regular J-class.
    pub j_class: Vec<usize>,
    /// The distinguished R-class R ⊆ I, sorted.  Positions in this vector
    /// are the point indices used by set-partitions.
    pub distinguished_r: Vec<usize>,
    pub max_subgroup: Vec<usize>,
    pub group_identity: usize,
    /// (m, m', i) with m·i ≠ m'·i, one per pair m < m'.
    pub faithful_left_witnesses: Vec<(usize, usize, usize)>,
    /// (m, m', i) with i·m ≠ i·m', one per pair m < m'.
    pub faithful_right_witnesses: Vec<(usize, usize, usize)>,
}

impl GroupMappingCert {
    pub fn r_len(&self) -> usize {
        self.distinguished_r.len()
    }

    /// Point index of an element of R.
    pub fn point_of(&self, e: usize) -> Option<usize> {
        self.distinguished_r.binary_search(&e).ok()
    }

    /// Re-check every stored witness against the table.
    pub fn witnesses_hold(&self, m: &FiniteMonoid) -> bool {
        self.faithful_left_witnesses.iter().all(|&(a, b, i)| m.mul(a, i) != m.mul(b, i))
            && self.faithful_right_witnesses.iter().all(|&(a, b, i)| m.mul(i, a) != m.mul(i, b))
    }
}

fn nontrivial_group_h_class(m: &FiniteMonoid, g: &Green, s: usize) -> bool {
    let h = g.h.class(s);
    h.len() > 1 && h.iter().any(|&e| m.is_idempotent(e))
}

pub fn check_group_mapping(m: &FiniteMonoid) -> Result<GroupMappingCert> {
    check_with(m, &green_classes(m))
}

pub(crate) fn check_with(m: &FiniteMonoid, g: &Green) -> Result<GroupMappingCert> {
    let n = m.size();
    let fail = |r| Err(Error::NotGroupMapping(r));
    if !(0..n).any(|s| nontrivial_group_h_class(m, g, s)) {
        return fail(GmReason::NoNontrivialGroup);
    }
    let Some(zero) = m.zero() else {
        return fail(GmReason::No0MinimalRegularIdeal);
    };
    // 0-minimal J-classes: J ≠ {0} whose ideal is exactly J ∪ {0}
    let candidate = g.j.classes.iter().find(|jc| {
        let s = jc[0];
        if s == zero {
            return false;
        }
        let ideal = g.ideal(s);
        let minimal = ideal.len() == jc.len() + 1 && ideal.binary_search(&zero).is_ok();
        minimal && jc.iter().any(|&e| m.is_idempotent(e)) && jc.iter().any(|&e| nontrivial_group_h_class(m, g, e))
    });
    let Some(jc) = candidate else {
        return fail(GmReason::No0MinimalRegularIdeal);
    };
    let mut ideal = jc.clone();
    ideal.push(zero);
    ideal.sort_unstable();

    let mut left = Vec::new();
    let mut right = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            match ideal.iter().find(|&&i| m.mul(a, i) != m.mul(b, i)) {
                Some(&i) => left.push((a, b, i)),
                None => return fail(GmReason::LeftUnfaithful),
            }
            match ideal.iter().find(|&&i| m.mul(i, a) != m.mul(i, b)) {
                Some(&i) => right.push((a, b, i)),
                None => return fail(GmReason::RightUnfaithful),
            }
        }
    }

    let first = *jc.iter().find(|&&e| g.h.class(e).len() > 1).expect("regular J with a group");
    let distinguished_r = g.r.class(first).to_vec();
    let e = *distinguished_r
        .iter()
        .find(|&&e| m.is_idempotent(e))
        .ok_or_else(|| Error::NotRegular("distinguished R-class has no idempotent".into()))?;
    Ok(GroupMappingCert {
        ideal,
        zero,
        j_class: jc.clone(),
        distinguished_r,
        max_subgroup: g.h.class(e).to_vec(),
        group_identity: e,
        faithful_left_witnesses: left,
        faithful_right_witnesses: right,
    })
}
