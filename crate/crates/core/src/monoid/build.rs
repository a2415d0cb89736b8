//! Small constructors for the monoids the tests and fixtures lean on.

use std::collections::BTreeMap;

use super::FiniteMonoid;
use crate::error::{Error, Result};

pub fn trivial() -> FiniteMonoid {
    FiniteMonoid::new(1, vec![0], 0, BTreeMap::new(), Some(vec!["1".into()])).unwrap()
}

/// Z_n written multiplicatively, generated by `g`; element k is g^k.
pub fn cyclic_group(n: usize) -> FiniteMonoid {
    assert!(n >= 1);
    let table = (0..n).flat_map(|a| (0..n).map(move |b| (a + b) % n)).collect();
    let names = (0..n)
        .map(|k| match k {
            0 => "e".to_string(),
            1 => "g".to_string(),
            _ => format!("g{k}"),
        })
        .collect();
    let gens = if n > 1 { [("g".to_string(), 1)].into_iter().collect() } else { BTreeMap::new() };
    FiniteMonoid::new(n, table, 0, gens, Some(names)).unwrap()
}

/// {1, a, b} with xy = y for x, y ∈ {a, b}.
pub fn flip_flop() -> FiniteMonoid {
    let table = vec![0, 1, 2, 1, 1, 2, 2, 1, 2];
    let gens = [("a".to_string(), 1), ("b".to_string(), 2)].into_iter().collect();
    FiniteMonoid::new(3, table, 0, gens, Some(vec!["1".into(), "a".into(), "b".into()])).unwrap()
}

/// Subsets of k atoms under union (identity ∅): a 2^k element semilattice.
pub fn free_semilattice(k: usize) -> FiniteMonoid {
    let n = 1usize << k;
    let table = (0..n).flat_map(|a| (0..n).map(move |b| a | b)).collect();
    let names = (0..n)
        .map(|s| {
            if s == 0 {
                "1".to_string()
            } else {
                (0..k).filter(|i| s >> i & 1 == 1).map(|i| format!("e{i}")).collect::<Vec<_>>().join("")
            }
        })
        .collect();
    let gens = (0..k).map(|i| (format!("e{i}"), 1 << i)).collect();
    FiniteMonoid::new(n, table, 0, gens, Some(names)).unwrap()
}

/// One element of a Rees matrix monoid with adjoined identity.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReesElem {
    Identity,
    Zero,
    Triple(usize, usize, usize),
}

/// ℳ⁰(G, A, B, C) ∪ {I}.  `sandwich[b][a]` is C(b, a) as an element of
/// `group`, or `None` for zero.  Index 0 is I, index 1 is 0, and the
/// triple (a, g, b) sits at 2 + (a·|G| + g)·|B| + b.  Element names are
/// `I`, `0` and `a{a}.{g}.b{b}`.
pub fn rees_with_identity(
    group: &FiniteMonoid,
    rows: usize,
    cols: usize,
    sandwich: &[Vec<Option<usize>>],
    generators: &[(&str, ReesElem)],
) -> Result<FiniteMonoid> {
    let gn = group.size();
    if sandwich.len() != cols || sandwich.iter().any(|r| r.len() != rows) {
        return Err(Error::InvalidMonoid("sandwich matrix must be |B| × |A|".into()));
    }
    let n = 2 + rows * gn * cols;
    let idx = |e: ReesElem| match e {
        ReesElem::Identity => 0,
        ReesElem::Zero => 1,
        ReesElem::Triple(a, g, b) => 2 + (a * gn + g) * cols + b,
    };
    let elem = |i: usize| match i {
        0 => ReesElem::Identity,
        1 => ReesElem::Zero,
        _ => {
            let k = i - 2;
            ReesElem::Triple(k / (gn * cols), (k / cols) % gn, k % cols)
        }
    };
    let mut table = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let p = match (elem(i), elem(j)) {
                (ReesElem::Identity, y) => y,
                (x, ReesElem::Identity) => x,
                (ReesElem::Zero, _) | (_, ReesElem::Zero) => ReesElem::Zero,
                (ReesElem::Triple(a, g, b), ReesElem::Triple(a2, g2, b2)) => match sandwich[b][a2] {
                    Some(c) => ReesElem::Triple(a, group.mul(group.mul(g, c), g2), b2),
                    None => ReesElem::Zero,
                },
            };
            table.push(idx(p));
        }
    }
    let names = (0..n)
        .map(|i| match elem(i) {
            ReesElem::Identity => "I".to_string(),
            ReesElem::Zero => "0".to_string(),
            ReesElem::Triple(a, g, b) => format!("a{a}.{}.b{b}", group.name(g)),
        })
        .collect();
    let gens = generators.iter().map(|(name, e)| (name.to_string(), idx(*e))).collect();
    FiniteMonoid::new(n, table, 0, gens, Some(names))
}
