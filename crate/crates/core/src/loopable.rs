//! Type II submonoids, the Type I oracle boundary, and n-loopability.

use std::collections::BTreeSet;
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::monoid::FiniteMonoid;

/// K_G of the submonoid `sub` of `m`: the least submonoid of `sub` closed
/// under weak conjugation s ↦ asb, bsa for a, b ∈ sub with aba = a.
pub fn kg(m: &FiniteMonoid, sub: &[usize]) -> Vec<usize> {
    let pairs: Vec<(usize, usize)> = sub
        .iter()
        .flat_map(|&a| sub.iter().map(move |&b| (a, b)))
        .filter(|&(a, b)| m.mul(m.mul(a, b), a) == a)
        .collect();
    let mut inside = vec![false; m.size()];
    let mut elems = vec![m.identity()];
    inside[m.identity()] = true;
    let mut i = 0;
    while i < elems.len() {
        let s = elems[i];
        let mut fresh = Vec::new();
        for &(a, b) in &pairs {
            fresh.push(m.mul(m.mul(a, s), b));
            fresh.push(m.mul(m.mul(b, s), a));
        }
        for &t in &elems[..=i] {
            fresh.push(m.mul(s, t));
            fresh.push(m.mul(t, s));
        }
        for t in fresh {
            if !inside[t] {
                inside[t] = true;
                elems.push(t);
            }
        }
        i += 1;
    }
    elems.sort_unstable();
    elems
}

/// K_G of the whole monoid.
pub fn kg_all(m: &FiniteMonoid) -> Vec<usize> {
    kg(m, &(0..m.size()).collect::<Vec<_>>())
}

pub fn is_submonoid(m: &FiniteMonoid, sub: &[usize]) -> bool {
    let set: BTreeSet<usize> = sub.iter().copied().collect();
    set.contains(&m.identity()) && sub.iter().all(|&a| sub.iter().all(|&b| set.contains(&m.mul(a, b))))
}

/// Where Type I submonoids come from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "submonoids", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum TypeIOracle {
    /// Only {1}, which is Type I for every monoid.
    Trivial,
    /// Submonoids the user vouches for.  Nothing here is checked beyond
    /// closure; reports tag them as unverified assertions.
    Declared(Vec<Vec<usize>>),
}

impl TypeIOracle {
    /// `trivial` or `file:<path>` (a JSON array of element-index arrays).
    pub fn from_spec(spec: &str) -> Result<Self> {
        if spec == "trivial" {
            return Ok(TypeIOracle::Trivial);
        }
        let path = spec
            .strip_prefix("file:")
            .ok_or_else(|| Error::Parse(format!("oracle `{spec}`: expected `trivial` or `file:<path>`")))?;
        Self::read(Path::new(path))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let subs: Vec<Vec<usize>> = serde_json::from_str(&text)
            .map_err(|e| Error::Parse(format!("{}: line {}: {e}", path.display(), e.line())))?;
        Ok(TypeIOracle::Declared(subs))
    }

    pub fn validate(&self, m: &FiniteMonoid) -> Result<()> {
        if let TypeIOracle::Declared(subs) = self {
            for s in subs {
                if s.iter().any(|&e| e >= m.size()) {
                    return Err(Error::NotASubmonoid(format!("{s:?} names elements outside the monoid")));
                }
                if !is_submonoid(m, s) {
                    return Err(Error::NotASubmonoid(format!("{s:?} is not closed or lacks the identity")));
                }
            }
        }
        Ok(())
    }

    pub fn is_trivial(&self) -> bool {
        matches!(self, TypeIOracle::Trivial)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Candidate {
    pub elements: Vec<usize>,
    /// True for user-declared submonoids.
    pub unverified_assertion: bool,
}

pub fn type_i_candidates(m: &FiniteMonoid, oracle: &TypeIOracle) -> Result<Vec<Candidate>> {
    oracle.validate(m)?;
    let trivial = Candidate { elements: vec![m.identity()], unverified_assertion: false };
    Ok(match oracle {
        TypeIOracle::Trivial => vec![trivial],
        TypeIOracle::Declared(subs) => subs
            .iter()
            .map(|s| {
                let mut elements = s.clone();
                elements.sort_unstable();
                elements.dedup();
                Candidate { elements, unverified_assertion: true }
            })
            .collect(),
    })
}

/// One step of the recursion: s ∈ K_G(T) for the Type I submonoid T.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ChainStep {
    pub type_i: Vec<usize>,
    pub kg: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LoopableCert {
    pub element: usize,
    pub level: usize,
    pub chain: Vec<ChainStep>,
}

/// Certify `s` as n-loopable, or return `None`.
///
/// Inside K_G(T) the candidates are the oracle's submonoids contained in
/// K_G(T), plus {1}.
pub fn n_loopable(m: &FiniteMonoid, s: usize, n: usize, oracle: &TypeIOracle) -> Result<Option<LoopableCert>> {
    let cands: Vec<Vec<usize>> = type_i_candidates(m, oracle)?.into_iter().map(|c| c.elements).collect();
    let all: Vec<usize> = (0..m.size()).collect();
    let mut chain = Vec::new();
    Ok(search(m, s, n, &all, &cands, &mut chain).then_some(LoopableCert { element: s, level: n, chain }))
}

fn search(
    m: &FiniteMonoid,
    s: usize,
    n: usize,
    within: &[usize],
    cands: &[Vec<usize>],
    chain: &mut Vec<ChainStep>,
) -> bool {
    if n == 0 {
        return within.binary_search(&s).is_ok();
    }
    let mut local: Vec<Vec<usize>> =
        cands.iter().filter(|t| t.iter().all(|e| within.binary_search(e).is_ok())).cloned().collect();
    if !local.iter().any(|t| *t == [m.identity()]) {
        local.push(vec![m.identity()]);
    }
    for t in local {
        let k = kg(m, &t);
        if k.binary_search(&s).is_err() {
            continue;
        }
        chain.push(ChainStep { type_i: t, kg: k.clone() });
        if search(m, s, n - 1, &k, cands, chain) {
            return true;
        }
        chain.pop();
    }
    false
}

/// Which elements are certified n-loopable.
pub fn loopable_set(m: &FiniteMonoid, n: usize, oracle: &TypeIOracle) -> Result<Vec<bool>> {
    (0..m.size()).map(|s| Ok(n_loopable(m, s, n, oracle)?.is_some())).collect()
}
