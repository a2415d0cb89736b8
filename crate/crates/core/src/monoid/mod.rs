//! Finite monoids given by a multiplication table, with named generators.
//!
//! Elements are dense indices `0..size`.  Everything here is immutable once
//! built, so a `FiniteMonoid` can be shared freely between threads.

mod build;
mod green;
mod group_mapping;
pub mod io;
mod rees;
mod rlm;

use std::collections::{BTreeMap, HashMap, VecDeque};

use crate::error::{Error, Result};

pub use build::{cyclic_group, flip_flop, free_semilattice, rees_with_identity, trivial, ReesElem};
pub use green::{green_classes, Classes, Green};
pub use group_mapping::{check_group_mapping, GroupMappingCert};
pub use rees::{rees_coordinatize, rees_coordinatize_at, ReesCoordinates};
pub use rlm::{rlm, Rlm};

/// Above this size associativity is only spot-checked at load time.
pub const EAGER_ASSOC_LIMIT: usize = 512;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteMonoid {
    size: usize,
    table: Vec<u32>,
    identity: usize,
    generators: BTreeMap<String, usize>,
    names: Option<Vec<String>>,
}

impl FiniteMonoid {
    /// Build and validate.  `table` is row-major: `table[a * size + b] = ab`.
    pub fn new(
        size: usize,
        table: Vec<usize>,
        identity: usize,
        generators: BTreeMap<String, usize>,
        names: Option<Vec<String>>,
    ) -> Result<Self> {
        if size == 0 {
            return Err(Error::InvalidMonoid("size must be positive".into()));
        }
        if table.len() != size * size {
            return Err(Error::InvalidMonoid(format!("table has {} entries, expected {}", table.len(), size * size)));
        }
        if let Some(bad) = table.iter().position(|&v| v >= size) {
            return Err(Error::InvalidMonoid(format!(
                "table entry ({}, {}) = {} is out of range",
                bad / size,
                bad % size,
                table[bad]
            )));
        }
        if identity >= size {
            return Err(Error::InvalidMonoid(format!("identity {identity} out of range")));
        }
        if let Some(n) = &names {
            if n.len() != size {
                return Err(Error::InvalidMonoid(format!("{} names given for {} elements", n.len(), size)));
            }
        }
        for (name, &g) in &generators {
            if g >= size {
                return Err(Error::InvalidMonoid(format!("generator {name} = {g} out of range")));
            }
            if !is_token(name) {
                return Err(Error::InvalidMonoid(format!("bad generator name `{name}`")));
            }
        }
        let m =
            FiniteMonoid { size, table: table.into_iter().map(|v| v as u32).collect(), identity, generators, names };
        m.check_identity()?;
        m.check_associative()?;
        m.check_generated()?;
        Ok(m)
    }

    fn check_identity(&self) -> Result<()> {
        for a in 0..self.size {
            if self.mul(self.identity, a) != a || self.mul(a, self.identity) != a {
                return Err(Error::InvalidMonoid(format!(
                    "{} is not a two-sided identity (fails at {a})",
                    self.identity
                )));
            }
        }
        Ok(())
    }

    fn check_associative(&self) -> Result<()> {
        let n = self.size;
        let bad =
            |a: usize, b: usize, c: usize| Error::InvalidMonoid(format!("table is not associative at ({a}, {b}, {c})"));
        if n <= EAGER_ASSOC_LIMIT {
            for a in 0..n {
                for b in 0..n {
                    let ab = self.mul(a, b);
                    for c in 0..n {
                        if self.mul(ab, c) != self.mul(a, self.mul(b, c)) {
                            return Err(bad(a, b, c));
                        }
                    }
                }
            }
        } else {
            // deterministic spread of triples; a linear congruential walk is plenty
            let mut x: u64 = 0x9e37_79b9_7f4a_7c15;
            for _ in 0..200_000 {
                x = x.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                let a = (x >> 33) as usize % n;
                let b = (x >> 13) as usize % n;
                let c = (x >> 3) as usize % n;
                if self.mul(self.mul(a, b), c) != self.mul(a, self.mul(b, c)) {
                    return Err(bad(a, b, c));
                }
            }
        }
        Ok(())
    }

    fn check_generated(&self) -> Result<()> {
        let reach = self.bfs_words();
        if let Some(miss) = reach.iter().position(|w| w.is_none()) {
            return Err(Error::InvalidMonoid(format!("element {} is not a product of generators", self.name(miss))));
        }
        Ok(())
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a * self.size + b] as usize
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn generators(&self) -> &BTreeMap<String, usize> {
        &self.generators
    }

    pub fn generator(&self, name: &str) -> Option<usize> {
        self.generators.get(name).copied()
    }

    pub fn names(&self) -> Option<&[String]> {
        self.names.as_deref()
    }

    pub fn name(&self, i: usize) -> String {
        match &self.names {
            Some(n) => n[i].clone(),
            None => i.to_string(),
        }
    }

    /// Row-major table as plain indices.
    pub fn table(&self) -> Vec<usize> {
        self.table.iter().map(|&v| v as usize).collect()
    }

    /// Element index for a display name (or a bare index when unnamed).
    pub fn element_by_name(&self, s: &str) -> Option<usize> {
        match &self.names {
            Some(n) => n.iter().position(|x| x == s),
            None => s.parse().ok().filter(|&i: &usize| i < self.size),
        }
    }

    pub fn product<I: IntoIterator<Item = usize>>(&self, xs: I) -> usize {
        xs.into_iter().fold(self.identity, |acc, x| self.mul(acc, x))
    }

    pub fn eval_word<S: AsRef<str>>(&self, word: &[S]) -> Result<usize> {
        let mut acc = self.identity;
        for x in word {
            let g = self.generator(x.as_ref()).ok_or_else(|| Error::UnknownLetter(x.as_ref().to_string()))?;
            acc = self.mul(acc, g);
        }
        Ok(acc)
    }

    /// Shortest, then lexicographically least (by generator name), word for
    /// every element; `None` for elements the generators do not reach.
    pub fn bfs_words(&self) -> Vec<Option<Vec<String>>> {
        let mut word: Vec<Option<Vec<String>>> = vec![None; self.size];
        word[self.identity] = Some(Vec::new());
        let mut queue = VecDeque::from([self.identity]);
        while let Some(s) = queue.pop_front() {
            for (name, &g) in &self.generators {
                let t = self.mul(s, g);
                if word[t].is_none() {
                    let mut w = word[s].clone().unwrap();
                    w.push(name.clone());
                    word[t] = Some(w);
                    queue.push_back(t);
                }
            }
        }
        word
    }

    /// Smallest `(index, period)` with `s^(index+period) = s^index`, index ≥ 1.
    pub fn index_period(&self, s: usize) -> (usize, usize) {
        let mut seen: HashMap<usize, usize> = HashMap::new();
        let mut p = s;
        let mut k = 1;
        loop {
            if let Some(&first) = seen.get(&p) {
                return (first, k - first);
            }
            seen.insert(p, k);
            p = self.mul(p, s);
            k += 1;
        }
    }

    pub fn pow(&self, s: usize, k: usize) -> usize {
        (0..k).fold(self.identity, |acc, _| self.mul(acc, s))
    }

    /// The exponent `k ≥ 1` with `s^k` idempotent: the least multiple of the
    /// period that is at least the index.
    pub fn omega_exponent(&self, s: usize) -> usize {
        let (i, p) = self.index_period(s);
        i.div_ceil(p) * p
    }

    /// The unique idempotent power of `s`.
    pub fn omega(&self, s: usize) -> usize {
        self.pow(s, self.omega_exponent(s))
    }

    pub fn is_idempotent(&self, s: usize) -> bool {
        self.mul(s, s) == s
    }

    pub fn is_aperiodic_elt(&self, s: usize) -> bool {
        let w = self.omega(s);
        self.mul(w, s) == w
    }

    pub fn is_aperiodic(&self) -> bool {
        (0..self.size).all(|s| self.is_aperiodic_elt(s))
    }

    pub fn is_zero(&self, z: usize) -> bool {
        (0..self.size).all(|m| self.mul(z, m) == z && self.mul(m, z) == z)
    }

    pub fn zero(&self) -> Option<usize> {
        (0..self.size).find(|&z| self.is_zero(z))
    }

    /// Build from a list of pairwise distinct transformations, closed under
    /// `compose`.  `elems[identity]` must be the identity transformation.
    pub fn from_elements<T, F>(
        elems: &[T],
        identity: usize,
        compose: F,
        generators: BTreeMap<String, usize>,
        names: Option<Vec<String>>,
    ) -> Result<Self>
    where
        T: Eq + std::hash::Hash,
        F: Fn(&T, &T) -> T,
    {
        let index: HashMap<&T, usize> = elems.iter().enumerate().map(|(i, e)| (e, i)).collect();
        let n = elems.len();
        let mut table = Vec::with_capacity(n * n);
        for a in elems {
            for b in elems {
                let c = compose(a, b);
                let k = *index
                    .get(&c)
                    .ok_or_else(|| Error::InvalidMonoid("element list is not closed under composition".into()))?;
                table.push(k);
            }
        }
        FiniteMonoid::new(n, table, identity, generators, names)
    }

    /// The submonoid table induced on `elems` (which must contain the
    /// identity and be closed), re-indexed in the given order.  Generators
    /// of the result are all its elements, named by their ambient names.
    pub fn induced(&self, elems: &[usize]) -> Result<(FiniteMonoid, Vec<usize>)> {
        let pos: HashMap<usize, usize> = elems.iter().enumerate().map(|(i, &e)| (e, i)).collect();
        let id = *pos.get(&self.identity).ok_or_else(|| Error::NotASubmonoid("missing the identity".into()))?;
        let mut table = Vec::with_capacity(elems.len() * elems.len());
        for &a in elems {
            for &b in elems {
                let c = self.mul(a, b);
                table.push(*pos.get(&c).ok_or_else(|| {
                    Error::NotASubmonoid(format!(
                        "{} * {} = {} leaves the subset",
                        self.name(a),
                        self.name(b),
                        self.name(c)
                    ))
                })?);
            }
        }
        let names: Vec<String> = elems.iter().map(|&e| sanitize(&self.name(e))).collect();
        let generators = names.iter().cloned().zip(0..elems.len()).collect();
        let m = FiniteMonoid::new(elems.len(), table, id, generators, Some(names))?;
        Ok((m, elems.to_vec()))
    }
}

/// A set of points acted on (partially) by a monoid from the right.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartialAction {
    points: usize,
    elements: usize,
    act: Vec<Option<u32>>,
}

impl PartialAction {
    /// Right multiplication restricted to `points`: `p·m` is defined when the
    /// product lands back in `points`.
    pub fn right_on(m: &FiniteMonoid, points: &[usize]) -> Self {
        let pos: HashMap<usize, usize> = points.iter().enumerate().map(|(i, &e)| (e, i)).collect();
        let mut act = Vec::with_capacity(points.len() * m.size());
        for &p in points {
            for s in 0..m.size() {
                act.push(pos.get(&m.mul(p, s)).map(|&q| q as u32));
            }
        }
        PartialAction { points: points.len(), elements: m.size(), act }
    }

    pub fn from_table(points: usize, elements: usize, act: Vec<Option<usize>>) -> Self {
        assert_eq!(act.len(), points * elements);
        PartialAction { points, elements, act: act.into_iter().map(|o| o.map(|v| v as u32)).collect() }
    }

    pub fn points(&self) -> usize {
        self.points
    }

    #[inline]
    pub fn act(&self, p: usize, m: usize) -> Option<usize> {
        self.act[p * self.elements + m].map(|v| v as usize)
    }

    /// The partial map of one element, as a vector over points.
    pub fn map_of(&self, m: usize) -> Vec<Option<usize>> {
        (0..self.points).map(|p| self.act(p, m)).collect()
    }
}

pub(crate) fn is_token(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| !c.is_whitespace() && !"{}|,()^*⊥\"".contains(c)) && s != "ε"
}

fn sanitize(s: &str) -> String {
    if is_token(s) {
        s.to_string()
    } else {
        s.chars().map(|c| if c.is_whitespace() || "{}|,()^*⊥\"".contains(c) { '_' } else { c }).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn omega_of_idempotent_is_itself() {
        let m = flip_flop();
        for s in 0..m.size() {
            assert!(m.is_idempotent(s));
            assert_eq!(m.omega(s), s);
            assert!(m.is_aperiodic_elt(s));
        }
    }

    #[test]
    fn omega_in_two_element_group() {
        let z2 = cyclic_group(2);
        let g = z2.generator("g").unwrap();
        assert_eq!(z2.omega(g), z2.identity());
        assert!(!z2.is_aperiodic_elt(g));
    }

    #[test]
    fn omega_of_nilpotent_is_zero() {
        // {1, n, 0} with n² = 0
        let table = vec![0, 1, 2, 1, 2, 2, 2, 2, 2];
        let gens = [("n".to_string(), 1), ("z".to_string(), 2)].into_iter().collect();
        let m = FiniteMonoid::new(3, table, 0, gens, None).unwrap();
        assert_eq!(m.omega(1), 2);
        assert!(m.is_aperiodic_elt(1));
    }

    #[test]
    fn omega_of_odd_period_is_found() {
        // Z₃: squaring g never reaches the identity, the cycle search does
        let z3 = cyclic_group(3);
        let g = z3.generator("g").unwrap();
        assert_eq!(z3.index_period(g), (1, 3));
        assert_eq!(z3.omega(g), z3.identity());
    }

    #[test]
    fn rejects_non_associative_table() {
        // 0 is the identity; 1·1 = 2, 1·2 = 1, 2·1 = 2, 2·2 = 2 breaks (1·1)·1 vs 1·(1·1)
        let table = vec![0, 1, 2, 1, 2, 1, 2, 2, 2];
        let gens = [("x".to_string(), 1)].into_iter().collect();
        let err = FiniteMonoid::new(3, table, 0, gens, None).unwrap_err();
        assert!(err.to_string().contains("associative"), "{err}");
    }

    #[test]
    fn rejects_ungenerated_element() {
        let table = vec![0, 1, 1, 1];
        let err = FiniteMonoid::new(2, table, 0, BTreeMap::new(), None).unwrap_err();
        assert!(err.to_string().contains("not a product of generators"), "{err}");
    }

    #[test]
    fn bfs_words_evaluate_back() {
        let m = crate::fixtures::m1();
        for (s, w) in m.bfs_words().into_iter().enumerate() {
            assert_eq!(m.eval_word(&w.unwrap()).unwrap(), s);
        }
    }
}
