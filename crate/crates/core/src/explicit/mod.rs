//! Exact backend: flows as explicit meet-closed relations on a fully
//! materialized lattice SP(M,X).
//!
//! A [`FlowRelation`] is stored as a bit matrix over lattice indices: row
//! `a` holds every `b` with `(a, b)` stable.  The row doubles as the
//! per-source adjacency index that composition and closure walk.

mod automaton;
mod nflow;

use std::collections::HashMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::sp::{self, SetPartition};

pub use automaton::{least_flow, sample1, sample2, Edge, LAutomaton};
pub use nflow::{ExactStates, FlowSystem, LoopRule, NFlowMonoid, FLOW_MONOID_LIMIT};

/// Debug builds re-verify meet-closedness of every composite and join on
/// lattices up to this size (|R| ≤ 3); the check is quadratic in the pair
/// count and swamps everything else on larger lattices.
const VERIFY_MAX: usize = 15;

/// SP over n points, every element indexed, with meet and order tables.
pub struct Lattice {
    n: usize,
    elems: Vec<SetPartition>,
    index: HashMap<SetPartition, u32>,
    meet: Vec<u32>,
    /// up[a]: bit row of all b ≥ a.
    up: Vec<u64>,
    words: usize,
    bottom: u32,
    top: u32,
}

impl fmt::Debug for Lattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Lattice(|R|={}, |L|={})", self.n, self.elems.len())
    }
}

impl Lattice {
    pub fn new(n: usize) -> Result<Arc<Self>> {
        Self::with_bound(n, sp::MATERIALIZE_BOUND)
    }

    pub fn with_bound(n: usize, bound: usize) -> Result<Arc<Self>> {
        let elems = sp::materialize_lattice(n, bound)?;
        let len = elems.len();
        let index: HashMap<SetPartition, u32> = elems.iter().enumerate().map(|(i, e)| (e.clone(), i as u32)).collect();
        let words = len.div_ceil(64);
        let mut meet = vec![0u32; len * len];
        let mut up = vec![0u64; len * words];
        for a in 0..len {
            for b in 0..len {
                meet[a * len + b] = index[&elems[a].meet(&elems[b])];
                if elems[a].leq(&elems[b]) {
                    up[a * words + b / 64] |= 1 << (b % 64);
                }
            }
        }
        let bottom = index[&SetPartition::bottom(n)];
        let top = index[&SetPartition::top(n)];
        Ok(Arc::new(Lattice { n, elems, index, meet, up, words, bottom, top }))
    }

    pub fn points(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn elem(&self, i: u32) -> &SetPartition {
        &self.elems[i as usize]
    }

    pub fn elems(&self) -> &[SetPartition] {
        &self.elems
    }

    pub fn index_of(&self, p: &SetPartition) -> u32 {
        self.index[p]
    }

    pub fn bottom(&self) -> u32 {
        self.bottom
    }

    pub fn top(&self) -> u32 {
        self.top
    }

    #[inline]
    pub fn meet(&self, a: u32, b: u32) -> u32 {
        self.meet[a as usize * self.elems.len() + b as usize]
    }

    #[inline]
    pub fn leq(&self, a: u32, b: u32) -> bool {
        self.up[a as usize * self.words + b as usize / 64] >> (b % 64) & 1 == 1
    }

    fn up_row(&self, a: u32) -> &[u64] {
        &self.up[a as usize * self.words..(a as usize + 1) * self.words]
    }
}

fn iter_bits(row: &[u64]) -> impl Iterator<Item = u32> + '_ {
    row.iter().enumerate().flat_map(|(w, &bits)| {
        let mut b = bits;
        std::iter::from_fn(move || {
            if b == 0 {
                None
            } else {
                let i = b.trailing_zeros();
                b &= b - 1;
                Some(w as u32 * 64 + i)
            }
        })
    })
}

/// An element of C(L²): a meet-closed set of stable pairs.
#[derive(Clone)]
pub struct FlowRelation {
    lat: Arc<Lattice>,
    bits: Vec<u64>,
}

impl PartialEq for FlowRelation {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.lat, &other.lat) && self.bits == other.bits
    }
}
impl Eq for FlowRelation {}

impl Hash for FlowRelation {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.bits.hash(state);
    }
}

impl fmt::Debug for FlowRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FlowRelation({} stable pairs)", self.pair_count())
    }
}

impl FlowRelation {
    fn empty(lat: &Arc<Lattice>) -> Self {
        FlowRelation { lat: lat.clone(), bits: vec![0; lat.len() * lat.words] }
    }

    /// Build from a predicate on lattice elements.
    pub fn from_fn(lat: &Arc<Lattice>, mut stable: impl FnMut(&SetPartition, &SetPartition) -> bool) -> Self {
        let mut f = Self::empty(lat);
        for a in 0..lat.len() as u32 {
            for b in 0..lat.len() as u32 {
                if stable(lat.elem(a), lat.elem(b)) {
                    f.set(a, b);
                }
            }
        }
        f
    }

    pub fn from_pairs(lat: &Arc<Lattice>, pairs: impl IntoIterator<Item = (u32, u32)>) -> Self {
        let mut f = Self::empty(lat);
        for (a, b) in pairs {
            f.set(a, b);
        }
        f
    }

    /// The multiplicative identity: the diagonal of L.
    pub fn identity(lat: &Arc<Lattice>) -> Self {
        Self::diagonal(lat, 0..lat.len() as u32)
    }

    /// The bottom of C(L²): every pair is stable.
    pub fn everything(lat: &Arc<Lattice>) -> Self {
        let mut f = Self::empty(lat);
        for a in 0..lat.len() as u32 {
            for b in 0..lat.len() as u32 {
                f.set(a, b);
            }
        }
        f
    }

    /// The partial identity on a meet-closed subset of L (a one-variable
    /// closure seen as a two-variable one).
    pub fn diagonal(lat: &Arc<Lattice>, on: impl IntoIterator<Item = u32>) -> Self {
        Self::from_pairs(lat, on.into_iter().map(|a| (a, a)))
    }

    /// Free flow along a letter acting on the points by `map`: (U,P) → (Y,Q)
    /// is stable iff Ux ⊆ Y and x induces a well-defined injective partial
    /// map U/P → Y/Q.
    pub fn free(lat: &Arc<Lattice>, map: &[Option<usize>]) -> Self {
        Self::from_fn(lat, |u, y| word_pair_stable(map, u, y))
    }

    pub fn lattice(&self) -> &Arc<Lattice> {
        &self.lat
    }

    #[inline]
    fn set(&mut self, a: u32, b: u32) {
        let w = self.lat.words;
        self.bits[a as usize * w + b as usize / 64] |= 1 << (b % 64);
    }

    #[inline]
    pub fn contains(&self, a: u32, b: u32) -> bool {
        let w = self.lat.words;
        self.bits[a as usize * w + b as usize / 64] >> (b % 64) & 1 == 1
    }

    fn row(&self, a: u32) -> &[u64] {
        let w = self.lat.words;
        &self.bits[a as usize * w..(a as usize + 1) * w]
    }

    pub fn pairs(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        (0..self.lat.len() as u32).flat_map(move |a| iter_bits(self.row(a)).map(move |b| (a, b)))
    }

    pub fn pair_count(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    fn same_lattice(&self, other: &Self) -> Result<()> {
        if Arc::ptr_eq(&self.lat, &other.lat) {
            Ok(())
        } else {
            Err(Error::LatticeMismatch)
        }
    }

    /// Relational composition: first self, then other.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        self.same_lattice(other)?;
        let w = self.lat.words;
        let mut out = Self::empty(&self.lat);
        for a in 0..self.lat.len() as u32 {
            let dst = a as usize * w;
            for c in iter_bits(self.row(a)) {
                let src = other.row(c);
                for (o, s) in out.bits[dst..dst + w].iter_mut().zip(src) {
                    *o |= s;
                }
            }
        }
        debug_assert!(self.lat.len() > VERIFY_MAX || out.is_meet_closed());
        Ok(out)
    }

    /// `compose` for relations known to share a lattice.
    pub fn then(&self, other: &Self) -> Self {
        self.compose(other).expect("relations over one lattice")
    }

    /// Join in C(L²): intersect stable sets.
    pub fn join(&self, other: &Self) -> Result<Self> {
        self.same_lattice(other)?;
        let bits = self.bits.iter().zip(&other.bits).map(|(a, b)| a & b).collect();
        let out = FlowRelation { lat: self.lat.clone(), bits };
        debug_assert!(self.lat.len() > VERIFY_MAX || out.is_meet_closed());
        Ok(out)
    }

    /// f ≤ g in closure order: Im f ⊇ Im g.
    pub fn leq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.lat, &other.lat) && other.bits.iter().zip(&self.bits).all(|(g, f)| g & !f == 0)
    }

    /// The least stable pair above (a, b).
    pub fn closure(&self, a: u32, b: u32) -> (u32, u32) {
        let lat = &*self.lat;
        let up_b = lat.up_row(b);
        let mut best: Option<(u32, u32)> = None;
        for c in iter_bits(lat.up_row(a)) {
            let row = self.row(c);
            for (w, (&r, &u)) in row.iter().zip(up_b).enumerate() {
                let mut hits = r & u;
                while hits != 0 {
                    let d = w as u32 * 64 + hits.trailing_zeros();
                    hits &= hits - 1;
                    best = Some(match best {
                        None => (c, d),
                        Some((x, y)) => (lat.meet(x, c), lat.meet(y, d)),
                    });
                }
            }
        }
        best.expect("(top, top) is stable in every flow")
    }

    /// →f at ℓ: second coordinate of the closure of (ℓ, B).
    pub fn forward(&self, a: u32) -> u32 {
        self.closure(a, self.lat.bottom).1
    }

    /// ←f at ℓ: first coordinate of the closure of (ℓ, B).
    pub fn back(&self, a: u32) -> u32 {
        self.closure(a, self.lat.bottom).0
    }

    /// dom f̄ = {a : some (a, b) stable}.
    pub fn domain(&self) -> Vec<u32> {
        (0..self.lat.len() as u32).filter(|&a| self.row(a).iter().any(|&w| w != 0)).collect()
    }

    /// fix f̄ = {a : (a, a) stable}.
    pub fn fixed(&self) -> Vec<u32> {
        (0..self.lat.len() as u32).filter(|&a| self.contains(a, a)).collect()
    }

    pub fn backflow(&self) -> Self {
        Self::diagonal(&self.lat, self.domain())
    }

    pub fn star(&self) -> Self {
        Self::diagonal(&self.lat, self.fixed())
    }

    /// The idempotent power of f, found by walking powers until one repeats.
    pub fn omega(&self) -> Self {
        let mut powers: Vec<FlowRelation> = vec![self.clone()];
        let mut seen: HashMap<FlowRelation, usize> = HashMap::from([(self.clone(), 1)]);
        loop {
            let next = powers.last().unwrap().then(self);
            let k = powers.len() + 1;
            if let Some(&i) = seen.get(&next) {
                let p = k - i;
                let e = i.div_ceil(p) * p;
                return powers[e - 1].clone();
            }
            seen.insert(next.clone(), k);
            powers.push(next);
        }
    }

    pub fn omega_star(&self) -> Self {
        self.omega().then(&self.star())
    }

    pub fn is_idempotent(&self) -> bool {
        &self.then(self) == self
    }

    /// Meet-closed and containing (top, top).
    pub fn is_meet_closed(&self) -> bool {
        let lat = &*self.lat;
        if !self.contains(lat.top, lat.top) {
            return false;
        }
        let pairs: Vec<(u32, u32)> = self.pairs().collect();
        pairs.iter().all(|&(a, b)| pairs.iter().all(|&(c, d)| self.contains(lat.meet(a, c), lat.meet(b, d))))
    }

    /// Diagnostic listing of the stable pairs.
    pub fn dump(&self, names: &[String]) -> String {
        let mut s = String::new();
        for (a, b) in self.pairs() {
            s.push_str(&format!("{}  ->  {}\n", self.lat.elem(a).render(names), self.lat.elem(b).render(names)));
        }
        s
    }
}

/// Stability of ((U,P), (Y,Q)) for the word acting by `map`: Uw ⊆ Y and
/// for m, n ∈ U with mw, nw defined, m P n ⟺ mw Q nw.
pub fn word_pair_stable(map: &[Option<usize>], u: &SetPartition, y: &SetPartition) -> bool {
    let yc = y.carrier();
    let img: Vec<(usize, usize)> = sp::points_of(u.carrier()).filter_map(|r| map[r].map(|t| (r, t))).collect();
    if img.iter().any(|&(_, t)| yc & sp::bit(t) == 0) {
        return false;
    }
    img.iter().all(|&(r, t)| img.iter().all(|&(s, v)| u.same_block(r, s) == y.same_block(t, v)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lat(n: usize) -> Arc<Lattice> {
        Lattice::new(n).unwrap()
    }

    #[test]
    fn top_and_bottom_pairs_are_free_stable() {
        let l = lat(3);
        let f = FlowRelation::free(&l, &[Some(1), Some(1), None]);
        assert!(f.contains(l.top(), l.top()));
        assert!(f.contains(l.bottom(), l.bottom()));
        assert!(f.is_meet_closed());
    }

    #[test]
    fn identity_is_neutral() {
        let l = lat(2);
        let f = FlowRelation::free(&l, &[Some(1), None]);
        let i = FlowRelation::identity(&l);
        assert_eq!(i.then(&f), f);
        assert_eq!(f.then(&i), f);
    }

    #[test]
    fn join_with_everything_is_neutral() {
        let l = lat(2);
        let f = FlowRelation::free(&l, &[Some(1), Some(0)]);
        assert_eq!(f.join(&FlowRelation::everything(&l)).unwrap(), f);
        assert_eq!(f.join(&f).unwrap(), f);
    }

    #[test]
    fn one_variable_closure_is_its_own_backflow() {
        let l = lat(2);
        let f = FlowRelation::free(&l, &[Some(1), Some(1)]);
        let h = f.backflow();
        assert_eq!(h.backflow(), h);
        for a in 0..l.len() as u32 {
            assert_eq!(h.forward(a), h.back(a));
        }
        assert_eq!(FlowRelation::identity(&l).backflow(), FlowRelation::identity(&l));
    }

    #[test]
    fn lattices_do_not_mix() {
        let (a, b) = (lat(2), lat(2));
        let e = FlowRelation::identity(&a).compose(&FlowRelation::identity(&b)).unwrap_err();
        assert!(matches!(e, Error::LatticeMismatch));
    }
}
