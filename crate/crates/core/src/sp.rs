//! The set-partition lattice SP(M,X): pairs (Y, P) with Y a subset of the
//! distinguished R-class and P a partition of Y, ordered by "carrier
//! inclusion and block refinement".  Points of R are numbered 0..n (n ≤ 64)
//! and subsets are bit masks.

use std::fmt;

use crate::error::{Error, Result};

pub const MAX_POINTS: usize = 64;

#[inline]
pub fn bit(r: usize) -> u64 {
    1u64 << r
}

pub fn points_of(mask: u64) -> impl Iterator<Item = usize> {
    let mut m = mask;
    std::iter::from_fn(move || {
        if m == 0 {
            None
        } else {
            let r = m.trailing_zeros() as usize;
            m &= m - 1;
            Some(r)
        }
    })
}

/// Union-find over at most 64 points.
#[derive(Clone)]
pub(crate) struct Uf {
    parent: [u8; MAX_POINTS],
}

impl Uf {
    pub fn new() -> Self {
        let mut parent = [0u8; MAX_POINTS];
        for (i, p) in parent.iter_mut().enumerate() {
            *p = i as u8;
        }
        Uf { parent }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] as usize != x {
            let up = self.parent[self.parent[x] as usize];
            self.parent[x] = up;
            x = up as usize;
        }
        x
    }

    /// Returns true when two classes were actually merged.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[hi] = lo as u8;
        true
    }

    pub fn union_mask(&mut self, mask: u64) {
        let mut it = points_of(mask);
        if let Some(first) = it.next() {
            for r in it {
                self.union(first, r);
            }
        }
    }

    /// The classes restricted to `carrier`, canonically ordered.
    pub fn blocks(&mut self, carrier: u64) -> Vec<u64> {
        let mut roots: Vec<(usize, u64)> = Vec::new();
        for r in points_of(carrier) {
            let root = self.find(r);
            match roots.iter_mut().find(|(x, _)| *x == root) {
                Some((_, m)) => *m |= bit(r),
                None => roots.push((root, bit(r))),
            }
        }
        let mut blocks: Vec<u64> = roots.into_iter().map(|(_, m)| m).collect();
        blocks.sort_by_key(|m| m.trailing_zeros());
        blocks
    }
}

/// An element (Y, P) of SP(M,X).  Blocks are kept sorted by least point,
/// so structural equality is lattice equality.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SetPartition {
    n: u8,
    blocks: Vec<u64>,
    /// Block index per point, `u8::MAX` off the carrier; derived from
    /// `blocks`.
    block_of: Vec<u8>,
}

impl SetPartition {
    fn build(n: usize, mut blocks: Vec<u64>) -> Self {
        blocks.sort_by_key(|m| m.trailing_zeros());
        let mut block_of = vec![u8::MAX; n];
        for (i, &b) in blocks.iter().enumerate() {
            for r in points_of(b) {
                block_of[r] = i as u8;
            }
        }
        SetPartition { n: n as u8, blocks, block_of }
    }

    /// The bottom B = (∅, ∅).
    pub fn bottom(n: usize) -> Self {
        assert!(n <= MAX_POINTS);
        Self::build(n, Vec::new())
    }

    /// (R, {R}).
    pub fn top(n: usize) -> Self {
        Self::one_block(n, full(n))
    }

    /// ({r}, {{r}}).
    pub fn point(n: usize, r: usize) -> Self {
        Self::one_block(n, bit(r))
    }

    /// (Y, {Y}); the bottom when Y is empty.
    pub fn one_block(n: usize, y: u64) -> Self {
        assert!(y & !full(n) == 0);
        Self::build(n, if y == 0 { vec![] } else { vec![y] })
    }

    /// (Y, discrete partition).
    pub fn discrete(n: usize, y: u64) -> Self {
        Self::build(n, points_of(y).map(bit).collect())
    }

    pub fn from_blocks(n: usize, blocks: Vec<u64>) -> Result<Self> {
        if n > MAX_POINTS {
            return Err(Error::TooLarge(n, MAX_POINTS));
        }
        let mut seen = 0u64;
        for &b in &blocks {
            if b == 0 || b & seen != 0 || b & !full(n) != 0 {
                return Err(Error::Parse("blocks must be nonempty, disjoint subsets of R".into()));
            }
            seen |= b;
        }
        Ok(Self::build(n, blocks))
    }

    pub fn n(&self) -> usize {
        self.n as usize
    }

    pub fn carrier(&self) -> u64 {
        self.blocks.iter().fold(0, |a, b| a | b)
    }

    pub fn blocks(&self) -> &[u64] {
        &self.blocks
    }

    pub fn is_bottom(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn block_of(&self, r: usize) -> Option<usize> {
        match self.block_of[r] {
            u8::MAX => None,
            b => Some(b as usize),
        }
    }

    pub fn same_block(&self, r: usize, s: usize) -> bool {
        matches!((self.block_of(r), self.block_of(s)), (Some(a), Some(b)) if a == b)
    }

    pub fn carrier_len(&self) -> usize {
        self.carrier().count_ones() as usize
    }

    /// (Y,P) ≤ (Z,Q): Y ⊆ Z and every block of P inside a block of Q.
    pub fn leq(&self, other: &Self) -> bool {
        debug_assert_eq!(self.n, other.n);
        self.blocks.iter().all(|&b| {
            let r = b.trailing_zeros() as usize;
            match other.block_of(r) {
                Some(k) => b & !other.blocks[k] == 0,
                None => false,
            }
        })
    }

    pub fn meet(&self, other: &Self) -> Self {
        debug_assert_eq!(self.n, other.n);
        let mut blocks = Vec::new();
        for &a in &self.blocks {
            for &b in &other.blocks {
                if a & b != 0 {
                    blocks.push(a & b);
                }
            }
        }
        Self::build(self.n(), blocks)
    }

    pub fn join(&self, other: &Self) -> Self {
        debug_assert_eq!(self.n, other.n);
        let mut uf = Uf::new();
        for &b in self.blocks.iter().chain(&other.blocks) {
            uf.union_mask(b);
        }
        Self::build(self.n(), uf.blocks(self.carrier() | other.carrier()))
    }

    /// Coarsen by merging the blocks containing each listed pair (points
    /// off the carrier are added to it).
    pub fn merged(&self, pairs: &[(usize, usize)]) -> Self {
        let mut uf = Uf::new();
        let mut carrier = self.carrier();
        for &b in &self.blocks {
            uf.union_mask(b);
        }
        for &(r, s) in pairs {
            uf.union(r, s);
            carrier |= bit(r) | bit(s);
        }
        Self::build(self.n(), uf.blocks(carrier))
    }

    pub(crate) fn from_uf(n: usize, uf: &mut Uf, carrier: u64) -> Self {
        Self::build(n, uf.blocks(carrier))
    }

    /// Blocks listed as point vectors.
    pub fn block_lists(&self) -> Vec<Vec<usize>> {
        self.blocks.iter().map(|&b| points_of(b).collect()).collect()
    }

    /// Text form with point names: `{r1 r3 | r2} over {r1,r2,r3}`, bottom `⊥`.
    pub fn render(&self, names: &[String]) -> String {
        if self.is_bottom() {
            return "⊥".to_string();
        }
        let blocks: Vec<String> = self
            .blocks
            .iter()
            .map(|&b| points_of(b).map(|r| names[r].as_str()).collect::<Vec<_>>().join(" "))
            .collect();
        let carrier: Vec<&str> = points_of(self.carrier()).map(|r| names[r].as_str()).collect();
        format!("{{{}}} over {{{}}}", blocks.join(" | "), carrier.join(","))
    }

    /// Inverse of [`render`](Self::render).
    pub fn parse(text: &str, names: &[String]) -> Result<Self> {
        let n = names.len();
        let t = text.trim();
        if t == "⊥" {
            return Ok(Self::bottom(n));
        }
        let bad = |why: &str| Error::Parse(format!("set-partition `{t}`: {why}"));
        let (blocks_part, carrier_part) = t.split_once(" over ").ok_or_else(|| bad("missing `over`"))?;
        let inner = |s: &str| -> Result<String> {
            let s = s.trim();
            s.strip_prefix('{')
                .and_then(|s| s.strip_suffix('}'))
                .map(str::to_string)
                .ok_or_else(|| bad("expected braces"))
        };
        let lookup = |name: &str| -> Result<usize> {
            names.iter().position(|x| x == name).ok_or_else(|| bad(&format!("unknown point `{name}`")))
        };
        let mut blocks = Vec::new();
        for b in inner(blocks_part)?.split('|') {
            let mut m = 0u64;
            for name in b.split_whitespace() {
                let r = lookup(name)?;
                if m & bit(r) != 0 {
                    return Err(bad("repeated point"));
                }
                m |= bit(r);
            }
            blocks.push(m);
        }
        let mut carrier = 0u64;
        for name in inner(carrier_part)?.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            carrier |= bit(lookup(name)?);
        }
        let p = Self::from_blocks(n, blocks)?;
        if p.carrier() != carrier {
            return Err(bad("carrier does not match the union of the blocks"));
        }
        Ok(p)
    }
}

impl fmt::Debug for SetPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = (0..self.n()).map(|r| format!("r{r}")).collect();
        f.write_str(&self.render(&names))
    }
}

pub fn full(n: usize) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

fn same_r(a: &SetPartition, b: &SetPartition) -> Result<()> {
    if a.n != b.n {
        return Err(Error::RMismatch(a.n(), b.n()));
    }
    Ok(())
}

pub fn sp_leq(a: &SetPartition, b: &SetPartition) -> Result<bool> {
    same_r(a, b)?;
    Ok(a.leq(b))
}

pub fn sp_meet(a: &SetPartition, b: &SetPartition) -> Result<SetPartition> {
    same_r(a, b)?;
    Ok(a.meet(b))
}

pub fn sp_join(a: &SetPartition, b: &SetPartition) -> Result<SetPartition> {
    same_r(a, b)?;
    Ok(a.join(b))
}

/// An element of the set flow lattice S(M,X) = P(R).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SetElem {
    pub n: u8,
    pub carrier: u64,
}

impl SetElem {
    pub fn leq(self, o: Self) -> bool {
        self.carrier & !o.carrier == 0
    }
    pub fn meet(self, o: Self) -> Self {
        SetElem { n: self.n, carrier: self.carrier & o.carrier }
    }
    pub fn join(self, o: Self) -> Self {
        SetElem { n: self.n, carrier: self.carrier | o.carrier }
    }
}

/// All set partitions of the points in `mask`, canonical.
pub fn partitions_of(n: usize, mask: u64) -> Vec<SetPartition> {
    let pts: Vec<usize> = points_of(mask).collect();
    let mut out = Vec::new();
    let mut blocks: Vec<u64> = Vec::new();
    fn go(pts: &[usize], i: usize, blocks: &mut Vec<u64>, n: usize, out: &mut Vec<SetPartition>) {
        if i == pts.len() {
            out.push(SetPartition::build(n, blocks.clone()));
            return;
        }
        for k in 0..blocks.len() {
            blocks[k] |= bit(pts[i]);
            go(pts, i + 1, blocks, n, out);
            blocks[k] &= !bit(pts[i]);
        }
        blocks.push(bit(pts[i]));
        go(pts, i + 1, blocks, n, out);
        blocks.pop();
    }
    go(&pts, 0, &mut blocks, n, &mut out);
    out
}

/// Default cap on |R| for materializing the whole lattice.
pub const MATERIALIZE_BOUND: usize = 6;

/// Every (Y, P) over n points exactly once, sorted by (|Y|, canonical form).
pub fn materialize_lattice(n: usize, bound: usize) -> Result<Vec<SetPartition>> {
    if n > bound {
        return Err(Error::TooLarge(n, bound));
    }
    let mut all: Vec<SetPartition> = (0..=full(n)).flat_map(|y| partitions_of(n, y)).collect();
    all.sort_by(|a, b| (a.carrier_len(), a).cmp(&(b.carrier_len(), b)));
    Ok(all)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(n: usize) -> Vec<String> {
        (0..n).map(|r| format!("r{}", r + 1)).collect()
    }

    #[test]
    fn bottom_is_least() {
        for p in materialize_lattice(3, 6).unwrap() {
            assert!(SetPartition::bottom(3).leq(&p));
        }
    }

    #[test]
    fn refinement_order_on_two_points() {
        let d = SetPartition::discrete(3, 0b011);
        let o = SetPartition::one_block(3, 0b011);
        assert!(d.leq(&o));
        assert!(!o.leq(&d));
        assert!(!SetPartition::point(3, 0).leq(&SetPartition::point(3, 1)));
    }

    #[test]
    fn join_is_transitive_closure() {
        let a = SetPartition::from_blocks(3, vec![0b011, 0b100]).unwrap();
        let b = SetPartition::one_block(3, 0b110);
        assert_eq!(a.join(&b), SetPartition::top(3));
    }

    #[test]
    fn discrete_refines_in_meets() {
        let o = SetPartition::one_block(3, 0b011);
        let d = SetPartition::discrete(3, 0b011);
        assert_eq!(o.meet(&d), d);
    }

    #[test]
    fn unit_laws() {
        for a in materialize_lattice(3, 6).unwrap() {
            assert_eq!(a.meet(&SetPartition::top(3)), a);
            assert_eq!(a.join(&SetPartition::bottom(3)), a);
        }
    }

    #[test]
    fn mismatched_r_is_an_error() {
        let e = sp_leq(&SetPartition::top(2), &SetPartition::top(3)).unwrap_err();
        assert!(matches!(e, Error::RMismatch(2, 3)));
    }

    #[test]
    fn text_form() {
        let p = SetPartition::from_blocks(3, vec![0b101, 0b010]).unwrap();
        assert_eq!(p.render(&names(3)), "{r1 r3 | r2} over {r1,r2,r3}");
        assert_eq!(SetPartition::parse("{r1 r3 | r2} over {r1,r2,r3}", &names(3)).unwrap(), p);
        assert_eq!(SetPartition::bottom(3).render(&names(3)), "⊥");
        assert_eq!(SetPartition::parse("⊥", &names(3)).unwrap(), SetPartition::bottom(3));
        assert!(SetPartition::parse("{r1} over {r1,r2}", &names(3)).is_err());
    }

    #[test]
    fn block_ids_follow_blocks() {
        for p in materialize_lattice(4, 6).unwrap() {
            for (k, &b) in p.blocks().iter().enumerate() {
                for r in points_of(b) {
                    assert_eq!(p.block_of(r), Some(k));
                }
            }
            for r in points_of(!p.carrier() & full(4)) {
                assert_eq!(p.block_of(r), None);
            }
        }
    }

    #[test]
    fn too_large_is_refused() {
        assert!(matches!(materialize_lattice(7, 6), Err(Error::TooLarge(7, 6))));
    }
}
