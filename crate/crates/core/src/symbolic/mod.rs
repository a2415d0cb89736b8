//! Symbolic backend: formulae act on single elements of SP(M,X) without the
//! lattice ever being materialized.
//!
//! A word acts through its value in M.  ω+★ of a word body is a fixpoint
//! iteration driven by M's cycle structure; nested bodies (level 0 only)
//! iterate the body's own action.  Stabilization `c` under-approximates the
//! vacuum F_n: every merge it performs is forced in the exact backend, so
//! everything computed here sits below its exact counterpart.

mod term;

use std::collections::BTreeSet;
use std::sync::atomic::{AtomicU64, Ordering};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::loopable::{loopable_set, TypeIOracle};
use crate::monoid::{check_group_mapping, green_classes, FiniteMonoid, GroupMappingCert};
use crate::sp::{bit, points_of, SetPartition, Uf};

pub use term::FlowTerm;

const NONE: u8 = u8::MAX;

#[derive(Debug, Default)]
pub struct Stats {
    merges: AtomicU64,
    backflows: AtomicU64,
    evaluations: AtomicU64,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct StatsSnapshot {
    pub merges: u64,
    pub backflows: u64,
    pub evaluations: u64,
}

impl Stats {
    pub fn snapshot(&self) -> StatsSnapshot {
        StatsSnapshot {
            merges: self.merges.load(Ordering::Relaxed),
            backflows: self.backflows.load(Ordering::Relaxed),
            evaluations: self.evaluations.load(Ordering::Relaxed),
        }
    }
}

/// Result of acting on ℓ: `source` is ℓ after any forced back-flow
/// coarsening (equal to the stabilized input when nothing flowed back).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Acted {
    pub source: SetPartition,
    pub state: SetPartition,
}

impl Acted {
    pub fn backflowed(&self, input: &SetPartition) -> bool {
        self.source != *input
    }
}

/// The raw free-flow action of a word.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WordAction {
    Image(SetPartition),
    /// Points in distinct blocks with a common image: the blocks must merge
    /// before the word can act.
    Backflow(Vec<(usize, usize)>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Comparison {
    Equal,
    #[serde(rename = "LHS_SUBSET_RHS")]
    LhsSubsetRhs,
    #[serde(rename = "RHS_SUBSET_LHS")]
    RhsSubsetLhs,
    Incomparable,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConjectureProbe {
    pub term: String,
    /// Carrier of ℓ·τ.
    pub lhs: Vec<usize>,
    /// Y·(τΛ).
    pub rhs: Vec<usize>,
    pub outcome: Comparison,
}

pub struct EvalContext {
    m: FiniteMonoid,
    cert: GroupMappingCert,
    level: usize,
    oracle: TypeIOracle,
    n: usize,
    names: Vec<String>,
    /// act[z * n + r]: point index of r·z, or NONE.
    act: Vec<u8>,
    /// collide[r]: points s sharing an image in R with r under some z.
    collide: Vec<u64>,
    h_class: Vec<usize>,
    loopable: Vec<bool>,
    reps: Vec<Option<Vec<String>>>,
    vacuum: Vec<FlowTerm>,
    stats: Stats,
}

/// Default bound on the length of loop bodies, in letters.
pub const DEFAULT_TERM_BUDGET: usize = 8;

impl EvalContext {
    pub fn new(m: &FiniteMonoid, level: usize, oracle: &TypeIOracle) -> Result<Self> {
        let cert = check_group_mapping(m)?;
        Self::with_cert(m, cert, level, oracle, DEFAULT_TERM_BUDGET)
    }

    /// `budget` bounds the body length of the default vacuum terms.
    pub fn with_cert(
        m: &FiniteMonoid,
        cert: GroupMappingCert,
        level: usize,
        oracle: &TypeIOracle,
        budget: usize,
    ) -> Result<Self> {
        let points = cert.distinguished_r.clone();
        let n = points.len();
        if n > crate::sp::MAX_POINTS {
            return Err(Error::TooLarge(n, crate::sp::MAX_POINTS));
        }
        let mut pos = vec![NONE; m.size()];
        for (i, &p) in points.iter().enumerate() {
            pos[p] = i as u8;
        }
        let mut act = vec![NONE; m.size() * n];
        let mut collide = vec![0u64; n];
        for z in 0..m.size() {
            for (r, &p) in points.iter().enumerate() {
                act[z * n + r] = pos[m.mul(p, z)];
            }
            for r in 0..n {
                for s in r + 1..n {
                    let (a, b) = (act[z * n + r], act[z * n + s]);
                    if a != NONE && a == b {
                        collide[r] |= bit(s);
                        collide[s] |= bit(r);
                    }
                }
            }
        }
        let green = green_classes(m);
        let h_class = points.iter().map(|&p| green.h.class_of[p]).collect();
        let loopable = loopable_set(m, level, oracle)?;
        let mut ctx = EvalContext {
            m: m.clone(),
            names: points.iter().map(|&p| m.name(p)).collect(),
            cert,
            level,
            oracle: oracle.clone(),
            n,
            act,
            collide,
            h_class,
            loopable,
            reps: m.bfs_words(),
            vacuum: Vec::new(),
            stats: Stats::default(),
        };
        ctx.vacuum = ctx.primitive_stars(budget);
        Ok(ctx)
    }

    pub fn monoid(&self) -> &FiniteMonoid {
        &self.m
    }

    pub fn cert(&self) -> &GroupMappingCert {
        &self.cert
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn oracle(&self) -> &TypeIOracle {
        &self.oracle
    }

    pub fn points(&self) -> usize {
        self.n
    }

    pub fn point_names(&self) -> &[String] {
        &self.names
    }

    pub fn stats(&self) -> StatsSnapshot {
        self.stats.snapshot()
    }

    pub fn vacuum_terms(&self) -> &[FlowTerm] {
        &self.vacuum
    }

    pub fn set_vacuum_terms(&mut self, terms: Vec<FlowTerm>) -> Result<()> {
        for t in &terms {
            self.check(t)?;
        }
        self.vacuum = terms;
        Ok(())
    }

    pub fn is_loopable(&self, z: usize) -> bool {
        self.loopable[z]
    }

    pub fn h_related(&self, r: usize, s: usize) -> bool {
        self.h_class[r] == self.h_class[s]
    }

    /// Shortlex representative word of an element.
    pub fn rep(&self, z: usize) -> Option<&[String]> {
        self.reps[z].as_deref()
    }

    /// r·z as a point, if it stays in R.
    pub fn point_act(&self, r: usize, z: usize) -> Option<usize> {
        let v = self.act[z * self.n + r];
        (v != NONE).then_some(v as usize)
    }

    fn image(&self, mask: u64, z: usize) -> u64 {
        let row = &self.act[z * self.n..(z + 1) * self.n];
        points_of(mask).fold(0, |acc, r| if row[r] == NONE { acc } else { acc | bit(row[r] as usize) })
    }

    /// `(w)^w*` for every certified non-identity element whose representative
    /// is at most `budget` letters and not a proper power, by (length, text).
    pub fn primitive_stars(&self, budget: usize) -> Vec<FlowTerm> {
        let mut out: Vec<FlowTerm> = (0..self.m.size())
            .filter(|&z| z != self.m.identity() && self.loopable[z])
            .filter_map(|z| self.reps[z].as_ref())
            .filter(|w| w.len() <= budget)
            .map(|w| FlowTerm::word(w))
            .filter(|w| !w.is_proper_power())
            .map(FlowTerm::omega_star)
            .collect();
        out.sort_by_key(|t| (t.size(), t.to_string()));
        out.dedup();
        out
    }

    pub fn word_value<S: AsRef<str>>(&self, w: &[S]) -> Result<usize> {
        self.m.eval_word(w)
    }

    /// Letters must be generators; ω+★ bodies must be certified at this
    /// level (at level ≥ 1 that means words whose value is n-loopable).
    pub fn check(&self, t: &FlowTerm) -> Result<()> {
        match t {
            FlowTerm::Epsilon => Ok(()),
            FlowTerm::Letter(x) => {
                self.m.generator(x).ok_or_else(|| Error::UnknownLetter(x.clone()))?;
                Ok(())
            }
            FlowTerm::Concat(ps) => ps.iter().try_for_each(|p| self.check(p)),
            FlowTerm::OmegaStar(b) => {
                self.check(b)?;
                if self.level == 0 {
                    return Ok(());
                }
                match b.as_word() {
                    Some(w) if self.loopable[self.m.eval_word(&w)?] => Ok(()),
                    _ => Err(Error::NotLoopable(b.to_string())),
                }
            }
        }
    }

    fn stabilized(&self, l: &SetPartition, mode: Mode) -> SetPartition {
        let mut run = Run::new(self, mode, false, l);
        let t = run.stabilize(track(l));
        to_sp(self.n, &t)
    }

    /// The closure c ≤ F_n: merge points with a common image under some z,
    /// and apply the back-flow forced by every vacuum term, to a fixpoint.
    pub fn fn_stabilize(&self, l: &SetPartition) -> SetPartition {
        let out = self.stabilized(l, Mode::Full);
        if out != *l {
            self.stats.merges.fetch_add(1, Ordering::Relaxed);
        }
        out
    }

    /// Raw free-flow action of a word, no stabilization.
    pub fn act_word<S: AsRef<str>>(&self, l: &SetPartition, w: &[S]) -> Result<WordAction> {
        let z = self.m.eval_word(w)?;
        let mut merges = Vec::new();
        let mut seen: Vec<(usize, usize)> = Vec::new();
        for r in points_of(l.carrier()) {
            if let Some(p) = self.point_act(r, z) {
                match seen.iter().find(|&&(q, _)| q == p) {
                    Some(&(_, s)) if !l.same_block(r, s) => merges.push((s, r)),
                    Some(_) => {}
                    None => seen.push((p, r)),
                }
            }
        }
        if !merges.is_empty() {
            return Ok(WordAction::Backflow(merges));
        }
        let blocks = l.blocks().iter().map(|&b| self.image(b, z)).filter(|&b| b != 0).collect();
        Ok(WordAction::Image(SetPartition::from_blocks(self.n, blocks)?))
    }

    /// ℓ·τ under the standard interpretation, with the vacuum approximated
    /// by `c`.  Back-flow forced on ℓ coarsens it and the action is replayed.
    pub fn act_term(&self, l: &SetPartition, t: &FlowTerm) -> Result<Acted> {
        self.check(t)?;
        self.stats.evaluations.fetch_add(1, Ordering::Relaxed);
        Ok(self.run(l, t, Mode::Full))
    }

    fn run(&self, l: &SetPartition, t: &FlowTerm, mode: Mode) -> Acted {
        let mut l = self.stabilized(l, mode);
        loop {
            let mut run = Run::new(self, mode, true, &l);
            let out = run.term(track(&l), t);
            let back = SetPartition::from_uf(self.n, &mut run.back, l.carrier());
            if back == l {
                return Acted { source: l, state: to_sp(self.n, &out) };
            }
            if mode == Mode::Full {
                self.stats.backflows.fetch_add(1, Ordering::Relaxed);
            }
            l = self.stabilized(&back, mode);
        }
    }

    /// τΛ ⊆ M.
    pub fn interp_lambda(&self, t: &FlowTerm) -> Result<BTreeSet<usize>> {
        let m = &self.m;
        let product = |a: &BTreeSet<usize>, b: &BTreeSet<usize>| -> BTreeSet<usize> {
            a.iter().flat_map(|&x| b.iter().map(move |&y| m.mul(x, y))).collect()
        };
        Ok(match t {
            FlowTerm::Epsilon => BTreeSet::from([m.identity()]),
            FlowTerm::Letter(x) => BTreeSet::from([m.generator(x).ok_or_else(|| Error::UnknownLetter(x.clone()))?]),
            FlowTerm::Concat(ps) => {
                let mut acc = BTreeSet::from([m.identity()]);
                for p in ps {
                    acc = product(&acc, &self.interp_lambda(p)?);
                }
                acc
            }
            FlowTerm::OmegaStar(b) => {
                let s = self.interp_lambda(b)?;
                // Powers of s in the power monoid, until one repeats.
                let mut powers = vec![s.clone()];
                let (index, period) = loop {
                    let next = product(powers.last().unwrap(), &s);
                    if let Some(i) = powers.iter().position(|p| *p == next) {
                        break (i + 1, powers.len() - i);
                    }
                    powers.push(next);
                };
                let k = index.div_ceil(period) * period;
                let idem = &powers[index - 1 + (k - index) % period];
                let mut generated = BTreeSet::from([m.identity()]);
                for p in &powers {
                    generated.extend(p.iter().copied());
                }
                product(idem, &generated)
            }
        })
    }

    /// Compare the carrier of ℓ·τ with Y·(τΛ).  Data, not a claim.
    pub fn conjecture_probe(&self, l: &SetPartition, t: &FlowTerm) -> Result<ConjectureProbe> {
        let lhs = self.act_term(l, t)?.state.carrier();
        let lambda = self.interp_lambda(t)?;
        let rhs = lambda.iter().fold(0u64, |acc, &z| acc | self.image(l.carrier(), z));
        let outcome = if lhs == rhs {
            Comparison::Equal
        } else if lhs & !rhs == 0 {
            Comparison::LhsSubsetRhs
        } else if rhs & !lhs == 0 {
            Comparison::RhsSubsetLhs
        } else {
            Comparison::Incomparable
        };
        Ok(ConjectureProbe {
            term: t.to_string(),
            lhs: points_of(lhs).collect(),
            rhs: points_of(rhs).collect(),
            outcome,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Mode {
    /// Stabilize by the word rule only.
    Words,
    /// Word rule plus the vacuum terms' back-flow.
    Full,
}

/// Disjoint blocks, each with its origin: the points of the starting
/// element that flowed into it.  Origins only survive word steps.
type Tracked = Vec<(u64, u64)>;

fn track(l: &SetPartition) -> Tracked {
    l.blocks().iter().map(|&b| (b, b)).collect()
}

fn to_sp(n: usize, t: &Tracked) -> SetPartition {
    SetPartition::from_blocks(n, t.iter().map(|&(b, _)| b).collect()).expect("blocks are disjoint")
}

fn same(a: &Tracked, b: &Tracked) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x.0 == y.0)
}

/// One evaluation.  `back` accumulates the coarsening of the starting
/// element forced by blocks whose origins met.
struct Run<'c> {
    ctx: &'c EvalContext,
    mode: Mode,
    tracking: bool,
    back: Uf,
}

impl<'c> Run<'c> {
    fn new(ctx: &'c EvalContext, mode: Mode, tracking: bool, start: &SetPartition) -> Self {
        let mut back = Uf::new();
        for &b in start.blocks() {
            back.union_mask(b);
        }
        Run { ctx, mode, tracking, back }
    }

    /// Merge overlapping blocks; origins of merged blocks are unioned.
    fn norm(&mut self, items: impl IntoIterator<Item = (u64, u64)>) -> Tracked {
        let items: Vec<(u64, u64)> = items.into_iter().filter(|&(b, _)| b != 0).collect();
        let mut uf = Uf::new();
        let mut carrier = 0;
        for &(b, _) in &items {
            uf.union_mask(b);
            carrier |= b;
        }
        let mut out: Tracked = uf.blocks(carrier).into_iter().map(|b| (b, 0)).collect();
        for (b, o) in items {
            let r = b.trailing_zeros() as u64;
            let slot = out.iter_mut().find(|(x, _)| x >> r & 1 == 1).unwrap();
            slot.1 |= o;
        }
        if self.tracking {
            for &(_, o) in &out {
                self.back.union_mask(o);
            }
        } else {
            out.iter_mut().for_each(|x| x.1 = 0);
        }
        out
    }

    fn word(&mut self, s: &Tracked, z: usize) -> Tracked {
        let ctx = self.ctx;
        self.norm(s.iter().map(|&(b, o)| (ctx.image(b, z), o)))
    }

    fn stabilize(&mut self, mut s: Tracked) -> Tracked {
        let ctx = self.ctx;
        loop {
            let carrier = s.iter().fold(0, |a, &(b, _)| a | b);
            let extra: Vec<(u64, u64)> = points_of(carrier).map(|r| ((ctx.collide[r] & carrier) | bit(r), 0)).collect();
            s = self.norm(s.iter().copied().chain(extra));
            if self.mode == Mode::Words {
                return s;
            }
            let mut changed = false;
            for t in &ctx.vacuum {
                let cur = to_sp(ctx.n, &s);
                let back = ctx.run(&cur, t, Mode::Words).source;
                if back != cur {
                    s = self.norm(s.iter().copied().chain(back.blocks().iter().map(|&b| (b, 0))));
                    changed = true;
                }
            }
            if !changed {
                return s;
            }
        }
    }

    /// Act by τ; `s` is stabilized on entry and the result is too.
    fn term(&mut self, s: Tracked, t: &FlowTerm) -> Tracked {
        match t {
            FlowTerm::Epsilon => s,
            FlowTerm::Letter(x) => {
                let z = self.ctx.m.generator(x).expect("checked");
                let s = self.word(&s, z);
                self.stabilize(s)
            }
            FlowTerm::Concat(ps) => ps.iter().fold(s, |s, p| self.term(s, p)),
            FlowTerm::OmegaStar(b) => match b.as_word() {
                Some(w) => {
                    let z = self.ctx.m.eval_word(&w).expect("checked");
                    self.star_word(s, z)
                }
                None => self.star_general(s, b),
            },
        }
    }

    fn untracked(&self) -> Run<'c> {
        Run { ctx: self.ctx, mode: self.mode, tracking: false, back: Uf::new() }
    }

    /// (w)^w* for a word with value z: start from ℓ·z^ω, grow to the least
    /// element above it fixed by z's free flow, then check that ℓ's blocks
    /// land in distinct blocks (merging them if not, and starting over).
    fn star_word(&mut self, mut nu: Tracked, z: usize) -> Tracked {
        let zw = self.ctx.m.omega(z);
        let mut inner = self.untracked();
        loop {
            let mu = inner.fixed_above(&nu, z);
            let images: Vec<u64> = nu.iter().map(|&(b, _)| self.ctx.image(b, zw)).collect();
            let merges = conflicts(&nu, &images, &mu);
            if merges.is_empty() {
                self.tracking = false;
                return mu;
            }
            let merged = self.norm(nu.into_iter().chain(merges));
            nu = self.stabilize(merged);
        }
    }

    /// The least stabilized μ ≥ ν·z^ω with (μ, μ) stable under z: images
    /// join in, and blocks whose images share a block merge.
    fn fixed_above(&mut self, nu: &Tracked, z: usize) -> Tracked {
        let ctx = self.ctx;
        let start = self.word(nu, ctx.m.omega(z));
        let mut mu = self.stabilize(start);
        loop {
            let images: Vec<u64> = mu.iter().map(|&(b, _)| ctx.image(b, z)).collect();
            let grown = self.norm(mu.iter().copied().chain(images.iter().map(|&b| (b, 0))));
            let merges = conflicts(&mu, &images, &grown);
            let next = self.norm(grown.into_iter().chain(merges));
            let next = self.stabilize(next);
            if same(&next, &mu) {
                return mu;
            }
            mu = next;
        }
    }

    /// Nested bodies: iterate the body's action from ℓ to its idempotent
    /// point of the orbit, then grow until the body maps the result below
    /// itself.  No back-flow is pulled through here.
    fn star_general(&mut self, s: Tracked, body: &FlowTerm) -> Tracked {
        self.tracking = false;
        let s = self.norm(s);
        let mut orbit = vec![s];
        let (index, period) = loop {
            let next = self.term(orbit.last().unwrap().clone(), body);
            if let Some(i) = orbit.iter().position(|o| same(o, &next)) {
                break (i, orbit.len() - i);
            }
            orbit.push(next);
        };
        let k = index.max(1).div_ceil(period) * period;
        let mut mu = orbit[index + (k - index) % period].clone();
        loop {
            let a = self.term(mu.clone(), body);
            if to_sp(self.ctx.n, &a).leq(&to_sp(self.ctx.n, &mu)) {
                return mu;
            }
            let joined = self.norm(mu.into_iter().chain(a));
            mu = self.stabilize(joined);
        }
    }
}

/// Blocks of `src` whose images fall into the same block of `dst` must be
/// merged; returns the merged unions as new items.
fn conflicts(src: &Tracked, images: &[u64], dst: &Tracked) -> Vec<(u64, u64)> {
    let mut groups: Vec<(usize, u64, u64, usize)> = Vec::new();
    for (&(b, o), &img) in src.iter().zip(images) {
        if img == 0 {
            continue;
        }
        let r = img.trailing_zeros();
        let target = dst.iter().position(|&(d, _)| d >> r & 1 == 1).expect("image lies in target");
        match groups.iter_mut().find(|g| g.0 == target) {
            Some(g) => {
                g.1 |= b;
                g.2 |= o;
                g.3 += 1;
            }
            None => groups.push((target, b, o, 1)),
        }
    }
    groups.into_iter().filter(|g| g.3 > 1).map(|g| (g.1, g.2)).collect()
}

#[cfg(test)]
mod tests;
