//! F_n-state generation, bad H-pairs and the lower bound report.

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::explicit::{ExactStates, FlowSystem, LoopRule, NFlowMonoid, FLOW_MONOID_LIMIT};
use crate::loopable::{loopable_set, type_i_candidates, TypeIOracle};
use crate::monoid::{check_group_mapping, FiniteMonoid, GroupMappingCert, PartialAction};
use crate::sp::{bit, points_of, SetPartition, MATERIALIZE_BOUND};
use crate::symbolic::{EvalContext, FlowTerm, StatsSnapshot, DEFAULT_TERM_BUDGET};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "step", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Step {
    Point {
        r: usize,
    },
    /// ℓ := ℓ·τ.
    Forward {
        term: String,
    },
    /// ℓ := the coarsening of ℓ forced by acting with τ.
    BackflowCoarsen {
        term: String,
    },
    /// ℓ := c({r,s}, {{r,s}}) for r, s in one block of ℓ.
    OrderIdeal {
        r: usize,
        s: usize,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StateTrace {
    #[serde(serialize_with = "ser_sp")]
    pub state: SetPartition,
    pub level: usize,
    pub provenance: Vec<Step>,
}

fn ser_sp<S: serde::Serializer>(p: &SetPartition, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(p.block_lists())
}

impl StateTrace {
    /// Re-run the provenance from its seed.
    pub fn replay(&self, ctx: &EvalContext) -> Result<SetPartition> {
        let n = ctx.points();
        let mut cur: Option<SetPartition> = None;
        for step in &self.provenance {
            let next = match (step, &cur) {
                (Step::Point { r }, None) => ctx.fn_stabilize(&SetPartition::point(n, *r)),
                (Step::Forward { term }, Some(l)) => ctx.act_term(l, &FlowTerm::parse(term)?)?.state,
                (Step::BackflowCoarsen { term }, Some(l)) => ctx.act_term(l, &FlowTerm::parse(term)?)?.source,
                (Step::OrderIdeal { r, s }, Some(l)) if l.same_block(*r, *s) => {
                    ctx.fn_stabilize(&SetPartition::one_block(n, bit(*r) | bit(*s)))
                }
                _ => return Err(Error::Parse(format!("provenance step {step:?} does not apply"))),
            };
            cur = Some(next);
        }
        cur.ok_or_else(|| Error::Parse("empty provenance".into()))
    }
}

/// Knobs for state generation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Budgets {
    /// Letters per loop body.
    pub term_budget: usize,
    /// Nested ω+★ (1 or 2; 2 only at level 0).
    pub star_depth: usize,
    pub max_states: usize,
    pub exhaustive: bool,
}

impl Default for Budgets {
    fn default() -> Self {
        Budgets { term_budget: DEFAULT_TERM_BUDGET, star_depth: 2, max_states: 100_000, exhaustive: false }
    }
}

/// The formulae the worklist applies: every letter, then ω+★ of element
/// representatives, then (level 0, depth 2) loops around those.
pub fn primitive_terms(ctx: &EvalContext, b: &Budgets) -> Vec<FlowTerm> {
    let m = ctx.monoid();
    let mut out: Vec<FlowTerm> = m.generators().keys().map(|x| FlowTerm::letter(x)).collect();
    let stars = ctx.primitive_stars(b.term_budget);
    if b.star_depth >= 2 && ctx.level() == 0 {
        let words: Vec<FlowTerm> =
            (0..m.size()).filter(|&z| z != m.identity()).filter_map(|z| ctx.rep(z)).map(FlowTerm::word).collect();
        let mut nested = BTreeSet::new();
        for s in &stars {
            for u in &words {
                if s.size() + u.size() > b.term_budget {
                    continue;
                }
                nested.insert(FlowTerm::omega_star(s.clone().then(u.clone())));
                nested.insert(FlowTerm::omega_star(u.clone().then(s.clone())));
            }
        }
        let mut nested: Vec<FlowTerm> = nested.into_iter().collect();
        nested.sort_by_key(|t| (t.size(), t.to_string()));
        out.extend(stars);
        out.extend(nested);
    } else {
        out.extend(stars);
    }
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct BadPair {
    pub level: usize,
    pub r: usize,
    pub s: usize,
    pub names: (String, String),
    /// The H-class of r within R, by name.
    pub h_class: Vec<String>,
    pub trace: Option<StateTrace>,
    /// Exact-backend witness: the state whose block holds r and s.
    pub witness: String,
    pub tier: Tier,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum Tier {
    #[serde(rename = "EXACT-explicit")]
    Exact,
    #[serde(rename = "UNDER-APPROX-symbolic")]
    UnderApprox,
}

impl std::fmt::Display for Tier {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Tier::Exact => "EXACT-explicit",
            Tier::UnderApprox => "UNDER-APPROX-symbolic",
        })
    }
}

/// Symbolic st_n: the generated states and any bad pairs.
#[derive(Clone, Debug)]
pub struct Generated {
    pub states: Vec<StateTrace>,
    pub bad: Vec<BadPair>,
    pub exhausted: bool,
    pub terms: usize,
}

fn h_pairs(ctx: &EvalContext, l: &SetPartition) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for &b in l.blocks() {
        let pts: Vec<usize> = points_of(b).collect();
        for (i, &r) in pts.iter().enumerate() {
            for &s in &pts[i + 1..] {
                if ctx.h_related(r, s) {
                    out.push((r, s));
                }
            }
        }
    }
    out
}

/// Worklist closure of the points under the primitive terms and the
/// pair rule.  States are processed by (carrier size, partition).
pub fn generate_states(ctx: &EvalContext, b: &Budgets) -> Result<Generated> {
    let n = ctx.points();
    let terms = primitive_terms(ctx, b);
    let mut traces: Vec<StateTrace> = Vec::new();
    let mut index: HashMap<SetPartition, usize> = HashMap::new();
    let mut pending: BTreeSet<(usize, SetPartition, usize)> = BTreeSet::new();
    let mut bad: Vec<BadPair> = Vec::new();
    let mut exhausted = false;
    let level = ctx.level();
    let names = ctx.point_names();

    let h_class =
        |r: usize| -> Vec<String> { (0..n).filter(|&s| ctx.h_related(r, s)).map(|s| names[s].clone()).collect() };
    let mut add = |state: SetPartition,
                   provenance: Vec<Step>,
                   traces: &mut Vec<StateTrace>,
                   pending: &mut BTreeSet<(usize, SetPartition, usize)>,
                   bad: &mut Vec<BadPair>|
     -> bool {
        if index.contains_key(&state) {
            return true;
        }
        if traces.len() >= b.max_states {
            exhausted = true;
            return false;
        }
        index.insert(state.clone(), traces.len());
        let trace = StateTrace { state: state.clone(), level, provenance };
        for (r, s) in h_pairs(ctx, &state) {
            if !bad.iter().any(|x| (x.r, x.s) == (r, s)) {
                bad.push(BadPair {
                    level,
                    r,
                    s,
                    names: (names[r].clone(), names[s].clone()),
                    h_class: h_class(r),
                    trace: Some(trace.clone()),
                    witness: state.render(names),
                    tier: Tier::UnderApprox,
                });
            }
        }
        pending.insert((state.carrier_len(), state, traces.len()));
        traces.push(trace);
        true
    };

    for r in 0..n {
        let p = ctx.fn_stabilize(&SetPartition::point(n, r));
        add(p, vec![Step::Point { r }], &mut traces, &mut pending, &mut bad);
    }
    'work: while let Some((_, l, at)) = pending.pop_first() {
        if !b.exhaustive && !bad.is_empty() {
            break;
        }
        let base = traces[at].provenance.clone();
        let extend = |step: Step| {
            let mut p = base.clone();
            p.push(step);
            p
        };
        // Pairs inside blocks.
        for &blk in l.blocks() {
            let pts: Vec<usize> = points_of(blk).collect();
            for (i, &r) in pts.iter().enumerate() {
                for &s in &pts[i + 1..] {
                    let pair = ctx.fn_stabilize(&SetPartition::one_block(n, bit(r) | bit(s)));
                    if !add(pair, extend(Step::OrderIdeal { r, s }), &mut traces, &mut pending, &mut bad) {
                        break 'work;
                    }
                }
            }
        }
        for t in &terms {
            let acted = ctx.act_term(&l, t)?;
            let text = t.to_string();
            if acted.source != l {
                let p = extend(Step::BackflowCoarsen { term: text.clone() });
                if !add(acted.source.clone(), p, &mut traces, &mut pending, &mut bad) {
                    break 'work;
                }
            }
            if !add(acted.state, extend(Step::Forward { term: text }), &mut traces, &mut pending, &mut bad) {
                break 'work;
            }
        }
    }
    Ok(Generated { states: traces, bad, exhausted, terms: terms.len() })
}

/// Bad pairs among already generated states.
pub fn bad_pairs(ctx: &EvalContext, states: &[StateTrace]) -> Vec<BadPair> {
    let names = ctx.point_names();
    let n = ctx.points();
    let mut out: Vec<BadPair> = Vec::new();
    for t in states {
        for (r, s) in h_pairs(ctx, &t.state) {
            if !out.iter().any(|x| (x.r, x.s) == (r, s)) {
                out.push(BadPair {
                    level: t.level,
                    r,
                    s,
                    names: (names[r].clone(), names[s].clone()),
                    h_class: (0..n).filter(|&q| ctx.h_related(r, q)).map(|q| names[q].clone()).collect(),
                    trace: Some(t.clone()),
                    witness: t.state.render(names),
                    tier: Tier::UnderApprox,
                });
            }
        }
    }
    out
}

/// Every block with at least two points, as a sorted point list.
pub fn pointlike_candidates(states: &[SetPartition]) -> Vec<Vec<usize>> {
    let set: BTreeSet<Vec<usize>> = states
        .iter()
        .flat_map(|s| s.blocks().iter().filter(|b| b.count_ones() >= 2).map(|&b| points_of(b).collect()))
        .collect();
    set.into_iter().collect()
}

/// Which backends to run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    Explicit,
    Symbolic,
    Both,
}

impl std::str::FromStr for Backend {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "explicit" => Ok(Backend::Explicit),
            "symbolic" => Ok(Backend::Symbolic),
            "both" => Ok(Backend::Both),
            _ => Err(Error::Parse(format!("backend `{s}`: expected explicit, symbolic or both"))),
        }
    }
}

/// The exact st_n over a materialized lattice.
pub fn exact_states(
    m: &FiniteMonoid,
    cert: &GroupMappingCert,
    level: usize,
    oracle: &TypeIOracle,
) -> Result<(FlowSystem, NFlowMonoid, ExactStates)> {
    let sys = FlowSystem::from_monoid(m, cert, MATERIALIZE_BOUND)?;
    let rule = if level == 0 {
        LoopRule::Everything
    } else {
        let certified = loopable_set(m, level, oracle)?;
        let act = PartialAction::right_on(m, &cert.distinguished_r);
        LoopRule::Words((0..m.size()).filter(|&z| certified[z]).map(|z| act.map_of(z)).collect())
    };
    let nflow = NFlowMonoid::generate(&sys, &rule, FLOW_MONOID_LIMIT)?;
    let ex = ExactStates::generate(&sys, &nflow, &rule, FLOW_MONOID_LIMIT)?;
    Ok((sys, nflow, ex))
}

#[derive(Clone, Debug, Serialize)]
pub struct ExplicitLevel {
    pub flow_monoid_size: usize,
    pub vacuum_stable: usize,
    pub interpretations: usize,
    pub states: usize,
    pub maximal_states: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SymbolicLevel {
    pub states: usize,
    pub terms: usize,
    pub vacuum_terms: usize,
    pub budget_exhausted: bool,
    pub stats: StatsSnapshot,
}

#[derive(Clone, Debug, Serialize)]
pub struct LevelReport {
    pub level: usize,
    pub loopable: Vec<String>,
    pub symbolic: Option<SymbolicLevel>,
    pub explicit: Option<ExplicitLevel>,
    pub bad_pairs: usize,
    /// Every symbolic state lies below some exact state.
    pub dominated: Option<bool>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Pointlike {
    pub level: usize,
    pub points: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct OracleEcho {
    pub kind: String,
    pub submonoids: Vec<OracleEntry>,
}

#[derive(Clone, Debug, Serialize)]
pub struct OracleEntry {
    pub elements: Vec<String>,
    pub tag: Option<&'static str>,
}

#[derive(Clone, Debug, Serialize)]
pub struct LowerBoundReport {
    pub tool_version: &'static str,
    pub monoid: String,
    pub size: usize,
    pub r: Vec<String>,
    pub backend: Backend,
    pub tier: Vec<Tier>,
    pub budgets: Budgets,
    pub oracle: OracleEcho,
    pub levels: Vec<LevelReport>,
    pub bad_pairs: Vec<BadPair>,
    pub pointlike_candidates: Vec<Pointlike>,
    pub bound: usize,
    pub budget_exhausted: bool,
    pub notes: Vec<String>,
}

/// Run both backends (as asked) for levels 0..=max_level and collect the
/// bound: n + 2 for the largest n with a bad pair, else 1.
pub fn lower_bound(
    m: &FiniteMonoid,
    monoid_id: &str,
    max_level: usize,
    oracle: &TypeIOracle,
    backend: Backend,
    budgets: &Budgets,
) -> Result<LowerBoundReport> {
    let cert = check_group_mapping(m)?;
    let names: Vec<String> = cert.distinguished_r.iter().map(|&p| m.name(p)).collect();
    if backend != Backend::Symbolic && names.len() > MATERIALIZE_BOUND {
        return Err(Error::TooLarge(names.len(), MATERIALIZE_BOUND));
    }
    let cands = type_i_candidates(m, oracle)?;
    let oracle_echo = OracleEcho {
        kind: if oracle.is_trivial() { "TRIVIAL" } else { "DECLARED" }.into(),
        submonoids: cands
            .iter()
            .map(|c| OracleEntry {
                elements: c.elements.iter().map(|&e| m.name(e)).collect(),
                tag: c.unverified_assertion.then_some("UNVERIFIED-ASSERTION"),
            })
            .collect(),
    };
    let mut levels = Vec::new();
    let mut all_bad = Vec::new();
    let mut pointlikes = Vec::new();
    let mut exhausted_any = false;
    let mut notes = Vec::new();
    for level in 0..=max_level {
        let certified = loopable_set(m, level, oracle)?;
        let loopable = (0..m.size()).filter(|&z| certified[z]).map(|z| m.name(z)).collect();
        let mut lr = LevelReport { level, loopable, symbolic: None, explicit: None, bad_pairs: 0, dominated: None };
        let mut symbolic_states: Vec<SetPartition> = Vec::new();
        let mut level_bad: Vec<BadPair> = Vec::new();
        let mut blocks_from: Vec<SetPartition> = Vec::new();
        if backend != Backend::Explicit {
            let ctx = EvalContext::with_cert(m, cert.clone(), level, oracle, budgets.term_budget)?;
            let g = generate_states(&ctx, budgets)?;
            exhausted_any |= g.exhausted;
            symbolic_states = g.states.iter().map(|t| t.state.clone()).collect();
            blocks_from.extend(symbolic_states.iter().cloned());
            lr.symbolic = Some(SymbolicLevel {
                states: g.states.len(),
                terms: g.terms,
                vacuum_terms: ctx.vacuum_terms().len(),
                budget_exhausted: g.exhausted,
                stats: ctx.stats(),
            });
            level_bad.extend(g.bad);
        }
        if backend != Backend::Symbolic {
            let (sys, nflow, ex) = exact_states(m, &cert, level, oracle)?;
            let lat = sys.lattice();
            let green = crate::monoid::green_classes(m);
            let pts = &cert.distinguished_r;
            let h = |r: usize, s: usize| green.h.same(pts[r], pts[s]);
            for (r, s, t) in ex.bad_pairs(lat, h) {
                if level_bad.iter().any(|x| (x.r, x.s) == (r, s)) {
                    continue;
                }
                level_bad.push(BadPair {
                    level,
                    r,
                    s,
                    names: (names[r].clone(), names[s].clone()),
                    h_class: (0..pts.len()).filter(|&q| h(r, q)).map(|q| names[q].clone()).collect(),
                    trace: None,
                    witness: lat.elem(t).render(&names),
                    tier: Tier::Exact,
                });
            }
            let tops: Vec<SetPartition> = ex.tops.iter().map(|&t| lat.elem(t).clone()).collect();
            if backend == Backend::Both {
                let dominated = symbolic_states.iter().all(|s| tops.iter().any(|t| s.leq(t)));
                if !dominated {
                    notes.push(format!("level {level}: a symbolic state is not below any exact state"));
                }
                lr.dominated = Some(dominated);
            }
            blocks_from.extend(tops.iter().cloned());
            lr.explicit = Some(ExplicitLevel {
                flow_monoid_size: nflow.elements.len(),
                vacuum_stable: nflow.stable.len(),
                interpretations: ex.interpretations.len(),
                states: ex.states.len(),
                maximal_states: maximal(&tops).iter().map(|t| t.render(&names)).collect(),
            });
        }
        for p in pointlike_candidates(&blocks_from) {
            pointlikes.push(Pointlike { level, points: p.iter().map(|&r| names[r].clone()).collect() });
        }
        lr.bad_pairs = level_bad.len();
        all_bad.extend(level_bad);
        levels.push(lr);
    }
    let bound = all_bad.iter().map(|b| b.level + 2).max().unwrap_or(1);
    let mut tier = Vec::new();
    if backend != Backend::Symbolic {
        tier.push(Tier::Exact);
    }
    if backend != Backend::Explicit {
        tier.push(Tier::UnderApprox);
    }
    if !oracle.is_trivial() {
        notes.push("declared Type I submonoids are unverified assertions; levels ≥ 1 rely on them".into());
    }
    Ok(LowerBoundReport {
        tool_version: env!("CARGO_PKG_VERSION"),
        monoid: monoid_id.to_string(),
        size: m.size(),
        r: names,
        backend,
        tier,
        budgets: budgets.clone(),
        oracle: oracle_echo,
        levels,
        bad_pairs: all_bad,
        pointlike_candidates: pointlikes,
        bound,
        budget_exhausted: exhausted_any,
        notes,
    })
}

fn maximal(states: &[SetPartition]) -> Vec<SetPartition> {
    let set: BTreeSet<&SetPartition> = states.iter().collect();
    set.iter().filter(|s| !set.iter().any(|t| t != *s && s.leq(t))).map(|s| (*s).clone()).collect()
}

impl LowerBoundReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    pub fn render_text(&self) -> String {
        let mut o = String::new();
        let _ = writeln!(o, "monoid {} (|M| = {}, |R| = {})", self.monoid, self.size, self.r.len());
        let tiers: Vec<String> = self.tier.iter().map(|t| t.to_string()).collect();
        let _ = writeln!(o, "tier: {}", tiers.join(" + "));
        let _ = writeln!(o, "oracle: {}", self.oracle.kind);
        for l in &self.levels {
            let mut parts = vec![format!("level {}", l.level)];
            if let Some(s) = &l.symbolic {
                parts.push(format!("symbolic {} states ({} terms)", s.states, s.terms));
            }
            if let Some(e) = &l.explicit {
                parts.push(format!("exact {} states", e.states));
            }
            parts.push(format!("{} bad pairs", l.bad_pairs));
            let _ = writeln!(o, "  {}", parts.join(", "));
        }
        for b in &self.bad_pairs {
            let _ = writeln!(
                o,
                "  bad pair at level {}: {} H {} in {} [{}]",
                b.level, b.names.0, b.names.1, b.witness, b.tier
            );
            if let Some(t) = &b.trace {
                let steps: Vec<String> = t.provenance.iter().map(step_text).collect();
                let _ = writeln!(o, "    via {}", steps.join(" ; "));
            }
        }
        if self.budget_exhausted {
            let _ = writeln!(o, "  BUDGET_EXHAUSTED: results are partial (still sound)");
        }
        for n in &self.notes {
            let _ = writeln!(o, "  note: {n}");
        }
        let _ = writeln!(o, "complexity ≥ {}", self.bound);
        o
    }
}

fn step_text(s: &Step) -> String {
    match s {
        Step::Point { r } => format!("point r{r}"),
        Step::Forward { term } => format!("· {term}"),
        Step::BackflowCoarsen { term } => format!("coarsen by {term}"),
        Step::OrderIdeal { r, s } => format!("pair r{r} r{s}"),
    }
}
