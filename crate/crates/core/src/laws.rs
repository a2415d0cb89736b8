//! The algebraic law suite for C(L²), run exhaustively on small lattices.
//!
//! Flows are generated from the letter flows (and the identity) by
//! composition, join, backflow, star and ω, breadth-first to a fixed
//! depth.  Every unary law is checked on every generated flow and every
//! binary law on every ordered pair.

use std::collections::HashSet;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::Result;
use crate::explicit::{sample2, FlowRelation, FlowSystem, LAutomaton};

#[derive(Clone, Debug, Serialize)]
pub struct LawRow {
    pub law: &'static str,
    pub checked: usize,
    pub failed: usize,
    /// Dump of the first offending relations.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_failure: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct LawReport {
    pub points: usize,
    pub lattice: usize,
    pub depth: usize,
    pub flows: usize,
    pub rows: Vec<LawRow>,
}

impl LawReport {
    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| r.failed == 0)
    }

    pub fn render_text(&self) -> String {
        let mut s =
            format!("|R| = {}, |L| = {}, depth {}, {} flows\n", self.points, self.lattice, self.depth, self.flows);
        let w = self.rows.iter().map(|r| r.law.len()).max().unwrap_or(0);
        for r in &self.rows {
            let verdict = if r.failed == 0 { "pass" } else { "FAIL" };
            writeln!(s, "  {:<w$}  {:>9} checked  {:>6} failed  {verdict}", r.law, r.checked, r.failed).unwrap();
            if let Some(d) = &r.first_failure {
                for line in d.lines() {
                    writeln!(s, "      {line}").unwrap();
                }
            }
        }
        s
    }
}

/// Breadth-first closure of the letter flows and the identity under the
/// five operations, `depth` rounds deep.
pub fn generate_flows(sys: &FlowSystem, depth: usize) -> Vec<FlowRelation> {
    let lat = sys.lattice();
    let mut all: Vec<FlowRelation> = vec![FlowRelation::identity(lat)];
    all.extend(sys.letters().map(|(_, f)| f.clone()));
    let mut seen: HashSet<FlowRelation> = HashSet::new();
    all.retain(|f| seen.insert(f.clone()));
    for _ in 0..depth {
        let n = all.len();
        let mut fresh: Vec<FlowRelation> = (0..n)
            .into_par_iter()
            .flat_map_iter(|i| {
                let f = &all[i];
                let mut out = vec![f.backflow(), f.star(), f.omega()];
                for g in &all[..n] {
                    out.push(f.then(g));
                    out.push(f.join(g).expect("one lattice"));
                }
                out
            })
            .collect();
        fresh.retain(|f| seen.insert(f.clone()));
        if fresh.is_empty() {
            break;
        }
        all.extend(fresh);
    }
    all
}

struct Tally<'a> {
    law: &'static str,
    names: &'a [String],
    checked: usize,
    failed: usize,
    first: Option<String>,
}

impl<'a> Tally<'a> {
    fn new(law: &'static str, names: &'a [String]) -> Self {
        Tally { law, names, checked: 0, failed: 0, first: None }
    }

    fn check(&mut self, ok: bool, culprits: &[(&str, &FlowRelation)]) {
        self.checked += 1;
        if !ok {
            self.failed += 1;
            if self.first.is_none() {
                let mut d = String::new();
                for (name, f) in culprits {
                    writeln!(d, "{name}:").unwrap();
                    d.push_str(&f.dump(self.names));
                }
                self.first = Some(d);
            }
        }
    }

    fn merge(mut self, other: Self) -> Self {
        self.checked += other.checked;
        self.failed += other.failed;
        self.first = self.first.or(other.first);
        self
    }

    fn row(self) -> LawRow {
        LawRow { law: self.law, checked: self.checked, failed: self.failed, first_failure: self.first }
    }
}

/// Everything derived from a single flow that the laws use.
struct Derived {
    f: FlowRelation,
    star: FlowRelation,
    back: FlowRelation,
    omega: FlowRelation,
    omega_star: FlowRelation,
    /// ⋁_{m ≥ 0} f^m, with f^0 the identity.
    powers_join: FlowRelation,
    powers: Vec<FlowRelation>,
}

impl Derived {
    fn new(f: &FlowRelation) -> Self {
        let id = FlowRelation::identity(f.lattice());
        let mut powers = vec![id];
        let mut seen: HashSet<FlowRelation> = HashSet::new();
        seen.insert(powers[0].clone());
        loop {
            let next = powers.last().unwrap().then(f);
            if !seen.insert(next.clone()) {
                break;
            }
            powers.push(next);
        }
        let powers_join = powers.iter().skip(1).fold(powers[0].clone(), |a, p| a.join(p).unwrap());
        let omega = f.omega();
        let star = f.star();
        Derived { f: f.clone(), back: f.backflow(), omega_star: omega.then(&star), star, omega, powers_join, powers }
    }
}

const UNARY: &[&str] = &[
    "identity: 1f = f = f1",
    "backflow below star: <-f <= f*",
    "cheap (2): g^k <= V g^m <= g*",
    "cheap (4): star is a closure operator",
    "w+* and w+* g^w are R-related idempotents",
    "w+* g^w <= w+*",
    "absorption: g g^(w+*) = g^(w+*)",
    "absorption: g* g^w g = g* g^w",
    "absorption: g^(w+*) g^w g = g^(w+*) g^w = g g^(w+*) g^w",
];

const BINARY: &[&str] = &[
    "monotone: f <= f' => fg <= f'g, gf <= gf', f v g <= f' v g",
    "cheap (1): f <= f <-g <= f g*",
    "cheap (3): f <= V fg^k <= f(V g^k) <= f g*",
    "cheap (4): f <= g => f* <= g*",
    "cheap (5): (f v g)* = f*g* = f* v g* = g*f*",
    "cheap (6): (f g*)* = f* v g* = (f* g)*",
    "conjugated star: A(q0,q2) = f(gf)^(w+*)",
];

fn unary_laws<'a>(d: &Derived, names: &'a [String]) -> Vec<Tally<'a>> {
    let mut t: Vec<Tally> = UNARY.iter().map(|l| Tally::new(l, names)).collect();
    let f = &d.f;
    let id = &d.powers[0];
    t[0].check(&id.then(f) == f && &f.then(id) == f, &[("f", f)]);
    t[1].check(d.back.leq(&d.star), &[("f", f)]);
    for p in &d.powers {
        t[2].check(p.leq(&d.powers_join) && d.powers_join.leq(&d.star), &[("g", f), ("g^k", p)]);
    }
    t[3].check(f.leq(&d.star) && d.star.star() == d.star, &[("g", f)]);

    let x = &d.omega_star;
    let y = x.then(&d.omega);
    let r_related = &y.then(x) == x && x.then(&y) == y;
    t[4].check(x.is_idempotent() && y.is_idempotent() && r_related, &[("g", f)]);
    t[5].check(y.leq(x), &[("g", f)]);
    t[6].check(&f.then(x) == x, &[("g", f)]);
    let sw = d.star.then(&d.omega);
    t[7].check(sw.then(f) == sw, &[("g", f)]);
    t[8].check(y.then(f) == y && f.then(&y) == y, &[("g", f)]);
    t
}

fn binary_laws<'a>(
    df: &Derived,
    dg: &Derived,
    sys: &FlowSystem,
    names: &'a [String],
    conj: bool,
) -> Result<Vec<Tally<'a>>> {
    let mut t: Vec<Tally> = BINARY.iter().map(|l| Tally::new(l, names)).collect();
    let (f, g) = (&df.f, &dg.f);
    let culprits = [("f", f), ("g", g)];

    // f plays f' here: whenever g <= f, substitute on each side.
    if g.leq(f) {
        for h in [&df.star, &dg.star, &df.omega] {
            t[0].check(
                g.then(h).leq(&f.then(h)) && h.then(g).leq(&h.then(f)) && g.join(h)?.leq(&f.join(h)?),
                &culprits,
            );
        }
    }

    let f_back_g = f.then(&dg.back);
    let f_star_g = f.then(&dg.star);
    t[1].check(f.leq(&f_back_g) && f_back_g.leq(&f_star_g), &culprits);

    let joined = dg.powers.iter().map(|p| f.then(p)).reduce(|a, b| a.join(&b).unwrap()).unwrap();
    let f_pj = f.then(&dg.powers_join);
    t[2].check(f.leq(&joined) && joined.leq(&f_pj) && f_pj.leq(&f_star_g), &culprits);

    if f.leq(g) {
        t[3].check(df.star.leq(&dg.star), &culprits);
    }

    let fs_or_gs = df.star.join(&dg.star)?;
    let lhs = f.join(g)?.star();
    t[4].check(lhs == df.star.then(&dg.star) && lhs == fs_or_gs && lhs == dg.star.then(&df.star), &culprits);
    t[5].check(f_star_g.star() == fs_or_gs && df.star.then(g).star() == fs_or_gs, &culprits);

    if !conj {
        return Ok(t);
    }
    let lat = sys.lattice();
    let a = LAutomaton::new(lat, 3).edge(0, 1, &f.then(g).omega())?.edge(1, 2, f)?.edge(2, 1, g)?;
    let gf = g.then(f);
    t[6].check(sample2(&a, 0, 2)? == f.then(&gf.omega_star()), &culprits);
    Ok(t)
}

fn empty<'a>(laws: &'static [&'static str], names: &'a [String]) -> Vec<Tally<'a>> {
    laws.iter().map(|l| Tally::new(l, names)).collect()
}

fn zip<'a>(a: Vec<Tally<'a>>, b: Vec<Tally<'a>>) -> Vec<Tally<'a>> {
    a.into_iter().zip(b).map(|(x, y)| x.merge(y)).collect()
}

/// Run every law over all flows generated to `depth`.  Binary laws run on
/// every ordered pair; the conjugated-star check (which samples an
/// automaton, |L|² least-flow runs) is limited to pairs among the first
/// `conj_limit` flows.
pub fn run_laws(sys: &FlowSystem, depth: usize, conj_limit: usize) -> Result<LawReport> {
    let names = sys.point_names().to_vec();
    let flows = generate_flows(sys, depth);
    let derived: Vec<Derived> = flows.par_iter().map(Derived::new).collect();

    let names_ref: &[String] = &names;

    let unary = derived.par_iter().map(|d| unary_laws(d, names_ref)).reduce(|| empty(UNARY, names_ref), zip);

    let n = derived.len();
    let binary = (0..n * n)
        .into_par_iter()
        .map(|k| {
            let (i, j) = (k / n, k % n);
            binary_laws(&derived[i], &derived[j], sys, names_ref, i < conj_limit && j < conj_limit)
        })
        .try_reduce(|| empty(BINARY, names_ref), |a, b| Ok(zip(a, b)))?;

    let rows = unary.into_iter().chain(binary).map(Tally::row).collect();
    Ok(LawReport { points: sys.lattice().points(), lattice: sys.lattice().len(), depth, flows: n, rows })
}
