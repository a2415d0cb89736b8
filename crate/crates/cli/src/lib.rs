//! The `krflow` commands as plain functions, so tests can drive them
//! without spawning a process.  Each returns the text meant for stdout and
//! the exit code; `--out` files are written here too.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use krflow_core::explicit::FlowSystem;
use krflow_core::laws::{run_laws, LawReport};
use krflow_core::loopable::TypeIOracle;
use krflow_core::monoid::{check_group_mapping, green_classes, io::read_monoid, rees_coordinatize};
use krflow_core::presentation::{
    check_presentation, verify_complete_flow, FlowLabeling, PartialAutomaton, PointAction, Violation,
};
use krflow_core::sp::MATERIALIZE_BOUND;
use krflow_core::states::{lower_bound, Backend, Budgets};
use krflow_core::{Error, FiniteMonoid, GroupMappingCert, SetPartition};
use serde::Serialize;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_NOT_GROUP_MAPPING: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;
/// A certificate or law was checked and found wrong.
pub const EXIT_REJECTED: i32 = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Analyze,
    Verify,
    Laws,
    DumpGreen,
    DumpRees,
}

/// Everything a run depends on; echoed into every report.
#[derive(Clone, Debug, Serialize)]
pub struct RunConfig {
    pub command: Command,
    pub input: PathBuf,
    pub min_level: usize,
    pub max_level: usize,
    pub backend: Backend,
    pub term_budget: usize,
    pub star_depth: usize,
    pub max_states: usize,
    pub oracle: String,
    pub exhaustive: bool,
    pub out: Option<PathBuf>,
    /// Nothing in the commands is randomized today; kept so reports can
    /// name it once something is.
    pub seed: u64,
    pub auto_gm_note: bool,
    pub automaton: Option<PathBuf>,
    pub labeling: Option<PathBuf>,
    pub law_points: Vec<usize>,
    pub law_depth: usize,
}

impl RunConfig {
    pub fn new(command: Command, input: impl Into<PathBuf>) -> Self {
        let b = Budgets::default();
        RunConfig {
            command,
            input: input.into(),
            min_level: 0,
            max_level: 1,
            backend: Backend::Both,
            term_budget: b.term_budget,
            star_depth: b.star_depth,
            max_states: b.max_states,
            oracle: "trivial".into(),
            exhaustive: false,
            out: None,
            seed: 0,
            auto_gm_note: false,
            automaton: None,
            labeling: None,
            law_points: vec![2, 3],
            law_depth: 3,
        }
    }

    fn budgets(&self) -> Budgets {
        Budgets {
            term_budget: self.term_budget,
            star_depth: self.star_depth,
            max_states: self.max_states,
            exhaustive: self.exhaustive,
        }
    }
}

/// What a command hands back to `main`.
#[derive(Debug)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
}

impl Outcome {
    fn new(code: i32, stdout: String) -> Self {
        Outcome { code, stdout }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::NotGroupMapping(_) => EXIT_NOT_GROUP_MAPPING,
        Error::BudgetExhausted(_) => EXIT_BUDGET,
        _ => EXIT_INPUT,
    }
}

fn fail(path: &Path, e: Error) -> Outcome {
    Outcome::new(exit_code(&e), format!("error: {}: {e}\n", path.display()))
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    tool_version: &'static str,
    config: &'a RunConfig,
    result: T,
}

fn write_out<T: Serialize>(cfg: &RunConfig, result: T) -> Result<(), Error> {
    if let Some(path) = &cfg.out {
        let env = Envelope { tool_version: env!("CARGO_PKG_VERSION"), config: cfg, result };
        let text = serde_json::to_string_pretty(&env).expect("reports serialize") + "\n";
        std::fs::write(path, text)?;
    }
    Ok(())
}

pub fn run(cfg: &RunConfig) -> Outcome {
    let m = match read_monoid(&cfg.input) {
        Ok(m) => m,
        Err(e) => return fail(&cfg.input, e),
    };
    let res = match cfg.command {
        Command::Analyze => return analyze(cfg, &m),
        Command::Verify => verify(cfg, &m),
        Command::Laws => laws(cfg, &m),
        Command::DumpGreen => dump_green(cfg, &m),
        Command::DumpRees => dump_rees(cfg, &m),
    };
    res.unwrap_or_else(|e| fail(&cfg.input, e))
}

fn analyze(cfg: &RunConfig, m: &FiniteMonoid) -> Outcome {
    let oracle = match TypeIOracle::from_spec(&cfg.oracle) {
        Ok(o) => o,
        Err(e) => return Outcome::new(EXIT_INPUT, format!("error: --typeI-oracle: {e}\n")),
    };
    let id = cfg.input.file_stem().map_or("monoid".into(), |s| s.to_string_lossy().into_owned());
    match lower_bound(m, &id, cfg.max_level, &oracle, cfg.backend, &cfg.budgets()) {
        Ok(mut rep) => {
            if cfg.min_level > 0 {
                rep.levels.retain(|l| l.level >= cfg.min_level);
                rep.notes.push(format!("levels below {} were run but are not listed", cfg.min_level));
            }
            if let Err(e) = write_out(cfg, &rep) {
                return fail(cfg.out.as_deref().unwrap(), e);
            }
            let code = if rep.budget_exhausted { EXIT_BUDGET } else { EXIT_OK };
            Outcome::new(code, rep.render_text())
        }
        Err(Error::NotGroupMapping(reason)) => {
            let mut s = format!("NOT_GROUP_MAPPING: {reason}\n");
            if cfg.auto_gm_note {
                let g = green_classes(m);
                let note = GmNote {
                    reason: reason.to_string(),
                    j_classes: g.j.classes.iter().map(|c| c.iter().map(|&e| m.name(e)).collect()).collect(),
                };
                s.push_str("no bound computed; Green structure written as diagnostics\n");
                s.push_str(&render_green(m));
                if let Err(e) = write_out(cfg, &note) {
                    return fail(cfg.out.as_deref().unwrap(), e);
                }
            }
            Outcome::new(EXIT_NOT_GROUP_MAPPING, s)
        }
        Err(Error::TooLarge(n, bound)) => Outcome::new(
            EXIT_INPUT,
            format!(
                "error: |R| = {n} is above {bound}, the largest the explicit backend accepts; use --backend symbolic\n"
            ),
        ),
        Err(e) => fail(&cfg.input, e),
    }
}

#[derive(Serialize)]
struct GmNote {
    reason: String,
    j_classes: Vec<Vec<String>>,
}

#[derive(Serialize)]
struct VerifyReport {
    ok: bool,
    states: usize,
    transition_monoid_size: usize,
    aperiodic: bool,
    violation: Option<String>,
    replay: Vec<String>,
}

fn verify(cfg: &RunConfig, m: &FiniteMonoid) -> Result<Outcome, Error> {
    let need =
        |p: &Option<PathBuf>, flag: &str| p.clone().ok_or_else(|| Error::Parse(format!("verify needs --{flag}")));
    let (apath, lpath) = (need(&cfg.automaton, "automaton")?, need(&cfg.labeling, "labeling")?);
    let cert = check_group_mapping(m)?;
    let pa = PointAction::from_monoid(m, &cert.distinguished_r);
    let a = PartialAutomaton::parse(&std::fs::read_to_string(&apath)?)
        .map_err(|e| Error::Parse(format!("{}: {e}", apath.display())))?;
    let f = FlowLabeling::parse(&std::fs::read_to_string(&lpath)?, &a, &pa.names)
        .map_err(|e| Error::Parse(format!("{}: {e}", lpath.display())))?;
    let tm = a.transition_monoid()?;

    let mut rep = VerifyReport {
        ok: true,
        states: a.len(),
        transition_monoid_size: tm.size(),
        aperiodic: tm.is_aperiodic(),
        violation: None,
        replay: Vec::new(),
    };
    if let Err(v) = verify_complete_flow(&a, &f, &pa) {
        rep.ok = false;
        rep.replay = replay_violation(&v, &a, &f, &pa);
        rep.violation = Some(v.to_string());
    } else {
        let green = green_classes(m);
        let r = &cert.distinguished_r;
        if let Err(v) = check_presentation(&a, &f, &pa, |i, j| green.h.same(r[i], r[j])) {
            rep.ok = false;
            rep.violation = Some(v.to_string());
            rep.replay = vec![format!(
                "{}F = {}",
                v.q,
                f.0[a.states().iter().position(|q| *q == v.q).unwrap()].render(&pa.names)
            )];
        }
    }
    write_out(cfg, &rep)?;

    let mut s = format!(
        "automaton: {} states, transition monoid of size {} ({})\n",
        rep.states,
        rep.transition_monoid_size,
        if rep.aperiodic { "aperiodic" } else { "not aperiodic" }
    );
    match &rep.violation {
        None => s.push_str("OK: complete flow, presentation condition holds\n"),
        Some(v) => {
            writeln!(s, "{v}").unwrap();
            for line in &rep.replay {
                writeln!(s, "  {line}").unwrap();
            }
        }
    }
    Ok(Outcome::new(if rep.ok { EXIT_OK } else { EXIT_REJECTED }, s))
}

fn replay_violation(v: &Violation, a: &PartialAutomaton, f: &FlowLabeling, pa: &PointAction) -> Vec<String> {
    let names = &pa.names;
    let state = |q: &str| a.states().iter().position(|s| s == q).unwrap();
    let moves = |x: &str, carrier: u64| -> String {
        let map = &pa.letters[x];
        krflow_core::sp::points_of(carrier)
            .map(|r| match map[r] {
                Some(t) => format!("{}·{x} = {}", names[r], names[t]),
                None => format!("{}·{x} = 0", names[r]),
            })
            .collect::<Vec<_>>()
            .join(", ")
    };
    match v {
        Violation::Edge { q, x } => {
            let (qi, xi) = (state(q), a.letter_index(x).unwrap());
            let t = a.step(qi, xi).unwrap();
            vec![
                format!("{q}F = {}", f.0[qi].render(names)),
                format!("{q}·{x} = {}, labelled {}", a.states()[t], f.0[t].render(names)),
                moves(x, f.0[qi].carrier()),
            ]
        }
        Violation::Sink { q, x } => {
            let qi = state(q);
            vec![format!("{q}·{x} is undefined but {q}F = {}", f.0[qi].render(names)), moves(x, f.0[qi].carrier())]
        }
        Violation::NotFullyDefined { r } => vec![format!("{r} lies in no label's carrier")],
        Violation::AlphabetMismatch(x) => vec![format!("letter {x} is not shared by the automaton and the monoid")],
    }
}

fn laws(cfg: &RunConfig, m: &FiniteMonoid) -> Result<Outcome, Error> {
    let cert = check_group_mapping(m)?;
    let mut reports: Vec<LawReport> = Vec::new();
    let mut s = String::new();
    for &k in &cfg.law_points {
        if k > cert.r_len() {
            writeln!(s, "skipping |R| = {k}: the monoid only has {}", cert.r_len()).unwrap();
            continue;
        }
        let sys = FlowSystem::on_points(m, &cert.distinguished_r[..k], MATERIALIZE_BOUND)?;
        let rep = run_laws(&sys, cfg.law_depth, usize::MAX)?;
        s.push_str(&rep.render_text());
        reports.push(rep);
    }
    write_out(cfg, &reports)?;
    let ok = reports.iter().all(LawReport::all_pass);
    Ok(Outcome::new(if ok { EXIT_OK } else { EXIT_REJECTED }, s))
}

fn render_green(m: &FiniteMonoid) -> String {
    let g = green_classes(m);
    let mut s = String::new();
    for (i, j) in g.j.classes.iter().enumerate() {
        let rs: std::collections::BTreeSet<usize> = j.iter().map(|&e| g.r.class_of[e]).collect();
        let ls: std::collections::BTreeSet<usize> = j.iter().map(|&e| g.l.class_of[e]).collect();
        let idem = j.iter().filter(|&&e| m.is_idempotent(e)).count();
        let names: Vec<String> = j.iter().map(|&e| m.name(e)).collect();
        writeln!(
            s,
            "J{i}: {} elements, {} R-classes, {} L-classes, |H| = {}, {} idempotents{}: {}",
            j.len(),
            rs.len(),
            ls.len(),
            g.h.class(j[0]).len(),
            idem,
            if idem > 0 { " (regular)" } else { "" },
            names.join(" ")
        )
        .unwrap();
    }
    s
}

#[derive(Serialize)]
struct GreenDump {
    j_classes: Vec<Vec<String>>,
    r_classes: Vec<Vec<String>>,
    l_classes: Vec<Vec<String>>,
    h_classes: Vec<Vec<String>>,
}

fn dump_green(cfg: &RunConfig, m: &FiniteMonoid) -> Result<Outcome, Error> {
    let g = green_classes(m);
    let named = |cs: &[Vec<usize>]| cs.iter().map(|c| c.iter().map(|&e| m.name(e)).collect()).collect();
    write_out(
        cfg,
        GreenDump {
            j_classes: named(&g.j.classes),
            r_classes: named(&g.r.classes),
            l_classes: named(&g.l.classes),
            h_classes: named(&g.h.classes),
        },
    )?;
    Ok(Outcome::new(EXIT_OK, render_green(m)))
}

#[derive(Serialize)]
struct ReesDump {
    ideal: Vec<String>,
    distinguished_r: Vec<String>,
    group: Vec<String>,
    rows: Vec<Vec<String>>,
    cols: Vec<Vec<String>>,
    /// sandwich[b][a] as a group element name, or null for zero.
    sandwich: Vec<Vec<Option<String>>>,
}

fn dump_rees(cfg: &RunConfig, m: &FiniteMonoid) -> Result<Outcome, Error> {
    let cert: GroupMappingCert = check_group_mapping(m)?;
    let rc = rees_coordinatize(m, &cert)?;
    let names = |xs: &[usize]| xs.iter().map(|&e| m.name(e)).collect::<Vec<_>>();
    let dump = ReesDump {
        ideal: names(&cert.ideal),
        distinguished_r: names(&cert.distinguished_r),
        group: names(&rc.group_elems),
        rows: rc.rows.iter().map(|r| names(r)).collect(),
        cols: rc.cols.iter().map(|c| names(c)).collect(),
        sandwich: rc
            .sandwich
            .iter()
            .map(|row| row.iter().map(|c| c.map(|g| m.name(rc.group_elems[g]))).collect())
            .collect(),
    };
    write_out(cfg, &dump)?;
    let mut s = format!("0-minimal ideal: {} elements, zero {}\n", dump.ideal.len(), m.name(cert.zero));
    writeln!(s, "maximal subgroup G = {{{}}}", dump.group.join(", ")).unwrap();
    writeln!(s, "R = {{{}}}", dump.distinguished_r.join(", ")).unwrap();
    writeln!(s, "|A| = {} rows, |B| = {} columns", dump.rows.len(), dump.cols.len()).unwrap();
    s.push_str("sandwich C(b, a):\n");
    for (b, row) in dump.sandwich.iter().enumerate() {
        let cells: Vec<&str> = row.iter().map(|c| c.as_deref().unwrap_or("0")).collect();
        writeln!(s, "  b{b}: {}", cells.join(" ")).unwrap();
    }
    Ok(Outcome::new(EXIT_OK, s))
}

/// Parse a set-partition in the monoid's point names; handy for tests.
pub fn parse_label(m: &FiniteMonoid, text: &str) -> Result<SetPartition, Error> {
    let cert = check_group_mapping(m)?;
    let names: Vec<String> = cert.distinguished_r.iter().map(|&p| m.name(p)).collect();
    SetPartition::parse(text, &names)
}
