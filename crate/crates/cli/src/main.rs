use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use krflow::{run, Command, RunConfig};
use krflow_core::states::Backend;

/// Lower bounds for Krohn–Rhodes complexity via flows on set-partitions.
#[derive(Parser)]
#[command(name = "krflow", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Common {
    /// Monoid file (JSON Cayley table).
    #[arg(long)]
    input: PathBuf,
    /// Write a JSON report here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Compute the flow lower bound for a group mapping monoid.
    Analyze {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 0)]
        min_level: usize,
        #[arg(long, default_value_t = 1)]
        max_level: usize,
        /// explicit, symbolic or both
        #[arg(long, default_value = "both")]
        backend: Backend,
        /// Letters allowed in a loop body.
        #[arg(long)]
        term_budget: Option<usize>,
        #[arg(long)]
        star_depth: Option<usize>,
        /// Give up (exit 3) after this many states per level.
        #[arg(long)]
        max_states: Option<usize>,
        /// `trivial` or `file:<path>`.
        #[arg(long = "typeI-oracle", default_value = "trivial")]
        oracle: String,
        /// Keep going after the first bad pair.
        #[arg(long)]
        exhaustive: bool,
        /// On NOT_GROUP_MAPPING, still print the Green structure.
        #[arg(long)]
        auto_gm_note: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Check a hand-written flow on a partial automaton.
    Verify {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        automaton: PathBuf,
        #[arg(long)]
        labeling: PathBuf,
    },
    /// Run the law suite on the first k points of R.
    Laws {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',', default_value = "2,3")]
        points: Vec<usize>,
        #[arg(long, default_value_t = 3)]
        depth: usize,
    },
    /// Print the J-classes with their R, L and H structure.
    DumpGreen {
        #[command(flatten)]
        common: Common,
    },
    /// Print Rees coordinates of the 0-minimal ideal.
    DumpRees {
        #[command(flatten)]
        common: Common,
    },
}

fn config(cmd: Cmd) -> RunConfig {
    let with = |c: Command, common: Common| {
        let mut cfg = RunConfig::new(c, common.input);
        cfg.out = common.out;
        cfg
    };
    match cmd {
        Cmd::Analyze {
            common,
            min_level,
            max_level,
            backend,
            term_budget,
            star_depth,
            max_states,
            oracle,
            exhaustive,
            auto_gm_note,
            seed,
        } => {
            let mut cfg = with(Command::Analyze, common);
            cfg.min_level = min_level;
            cfg.max_level = max_level;
            cfg.backend = backend;
            cfg.term_budget = term_budget.unwrap_or(cfg.term_budget);
            cfg.star_depth = star_depth.unwrap_or(cfg.star_depth);
            cfg.max_states = max_states.unwrap_or(cfg.max_states);
            cfg.oracle = oracle;
            cfg.exhaustive = exhaustive;
            cfg.auto_gm_note = auto_gm_note;
            cfg.seed = seed;
            cfg
        }
        Cmd::Verify { common, automaton, labeling } => {
            let mut cfg = with(Command::Verify, common);
            cfg.automaton = Some(automaton);
            cfg.labeling = Some(labeling);
            cfg
        }
        Cmd::Laws { common, points, depth } => {
            let mut cfg = with(Command::Laws, common);
            cfg.law_points = points;
            cfg.law_depth = depth;
            cfg
        }
        Cmd::DumpGreen { common } => with(Command::DumpGreen, common),
        Cmd::DumpRees { common } => with(Command::DumpRees, common),
    }
}

fn main() -> ExitCode {
    // clap's own usage errors exit 2, which is taken by NOT_GROUP_MAPPING
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { krflow::EXIT_INPUT as u8 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let outcome = run(&config(cli.cmd));
    if outcome.code == krflow::EXIT_INPUT {
        eprint!("{}", outcome.stdout);
    } else {
        print!("{}", outcome.stdout);
    }
    ExitCode::from(outcome.code as u8)
}
