mod commands;
mod input;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::input::VtreeSource;

#[derive(Parser, Debug)]
#[command(
    name = "twsdd",
    version,
    about = "Compile Boolean circuits into canonical structured forms and analyse them"
)]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Print the JSON report on stdout instead of the summary.
    #[arg(long, global = true)]
    pub json: bool,
    /// Also write the JSON report to this file.
    #[arg(long, global = true, value_name = "PATH")]
    pub report: Option<PathBuf>,
    /// Most variables a truth table may have (overrides TWSDD_CAP, at most 32).
    #[arg(long, global = true)]
    pub cap: Option<usize>,
    /// Seed for randomized choices.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Include wall-clock time in reports.
    #[arg(long, global = true)]
    pub timing: bool,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Separating,
    Auto,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Compile a circuit (.bc, or .cnf for DIMACS) into a dsNNF or an SDD.
    Compile {
        input: PathBuf,
        #[arg(long, conflicts_with = "dsnnf")]
        sdd: bool,
        #[arg(long)]
        dsnnf: bool,
        /// derive | linear[:a,b,..] | balanced | random | isa:<k>,<m> | <file.vtree>
        #[arg(long, default_value = "derive")]
        vtree: VtreeSource,
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Write the vtree used, in .vtree format.
        #[arg(long)]
        vtree_out: Option<PathBuf>,
        #[arg(long)]
        no_verify: bool,
    },
    /// Model count and weighted model count of a compiled form.
    Count {
        form: PathBuf,
        /// `name = p` lines or a JSON object; unlisted variables get 1/2.
        #[arg(long)]
        weights: Option<PathBuf>,
    },
    /// Check the structural properties of a compiled form.
    Verify {
        form: PathBuf,
        /// Also check equivalence with this circuit.
        #[arg(long)]
        circuit: Option<PathBuf>,
    },
    /// Rank of a communication matrix.
    Rank {
        /// disjointness:<n>, or a circuit file split by --left
        #[arg(long = "fn")]
        function: String,
        /// Row variables, comma separated; the rest index columns.
        #[arg(long)]
        left: Option<String>,
    },
    /// Compile the hard family and check the rank floor at the cut.
    BenchH {
        #[arg(long, default_value_t = 1)]
        k: u32,
        /// `2,3,4` or `2..4`
        #[arg(long, default_value = "2..4")]
        n: String,
        #[arg(long, value_enum, default_value_t = Mode::Separating)]
        mode: Mode,
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Worker threads; 0 uses every core.
        #[arg(long, default_value_t = 0)]
        jobs: usize,
    },
    /// Build the indirect storage SDD.
    Isa {
        #[arg(long)]
        k: u32,
        #[arg(long)]
        m: u32,
        /// Check equivalence, structure and gate-count bounds.
        #[arg(long)]
        audit: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Lineage of a union of conjunctive queries over a database.
    Lineage {
        /// Query text, or @file to read it from a file.
        #[arg(long)]
        query: String,
        #[arg(long)]
        db: PathBuf,
        /// Write the lineage circuit in .bc format.
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Skip compiling the lineage to compute its probability.
        #[arg(long)]
        no_prob: bool,
    },
    /// Tree decomposition of a circuit's underlying graph.
    Decompose {
        input: PathBuf,
        /// Exact treewidth by dynamic programming (small graphs only).
        #[arg(long)]
        exact: bool,
        /// Write the decomposition in PACE .td format.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match commands::run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(commands::exit_code(&e))
        }
    }
}
