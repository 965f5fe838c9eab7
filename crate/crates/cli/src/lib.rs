//! Command-line front end for the `arboreal` library.
//!
//! [`run`] parses arguments, executes one subcommand and returns the exit
//! code with the rendered report, so tests can drive the CLI in-process.

mod commands;
mod input;
mod report;
mod scan;

use std::ffi::OsString;
use std::path::PathBuf;
use std::time::Instant;

use arboreal::forest::DEFAULT_CACHE_CAPACITY;
use arboreal::Error;
use clap::{Args, Parser, Subcommand};

pub use input::{GraphArgs, Source};
pub use report::{Format, EXIT_INPUT, EXIT_OK, EXIT_SIZE, EXIT_VIOLATION};
pub use scan::{replay_witness, ScanSummary};

#[derive(Parser, Debug)]
#[command(name = "arboreal", version, about = "Exact Arboreal Gas probabilities and negative-correlation checks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Clone, Debug)]
pub struct Common {
    /// Output format (csv only for scalar reports)
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Memo entries kept per measure engine
    #[arg(long, default_value_t = DEFAULT_CACHE_CAPACITY)]
    pub cache_size: usize,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Emit a named graph (or re-emit a file) in graph text format
    Gen {
        #[command(flatten)]
        graph: GraphArgs,
        #[command(flatten)]
        common: Common,
    },
    /// Negative-correlation margin for one edge pair
    NcPair {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long)]
        e1: usize,
        #[arg(long)]
        e2: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Margins for every edge pair
    NcAll {
        #[command(flatten)]
        graph: GraphArgs,
        #[command(flatten)]
        common: Common,
    },
    /// Margin ℙ[S1]ℙ[S2] − ℙ[S1 ∪ S2] for disjoint edge sets
    NcSets {
        #[command(flatten)]
        graph: GraphArgs,
        /// Comma-separated edge indices
        #[arg(long)]
        s1: String,
        #[arg(long)]
        s2: String,
        #[command(flatten)]
        common: Common,
    },
    /// Forest polynomial in β of an event (uniform weights)
    Poly {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long, default_value = "")]
        require: String,
        #[arg(long, default_value = "")]
        forbid: String,
        #[command(flatten)]
        common: Common,
    },
    /// Weighted spanning-tree count with required and forbidden edges
    Trees {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long, default_value = "")]
        require: String,
        #[arg(long, default_value = "")]
        forbid: String,
        #[command(flatten)]
        common: Common,
    },
    /// Effective resistance between two vertices, weights as conductances
    Resistance {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long)]
        u: u32,
        #[arg(long)]
        v: u32,
        #[command(flatten)]
        common: Common,
    },
    /// Unit current flow between two vertices
    Flow {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long)]
        u: u32,
        #[arg(long)]
        v: u32,
        #[command(flatten)]
        common: Common,
    },
    /// Bridge deletion, series suppression and parallel merging
    Reduce {
        #[command(flatten)]
        graph: GraphArgs,
        /// Print the step log (text unless --format json)
        #[arg(long)]
        explain: bool,
        /// Repeat the pipeline until nothing changes
        #[arg(long)]
        fixpoint: bool,
        /// Decide an edge pair through the reduction
        #[arg(long, requires = "e2")]
        e1: Option<usize>,
        #[arg(long, requires = "e1")]
        e2: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Closed forms for the disjoint-pair second coefficient on K_n
    Kn {
        #[arg(long)]
        n: usize,
        /// Also compute the coefficients directly from the margin polynomial
        #[arg(long)]
        direct: bool,
        /// Evaluate Σ I_k for every n in [5, M] and report the threshold
        #[arg(long, value_name = "M")]
        ik_upto: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Monte Carlo samples (forest rejection sampler or Wilson's algorithm)
    Sample {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long, value_enum, default_value = "forest")]
        sampler: commands::Sampler,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 10_000)]
        samples: u64,
        /// Independent chains with seeds seed, seed+1, ...; counts are merged
        #[arg(long, default_value_t = 1)]
        chains: u64,
        #[arg(long, requires = "e2")]
        e1: Option<usize>,
        #[arg(long, requires = "e1")]
        e2: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Exhaustive margin scan over small connected graphs
    Scan {
        #[arg(long, default_value_t = 5)]
        n_max: usize,
        /// Comma-separated β grid
        #[arg(long, default_value = "1")]
        beta: String,
        #[arg(long, env = "ARBOREAL_WORKERS")]
        workers: Option<usize>,
        /// Directory for violation witness files
        #[arg(long)]
        witness_dir: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
}

impl Command {
    fn common(&self) -> &Common {
        match self {
            Command::Gen { common, .. }
            | Command::NcPair { common, .. }
            | Command::NcAll { common, .. }
            | Command::NcSets { common, .. }
            | Command::Poly { common, .. }
            | Command::Trees { common, .. }
            | Command::Resistance { common, .. }
            | Command::Flow { common, .. }
            | Command::Reduce { common, .. }
            | Command::Kn { common, .. }
            | Command::Sample { common, .. }
            | Command::Scan { common, .. } => common,
        }
    }

    fn default_format(&self) -> Format {
        match self {
            Command::Gen { .. } | Command::Reduce { explain: true, .. } => Format::Text,
            _ => Format::Json,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::SizeLimit { .. } | Error::TooDense { .. } => EXIT_SIZE,
        _ => EXIT_INPUT,
    }
}

pub fn run<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                Outcome { code: EXIT_INPUT, stdout: String::new(), stderr: text }
            } else {
                Outcome { code: EXIT_OK, stdout: text, stderr: String::new() }
            };
        }
    };
    let started = Instant::now();
    let format = cli.command.common().format.unwrap_or(cli.command.default_format());
    match commands::execute(&cli.command) {
        Ok(report) => {
            let timing = started.elapsed().as_millis() as u64;
            match report.render(format, timing) {
                Ok(stdout) => Outcome { code: report.code, stdout, stderr: String::new() },
                Err(message) => Outcome { code: EXIT_INPUT, stdout: String::new(), stderr: format!("error: {message}\n") },
            }
        }
        Err(e) => Outcome {
            code: exit_code(&e),
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
        },
    }
}
