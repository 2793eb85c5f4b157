//! `iet-lang`: command-line access to the ietlang pipeline.
//!
//! Exit status is 0 on success, 1 when a requested check comes out negative
//! and 2 on bad input.

mod commands;
mod input;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use input::Source;

#[derive(Debug)]
pub enum CliError {
    /// Bad arguments or unreadable input.
    Input(String),
    /// A check asked for on the command line did not hold; the report is still printed.
    Negative { output: String, reason: String },
}

impl CliError {
    pub fn input<E: std::fmt::Display>(e: E) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<ietlang::corpus::CorpusError> for CliError {
    fn from(e: ietlang::corpus::CorpusError) -> Self {
        CliError::Input(e.to_string())
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Tsv,
    Dot,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum FlipChoice {
    /// Only the empty flip set.
    None,
    /// The empty set and every single letter.
    Singletons,
    /// Every subset (alphabets of at most five letters).
    All,
}

#[derive(Parser, Debug)]
#[command(name = "iet-lang", version, about = "Languages of interval exchanges, computed exactly")]
pub struct Cli {
    #[command(flatten)]
    pub source: Source,
    /// Depth N: words of length up to N are computed.
    #[arg(short = 'n', long, global = true)]
    pub depth: Option<usize>,
    #[arg(long, global = true, value_enum, default_value = "text")]
    pub format: Format,
    /// Order spec file (JSON with orderD, orderA, flips).
    #[arg(long, global = true, value_name = "FILE")]
    pub orders: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Natural coding of the orbit of one point.
    Code {
        /// The point: p/q, an integer, or exact JSON such as {"p":-1,"q":2,"bp":1,"bq":2,"d":5}.
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        #[arg(long, default_value_t = 10)]
        back: usize,
        #[arg(long, default_value_t = 10)]
        fwd: usize,
    },
    /// The language up to depth N (TSV gives the complexity table).
    Language,
    /// Complexity, bispecial classification, recurrence, left special chains and components.
    Analyze,
    /// Search order conditions, or check the one given with --orders.
    Orders {
        #[arg(long, value_enum, default_value = "none")]
        flips: FlipChoice,
        /// Same as --flips all.
        #[arg(long)]
        all_flips: bool,
        /// Exit 1 unless no order condition is found.
        #[arg(long)]
        expect_none: bool,
        /// Exit 1 unless this class (e.g. 132/231 or 132/231/1) is found.
        #[arg(long, value_name = "SPEC")]
        expect_class: Option<String>,
    },
    /// Rauzy graph G_n with n = --depth.
    Rauzy,
    /// Rebuild a standard exchange from the language and a measure.
    Construct {
        /// Letter weights (JSON list of exact numbers); defaults to the example's lengths or an empirical estimate.
        #[arg(long, value_name = "FILE")]
        measure: Option<PathBuf>,
    },
    /// Denjoy blow-up from the example, or an affine blow-up with --affine.
    Blowup {
        #[arg(long)]
        affine: bool,
        /// Log-slopes in units of ln 2 (JSON list); defaults to a sample from the feasibility search.
        #[arg(long, value_name = "FILE")]
        theta: Option<PathBuf>,
        #[arg(long)]
        max_orbit_depth: Option<usize>,
        /// How many intervals J_m to print on each side.
        #[arg(long, default_value_t = 3)]
        radius: i64,
    },
    /// Convergence of the Birkhoff sums along the example's sequences.
    Birkhoff {
        #[arg(long, value_name = "FILE")]
        theta: Option<PathBuf>,
    },
    /// Check a splitting of a base language.
    Split {
        /// Base example; defaults to the one named in the example.
        #[arg(long)]
        base: Option<String>,
        /// Comma-separated blocks, e.g. 13,2.
        #[arg(long)]
        blocks: Option<String>,
    },
    /// Insert a new letter between the limits of a chain of bispecials.
    Ttrok {
        #[arg(long)]
        omega: Option<char>,
    },
    /// Built-in examples.
    Corpus {
        #[command(subcommand)]
        action: CorpusAction,
    },
}

#[derive(Subcommand, Debug)]
pub enum CorpusAction {
    List,
    Show { name: String },
    /// Evaluate the expectations of the named examples (all if none given).
    Check { names: Vec<String> },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match commands::run(&cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(CliError::Negative { output, reason }) => {
            print!("{output}");
            eprintln!("check failed: {reason}");
            ExitCode::from(1)
        }
        Err(CliError::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
