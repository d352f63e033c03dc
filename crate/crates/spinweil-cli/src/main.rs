//! `spinweil`: JSON-in/JSON-out access to the exact algebra engine.
//!
//! Exit status is 0 on success, 1 when a check reports a failure, and 2 on
//! malformed input or arguments.

mod commands;
mod fixtures;
mod verify;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::Value;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(name = "spinweil", version, about = "Exact spin, Clifford and Weil-type algebra for abelian varieties")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Write the JSON report here instead of standard output.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Level {
    Quick,
    Full,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Igusa quartic of an even class on an abelian threefold.
    Igusa {
        #[arg(long, default_value_t = 3)]
        n: usize,
        /// Graded element JSON, inline or as a file path.
        #[arg(long)]
        input: String,
    },
    /// Secant plane through a class with nonzero Igusa invariant.
    Secant {
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[arg(long)]
        input: String,
    },
    /// Hermitian form of the CM structure of a secant: signature, discriminant, Gram matrix.
    Hermitian {
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        d: Option<u64>,
        /// Secant bundle JSON; when absent the standard secant for `n`, `d` is used.
        #[arg(long)]
        input: Option<String>,
    },
    /// Identity suites for the Chevalley and Orlov isomorphisms at one rank.
    ChevalleyCheck {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Level::Quick)]
        level: Level,
    },
    /// A named theta-ring class.
    Theta {
        #[arg(long)]
        formula: String,
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[arg(long, allow_hyphen_values = true)]
        d: Option<i64>,
        #[arg(long, allow_hyphen_values = true)]
        m: Option<i64>,
        #[arg(long, allow_hyphen_values = true, default_value_t = 0)]
        rho: i64,
        #[arg(long, allow_hyphen_values = true, default_value_t = 1)]
        tau: i64,
        #[arg(long, default_value_t = 1)]
        q: i64,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, allow_hyphen_values = true)]
        a3: Option<i64>,
    },
    /// Rank and kernel of the polyvector contraction against a Chern character.
    ContractionKernel {
        /// Theta polynomial JSON, inline or as a file path.
        #[arg(long)]
        input: Option<String>,
        /// Use `ch = 1 + Theta - (d/2) Theta^2 - d [pt]` on a threefold.
        #[arg(long, allow_hyphen_values = true)]
        d: Option<i64>,
        /// Also report the annihilator of `ch [x] ch` on the product.
        #[arg(long)]
        product: bool,
    },
    /// Runs the full identity battery.
    Verify {
        #[arg(long, value_enum, default_value_t = Level::Quick)]
        level: Level,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Canonical JSON for a named object.
    EmitFixture { name: String },
}

/// What a command produced: the JSON report and whether all its checks passed.
pub struct Outcome {
    pub report: Value,
    pub passed: bool,
}

impl Outcome {
    pub fn ok(report: Value) -> Outcome {
        Outcome { report, passed: true }
    }
}

/// Reads `--input`: inline JSON when it starts with `{` or `[`, otherwise a path.
pub fn read_input(arg: &str) -> Result<String> {
    let t = arg.trim_start();
    if t.starts_with('{') || t.starts_with('[') {
        Ok(arg.to_string())
    } else {
        std::fs::read_to_string(arg).with_context(|| format!("reading input file {arg}"))
    }
}

fn configure_threads() -> Result<()> {
    if let Ok(v) = std::env::var("SPINWEIL_THREADS") {
        let n: usize = v.parse().with_context(|| format!("SPINWEIL_THREADS={v} is not a positive integer"))?;
        rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global().context("configuring the thread pool")?;
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<Outcome> {
    configure_threads()?;
    match &cli.command {
        Command::Igusa { n, input } => commands::igusa(*n, &read_input(input)?),
        Command::Secant { n, input } => commands::secant(*n, &read_input(input)?),
        Command::Hermitian { n, d, input } => {
            let text = input.as_deref().map(read_input).transpose()?;
            commands::hermitian(*n, *d, text.as_deref())
        }
        Command::ChevalleyCheck { n, seed, level } => verify::chevalley_check(*n, *seed, *level),
        Command::Theta { formula, n, d, m, rho, tau, q, k, a3 } => {
            commands::theta(formula, &commands::ThetaParams { n: *n, d: *d, m: *m, rho: *rho, tau: *tau, q: *q, k: *k, a3: *a3 })
        }
        Command::ContractionKernel { input, d, product } => {
            let text = input.as_deref().map(read_input).transpose()?;
            commands::contraction_kernel(text.as_deref(), *d, *product)
        }
        Command::Verify { level, seed } => verify::verify(*level, *seed),
        Command::EmitFixture { name } => fixtures::emit_fixture(name).map(Outcome::ok),
    }
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
    let outcome = match run(&cli) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };
    let text = match serde_json::to_string_pretty(&outcome.report) {
        Ok(t) => t + "\n",
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let written = match &cli.output {
        Some(p) => std::fs::write(p, &text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    };
    if let Err(e) = written {
        eprintln!("error: {e:#}");
        return ExitCode::from(2);
    }
    ExitCode::from(if outcome.passed { 0 } else { 1 })
}
