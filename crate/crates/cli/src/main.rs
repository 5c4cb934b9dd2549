mod commands;
mod report;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "polydomain", version, about = "Certification pipelines for noncommutative polydomains")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Debug, Serialize)]
pub struct Common {
    /// Polydomain spec file (JSON).
    #[arg(long, global = true)]
    pub spec: Option<PathBuf>,
    /// Operator tuple file (JSON).
    #[arg(long, global = true)]
    pub tuple: Option<PathBuf>,
    /// Truncation degree: a scalar, a comma list per factor, or `auto`.
    #[arg(long, global = true)]
    pub degree: Option<String>,
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub tol: f64,
    /// Cross-group commutator tolerance; defaults to `1e-10 * max ||T||^2`.
    #[arg(long, global = true)]
    pub comm_tol: Option<f64>,
    #[arg(long, global = true, default_value_t = 1e-8)]
    pub eps_rank: f64,
    /// Tolerance for constructed identities (round trips, intertwinings).
    #[arg(long, global = true, default_value_t = 1e-7)]
    pub residual_tol: f64,
    #[arg(long, global = true, value_delimiter = ',')]
    pub radius_grid: Vec<f64>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Exact rational b-tables.
    #[arg(long, global = true)]
    pub exact: bool,
}

#[derive(Clone, Copy, Debug, Serialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum PurityArg {
    Pure,
    Boundary,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    /// Membership certificate, purity and radial scan.
    Check,
    /// Universal model shifts and b-tables.
    Model,
    /// Berezin kernel.
    Kernel,
    /// Berezin transform of g (identity by default).
    Berezin {
        /// Operator on the truncated Fock space (LinOp JSON).
        #[arg(long)]
        g: Option<PathBuf>,
        /// Free series evaluated at the universal model.
        #[arg(long)]
        series: Option<PathBuf>,
    },
    /// von Neumann inequality against the universal model.
    Vn {
        /// Polynomial pair samples; random when omitted.
        #[arg(long)]
        pairs: Option<PathBuf>,
        #[arg(long, default_value_t = 5)]
        samples: usize,
        #[arg(long, default_value_t = 3)]
        max_deg: usize,
    },
    /// Hardy-norm estimates over the radius grid.
    Hnorm {
        #[arg(long)]
        series: PathBuf,
    },
    /// Beurling-type factorization of Y on the Fock space tensor a coefficient space.
    Beurling {
        #[arg(long)]
        y: PathBuf,
    },
    /// Invariant and reducing subspace tests for a projection.
    Subspace {
        #[arg(long)]
        p: PathBuf,
    },
    /// Characteristic function.
    Charfn,
    /// Functional model space.
    ModelSpace,
    /// Pure minimal dilation.
    Dilate {
        #[arg(long, default_value_t = polydomain::charfn::DEFAULT_DIL_DEG)]
        dil_deg: usize,
    },
    /// Wold-type split.
    Wold,
    /// Seeded random member, written as a tuple file.
    Generate {
        #[arg(long)]
        dim: usize,
        #[arg(long, value_enum, default_value_t = PurityArg::Pure)]
        purity: PurityArg,
    },
}

pub enum Outcome {
    Report(report::Report),
    Raw(String),
}

fn emit(out: &Option<PathBuf>, text: &str) -> std::io::Result<()> {
    match out {
        Some(p) => std::fs::write(p, format!("{text}\n")),
        None => {
            let mut so = std::io::stdout().lock();
            writeln!(so, "{text}")
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = std::time::Instant::now();
    let outcome = commands::run(&cli.command, &cli.common);
    let (text, code) = match outcome {
        Ok(Outcome::Report(mut r)) => {
            r.timings.insert("total_ms".into(), start.elapsed().as_secs_f64() * 1e3);
            let code = if r.hard_pass() { 0 } else { 1 };
            (serde_json::to_string_pretty(&r).expect("report serializes"), code)
        }
        Ok(Outcome::Raw(s)) => (s, 0),
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };
    if let Err(e) = emit(&cli.common.out, &text) {
        eprintln!("error: cannot write output: {e}");
        return ExitCode::from(2);
    }
    ExitCode::from(code)
}
