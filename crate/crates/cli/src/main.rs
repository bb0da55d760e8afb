mod commands;
mod envelope;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use torsionlab::verify::DEFAULT_SEED;
use torsionlab::Error;

/// Default ceiling on `n` for the brute-force oracle.
pub const DEFAULT_MAX_ORACLE_N: usize = 8;

#[derive(Parser, Debug)]
#[command(name = "torsionlab", version, about = "Torsion indexes of Spin, SO, PGO and HSpin groups")]
pub struct Cli {
    /// Seed for every randomized step (the exact subsample of the degree-35 scan).
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,

    /// Worker threads for the parallel enumerations. Output does not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// Largest n accepted by `tau --method oracle`.
    #[arg(long, global = true, default_value_t = DEFAULT_MAX_ORACLE_N)]
    pub max_oracle_n: usize,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// The thresholds n0(s) and m0(s) of the Spin recursion.
    Table(TableArgs),
    /// A torsion index (or bounds on it) for one group.
    Tau(TauArgs),
    /// Run a verification suite; prints one JSON line per check.
    Verify(VerifyArgs),
    /// Decide (strong) decomposability of a set.
    Decomp(DecompArgs),
}

#[derive(Args, Debug)]
pub struct TableArgs {
    #[arg(long, default_value_t = 2)]
    pub s_min: u32,
    #[arg(long, default_value_t = 10)]
    pub s_max: u32,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Closed,
    Oracle,
    Elementary,
    Certificate,
}

impl Method {
    fn as_str(&self) -> &'static str {
        match self {
            Method::Closed => "closed",
            Method::Oracle => "oracle",
            Method::Elementary => "elementary",
            Method::Certificate => "certificate",
        }
    }
}

#[derive(Args, Debug)]
pub struct TauArgs {
    /// spin, so, pgo or hspin.
    #[arg(long)]
    pub family: torsionlab::generators::Family,
    #[arg(long)]
    pub n: u64,
    #[arg(long, value_enum, default_value_t = Method::Closed)]
    pub method: Method,
    /// `m` for the certificate method.
    #[arg(long)]
    pub m: Option<u64>,
    /// `J` for the certificate method, as a comma-separated list.
    #[arg(long = "J")]
    pub j: Option<String>,
    /// Oracle only: reduce products modulo 2^k (2-part only, no odd-part check).
    #[arg(long)]
    pub truncated_bits: Option<u32>,
    /// Print the JSON envelope instead of a one-line summary.
    #[arg(long)]
    pub json: bool,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum SuiteArg {
    Lemma32,
    Skj,
    Dsquared,
    Appendix8,
    Hspin12,
    Prop37,
    All,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(long, value_enum)]
    pub suite: SuiteArg,
    #[arg(long)]
    pub n: Option<usize>,
    /// Exact arithmetic everywhere.
    #[arg(long, conflicts_with = "truncated")]
    pub exact: bool,
    /// Truncated arithmetic wherever a congruence allows it.
    #[arg(long)]
    pub truncated: bool,
    /// Also write the `check_id,n,passed,elapsed_ms` summary to this file.
    #[arg(long)]
    pub summary_csv: Option<std::path::PathBuf>,
    /// Print one JSON envelope instead of JSON lines.
    #[arg(long)]
    pub json: bool,
}

#[derive(Args, Debug)]
pub struct DecompArgs {
    /// Comma-separated positive integers.
    #[arg(long)]
    pub set: String,
    #[arg(long)]
    pub n: Option<u64>,
    /// Also decide strong decomposability (needs --n).
    #[arg(long)]
    pub strong: bool,
}

/// Exit status: 0 success, 1 a check failed, 2 usage error, 3 budget exhausted.
pub fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::OverBudget(_) | Error::BudgetExhausted(_) => 3,
        Error::OddTorsion { .. } => 1,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(k) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(k).build_global() {
            eprintln!("warning: could not size the thread pool: {e}");
        }
    }
    match commands::run(&cli) {
        Ok(out) => {
            print!("{}", out.stdout);
            if out.all_passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}
