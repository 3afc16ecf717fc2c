//! `entropic` command-line front end.
//!
//! Every subcommand validates its parameters before computing anything and
//! writes its output atomically. Exit codes: 0 success, 1 solver failure or
//! unwritable output, 2 invalid arguments or input files.

pub mod commands;
pub mod output;

use clap::{Args, Parser, Subcommand};
use entropic_core::discretize::{EntropyKind, Quadrature};
use entropic_core::entropy::Base;
use entropic_core::minmax::DEFAULT_TOL;
use serde::Serialize;
use std::ffi::OsString;
use std::fmt;
use std::path::PathBuf;

#[derive(Debug, Parser)]
#[command(name = "entropic", version, about = "Conditional entropies, overlaps and uncertainty-relation checks")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct Global {
    /// Logarithm base for reported entropies: bits or nats.
    #[arg(long, global = true, default_value = "bits")]
    pub base: Base,
    /// Absolute SDP tolerance on the probability scale.
    #[arg(long, allow_negative_numbers = true, global = true, default_value_t = DEFAULT_TOL)]
    pub tol: f64,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Position–momentum overlap c(δq, δp) for a single pair or a sweep.
    Overlap(OverlapArgs),
    /// Saturation gap of the von Neumann relation for EPR states.
    EprGap(EprGapArgs),
    /// Regularized discretized entropies H(X_α|B) + log α as α halves.
    Ladder(LadderArgs),
    /// Entropy of a cq state file.
    Entropy(EntropyArgs),
    /// Seeded random checks of the uncertainty relations and lemmas.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct OverlapArgs {
    #[arg(long, allow_negative_numbers = true, requires = "delta_p", conflicts_with = "sweep")]
    pub delta_q: Option<f64>,
    #[arg(long, allow_negative_numbers = true, requires = "delta_q")]
    pub delta_p: Option<f64>,
    /// `log:lo:hi:n` or `lin:lo:hi:n` over δ = √(δq δp), with δq = δp = δ.
    #[arg(long, value_parser = parse_sweep)]
    pub sweep: Option<Sweep>,
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Sweep {
    pub log: bool,
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

impl Sweep {
    pub fn points(&self) -> Vec<f64> {
        let at = |t: f64| {
            if self.log {
                (self.lo.ln() + t * (self.hi.ln() - self.lo.ln())).exp()
            } else {
                self.lo + t * (self.hi - self.lo)
            }
        };
        match self.n {
            1 => vec![self.lo],
            // endpoints exactly as given
            n => (0..n)
                .map(|i| match i {
                    0 => self.lo,
                    i if i == n - 1 => self.hi,
                    i => at(i as f64 / (n - 1) as f64),
                })
                .collect(),
        }
    }
}

pub fn parse_sweep(s: &str) -> Result<Sweep, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let [scale, lo, hi, n] = parts[..] else {
        return Err(format!("expected scale:lo:hi:n, got {s:?}"));
    };
    let log = match scale {
        "log" => true,
        "lin" => false,
        other => return Err(format!("sweep scale must be log or lin, got {other:?}")),
    };
    let num = |t: &str| t.parse::<f64>().map_err(|e| format!("{t:?}: {e}"));
    let (lo, hi) = (num(lo)?, num(hi)?);
    let n: usize = n.parse().map_err(|e| format!("{n:?}: {e}"))?;
    if !(lo > 0.0 && hi >= lo && hi.is_finite()) || n == 0 {
        return Err(format!("need 0 < lo ≤ hi and n ≥ 1, got {s:?}"));
    }
    Ok(Sweep { log, lo, hi, n })
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct EprGapArgs {
    #[arg(long, allow_negative_numbers = true, default_value_t = 0.0)]
    pub r_min: f64,
    #[arg(long, allow_negative_numbers = true, default_value_t = 3.0)]
    pub r_max: f64,
    #[arg(long, default_value_t = 61)]
    pub n: usize,
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct LadderArgs {
    /// Wavefunction JSON file.
    #[arg(long, required_unless_present_any = ["gaussian", "epr"], conflicts_with_all = ["gaussian", "epr"])]
    pub state: Option<PathBuf>,
    /// Built-in Gaussian wave packet with this position standard deviation.
    #[arg(long, allow_negative_numbers = true, conflicts_with = "epr")]
    pub gaussian: Option<f64>,
    /// Built-in EPR state with symplectic eigenvalue ν ≥ 1, memory in a
    /// truncated Fock basis.
    #[arg(long, allow_negative_numbers = true)]
    pub epr: Option<f64>,
    /// Grid points for the built-in states; the grid spans ±20 standard
    /// deviations of the ladder quadrature.
    #[arg(long, default_value_t = 1 << 15)]
    pub grid_n: usize,
    #[arg(long, default_value = "position")]
    pub quadrature: Quadrature,
    #[arg(long, default_value = "vn")]
    pub entropy: EntropyKind,
    #[arg(long, allow_negative_numbers = true, default_value_t = 1.0)]
    pub alpha0: f64,
    #[arg(long, default_value_t = 8)]
    pub n_max: usize,
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct EntropyArgs {
    #[arg(long)]
    pub cq: PathBuf,
    /// vn, hmin or hmax.
    #[arg(long)]
    pub measure: EntropyKind,
    #[arg(long)]
    pub json: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct VerifyArgs {
    /// minmax, vn, frank-lieb, dilation, lemmas or all.
    #[arg(long, default_value = "all")]
    pub relation: String,
    /// Subsystem dimensions `A,B,C`; bipartite relations use `A,B`.
    #[arg(long, value_delimiter = ',', default_value = "2,2,2")]
    pub dims: Vec<usize>,
    #[arg(long, default_value_t = 50)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub json: Option<PathBuf>,
}

#[derive(Debug)]
pub enum Failure {
    Invalid(String),
    Solver(String),
    Output(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Invalid(_) => 2,
            Failure::Solver(_) | Failure::Output(_) => 1,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Invalid(m) => write!(f, "invalid input: {m}"),
            Failure::Solver(m) => write!(f, "solver failure: {m}"),
            Failure::Output(m) => write!(f, "cannot write output: {m}"),
        }
    }
}

impl From<entropic_core::Error> for Failure {
    fn from(e: entropic_core::Error) -> Self {
        match e {
            entropic_core::Error::NonConvergence { .. } => Failure::Solver(e.to_string()),
            other => Failure::Invalid(other.to_string()),
        }
    }
}

/// Parse `argv` (including the program name) and execute; returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match commands::execute(&cli) {
        Ok(()) => 0,
        Err(f) => {
            eprintln!("error: {f}");
            f.exit_code()
        }
    }
}
