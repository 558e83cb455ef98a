mod commands;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Verification, classification, jet and Diophantine tools for the sharing problem
/// `f = a => f' = a`, `f' = b => f = b`.
#[derive(Parser, Debug)]
#[command(name = "sharelab", version)]
pub struct Cli {
    #[command(flatten)]
    pub config: CliConfig,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct CliConfig {
    /// Working precision in bits for float arithmetic.
    #[arg(long = "precision", global = true, env = "SHARELAB_PRECISION", default_value_t = 128)]
    pub precision_bits: usize,
    #[arg(long, global = true, default_value_t = 1e-24)]
    pub tol: f64,
    #[arg(long, global = true, value_enum, default_value_t = RegimeArg::Auto)]
    pub regime: RegimeArg,
    /// Allow a = 0 or b = 0.
    #[arg(long, global = true)]
    pub relaxed: bool,
    #[arg(long, global = true, value_enum, default_value_t = OutputArg::Text)]
    pub output: OutputArg,
    /// Also write the structured report to this file.
    #[arg(long, global = true)]
    pub out: Option<std::path::PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum RegimeArg {
    Exact,
    Float,
    Auto,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutputArg {
    Text,
    Structured,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check both implications for a candidate.
    Verify(VerifyArgs),
    /// List the solution families for (a, b).
    Classify(ValueArgs),
    /// Integer certificates.
    #[command(subcommand)]
    Diophantine(DioCommand),
    /// Extend a seed through the Taylor recurrence.
    Jet(JetArgs),
}

#[derive(Args, Debug)]
pub struct ValueArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub a: String,
    #[arg(long, allow_hyphen_values = true)]
    pub b: String,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// Candidate file (structured text with a "kind" field).
    #[arg(conflicts_with_all = ["family", "expr", "exppoly"])]
    pub candidate: Option<std::path::PathBuf>,
    #[arg(long, conflicts_with_all = ["expr", "exppoly"])]
    pub family: Option<String>,
    #[arg(long, allow_hyphen_values = true, conflicts_with = "exppoly")]
    pub expr: Option<String>,
    /// `P(e^{lambda z})` from --lambda and --coeffs.
    #[arg(long, requires_all = ["lambda", "coeffs"])]
    pub exppoly: bool,
    #[arg(long, allow_hyphen_values = true)]
    pub lambda: Option<String>,
    /// Coefficients of P, constant term first, comma separated.
    #[arg(long, allow_hyphen_values = true)]
    pub coeffs: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub a: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub b: Option<String>,
    /// Free constant of a family.
    #[arg(long = "C", allow_hyphen_values = true, default_value = "1")]
    pub c: String,
    /// Search rectangle `x0,x1,y0,y1` for closed-form candidates.
    #[arg(long, allow_hyphen_values = true, default_value = "-5,5,-5,5")]
    pub region: String,
    /// Seeds per side of the search grid.
    #[arg(long, default_value_t = 21)]
    pub grid: usize,
    /// Sample points for the constancy estimate of g.
    #[arg(long, default_value_t = 100)]
    pub samples: usize,
}

#[derive(Subcommand, Debug)]
pub enum DioCommand {
    /// Search for n >= 1 with `(k+1)(n+1)^2 + n` a perfect square.
    Squares {
        #[arg(long, value_delimiter = ',', default_value = "2,3,4")]
        k: Vec<u64>,
        #[arg(long, default_value_t = 1_000_000)]
        nmax: u64,
    },
    /// Residues of `5(n+1)^2 + n` and of squares modulo 9.
    Mod9,
    /// `x^2 - y^2 = 17` with `x = 8n + 9`.
    Diffsq,
    /// `x^2 - D y^2 = N` by descent.
    Pell {
        #[arg(long = "D", allow_hyphen_values = true)]
        d: i64,
        #[arg(long = "N", allow_hyphen_values = true)]
        n: i64,
        /// Congruence `r:m` meaning `x = r (mod m)`.
        #[arg(long)]
        xmod: Option<String>,
        #[arg(long, value_enum, default_value_t = ParityArg::Any)]
        y: ParityArg,
        #[arg(long)]
        bound: i64,
        /// Unit `x,y` of norm 1 for the descent step.
        #[arg(long, default_value = "7,4")]
        unit: String,
    },
    /// Sweep of the `(m, n, k)` equation over odd m.
    Mnk {
        #[arg(long, default_value_t = 100)]
        nmax: u64,
        #[arg(long, default_value_t = 100)]
        kmax: u64,
        #[arg(long, default_value_t = 99)]
        mmax: u64,
    },
    /// Sweep of the `(d, j, k, n)` equation.
    Djeq {
        #[arg(long, default_value_t = 12)]
        dmax: u64,
        #[arg(long, default_value_t = 6)]
        jmax: u64,
        #[arg(long, default_value_t = 2)]
        kmin: u64,
        #[arg(long, default_value_t = 4)]
        kmax: u64,
        #[arg(long, default_value_t = 10_000)]
        nmax: u64,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum ParityArg {
    Even,
    Odd,
    Any,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum AnchorArg {
    APoint,
    BPoint,
}

#[derive(Args, Debug)]
pub struct JetArgs {
    #[arg(long, conflicts_with = "expr")]
    pub family: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub expr: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub a: String,
    #[arg(long, allow_hyphen_values = true)]
    pub b: Option<String>,
    #[arg(long = "C", allow_hyphen_values = true, default_value = "1")]
    pub c: String,
    /// Order of the zeros of f''; taken from the candidate when omitted.
    #[arg(long)]
    pub k: Option<u32>,
    #[arg(long, value_enum, default_value_t = AnchorArg::APoint)]
    pub anchor: AnchorArg,
    #[arg(long, default_value_t = 12)]
    pub order: usize,
    /// Seed value of f''; by default every admissible value is tried.
    #[arg(long, allow_hyphen_values = true)]
    pub fpp: Option<String>,
    /// Anchor of a closed-form expression.
    #[arg(long, allow_hyphen_values = true, default_value = "0")]
    pub z0: String,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(commands::EXIT_USAGE),
            };
        }
    };
    ExitCode::from(commands::run(&cli))
}
