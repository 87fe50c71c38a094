//! `qlorenz`: quantile inequality curves and coefficients from the command line.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod output;
mod reproduce;

use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use qlorenz::{CurveIndex, DistributionModel};

/// A command-line validation failure (exit code 1).
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

const DIST_HELP: &str = "Income distribution as family:key=value,... Families: uniform, exponential, \
lognormal (optional sigma), chisq (k), paretoI and paretoII (a, optional sigma), weibull (beta, optional \
sigma), beta (alpha, beta). Incomes are in the units of sigma (default 1). Example: paretoII:a=2,sigma=100000";

#[derive(Debug, Parser)]
#[command(
    name = "qlorenz",
    version,
    about = "Quantile versions of the Lorenz curve and Gini coefficient",
    long_about = "Quantile versions of the Lorenz curve and Gini coefficient: population curves and \
coefficients, estimates from income data, influence functions, Monte Carlo studies, income transfers \
and convexity checks.\n\nCoefficients use the midpoint grid p_j = (j - 1/2)/J with J = 1000 unless \
--grid is given. Stochastic commands require --seed and reproduce their output exactly for a given seed.\n\n\
Exit codes: 0 success, 1 invalid input, 2 numerical failure."
)]
struct Cli {
    /// Worker threads for parallel work [default: available cores]
    #[arg(long, global = true, value_name = "N")]
    workers: Option<usize>,
    /// Write the result to PATH; the format follows the extension (.csv or .json).
    /// Without it an aligned text table goes to stdout.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

/// Curve selection: a single index 0..=3 or `all`.
#[derive(Debug, Clone, PartialEq)]
pub struct Indices(pub Vec<CurveIndex>);

impl FromStr for Indices {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s.eq_ignore_ascii_case("all") {
            return Ok(Indices(CurveIndex::ALL.to_vec()));
        }
        let i: u8 = s
            .parse()
            .map_err(|_| format!("expected 0, 1, 2, 3 or all, got '{s}'"))?;
        CurveIndex::from_number(i)
            .map(|c| Indices(vec![c]))
            .map_err(|e| e.to_string())
    }
}

impl Indices {
    /// The quantile indices only; `all` means 1..=3 here.
    pub fn quantile(&self) -> Result<Vec<CurveIndex>, UsageError> {
        if self.0.len() > 1 {
            return Ok(CurveIndex::QUANTILE.to_vec());
        }
        if self.0.iter().any(|i| !i.is_quantile()) {
            return Err(UsageError("this command supports --index 1, 2, 3 or all".into()));
        }
        Ok(self.0.clone())
    }
}

#[derive(Debug, Args)]
pub struct DistArg {
    #[arg(long, value_name = "SPEC", help = DIST_HELP)]
    pub dist: DistributionModel,
}

#[derive(Debug, Args)]
pub struct GridArg {
    /// Number of midpoint-grid points J used for the coefficient sums
    #[arg(long, value_name = "J", default_value_t = qlorenz::DEFAULT_GRID)]
    pub grid: usize,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Population curve values L_i(p): one p, or the whole midpoint grid
    Curve(commands::CurveArgs),
    /// Population coefficients G_i(J)
    Gini(commands::GiniArgs),
    /// Estimated coefficients from a CSV file of incomes
    Estimate(commands::EstimateArgs),
    /// Influence functions of the curves L_1..L_3 and of their coefficients
    Influence(commands::InfluenceArgs),
    /// Asymptotic standard errors sigma_i = lim sqrt(n) SE[G_i hat]
    Se(commands::SeArgs),
    /// Monte Carlo sqrt(n) * root mean squared error of the estimators
    Simulate(commands::SimulateArgs),
    /// Monte Carlo coverage and width of G_hat +- 1.96 sigma / sqrt(n)
    Ci(commands::CiArgs),
    /// Median-preserving levy transfer and its effect on the coefficients
    Transfer(commands::TransferArgs),
    /// Second-difference convexity checks of the curves
    Convexity(commands::ConvexityArgs),
    /// Reproduce a table or figure data set
    Tables(reproduce::TablesArgs),
}

/// 2 for numerical failures, 1 for everything else.
fn exit_code(error: &anyhow::Error) -> u8 {
    let numerical = error.chain().any(|cause| {
        matches!(
            cause.downcast_ref::<qlorenz::Error>(),
            Some(qlorenz::Error::Quadrature { .. } | qlorenz::Error::RootFinding(_))
        )
    });
    if numerical {
        2
    } else {
        1
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    if let Some(n) = cli.workers {
        if n == 0 {
            anyhow::bail!(UsageError("--workers must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    let table = match cli.command {
        Command::Curve(a) => commands::curve(&a)?,
        Command::Gini(a) => commands::gini(&a)?,
        Command::Estimate(a) => commands::estimate(&a)?,
        Command::Influence(a) => commands::influence(&a)?,
        Command::Se(a) => commands::se(&a)?,
        Command::Simulate(a) => commands::simulate(&a)?,
        Command::Ci(a) => commands::ci(&a)?,
        Command::Transfer(a) => commands::transfer(&a)?,
        Command::Convexity(a) => commands::convexity(&a)?,
        Command::Tables(a) => reproduce::tables(&a)?,
    };
    output::emit(&table, cli.out.as_deref())
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
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
