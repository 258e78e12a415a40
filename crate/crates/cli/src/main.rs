//! `secperc` — reproducible experiment runner for the secrecy-graph
//! percolation laboratory.
//!
//! Every run is a pure function of `(config, seed)`: results land in
//! `<output_dir>/<subcommand>-<seed>/` as `summary.json`, `data.csv`
//! (where applicable), and a digest manifest. Exit codes: 0 success,
//! 2 validation error, 3 runtime/estimator error, 4 I/O error.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use config::{ExperimentConfig, Overrides};
use secperc_core::Error;

#[derive(Debug)]
pub enum CliError {
    Validation(String),
    Runtime(String),
    Io(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Parameter(msg) => CliError::Validation(format!("parameter error: {msg}")),
            Error::Bracket(msg) => CliError::Runtime(format!("bracket error: {msg}")),
            Error::Internal(msg) => CliError::Runtime(format!("internal error: {msg}")),
        }
    }
}

impl CliError {
    fn kind(&self) -> &'static str {
        match self {
            CliError::Validation(_) => "validation",
            CliError::Runtime(_) => "runtime",
            CliError::Io(_) => "io",
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Validation(m) | CliError::Runtime(m) | CliError::Io(m) => m,
        }
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Runtime(_) => 3,
            CliError::Io(_) => 4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EventName {
    #[value(name = "B")]
    B,
    #[value(name = "Ac")]
    Ac,
    #[value(name = "Gc")]
    Gc,
    #[value(name = "Q")]
    Q,
    #[value(name = "rho2")]
    Rho2,
    #[value(name = "DeDl")]
    DeDl,
    #[value(name = "DeltaGamma")]
    DeltaGamma,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SuiteName {
    #[value(name = "closed-forms")]
    ClosedForms,
    #[value(name = "invariants")]
    Invariants,
    #[value(name = "recursion")]
    Recursion,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepParam {
    #[value(name = "lambda")]
    Lambda,
    #[value(name = "lambda_e")]
    LambdaE,
    #[value(name = "r")]
    R,
}

impl SweepParam {
    pub fn as_str(&self) -> &'static str {
        match self {
            SweepParam::Lambda => "lambda",
            SweepParam::LambdaE => "lambda_e",
            SweepParam::R => "r",
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "secperc", version, about = "Secrecy-graph percolation laboratory")]
struct Cli {
    /// JSON experiment configuration (strict schema).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Master seed; overrides the config field.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Trial count; overrides the config field.
    #[arg(long, global = true)]
    trials: Option<u64>,
    /// Worker threads; overrides the config field.
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Output directory root; for `graph`, the dump file path.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Critical-intensity bound report over the (epsilon, n1) grid.
    Bounds,
    /// Monte Carlo estimate of one named event.
    Estimate {
        #[arg(long, value_enum)]
        event: EventName,
        /// Power threshold for the fading events Gc and Q.
        #[arg(long)]
        beta: Option<f64>,
        /// Truncation radius for DeltaGamma; defaults to the tail rule.
        #[arg(long)]
        r_max: Option<f64>,
    },
    /// Estimate an event across a list of parameter values.
    Sweep {
        #[arg(long, value_enum)]
        param: SweepParam,
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<f64>,
        #[arg(long, value_enum, default_value = "B")]
        event: EventName,
        #[arg(long)]
        beta: Option<f64>,
        #[arg(long)]
        r_max: Option<f64>,
    },
    /// Locate the critical ratio lambda/lambda_e by bisection on the
    /// spanning probability.
    #[command(name = "lambda-c")]
    LambdaC {
        /// Ratio bracket "lo,hi" that must straddle the 0.5-crossing.
        #[arg(long, value_delimiter = ',')]
        bracket: Option<Vec<f64>>,
        /// Bisection stops once the bracket is narrower than this.
        #[arg(long)]
        ratio_tol: Option<f64>,
        /// Window half-widths "L1,L2,..."; defaults to L/2 and L.
        #[arg(long, value_delimiter = ',')]
        windows: Option<Vec<f64>>,
    },
    /// Build one secrecy graph and dump it as JSON plus an edge CSV.
    Graph,
    /// Run a cross-validation suite.
    Verify {
        #[arg(long, value_enum)]
        suite: SuiteName,
    },
}

fn subcommand_name(cmd: &Command) -> &'static str {
    match cmd {
        Command::Bounds => "bounds",
        Command::Estimate { .. } => "estimate",
        Command::Sweep { .. } => "sweep",
        Command::LambdaC { .. } => "lambda-c",
        Command::Graph => "graph",
        Command::Verify { .. } => "verify",
    }
}

fn execute(cli: &Cli, config: &ExperimentConfig) -> Result<output::RunOutput, CliError> {
    match &cli.command {
        Command::Bounds => commands::run_bounds(config),
        Command::Estimate { event, beta, r_max } => {
            commands::run_estimate(config, *event, *beta, *r_max)
        }
        Command::Sweep { param, values, event, beta, r_max } => {
            commands::run_sweep(config, *param, values, *event, *beta, *r_max)
        }
        Command::LambdaC { bracket, ratio_tol, windows } => {
            let bracket = match bracket {
                Some(v) if v.len() == 2 => Some((v[0], v[1])),
                Some(_) => {
                    return Err(CliError::Validation(
                        "bracket: expected exactly two values lo,hi".to_string(),
                    ))
                }
                None => None,
            };
            commands::run_lambda_c(config, bracket, *ratio_tol, windows.clone())
        }
        Command::Graph => {
            let out = cli.out.as_deref().ok_or_else(|| {
                CliError::Validation("graph: --out <path> is required".to_string())
            })?;
            commands::run_graph(config, out)
        }
        Command::Verify { suite } => commands::run_verify(config, *suite),
    }
}

fn run() -> Result<(), CliError> {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e)
            if matches!(
                e.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            ) =>
        {
            print!("{e}");
            return Ok(());
        }
        Err(e) => {
            return Err(CliError::Validation(format!("usage: {}", e.render())));
        }
    };
    let is_graph = matches!(cli.command, Command::Graph);
    let overrides = Overrides {
        seed: cli.seed,
        trials: cli.trials,
        workers: cli.workers,
        // For graph, --out names the dump file rather than the run root.
        output_dir: if is_graph { None } else { cli.out.clone() },
    };
    let config = ExperimentConfig::resolve_from_path(cli.config.as_deref(), &overrides)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| CliError::Runtime(format!("cannot build worker pool: {e}")))?;
    let result = pool.install(|| execute(&cli, &config))?;

    let dir = output::persist(&config, subcommand_name(&cli.command), &result)?;
    if let Some(all_pass) = result.results.get("all_pass").and_then(|v| v.as_bool()) {
        if let Some(checks) = result.results.get("checks").and_then(|v| v.as_array()) {
            for check in checks {
                let name = check.get("name").and_then(|v| v.as_str()).unwrap_or("?");
                let pass = check.get("pass").and_then(|v| v.as_bool()).unwrap_or(false);
                println!("[{}] {name}", if pass { "PASS" } else { "FAIL" });
            }
        }
        println!("suite result: {}", if all_pass { "PASS" } else { "FAIL" });
    }
    println!("results written to {}", dir.display());
    Ok(())
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let payload = serde_json::json!({
                "error": { "kind": e.kind(), "message": e.message() }
            });
            eprintln!("{payload}");
            ExitCode::from(e.exit_code())
        }
    }
}
