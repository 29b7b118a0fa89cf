use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use hardy_cli::document::ConformanceInput;
use hardy_cli::{cmd_basis_check, cmd_conformance, cmd_decompose, cmd_subspace, CliError, Options, RunReport};
use serde_json::Value;

#[derive(Parser)]
#[command(name = "hardy", version, about = "Blaschke-product decompositions in Hardy spaces")]
struct Cli {
    /// Grid size N (power of two, at least 16).
    #[arg(long, global = true)]
    grid: Option<usize>,
    /// Highest power of B kept in component expansions.
    #[arg(long, global = true)]
    mmax: Option<usize>,
    /// Number of shifts in truncated spans.
    #[arg(long, global = true)]
    mspan: Option<usize>,
    /// Tolerance of the command's main verdict.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Worker threads for conformance trials.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct InputArg {
    /// Read the input document from a file instead of stdin.
    #[arg(long)]
    input: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Orthonormality of the basis e_{jm}.
    BasisCheck(InputArg),
    /// Components of a function and reconstruction residual.
    Decompose(InputArg),
    /// Decomposition of a finitely generated invariant subspace.
    Subspace(InputArg),
    /// Seeded randomized property suite.
    Conformance {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 10)]
        trials: usize,
        /// Document with `seed` and `trials`, overriding the flags.
        #[arg(long)]
        input: Option<PathBuf>,
    },
}

fn read_document(input: &Option<PathBuf>) -> Result<Value, CliError> {
    let text = match input {
        Some(path) => std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?,
        None => {
            let mut s = String::new();
            std::io::stdin()
                .read_to_string(&mut s)
                .map_err(|e| CliError::Usage(format!("cannot read stdin: {e}")))?;
            s
        }
    };
    Ok(serde_json::from_str(&text)?)
}

fn run(cli: &Cli) -> (&'static str, Value, Result<RunReport, CliError>) {
    let opts = Options {
        grid: cli.grid,
        m_max: cli.mmax,
        m_span: cli.mspan,
        tol: cli.tol,
        threads: cli.threads,
    };
    let (name, input): (&'static str, &Option<PathBuf>) = match &cli.command {
        Command::BasisCheck(a) => ("basis-check", &a.input),
        Command::Decompose(a) => ("decompose", &a.input),
        Command::Subspace(a) => ("subspace", &a.input),
        Command::Conformance { input, .. } => ("conformance", input),
    };
    if let Command::Conformance { seed, trials, input } = &cli.command {
        let params = match input {
            Some(_) => read_document(input).and_then(|doc| {
                Ok(serde_json::from_value::<ConformanceInput>(doc)?)
            }),
            None => Ok(ConformanceInput {
                seed: *seed,
                trials: *trials,
            }),
        };
        return match params {
            Ok(p) => {
                let echo = serde_json::to_value(&p).unwrap_or(Value::Null);
                (name, echo, cmd_conformance(p.seed, p.trials, &opts))
            }
            Err(e) => (name, Value::Null, Err(e)),
        };
    }
    let doc = match read_document(input) {
        Ok(d) => d,
        Err(e) => return (name, Value::Null, Err(e)),
    };
    let result = match &cli.command {
        Command::BasisCheck(_) => cmd_basis_check(&doc, &opts),
        Command::Decompose(_) => cmd_decompose(&doc, &opts),
        Command::Subspace(_) => cmd_subspace(&doc, &opts),
        Command::Conformance { .. } => unreachable!("handled above"),
    };
    (name, doc, result)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (name, input, result) = run(&cli);
    let report = match result {
        Ok(r) => r,
        Err(e @ CliError::Usage(_)) => {
            eprintln!("hardy {name}: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
        Err(e) => {
            eprintln!("hardy {name}: {e}");
            RunReport::failure(name, input, &e)
        }
    };
    for v in report.verdicts.iter().filter(|v| !v.passed) {
        eprintln!("hardy {name}: failed {} (value {}, tolerance {})", v.name, v.value, v.tolerance);
    }
    if let Some(seeds) = report.outputs.get("failing_seeds").and_then(Value::as_array) {
        if !seeds.is_empty() {
            eprintln!("hardy {name}: failing trial seeds {seeds:?}");
        }
    }
    println!(
        "{}",
        serde_json::to_string_pretty(&report).expect("reports serialize")
    );
    ExitCode::from(report.exit_code() as u8)
}
