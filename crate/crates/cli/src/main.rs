use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use sasakian_core::runner::{self, OutputFormat, RunConfig};

#[derive(Parser)]
#[command(name = "sasakian-verify", version, about = "Numerical identity checks for nearly Sasakian structures")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run checks on one model.
    Run(RunArgs),
    /// List registered models and checks.
    List,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(clap::Args)]
struct RunArgs {
    /// Model id, e.g. darboux-sasakian:3 or s5-nearly-sasakian.
    #[arg(long)]
    model: String,
    /// Comma-separated check ids, or "all".
    #[arg(long, value_delimiter = ',', default_value = "all")]
    checks: Vec<String>,
    #[arg(long, default_value_t = runner::DEFAULT_SEED)]
    seed: u64,
    /// Residual tolerance; defaults to the model's own.
    #[arg(long)]
    tol: Option<f64>,
    /// Sample points per check.
    #[arg(long, default_value_t = runner::DEFAULT_POINTS)]
    points: usize,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Write the report here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Run gated checks even when the model is not nearly Sasakian.
    #[arg(long)]
    no_gate: bool,
}

fn run(args: RunArgs) -> Result<ExitCode> {
    let format = match args.format {
        Format::Text => OutputFormat::Text,
        Format::Json => OutputFormat::Json,
    };
    let cfg = RunConfig {
        model: args.model,
        checks: args.checks,
        seed: args.seed,
        tol: args.tol,
        points: args.points,
        format,
        enforce_gate: !args.no_gate,
    };
    let result = runner::run(&cfg)?;
    let rendered = result.render(format);
    match &args.out {
        Some(path) => std::fs::write(path, &rendered).with_context(|| format!("writing {}", path.display()))?,
        None => print!("{rendered}"),
    }
    Ok(ExitCode::from(result.exit_code() as u8))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::List => {
            print!("{}", runner::list_models_and_checks());
            Ok(ExitCode::SUCCESS)
        }
        Command::Run(args) => run(args),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
