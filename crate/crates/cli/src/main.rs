use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use ekdev_cli::commands::{cmd_counterexample, cmd_oracle, cmd_rate, cmd_simulate};
use ekdev_cli::output::write_atomic;
use ekdev_cli::verify::{cmd_verify, Suite};
use ekdev_cli::{CliError, Format, Report, RunConfig, EXIT_CONFIG, EXIT_OK, EXIT_VERIFY_FAILED};

/// Rate functions, exact laws and Monte Carlo for additive functions of a
/// random integer.
#[derive(Parser)]
#[command(name = "ekdev", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// JSON run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Overrides the config seed.
    #[arg(long, global = true)]
    seed: Option<u64>,

    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
}

#[derive(Subcommand)]
enum Command {
    /// Tabulate I(x) for `rho` over `x_grid`.
    Rate,
    /// Sample or compute the exact law of either model.
    Simulate,
    /// Run verification suites; exits 1 if any check fails.
    Verify {
        #[arg(value_enum, default_value = "all")]
        suite: Suite,
    },
    /// Exact laws of both models side by side.
    Oracle,
    /// Breakpoint schedule of the oscillating counterexample.
    Counterexample,
}

fn configure_threads() {
    if let Some(n) = std::env::var("LDP_ARITH_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        if n > 0 {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
}

fn run(cli: Cli) -> Result<i32, CliError> {
    let cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    let report: Report = match cli.command {
        Command::Rate => cmd_rate(&cfg)?,
        Command::Simulate => cmd_simulate(&cfg, cli.seed)?,
        Command::Verify { suite } => cmd_verify(suite)?,
        Command::Oracle => cmd_oracle(&cfg)?,
        Command::Counterexample => cmd_counterexample(&cfg)?,
    };
    let output = cfg.output.clone().unwrap_or_default();
    let format = cli.format.unwrap_or(output.format);
    let text = report.render(format);
    match cli.out.or(output.path) {
        Some(path) => write_atomic(&path, &text)?,
        None => print!("{text}"),
    }
    Ok(if report.passed { EXIT_OK } else { EXIT_VERIFY_FAILED })
}

fn main() -> ExitCode {
    configure_threads();
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_CONFIG as u8)
        }
    }
}
