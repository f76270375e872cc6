use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use orlicz_mp::harness::{cmd_indices, cmd_solve, cmd_sweep, cmd_verify, ExitStatus, RunConfig, RunOptions};
use orlicz_mp::Error;

/// Two nonnegative solutions of -div(a(|∇u|)∇u) = λ(u^{p-1} - u^{q-1}).
#[derive(Parser)]
#[command(name = "orlicz-mp", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Index estimates, Δ₂ ratio and √-convexity of Φ.
    Indices(Common),
    /// Minimizer u1 and mountain-pass solution u2 at a fixed λ.
    Solve(Common),
    /// min I, c and the certificate over a λ grid, with optional λ* bisection.
    Sweep(Common),
    /// Randomized property suites; writes verify.json.
    Verify(Common),
}

#[derive(Args)]
struct Common {
    /// TOML run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Overrides solver.seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides output_dir.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Omit wall-clock times so reports are byte-identical across runs.
    #[arg(long)]
    deterministic: bool,
    /// 1 writes per-iteration lines to run.log.
    #[arg(long, default_value_t = 0)]
    verbosity: u8,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (run, common): (fn(&RunConfig, &RunOptions) -> orlicz_mp::Result<_>, Common) = match cli.command {
        Command::Indices(c) => (cmd_indices, c),
        Command::Solve(c) => (cmd_solve, c),
        Command::Sweep(c) => (cmd_sweep, c),
        Command::Verify(c) => (cmd_verify, c),
    };
    let cfg = match RunConfig::from_path(&common.config) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("{}: {e}", common.config.display());
            return ExitCode::from(ExitStatus::ConfigError.code() as u8);
        }
    };
    let opts = RunOptions {
        seed: common.seed,
        out: common.out,
        deterministic: common.deterministic,
        verbosity: common.verbosity,
    };
    match run(&cfg, &opts) {
        Ok(outcome) => {
            println!("{}", outcome.summary);
            if opts.verbosity >= 1 {
                println!("output written to {}", outcome.out_dir.display());
            }
            ExitCode::from(outcome.status.code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            let status = match e {
                Error::Config(_) | Error::InvalidParameter(_) | Error::BracketInvalid(_) => ExitStatus::ConfigError,
                _ => ExitStatus::Failure,
            };
            ExitCode::from(status.code() as u8)
        }
    }
}
