//! `radreact`: run scenarios and the verification suites.

mod run;
mod scenario;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use radreact_core::checks::{run_suite, SUITES};

use scenario::ScenarioError;

/// Exit codes: 0 success, 1 other failure, 2 parse or validation error,
/// 3 accuracy or integration failure, 4 failed checks.
#[derive(Parser)]
#[command(name = "radreact", version, about = "Radiating point charges: fields, self-forces and balance checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario file and write its artifacts under <root>/<name>/.
    Run {
        file: PathBuf,
        /// Output root; defaults to $SELFFORCE_OUT, then `out`.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        threads: Option<usize>,
        /// Overwrite a non-empty output directory.
        #[arg(long)]
        force: bool,
    },
    /// Run an acceptance suite and print a pass/fail table.
    Verify {
        #[arg(value_parser = clap::builder::PossibleValuesParser::new(SUITES))]
        suite: String,
        #[arg(long)]
        threads: Option<usize>,
    },
}

fn set_threads(n: Option<usize>) -> anyhow::Result<()> {
    if let Some(n) = n {
        if n == 0 {
            anyhow::bail!("--threads must be at least 1");
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}

fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<ScenarioError>().is_some() {
        return 2;
    }
    match err.downcast_ref::<radreact_core::Error>() {
        Some(
            radreact_core::Error::Accuracy { .. }
            | radreact_core::Error::Integration { .. }
            | radreact_core::Error::Horizon { .. },
        ) => 3,
        Some(radreact_core::Error::InvalidInput(_) | radreact_core::Error::Unsupported(_)) => 2,
        _ => 1,
    }
}

fn run_command(file: PathBuf, out: Option<PathBuf>, threads: Option<usize>, force: bool) -> anyhow::Result<()> {
    set_threads(threads)?;
    let loaded = scenario::load(&file)?;
    let root = out
        .or_else(|| std::env::var_os("SELFFORCE_OUT").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"));
    let dir = run::prepare_output(&root, &loaded.scenario.name, force)?;
    let artifacts = run::run(&loaded, dir)?;
    for f in &artifacts.files {
        println!("{}", f.display());
    }
    log::info!("{} files in {}", artifacts.files.len(), artifacts.dir.display());
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match cli.command {
        Command::Run { file, out, threads, force } => match run_command(file, out, threads, force) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => {
                eprintln!("error: {e:#}");
                ExitCode::from(exit_code(&e))
            }
        },
        Command::Verify { suite, threads } => {
            if let Err(e) = set_threads(threads) {
                eprintln!("error: {e:#}");
                return ExitCode::from(1);
            }
            let results = run_suite(&suite, |r| println!("{r}")).expect("suite names are checked by the parser");
            let failed = results.iter().filter(|r| !r.pass).count();
            println!("{} of {} checks pass", results.len() - failed, results.len());
            if failed == 0 {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(4)
            }
        }
    }
}
