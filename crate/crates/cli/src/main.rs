use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use ultracold::runner::{self, Config, RunOptions, ScenarioId};
use ultracold::Error;

const EXIT_CONFIG: u8 = 2;
const EXIT_CONVERGENCE: u8 = 3;
const EXIT_IO: u8 = 4;

#[derive(Parser)]
#[command(name = "ultracold", version, about = "Simulate and optimally control ultracold-atom scenarios")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario from a config file or from the registry defaults.
    Run {
        /// JSON config with `scenario`, `seed` and `overrides` keys.
        config: Option<PathBuf>,
        /// Scenario id, used instead of a config file.
        #[arg(long, conflicts_with = "config")]
        scenario: Option<String>,
        /// Override a parameter, e.g. `--set optimizer.algorithm=group-bfgs`.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
        /// Directory for the result and effective-config files.
        #[arg(long, default_value = "results")]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        /// Do not print per-iteration lines.
        #[arg(long, short)]
        quiet: bool,
    },
    /// Print the registered scenario ids.
    ListScenarios,
    /// Check a config file and build its scenario without running it.
    Validate { config: PathBuf },
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Config { .. } | Error::InvalidArgument(_) | Error::Domain(_) | Error::Capacity(_) => EXIT_CONFIG,
        Error::Io { .. } => EXIT_IO,
        Error::ConvergenceFailure { .. }
        | Error::LineSearchFailure(_)
        | Error::CollectorFailure(_)
        | Error::NumericalInconsistency(_) => EXIT_CONVERGENCE,
    }
}

fn load(config: Option<PathBuf>, scenario: Option<String>) -> ultracold::Result<Config> {
    match (config, scenario) {
        (Some(path), _) => Config::load(&path),
        (None, Some(id)) => Ok(Config::new(ScenarioId::parse(&id)?)),
        (None, None) => Err(Error::Config {
            path: "scenario".into(),
            message: "give a config file or --scenario".into(),
        }),
    }
}

fn run(
    config: Option<PathBuf>,
    scenario: Option<String>,
    set: &[String],
    out: PathBuf,
    seed: Option<u64>,
    quiet: bool,
) -> ultracold::Result<u8> {
    let mut cfg = load(config, scenario)?;
    for assignment in set {
        cfg.set(assignment)?;
    }
    if let Some(s) = seed {
        cfg.seed = s;
    }
    let outcome = runner::run_scenario(&cfg, RunOptions { echo: !quiet })?;
    let (data, _) = runner::write_results(&out, &cfg, &outcome)?;
    println!("status: {}", outcome.status.message());
    println!("final fidelity: {:.16e}", outcome.final_fidelity);
    println!("results: {}", data.display());
    Ok(if outcome.status.is_success() { 0 } else { EXIT_CONVERGENCE })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Ok(v) = std::env::var("QOC_THREADS") {
        match runner::parse_thread_limit(&v) {
            Ok(n) => runner::set_thread_limit(n),
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(EXIT_CONFIG);
            }
        }
    }
    let result = match cli.command {
        Command::Run {
            config,
            scenario,
            set,
            out,
            seed,
            quiet,
        } => run(config, scenario, &set, out, seed, quiet),
        Command::ListScenarios => {
            for id in ScenarioId::ALL {
                println!("{:<24}{}", id.as_str(), id.description());
            }
            Ok(0)
        }
        Command::Validate { config } => Config::load(&config).and_then(|cfg| {
            runner::build(&cfg)?;
            println!("{}: ok ({})", config.display(), cfg.scenario());
            Ok(0)
        }),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
