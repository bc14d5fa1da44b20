//! Scenario registry, configuration, result container and the driver
//! behind the command-line tool.

mod config;
mod container;
mod run;
mod scenario;

pub use config::{
    Algorithm, BoseHubbardParams, Config, GpeParams, LandauZenerParams, OptimizerConfig, OutputConfig, PairParams,
    ScenarioId, ScenarioParams, TweezerParams,
};
pub use container::{load_container, save_container, DataContainer, Entry};
pub use run::{result_paths, run_scenario, run_scenario_observed, write_results, RunOptions, RunOutcome, RunStatus};
pub use scenario::{build, exponential_ramp, Setup};

use crate::error::{Error, Result};

/// Version of the result file layout, stored under `format_version`.
pub const FORMAT_VERSION: u32 = 1;

/// Caps the dense linear-algebra thread pool: 0 picks automatically, 1
/// runs sequentially.
pub fn set_thread_limit(threads: usize) {
    let p = match threads {
        1 => faer::Parallelism::None,
        n => faer::Parallelism::Rayon(n),
    };
    faer::set_global_parallelism(p);
}

/// Reads a thread cap such as the value of `QOC_THREADS`.
pub fn parse_thread_limit(value: &str) -> Result<usize> {
    value.trim().parse().map_err(|_| Error::Config {
        path: "QOC_THREADS".into(),
        message: format!("expected a non-negative integer, got `{value}`"),
    })
}
