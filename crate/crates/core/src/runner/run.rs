use std::path::{Path, PathBuf};

use super::config::{Algorithm, Config};
use super::container::{save_container, DataContainer};
use super::scenario::{build, Setup};
use super::FORMAT_VERSION;
use crate::control::{
    dgroup_optimize, grape_optimize, group_optimize, make_collector, make_dressed_restarter,
    make_interpolating_step_size_finder, make_rand_sine_basis_maker, make_sigmoid_shape, make_sine_basis,
    ControlField, Direction, Metric, OptimizationReport, OptimizerOptions, OptimizerView, Status, Stopper,
};
use crate::error::{Error, Result};
use crate::qcore::{fidelity, StateVector};

/// How a run ended.
#[derive(Debug, Clone, PartialEq)]
pub enum RunStatus {
    /// No optimization was requested.
    Simulated,
    /// The optimizer stopped with this reason.
    Stopped(String),
    LineSearchFailure,
    CollectorFailure(String),
}

impl RunStatus {
    pub fn message(&self) -> String {
        match self {
            RunStatus::Simulated => "simulated".into(),
            RunStatus::Stopped(reason) => reason.clone(),
            RunStatus::LineSearchFailure => "line search failed".into(),
            RunStatus::CollectorFailure(msg) => format!("collector failed: {msg}"),
        }
    }

    pub fn is_success(&self) -> bool {
        matches!(self, RunStatus::Simulated | RunStatus::Stopped(_))
    }
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub status: RunStatus,
    pub initial_fidelity: f64,
    /// Fidelity of the final control; the last entry of `fidelity_history`.
    pub final_fidelity: f64,
    pub iterations: usize,
    pub final_control: ControlField,
    pub container: DataContainer,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct RunOptions {
    /// Print collector lines to stdout.
    pub echo: bool,
}

/// Builds the scenario, simulates the initial control, optimizes if asked
/// and simulates the result again.
pub fn run_scenario(cfg: &Config, options: RunOptions) -> Result<RunOutcome> {
    run_scenario_observed(cfg, options, |_| {})
}

/// [`run_scenario`] with `observer` called on every collected iteration.
pub fn run_scenario_observed(
    cfg: &Config,
    options: RunOptions,
    observer: impl FnMut(&OptimizerView) + 'static,
) -> Result<RunOutcome> {
    let mut setup = build(cfg)?;
    let out = cfg.params.output();
    if out.snapshot_stride == 0 {
        return Err(Error::Config {
            path: "overrides.output.snapshot_stride".into(),
            message: "stride must be at least 1".into(),
        });
    }
    let n = setup.problem.control().n_steps();
    let hold = out.hold_steps.unwrap_or(n / 2);
    let opt = cfg.params.optimizer();

    let mut dc = DataContainer::new();
    dc.set_scalar("format_version", FORMAT_VERSION as f64);
    dc.set_text("scenario", cfg.scenario().as_str());
    dc.set_text("algorithm", opt.algorithm.as_str());
    dc.set_scalar("seed", cfg.seed as f64);
    dc.set_scalar("dt", setup.problem.control().dt());
    dc.set_scalar("duration", setup.problem.control().time_grid().duration());
    dc.set_scalar("n_steps", n as f64);
    dc.set_scalar("hold_steps", hold as f64);
    dc.append(setup.axis.0, setup.axis.1.clone())?;
    let dt = setup.problem.control().dt();
    for i in 0..n + hold {
        dc.append("t", vec![i as f64 * dt])?;
    }

    let initial = setup.problem.control().clone();
    record_trajectory(&mut dc, &setup, &initial, "initial", hold, out.snapshot_stride)?;
    let initial_fidelity = setup.problem.fidelity()?;
    dc.set_scalar("initial_fidelity", initial_fidelity);

    let report = optimize(&mut setup, cfg, options, Box::new(observer))?;
    let status = match &report {
        None => RunStatus::Simulated,
        Some(r) => match &r.status {
            Status::Stopped(reason) => RunStatus::Stopped(reason.clone()),
            Status::LineSearchFailure => RunStatus::LineSearchFailure,
            Status::CollectorFailure(msg) => RunStatus::CollectorFailure(msg.clone()),
        },
    };
    let final_control = setup.problem.control().clone();
    let (history, iterations) = match &report {
        None => (vec![initial_fidelity], 0),
        Some(r) => {
            for c in &r.cost_history {
                dc.append("cost_history", vec![*c])?;
            }
            for s in &r.step_sizes {
                dc.append("step_sizes", vec![*s])?;
            }
            for rs in &r.restarts {
                dc.append("restarts", vec![rs.iteration as f64, rs.cost_before, rs.cost_after])?;
            }
            dc.set_scalar("propagation_steps", r.propagation_steps as f64);
            record_trajectory(&mut dc, &setup, &final_control, "final", hold, out.snapshot_stride)?;
            (r.fidelity_history.clone(), r.iterations)
        }
    };
    for f in &history {
        dc.append("fidelity_history", vec![*f])?;
    }
    let final_fidelity = *history.last().expect("history starts with the initial fidelity");
    dc.set_scalar("final_fidelity", final_fidelity);
    dc.set_scalar("iterations", iterations as f64);
    dc.set_text("status", status.message());
    Ok(RunOutcome {
        status,
        initial_fidelity,
        final_fidelity,
        iterations,
        final_control,
        container: dc,
    })
}

fn optimize(
    setup: &mut Setup,
    cfg: &Config,
    options: RunOptions,
    mut observer: Box<dyn FnMut(&OptimizerView)>,
) -> Result<Option<OptimizationReport>> {
    let opt = cfg.params.optimizer();
    let direction = match opt.algorithm {
        Algorithm::None => return Ok(None),
        Algorithm::GrapeSteepestL2 | Algorithm::GrapeSteepestH1 | Algorithm::GroupSteepest | Algorithm::DgroupSteepest => {
            Direction::Steepest
        }
        _ => Direction::Lbfgs,
    };
    if !(opt.max_step_size > 0.0 && opt.max_initial_guess > 0.0) {
        return Err(Error::Config {
            path: "overrides.optimizer.max_step_size".into(),
            message: "step sizes must be positive".into(),
        });
    }
    let settings = OptimizerOptions {
        stopper: Stopper::with_limits(opt.fidelity_target, opt.min_step_size, opt.max_iterations),
        step_size: make_interpolating_step_size_finder(opt.max_step_size, opt.max_initial_guess),
        lbfgs_memory: opt.lbfgs_memory.max(1),
    };
    let every = cfg.params.output().print_every;
    let echo = options.echo && every > 0;
    let mut collector = make_collector(move |v: &OptimizerView| {
        observer(v);
        if echo && v.iteration % every == 0 {
            let step = v.step_size.map_or_else(|| "-".to_string(), |s| format!("{s:.6e}"));
            println!(
                "ITER {} | fidelity : {:.8}\t stepsize : {}\t fpp : {}",
                v.iteration,
                v.fidelity,
                step,
                v.fpp.round()
            );
        }
        Ok(())
    });
    let problem = &mut setup.problem;
    let tg = problem.control().time_grid();
    let report = match opt.algorithm {
        Algorithm::GrapeSteepestL2 | Algorithm::GrapeBfgsL2 => {
            grape_optimize(problem, direction, Metric::L2, &settings, &mut collector)?
        }
        Algorithm::GrapeSteepestH1 | Algorithm::GrapeBfgsH1 => {
            grape_optimize(problem, direction, Metric::H1, &settings, &mut collector)?
        }
        Algorithm::GroupSteepest | Algorithm::GroupBfgs => {
            let shape = make_sigmoid_shape(tg, opt.shape_plateau)?;
            let basis = make_sine_basis(opt.basis_size, tg, 0.0, cfg.seed)?.shaped(&shape)?;
            let initial = group_start(problem, setup.group_amplitude, opt.basis_size)?;
            group_optimize(problem, basis, initial.as_deref(), direction, &settings, &mut collector)?.0
        }
        Algorithm::DgroupSteepest | Algorithm::DgroupBfgs => {
            let shape = make_sigmoid_shape(tg, opt.shape_plateau)?;
            let mut maker = make_rand_sine_basis_maker(opt.basis_size, tg, shape, opt.max_rand, cfg.seed);
            let tol = opt.restart_step_size;
            let mut restarter = make_dressed_restarter(move |v| v.step_size.is_some_and(|s| s < tol));
            let initial = group_start(problem, setup.group_amplitude, opt.basis_size)?;
            dgroup_optimize(
                problem,
                &mut maker,
                initial.as_deref(),
                direction,
                &settings,
                &mut restarter,
                &mut collector,
            )?
        }
        Algorithm::None => unreachable!(),
    };
    if options.echo {
        println!("STOPPING: {}", match &report.status {
            Status::Stopped(r) => r.clone(),
            Status::LineSearchFailure => "line search failed".into(),
            Status::CollectorFailure(m) => m.clone(),
        });
    }
    Ok(Some(report))
}

/// With an amplitude, GROUP starts from a zero reference and puts the
/// initial guess on the first basis function.
fn group_start(
    problem: &mut crate::control::StateTransferProblem,
    amplitude: Option<f64>,
    size: usize,
) -> Result<Option<Vec<f64>>> {
    let Some(a) = amplitude else { return Ok(None) };
    let zero = problem.control().map(|_| 0.0)?;
    problem.set_control(zero)?;
    let mut c = vec![0.0; size * problem.control().n_fields()];
    c[0] = a;
    Ok(Some(c))
}

/// Simulates `control` followed by `hold` constant steps and stores the
/// overlap, observable, control and decimated potential and state series
/// under `prefix`.
fn record_trajectory(
    dc: &mut DataContainer,
    setup: &Setup,
    control: &ControlField,
    prefix: &str,
    hold: usize,
    stride: usize,
) -> Result<()> {
    let n = control.n_steps();
    let m = control.n_fields();
    let mut values = control.values().to_vec();
    for _ in 0..hold {
        values.extend_from_slice(control.last());
    }
    let tg = crate::qcore::TimeGrid::new(n + hold, control.dt())?;
    let extended = ControlField::new(tg, m, values)?;
    let problem = &setup.problem;
    let states = problem.system().forward(problem.initial_state().amplitudes(), &extended)?;
    let basis = problem.initial_state().basis();
    let target = problem.target_state();
    let last = states.len() - 1;
    for (i, psi) in states.into_iter().enumerate() {
        let u = extended.at(i);
        dc.append(&format!("{prefix}_control"), u.to_vec())?;
        dc.append(&format!("{prefix}_{}", setup.observable.0), (setup.observable.1)(&psi))?;
        let sv = StateVector::new(psi, basis)?;
        dc.append(&format!("{prefix}_overlap"), vec![fidelity(target, &sv)?])?;
        if i % stride == 0 || i == last {
            if prefix == "initial" {
                dc.append("snapshot_t", vec![i as f64 * control.dt()])?;
            }
            dc.append(&format!("{prefix}_{}", setup.potential.0), (setup.potential.1)(u))?;
            dc.append_complex(&format!("{prefix}_psi"), sv.into_amplitudes())?;
        }
    }
    Ok(())
}

/// Paths of the files [`write_results`] produces in `dir`.
pub fn result_paths(dir: &Path, cfg: &Config) -> (PathBuf, PathBuf) {
    let id = cfg.scenario().as_str();
    (dir.join(format!("{id}.json")), dir.join(format!("{id}.config.json")))
}

/// Saves the container and the effective configuration into `dir`.
pub fn write_results(dir: &Path, cfg: &Config, outcome: &RunOutcome) -> Result<(PathBuf, PathBuf)> {
    std::fs::create_dir_all(dir).map_err(|source| Error::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let (data, config) = result_paths(dir, cfg);
    save_container(&outcome.container, &data)?;
    std::fs::write(&config, cfg.to_json()).map_err(|source| Error::Io {
        path: config.clone(),
        source,
    })?;
    Ok((data, config))
}
