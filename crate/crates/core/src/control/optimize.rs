use std::collections::VecDeque;

use super::basis::{BasisMaker, GroupBasis};
use super::field::ControlField;
use super::problem::{gradient_h1, h1_inner, l2_inner, Evaluation, StateTransferProblem};
use crate::error::{Error, Result};

/// Read-only snapshot handed to stoppers, collectors and restarters.
#[derive(Debug, Clone, Copy)]
pub struct OptimizerView<'a> {
    pub iteration: usize,
    pub superiteration: usize,
    pub fidelity: f64,
    pub cost: f64,
    /// Step length of the last accepted step; `None` before the first.
    pub step_size: Option<f64>,
    pub gradient_norm: f64,
    /// Cumulative single time steps, forward and backward.
    pub propagation_steps: u64,
    /// Time steps spent in the last iteration divided by the grid length.
    pub fpp: f64,
    pub control: Option<&'a ControlField>,
}

type Predicate = Box<dyn Fn(&OptimizerView) -> Option<String> + Send>;

/// Composite stop condition; the first predicate returning a reason wins.
pub struct Stopper {
    predicates: Vec<Predicate>,
}

impl std::fmt::Debug for Stopper {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Stopper({} predicates)", self.predicates.len())
    }
}

impl Stopper {
    pub fn check(&self, view: &OptimizerView) -> Option<String> {
        self.predicates.iter().find_map(|p| p(view))
    }

    /// Stops on fidelity above `fidelity`, previous step below `min_step`
    /// or `max_iterations` iterations.
    pub fn with_limits(fidelity: f64, min_step: f64, max_iterations: usize) -> Self {
        make_stopper(vec![
            Box::new(move |v: &OptimizerView| (v.fidelity > fidelity).then(|| "fidelity criterion satisfied".into())),
            Box::new(move |v: &OptimizerView| {
                v.step_size.filter(|&s| s < min_step).map(|_| "Step size too small".into())
            }),
            Box::new(move |v: &OptimizerView| (v.iteration >= max_iterations).then(|| "Max iterations exceeded".into())),
        ])
    }
}

pub fn make_stopper(predicates: Vec<Predicate>) -> Stopper {
    Stopper { predicates }
}

/// Fidelity 0.999, step 1e-7, 2000 iterations.
pub fn default_stopper() -> Stopper {
    Stopper::with_limits(0.999, 1e-7, 2000)
}

type Callback = Box<dyn FnMut(&OptimizerView) -> std::result::Result<(), String>>;

/// Per-iteration hook; an `Err` aborts the run.
pub struct Collector {
    callback: Callback,
}

impl std::fmt::Debug for Collector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("Collector")
    }
}

impl Collector {
    pub fn silent() -> Self {
        make_collector(|_| Ok(()))
    }

    pub fn call(&mut self, view: &OptimizerView) -> std::result::Result<(), String> {
        (self.callback)(view)
    }
}

pub fn make_collector(callback: impl FnMut(&OptimizerView) -> std::result::Result<(), String> + 'static) -> Collector {
    Collector {
        callback: Box::new(callback),
    }
}

/// Decides dGROUP superiteration boundaries after accepted steps.
pub struct DressedRestarter {
    decide: Box<dyn FnMut(&OptimizerView) -> bool>,
}

impl std::fmt::Debug for DressedRestarter {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("DressedRestarter")
    }
}

impl DressedRestarter {
    pub fn should_restart(&mut self, view: &OptimizerView) -> bool {
        (self.decide)(view)
    }
}

pub fn make_dressed_restarter(decide: impl FnMut(&OptimizerView) -> bool + 'static) -> DressedRestarter {
    DressedRestarter {
        decide: Box::new(decide),
    }
}

/// Restart when the last accepted step was shorter than `1e-6`.
pub fn default_restarter() -> DressedRestarter {
    make_dressed_restarter(|v| v.step_size.is_some_and(|s| s < 1e-6))
}

/// Backtracking Armijo search with quadratic and cubic interpolation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterpolatingStepSize {
    pub max_step: f64,
    pub max_init_guess: f64,
    pub c1: f64,
    pub max_trials: usize,
}

impl Default for InterpolatingStepSize {
    fn default() -> Self {
        make_interpolating_step_size_finder(5.0, 1.0)
    }
}

pub fn make_interpolating_step_size_finder(max_step: f64, max_init_guess: f64) -> InterpolatingStepSize {
    InterpolatingStepSize {
        max_step,
        max_init_guess,
        c1: 1e-4,
        max_trials: 30,
    }
}

impl InterpolatingStepSize {
    /// Searches `phi(alpha)` for a step satisfying sufficient decrease.
    ///
    /// `f0` and `slope` are `phi(0)` and `phi'(0) < 0`. Once a step passes,
    /// the minimizer of the quadratic through `f0`, `slope` and that point
    /// is tried as well and kept if lower. Steps must lower `phi` strictly,
    /// so rounding noise never counts as progress. Returns `None` when no
    /// step passes within `max_trials` evaluations.
    pub fn search(
        &self,
        phi: &mut dyn FnMut(f64) -> Result<f64>,
        f0: f64,
        slope: f64,
        previous: Option<f64>,
    ) -> Result<Option<(f64, f64)>> {
        if !(slope < 0.0) {
            return Err(Error::invalid("search direction is not a descent direction"));
        }
        let guess = previous.map_or(self.max_init_guess, |p| self.max_init_guess.min(2.0 * p));
        let mut a = guess.min(self.max_step);
        let mut last: Option<(f64, f64)> = None;
        let mut trials = 0;
        while trials < self.max_trials && a > 0.0 {
            let fa = phi(a)?;
            trials += 1;
            if fa.is_finite() && fa < f0 && fa <= f0 + self.c1 * a * slope {
                let curv = fa - f0 - slope * a;
                if curv > 0.0 && trials < self.max_trials {
                    let aq = (-slope * a * a / (2.0 * curv)).min(self.max_step);
                    if (aq - a).abs() > 0.05 * a {
                        let fq = phi(aq)?;
                        if fq.is_finite() && fq < fa && fq <= f0 + self.c1 * aq * slope {
                            return Ok(Some((aq, fq)));
                        }
                    }
                }
                return Ok(Some((a, fa)));
            }
            let next = if !fa.is_finite() {
                0.1 * a
            } else {
                match last {
                    None => -slope * a * a / (2.0 * (fa - f0 - slope * a)),
                    Some((ap, fp)) => cubic_minimizer(f0, slope, a, fa, ap, fp),
                }
            };
            let next = if next.is_finite() { next.clamp(0.1 * a, 0.5 * a) } else { 0.5 * a };
            last = Some((a, fa));
            a = next;
        }
        Ok(None)
    }
}

/// Minimizer of the cubic through `phi(0)`, `phi'(0)` and two trial points.
fn cubic_minimizer(f0: f64, slope: f64, a: f64, fa: f64, ap: f64, fp: f64) -> f64 {
    let d1 = fa - f0 - slope * a;
    let d2 = fp - f0 - slope * ap;
    let denom = a * a * ap * ap * (a - ap);
    let ca = (ap * ap * d1 - a * a * d2) / denom;
    let cb = (-ap * ap * ap * d1 + a * a * a * d2) / denom;
    if ca.abs() < f64::EPSILON * cb.abs() {
        return -slope / (2.0 * cb);
    }
    let disc = cb * cb - 3.0 * ca * slope;
    if disc < 0.0 {
        return f64::NAN;
    }
    (-cb + disc.sqrt()) / (3.0 * ca)
}

/// Limited-memory BFGS history with the two-loop recursion.
#[derive(Debug, Clone)]
pub struct Lbfgs {
    memory: usize,
    pairs: VecDeque<(Vec<f64>, Vec<f64>, f64)>,
}

/// Default number of stored curvature pairs.
pub const LBFGS_MEMORY: usize = 10;

impl Lbfgs {
    pub fn new(memory: usize) -> Self {
        Self {
            memory: memory.max(1),
            pairs: VecDeque::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Erases the curvature history.
    pub fn restart(&mut self) {
        self.pairs.clear();
    }

    /// Stores `(s, y)` unless `s.y <= 1e-12`; returns whether it was kept.
    pub fn update(&mut self, s: Vec<f64>, y: Vec<f64>, inner: &dyn Fn(&[f64], &[f64]) -> f64) -> bool {
        let sy = inner(&s, &y);
        if !(sy > 1e-12) {
            return false;
        }
        if self.pairs.len() == self.memory {
            self.pairs.pop_front();
        }
        self.pairs.push_back((s, y, 1.0 / sy));
        true
    }

    /// Quasi-Newton direction `-H g`.
    pub fn direction(&self, g: &[f64], inner: &dyn Fn(&[f64], &[f64]) -> f64) -> Vec<f64> {
        let mut q = g.to_vec();
        let mut alphas = Vec::with_capacity(self.pairs.len());
        for (s, y, rho) in self.pairs.iter().rev() {
            let a = rho * inner(s, &q);
            q.iter_mut().zip(y).for_each(|(qi, yi)| *qi -= a * yi);
            alphas.push(a);
        }
        if let Some((s, y, _)) = self.pairs.back() {
            let gamma = inner(s, y) / inner(y, y);
            q.iter_mut().for_each(|qi| *qi *= gamma);
        }
        for ((s, y, rho), a) in self.pairs.iter().zip(alphas.iter().rev()) {
            let b = rho * inner(y, &q);
            q.iter_mut().zip(s).for_each(|(qi, si)| *qi += (a - b) * si);
        }
        q.iter_mut().for_each(|qi| *qi = -*qi);
        q
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Steepest,
    Lbfgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    L2,
    H1,
}

#[derive(Debug)]
pub struct OptimizerOptions {
    pub stopper: Stopper,
    pub step_size: InterpolatingStepSize,
    pub lbfgs_memory: usize,
}

impl Default for OptimizerOptions {
    fn default() -> Self {
        Self {
            stopper: default_stopper(),
            step_size: InterpolatingStepSize::default(),
            lbfgs_memory: LBFGS_MEMORY,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Status {
    /// A stopper predicate fired with this reason.
    Stopped(String),
    LineSearchFailure,
    CollectorFailure(String),
}

/// Cost just before and just after a superiteration restart.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Restart {
    pub iteration: usize,
    pub cost_before: f64,
    pub cost_after: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizationReport {
    pub status: Status,
    pub iterations: usize,
    /// Fidelity after each iteration, starting with the initial control.
    pub fidelity_history: Vec<f64>,
    pub cost_history: Vec<f64>,
    pub step_sizes: Vec<f64>,
    pub restarts: Vec<Restart>,
    pub propagation_steps: u64,
}

impl OptimizationReport {
    pub fn final_fidelity(&self) -> f64 {
        *self.fidelity_history.last().expect("seeded with the initial value")
    }

    pub fn final_cost(&self) -> f64 {
        *self.cost_history.last().expect("seeded with the initial value")
    }
}

/// Something the optimizers can minimize: a parameter vector, its cost and
/// a gradient representative in the metric given by `inner`.
pub trait Objective {
    fn params(&self) -> Vec<f64>;

    fn set_params(&mut self, x: &[f64]) -> Result<()>;

    fn evaluate(&mut self) -> Result<Evaluation>;

    /// Gradient `g` with `inner(g, p)` the directional derivative along `p`.
    fn gradient(&mut self) -> Result<Vec<f64>>;

    fn inner(&self, a: &[f64], b: &[f64]) -> f64;

    fn control(&self) -> Option<&ControlField> {
        None
    }

    fn propagation_steps(&self) -> u64 {
        0
    }

    /// Time-grid length used to normalize the per-iteration step count.
    fn n_steps(&self) -> usize {
        1
    }

    /// Absorbs the current parameters into the reference and switches to a
    /// new basis. Only reduced-basis objectives support this.
    fn redress(&mut self, _basis: GroupBasis) -> Result<()> {
        Err(Error::invalid("objective does not support basis restarts"))
    }
}

/// Direct optimization of the sampled control values.
#[derive(Debug)]
pub struct GrapeObjective<'a> {
    problem: &'a mut StateTransferProblem,
    metric: Metric,
}

impl<'a> GrapeObjective<'a> {
    pub fn new(problem: &'a mut StateTransferProblem, metric: Metric) -> Self {
        Self { problem, metric }
    }
}

impl Objective for GrapeObjective<'_> {
    fn params(&self) -> Vec<f64> {
        self.problem.control().values().to_vec()
    }

    fn set_params(&mut self, x: &[f64]) -> Result<()> {
        self.problem.set_control_values(x)
    }

    fn evaluate(&mut self) -> Result<Evaluation> {
        self.problem.evaluate()
    }

    fn gradient(&mut self) -> Result<Vec<f64>> {
        let g = self.problem.gradient_l2()?;
        Ok(match self.metric {
            Metric::L2 => g,
            Metric::H1 => gradient_h1(&g, self.problem.control().n_fields(), self.problem.control().dt()),
        })
    }

    fn inner(&self, a: &[f64], b: &[f64]) -> f64 {
        let u = self.problem.control();
        match self.metric {
            Metric::L2 => l2_inner(a, b, u.dt()),
            Metric::H1 => h1_inner(a, b, u.n_fields(), u.dt()),
        }
    }

    fn control(&self) -> Option<&ControlField> {
        Some(self.problem.control())
    }

    fn propagation_steps(&self) -> u64 {
        self.problem.propagation_steps()
    }

    fn n_steps(&self) -> usize {
        self.problem.control().n_steps()
    }
}

/// `dJ/dc_{m,k} = sum_i grad_L2(t_i, k) B_m(t_i) dt`, coefficient-major.
pub fn project_gradient(l2: &[f64], basis: &GroupBasis, n_fields: usize) -> Vec<f64> {
    let dt = basis.time_grid().dt();
    let mut out = vec![0.0; basis.size() * n_fields];
    for (m, col) in basis.columns().iter().enumerate() {
        for k in 0..n_fields {
            out[m * n_fields + k] = col.iter().enumerate().map(|(i, b)| l2[i * n_fields + k] * b).sum::<f64>() * dt;
        }
    }
    out
}

/// Gradient of the cost with respect to the GROUP coefficients.
pub fn group_gradient(problem: &mut StateTransferProblem, basis: &GroupBasis) -> Result<Vec<f64>> {
    if basis.time_grid() != problem.control().time_grid() {
        return Err(Error::invalid("basis and control use different time grids"));
    }
    let g = problem.gradient_l2()?;
    Ok(project_gradient(&g, basis, problem.control().n_fields()))
}

/// Optimization over coefficients `c` of `u = u0 + sum_m c_m B_m`.
#[derive(Debug)]
pub struct GroupObjective<'a> {
    problem: &'a mut StateTransferProblem,
    basis: GroupBasis,
    reference: Vec<f64>,
    coefficients: Vec<f64>,
}

impl<'a> GroupObjective<'a> {
    /// Uses the problem's current control as the reference `u0`.
    pub fn new(problem: &'a mut StateTransferProblem, basis: GroupBasis) -> Result<Self> {
        check_basis(problem, &basis)?;
        let reference = problem.control().values().to_vec();
        let coefficients = vec![0.0; basis.size() * problem.control().n_fields()];
        Ok(Self {
            problem,
            basis,
            reference,
            coefficients,
        })
    }

    pub fn basis(&self) -> &GroupBasis {
        &self.basis
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn reference(&self) -> &[f64] {
        &self.reference
    }

    fn reconstruct(&self, c: &[f64]) -> Vec<f64> {
        let m = self.problem.control().n_fields();
        let mut u = self.reference.clone();
        for (j, col) in self.basis.columns().iter().enumerate() {
            for k in 0..m {
                let cj = c[j * m + k];
                for (i, b) in col.iter().enumerate() {
                    u[i * m + k] += cj * b;
                }
            }
        }
        u
    }
}

fn check_basis(problem: &StateTransferProblem, basis: &GroupBasis) -> Result<()> {
    if basis.time_grid() != problem.control().time_grid() {
        return Err(Error::invalid("basis and control use different time grids"));
    }
    if !basis.vanishes_at_ends() {
        return Err(Error::invalid("basis functions must vanish at both ends; apply a shape function"));
    }
    Ok(())
}

impl Objective for GroupObjective<'_> {
    fn params(&self) -> Vec<f64> {
        self.coefficients.clone()
    }

    fn set_params(&mut self, x: &[f64]) -> Result<()> {
        if x.len() != self.coefficients.len() {
            return Err(Error::invalid(format!("expected {} coefficients, got {}", self.coefficients.len(), x.len())));
        }
        let u = self.reconstruct(x);
        self.problem.set_control_values(&u)?;
        self.coefficients.copy_from_slice(x);
        Ok(())
    }

    fn evaluate(&mut self) -> Result<Evaluation> {
        self.problem.evaluate()
    }

    fn gradient(&mut self) -> Result<Vec<f64>> {
        group_gradient(self.problem, &self.basis)
    }

    fn inner(&self, a: &[f64], b: &[f64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| x * y).sum()
    }

    fn control(&self) -> Option<&ControlField> {
        Some(self.problem.control())
    }

    fn propagation_steps(&self) -> u64 {
        self.problem.propagation_steps()
    }

    fn n_steps(&self) -> usize {
        self.problem.control().n_steps()
    }

    fn redress(&mut self, basis: GroupBasis) -> Result<()> {
        check_basis(self.problem, &basis)?;
        self.reference = self.problem.control().values().to_vec();
        self.coefficients = vec![0.0; basis.size() * self.problem.control().n_fields()];
        self.basis = basis;
        Ok(())
    }
}

fn norm<O: Objective + ?Sized>(obj: &O, g: &[f64]) -> f64 {
    obj.inner(g, g).max(0.0).sqrt()
}

struct Dressing<'a> {
    maker: &'a mut dyn BasisMaker,
    restarter: &'a mut DressedRestarter,
}

/// Minimizes `obj` until the stopper fires or no step can be found.
pub fn minimize<O: Objective>(
    obj: &mut O,
    direction: Direction,
    options: &OptimizerOptions,
    collector: &mut Collector,
) -> Result<OptimizationReport> {
    run(obj, direction, options, collector, None)
}

fn run<O: Objective>(
    obj: &mut O,
    direction: Direction,
    options: &OptimizerOptions,
    collector: &mut Collector,
    mut dressing: Option<Dressing<'_>>,
) -> Result<OptimizationReport> {
    let n_steps = obj.n_steps().max(1) as f64;
    let mut lbfgs = Lbfgs::new(options.lbfgs_memory);
    let mut x = obj.params();
    let mut eval = obj.evaluate()?;
    let mut g = obj.gradient()?;
    let mut previous: Option<f64> = None;
    let (mut iteration, mut superiteration, mut failures) = (0, 0, 0);
    let mut report = OptimizationReport {
        status: Status::LineSearchFailure,
        iterations: 0,
        fidelity_history: vec![eval.fidelity],
        cost_history: vec![eval.cost],
        step_sizes: Vec::new(),
        restarts: Vec::new(),
        propagation_steps: 0,
    };
    let mut fpp = obj.propagation_steps() as f64 / n_steps;

    macro_rules! view {
        () => {
            OptimizerView {
                iteration,
                superiteration,
                fidelity: eval.fidelity,
                cost: eval.cost,
                step_size: previous,
                gradient_norm: norm(obj, &g),
                propagation_steps: obj.propagation_steps(),
                fpp,
                control: obj.control(),
            }
        };
    }

    if let Err(msg) = collector.call(&view!()) {
        report.status = Status::CollectorFailure(msg);
        report.propagation_steps = obj.propagation_steps();
        return Ok(report);
    }

    loop {
        if let Some(reason) = options.stopper.check(&view!()) {
            report.status = Status::Stopped(reason);
            break;
        }
        let steps_before = obj.propagation_steps();
        let mut found = None;
        let mut use_history = direction == Direction::Lbfgs && !lbfgs.is_empty();
        for _ in 0..2 {
            let p: Vec<f64> = if use_history {
                lbfgs.direction(&g, &|a, b| obj.inner(a, b))
            } else {
                g.iter().map(|v| -v).collect()
            };
            let slope = obj.inner(&g, &p);
            if !(slope < 0.0) {
                if use_history {
                    lbfgs.restart();
                    use_history = false;
                    continue;
                }
                break;
            }
            let mut phi = |a: f64| -> Result<f64> {
                let trial: Vec<f64> = x.iter().zip(&p).map(|(xi, pi)| xi + a * pi).collect();
                obj.set_params(&trial)?;
                Ok(obj.evaluate()?.cost)
            };
            if let Some((alpha, _)) = options.step_size.search(&mut phi, eval.cost, slope, previous)? {
                found = Some((alpha, p));
                break;
            }
            if !use_history {
                break;
            }
            lbfgs.restart();
            use_history = false;
        }

        let Some((alpha, p)) = found else {
            obj.set_params(&x)?;
            eval = obj.evaluate()?;
            match dressing.as_mut() {
                Some(d) if failures == 0 => {
                    failures += 1;
                    superiteration += 1;
                    obj.redress(d.maker.make(superiteration)?)?;
                    let after = obj.evaluate()?;
                    report.restarts.push(Restart {
                        iteration,
                        cost_before: eval.cost,
                        cost_after: after.cost,
                    });
                    eval = after;
                    x = obj.params();
                    g = obj.gradient()?;
                    lbfgs.restart();
                    previous = None;
                    continue;
                }
                _ => {
                    report.status = Status::LineSearchFailure;
                    break;
                }
            }
        };

        let x_new: Vec<f64> = x.iter().zip(&p).map(|(xi, pi)| xi + alpha * pi).collect();
        obj.set_params(&x_new)?;
        eval = obj.evaluate()?;
        let g_new = obj.gradient()?;
        if direction == Direction::Lbfgs {
            let s: Vec<f64> = x_new.iter().zip(&x).map(|(a, b)| a - b).collect();
            let y: Vec<f64> = g_new.iter().zip(&g).map(|(a, b)| a - b).collect();
            lbfgs.update(s, y, &|a, b| obj.inner(a, b));
        }
        x = x_new;
        g = g_new;
        previous = Some(alpha);
        iteration += 1;
        failures = 0;
        fpp = (obj.propagation_steps() - steps_before) as f64 / n_steps;
        report.fidelity_history.push(eval.fidelity);
        report.cost_history.push(eval.cost);
        report.step_sizes.push(alpha);
        if let Err(msg) = collector.call(&view!()) {
            report.status = Status::CollectorFailure(msg);
            break;
        }

        if let Some(d) = dressing.as_mut() {
            if d.restarter.should_restart(&view!()) {
                superiteration += 1;
                let before = eval.cost;
                obj.redress(d.maker.make(superiteration)?)?;
                eval = obj.evaluate()?;
                report.restarts.push(Restart {
                    iteration,
                    cost_before: before,
                    cost_after: eval.cost,
                });
                x = obj.params();
                g = obj.gradient()?;
                lbfgs.restart();
                previous = None;
            }
        }
    }
    report.iterations = iteration;
    report.propagation_steps = obj.propagation_steps();
    Ok(report)
}

/// GRAPE over the sampled control, steepest descent or L-BFGS in the L2 or
/// H1 metric.
pub fn grape_optimize(
    problem: &mut StateTransferProblem,
    direction: Direction,
    metric: Metric,
    options: &OptimizerOptions,
    collector: &mut Collector,
) -> Result<OptimizationReport> {
    let mut obj = GrapeObjective::new(problem, metric);
    minimize(&mut obj, direction, options, collector)
}

/// GROUP in `basis` around the problem's current control. `initial`
/// injects starting coefficients; otherwise they start at zero. Returns the
/// report and the final coefficients.
pub fn group_optimize(
    problem: &mut StateTransferProblem,
    basis: GroupBasis,
    initial: Option<&[f64]>,
    direction: Direction,
    options: &OptimizerOptions,
    collector: &mut Collector,
) -> Result<(OptimizationReport, Vec<f64>)> {
    let mut obj = GroupObjective::new(problem, basis)?;
    if let Some(c) = initial {
        obj.set_params(c)?;
    }
    let report = minimize(&mut obj, direction, options, collector)?;
    Ok((report, obj.coefficients().to_vec()))
}

/// Dressed GROUP: GROUP with superiterations that absorb the control into
/// the reference and draw a new basis from `maker`. A restart also follows
/// a failed line search; two failures in a row end the run. `initial`
/// seeds the coefficients of the first superiteration.
pub fn dgroup_optimize(
    problem: &mut StateTransferProblem,
    maker: &mut dyn BasisMaker,
    initial: Option<&[f64]>,
    direction: Direction,
    options: &OptimizerOptions,
    restarter: &mut DressedRestarter,
    collector: &mut Collector,
) -> Result<OptimizationReport> {
    let basis = maker.make(0)?;
    let mut obj = GroupObjective::new(problem, basis)?;
    if let Some(c) = initial {
        obj.set_params(c)?;
    }
    run(&mut obj, direction, options, collector, Some(Dressing { maker, restarter }))
}
