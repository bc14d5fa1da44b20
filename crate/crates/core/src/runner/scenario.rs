use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;

use super::config::{
    BoseHubbardParams, Config, GpeParams, LandauZenerParams, PairParams, ScenarioParams, TweezerParams,
};
use crate::control::{
    ControlField, FewModeSystem, GpeSystem, LatticeSystem, PairSystem, SoftBounds, StateTransferProblem,
};
use crate::error::{Error, Result};
use crate::gpe::{self, AnharmonicParams, GpeHamiltonian};
use crate::lattice::{landau_zener_hamiltonian, BoundTransform, FockBasis, LatticeHamiltonian};
use crate::pair::{ground_state_2d, TensorGrid2D, TwoParticleHamiltonian};
use crate::qcore::{SpatialGrid, TimeGrid};

type RowFn = Box<dyn Fn(&[Complex64]) -> Vec<f64> + Send + Sync>;
type ControlRowFn = Box<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;

/// A ready-to-run scenario: the transfer problem plus what to record.
pub struct Setup {
    pub problem: StateTransferProblem,
    /// Name and values of the spatial or site axis.
    pub axis: (&'static str, Vec<f64>),
    /// Name of the per-step observable and how to compute it from a state.
    pub observable: (&'static str, RowFn),
    /// Name of the potential snapshot and how to compute it from a control sample.
    pub potential: (&'static str, ControlRowFn),
    /// GROUP around a zero reference with this weight on the first basis
    /// function, instead of around the initial guess.
    pub group_amplitude: Option<f64>,
}

impl std::fmt::Debug for Setup {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Setup")
            .field("problem", &self.problem)
            .field("axis", &self.axis.0)
            .field("observable", &self.observable.0)
            .field("potential", &self.potential.0)
            .field("group_amplitude", &self.group_amplitude)
            .finish()
    }
}

/// `U(t) = U_min + 0.5 exp(ln((U_target - U_min) / 0.5) t / T)` mapped to
/// the control through the inverse of `transform`, whose lower bound is
/// `U_min`.
pub fn exponential_ramp(transform: &BoundTransform, u_target: f64, time_grid: TimeGrid) -> Result<ControlField> {
    let (u_min, u_max) = transform.bounds();
    if !(u_target > u_min && u_target < u_max) {
        return Err(Error::Domain(format!("target U = {u_target} outside ({u_min}, {u_max})")));
    }
    let rate = ((u_target - u_min) / 0.5).ln() / time_grid.duration();
    let values = time_grid
        .times()
        .iter()
        .map(|t| transform.inverse(u_min + 0.5 * (rate * t).exp()))
        .collect::<Result<Vec<_>>>()?;
    ControlField::single(time_grid, values)
}

/// `d (3 s^2 - 2 s^3)`, `s = t / T`: starts and ends at rest.
fn smooth_ramp(time_grid: TimeGrid, d: f64) -> Result<ControlField> {
    let t_final = time_grid.duration();
    ControlField::from_fn(time_grid, |t| {
        let s = t / t_final;
        d * s * s * (3.0 - 2.0 * s)
    })
}

fn mean_position(x: &[f64], dx: f64) -> impl Fn(&[Complex64]) -> Vec<f64> + Send + Sync {
    let x = x.to_vec();
    move |psi| vec![x.iter().zip(psi).map(|(x, p)| x * p.norm_sqr()).sum::<f64>() * dx]
}

fn trap_row(x: &[f64], v: impl Fn(f64, f64) -> f64 + Send + Sync + 'static) -> ControlRowFn {
    let x = x.to_vec();
    Box::new(move |u| x.iter().map(|&xi| v(xi, u[0])).collect())
}

pub fn build(cfg: &Config) -> Result<Setup> {
    match &cfg.params {
        ScenarioParams::Gpe(p) => build_gpe(p),
        ScenarioParams::BoseHubbard(p) => build_bose_hubbard(p),
        ScenarioParams::Pair(p) => build_pair(p),
        ScenarioParams::Tweezer(p) => build_tweezer(p),
        ScenarioParams::LandauZener(p) => build_landau_zener(p),
    }
}

fn build_gpe(p: &GpeParams) -> Result<Setup> {
    let grid = SpatialGrid::new(p.x_min, p.x_max, p.n_points)?;
    let trap = AnharmonicParams {
        p2: p.p2,
        p4: p.p4,
        p6: p.p6,
    };
    let tg = TimeGrid::from_duration(p.duration, p.dt)?;
    let amplitude = p.initial_amplitude;
    let u = ControlField::from_fn(tg, |t| amplitude * (PI * t / tg.duration()).sin())?;
    let h = GpeHamiltonian::new(grid.clone(), p.kappa, trap.potential_function(&grid, u.first()[0]), p.g1d)?;
    let psi0 = gpe::ground_state(&h, 0.0, p.state_tolerance)?;
    let target = gpe::first_excited_state_with(&h, 0.0, p.state_tolerance, &psi0)?;
    let problem = StateTransferProblem::new(Arc::new(GpeSystem::new(h)), psi0, target, u)?
        .with_regularization(p.gamma)?
        .with_bounds(SoftBounds::uniform(p.bound_weight, p.bound_lower, p.bound_upper, 1)?)?;
    Ok(Setup {
        problem,
        axis: ("x", grid.x().to_vec()),
        observable: ("x_expectation", Box::new(mean_position(grid.x(), grid.dx()))),
        potential: ("potential", trap_row(grid.x(), move |x, u| trap.value(x, u))),
        group_amplitude: Some(amplitude),
    })
}

fn build_bose_hubbard(p: &BoseHubbardParams) -> Result<Setup> {
    let basis = FockBasis::new(p.sites, p.particles)?;
    let occupations: Vec<Vec<f64>> = basis.states().map(|s| s.iter().map(|&n| n as f64).collect()).collect();
    let xs: Vec<f64> = if p.sites == 1 {
        vec![0.0]
    } else {
        (0..p.sites).map(|i| -1.0 + 2.0 * i as f64 / (p.sites - 1) as f64).collect()
    };
    let site_potential: Vec<f64> = xs.iter().map(|x| p.trap * x * x).collect();
    let transform = BoundTransform::new(p.u_min, p.u_max)?;
    let h = LatticeHamiltonian::new(basis, p.hopping, &site_potential, p.periodic, Some(transform))?;
    let (_, psi0) = h.ground_state(transform.inverse(p.initial_state_u)?, p.state_tolerance)?;
    let (_, target) = h.ground_state(transform.inverse(p.target_u)?, p.state_tolerance)?;
    let tg = TimeGrid::from_duration(p.duration, p.dt)?;
    let u = exponential_ramp(&transform, p.target_u, tg)?;
    let problem = StateTransferProblem::new(Arc::new(LatticeSystem::new(h, p.krylov_order)?), psi0, target, u)?
        .with_regularization(p.gamma)?;
    let sites = p.sites;
    Ok(Setup {
        problem,
        axis: ("site", (0..p.sites).map(|i| i as f64).collect()),
        observable: (
            "density",
            Box::new(move |psi| {
                let mut n = vec![0.0; sites];
                for (c, occ) in psi.iter().zip(&occupations) {
                    let w = c.norm_sqr();
                    for (ni, oi) in n.iter_mut().zip(occ) {
                        *ni += w * oi;
                    }
                }
                n
            }),
        ),
        potential: ("interaction", Box::new(move |u| vec![transform.apply(u[0])])),
        group_amplitude: None,
    })
}

fn build_pair(p: &PairParams) -> Result<Setup> {
    let grid = TensorGrid2D::from_bounds(p.x_min, p.x_max, p.n_points)?;
    let trap = AnharmonicParams {
        p2: p.p2,
        p4: p.p4,
        p6: p.p6,
    };
    let tg = TimeGrid::from_duration(p.duration, p.dt)?;
    let u = smooth_ramp(tg, p.displacement)?;
    let h = TwoParticleHamiltonian::new(grid.clone(), p.kappa, trap.potential_function(grid.axis(), 0.0), p.interaction)?;
    let psi0 = ground_state_2d(&h, 0.0, p.state_tolerance)?;
    let target = ground_state_2d(&h, p.displacement, p.state_tolerance)?;
    let problem = StateTransferProblem::new(Arc::new(PairSystem::new(h)), psi0, target, u)?.with_regularization(p.gamma)?;
    let x = grid.axis().x().to_vec();
    let (n, dx) = (grid.n(), grid.dx());
    let xs = x.clone();
    Ok(Setup {
        problem,
        axis: ("x", x.clone()),
        observable: (
            "x_expectation",
            Box::new(move |psi| {
                let (mut x1, mut x2) = (0.0, 0.0);
                for (idx, c) in psi.iter().enumerate() {
                    let w = c.norm_sqr();
                    x1 += w * xs[idx / n];
                    x2 += w * xs[idx % n];
                }
                vec![x1 * dx * dx, x2 * dx * dx]
            }),
        ),
        potential: ("potential", trap_row(&x, move |x, u| trap.value(x, u))),
        group_amplitude: None,
    })
}

fn build_tweezer(p: &TweezerParams) -> Result<Setup> {
    let grid = SpatialGrid::new(p.x_min, p.x_max, p.n_points)?;
    let tweezer = gpe::TweezerParams {
        depth: p.depth,
        waist: p.waist,
    };
    let tg = TimeGrid::from_duration(p.duration, p.dt)?;
    let u = smooth_ramp(tg, p.displacement)?;
    let h = GpeHamiltonian::single_particle(grid.clone(), p.kappa, tweezer.potential_function(&grid, 0.0))?;
    let psi0 = gpe::ground_state(&h, 0.0, p.state_tolerance)?;
    let target = gpe::ground_state(&h, p.displacement, p.state_tolerance)?;
    let problem = StateTransferProblem::new(Arc::new(GpeSystem::new(h)), psi0, target, u)?.with_regularization(p.gamma)?;
    Ok(Setup {
        problem,
        axis: ("x", grid.x().to_vec()),
        observable: ("x_expectation", Box::new(mean_position(grid.x(), grid.dx()))),
        potential: ("potential", trap_row(grid.x(), move |x, u| tweezer.value(x, u))),
        group_amplitude: None,
    })
}

fn build_landau_zener(p: &LandauZenerParams) -> Result<Setup> {
    let h = landau_zener_hamiltonian(p.coupling)?;
    let (_, psi0) = h.ground_state(&[p.u_start])?;
    let (_, target) = h.ground_state(&[p.u_end])?;
    let tg = TimeGrid::from_duration(p.duration, p.dt)?;
    let (a, b) = (p.u_start, p.u_end);
    let u = ControlField::from_fn(tg, |t| a + (b - a) * t / tg.duration())?;
    let problem = StateTransferProblem::new(Arc::new(FewModeSystem::new(h)), psi0, target, u)?.with_regularization(p.gamma)?;
    Ok(Setup {
        problem,
        axis: ("level", vec![0.0, 1.0]),
        observable: ("population", Box::new(|psi| psi.iter().map(|c| c.norm_sqr()).collect())),
        potential: ("potential", Box::new(|u| vec![u[0], -u[0]])),
        group_amplitude: None,
    })
}
