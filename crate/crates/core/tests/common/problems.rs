//! Reduced transfer problems and finite-difference checks.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ultracold::control::*;
use ultracold::gpe::{ground_state, AnharmonicParams, GpeHamiltonian};
use ultracold::lattice::{landau_zener_hamiltonian, BoundTransform, FockBasis, LatticeHamiltonian};
use ultracold::pair::{ground_state_2d, TensorGrid2D, TwoParticleHamiltonian};
use ultracold::qcore::{SpatialGrid, TimeGrid};

pub const KAPPA: f64 = 0.36537;

pub fn gpe_problem(n: usize, beta: f64, steps: usize) -> StateTransferProblem {
    let grid = SpatialGrid::new(-2.0, 2.0, n).unwrap();
    let v = AnharmonicParams::ATOM_CHIP.potential_function(&grid, 0.0);
    let h = GpeHamiltonian::new(grid, KAPPA, v, beta).unwrap();
    let psi0 = ground_state(&h, 0.0, 1e-10).unwrap();
    let target = ground_state(&h, 0.25, 1e-10).unwrap();
    let tg = TimeGrid::new(steps, 0.002).unwrap();
    let u = ControlField::from_fn(tg, |t| 0.3 * (std::f64::consts::PI * t / tg.duration()).sin()).unwrap();
    StateTransferProblem::new(Arc::new(GpeSystem::new(h)), psi0, target, u).unwrap()
}

pub fn bh_problem(sites: usize, particles: usize, steps: usize) -> StateTransferProblem {
    let basis = FockBasis::new(sites, particles).unwrap();
    let xs: Vec<f64> = (0..sites).map(|i| -1.0 + 2.0 * i as f64 / (sites - 1) as f64).collect();
    let pot: Vec<f64> = xs.iter().map(|x| 0.1 * x * x).collect();
    let t = BoundTransform::new(2.0, 40.0).unwrap();
    let h = LatticeHamiltonian::new(basis, 1.0, &pot, false, Some(t)).unwrap();
    let (_, psi0) = h.ground_state(t.inverse(4.0).unwrap(), 1e-12).unwrap();
    let (_, target) = h.ground_state(t.inverse(12.0).unwrap(), 1e-12).unwrap();
    let tg = TimeGrid::new(steps, 0.002).unwrap();
    let (a, b) = (t.inverse(4.0).unwrap(), t.inverse(12.0).unwrap());
    let u = ControlField::from_fn(tg, |s| a + (b - a) * s / tg.duration()).unwrap();
    StateTransferProblem::new(Arc::new(LatticeSystem::new(h, 4).unwrap()), psi0, target, u).unwrap()
}

pub fn pair_problem(n: usize, steps: usize) -> StateTransferProblem {
    let grid = TensorGrid2D::from_bounds(-2.0, 2.0, n).unwrap();
    let v = AnharmonicParams::ATOM_CHIP.potential_function(grid.axis(), 0.0);
    let h = TwoParticleHamiltonian::new(grid, KAPPA, v, 1.5).unwrap();
    let psi0 = ground_state_2d(&h, 0.0, 1e-9).unwrap();
    let target = ground_state_2d(&h, 0.2, 1e-9).unwrap();
    let tg = TimeGrid::new(steps, 5e-4).unwrap();
    let u = ControlField::from_fn(tg, |t| 0.25 * (std::f64::consts::PI * t / tg.duration()).sin()).unwrap();
    StateTransferProblem::new(Arc::new(PairSystem::new(h)), psi0, target, u).unwrap()
}

pub fn lz_problem(steps: usize, dt: f64) -> StateTransferProblem {
    let h = landau_zener_hamiltonian(1.0).unwrap();
    let (_, psi0) = h.ground_state(&[-5.0]).unwrap();
    let (_, target) = h.ground_state(&[5.0]).unwrap();
    let tg = TimeGrid::new(steps, dt).unwrap();
    let u = ControlField::from_fn(tg, |t| -5.0 + 10.0 * t / tg.duration()).unwrap();
    StateTransferProblem::new(Arc::new(FewModeSystem::new(h)), psi0, target, u).unwrap()
}

/// Adds a smooth random perturbation with fixed endpoints.
pub fn perturb(p: &mut StateTransferProblem, amp: f64, seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let u = p.control().clone();
    let n = u.n_steps();
    let m = u.n_fields();
    let modes: Vec<(f64, f64)> = (0..4 * m).map(|_| (rng.gen_range(-amp..amp), rng.gen_range(0.0..6.0))).collect();
    let vals: Vec<f64> = u
        .values()
        .iter()
        .enumerate()
        .map(|(j, v)| {
            let (i, k) = (j / m, j % m);
            let s = i as f64 / (n - 1) as f64;
            let bump: f64 = (0..4)
                .map(|q| {
                    let (a, ph) = modes[q * m + k];
                    a * ((q as f64 + 1.0) * std::f64::consts::PI * s).sin() * (1.0 + 0.3 * (ph + 5.0 * s).cos())
                })
                .sum();
            v + bump
        })
        .collect();
    p.set_control(ControlField::new(u.time_grid(), m, vals).unwrap()).unwrap();
}

pub fn random_direction(rng: &mut ChaCha8Rng, n_steps: usize, n_fields: usize) -> Vec<f64> {
    let mut d: Vec<f64> = (0..n_steps * n_fields).map(|_| rng.gen_range(-1.0..1.0)).collect();
    d[..n_fields].fill(0.0);
    d[(n_steps - 1) * n_fields..].fill(0.0);
    d
}

pub fn cost_at(p: &mut StateTransferProblem, base: &[f64], dir: &[f64], eps: f64) -> f64 {
    let x: Vec<f64> = base.iter().zip(dir).map(|(b, d)| b + eps * d).collect();
    let u = ControlField::new(p.control().time_grid(), p.control().n_fields(), x).unwrap();
    p.set_control(u).unwrap();
    p.cost().unwrap()
}

/// Worst relative mismatch between `<grad, d>_L2` and central differences.
pub fn fd_gradient_error(p: &mut StateTransferProblem, directions: usize, seed: u64) -> f64 {
    let eps = 1e-6;
    let base_u = p.control().clone();
    let base = base_u.values().to_vec();
    let g = p.gradient_l2().unwrap();
    let (n, m, dt) = (base_u.n_steps(), base_u.n_fields(), base_u.dt());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..directions {
        let d = random_direction(&mut rng, n, m);
        let an = l2_inner(&g, &d, dt);
        let fd = (cost_at(p, &base, &d, eps) - cost_at(p, &base, &d, -eps)) / (2.0 * eps);
        worst = worst.max((fd - an).abs() / an.abs());
    }
    p.set_control(base_u).unwrap();
    worst
}

pub fn shaped_basis(tg: TimeGrid, m: usize, max_rand: f64, seed: u64) -> GroupBasis {
    let s = make_sigmoid_shape(tg, 0.999).unwrap();
    make_sine_basis(m, tg, max_rand, seed).unwrap().shaped(&s).unwrap()
}
