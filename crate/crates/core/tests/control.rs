mod common;

use std::cell::RefCell;
use std::rc::Rc;
use std::sync::Arc;

use common::problems::*;
use common::*;
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ultracold::control::*;
use ultracold::gpe::AnharmonicParams;
use ultracold::lattice::FewModeHamiltonian;
use ultracold::qcore::{fidelity, Complex64, SpatialGrid, StateVector, TimeGrid};

#[test]
fn gradient_matches_finite_differences_gpe_nonlinear() {
    let mut p = gpe_problem(32, 1.8299, 61)
        .with_regularization(1e-3)
        .unwrap()
        .with_bounds(SoftBounds::uniform(2e3, -0.3, 0.3, 1).unwrap())
        .unwrap();
    perturb(&mut p, 0.1, 1);
    let e = p.evaluate().unwrap();
    assert!(e.cost_bounds > 0.0 && e.cost_regularization > 0.0);
    let err = fd_gradient_error(&mut p, 24, 11);
    assert!(err < 1e-4, "relative error {err:e}");
}

#[test]
fn gradient_matches_finite_differences_gpe_linear() {
    let mut p = gpe_problem(32, 0.0, 61).with_regularization(1e-4).unwrap();
    perturb(&mut p, 0.1, 2);
    let err = fd_gradient_error(&mut p, 24, 12);
    assert!(err < 1e-4, "relative error {err:e}");
}

#[test]
fn gradient_matches_finite_differences_bose_hubbard() {
    let mut p = bh_problem(3, 3, 101)
        .with_bounds(SoftBounds::uniform(10.0, -1.0, 0.5, 1).unwrap())
        .unwrap();
    perturb(&mut p, 0.3, 3);
    let err = fd_gradient_error(&mut p, 24, 13);
    assert!(err < 1e-4, "relative error {err:e}");
}

#[test]
fn gradient_matches_finite_differences_two_particle() {
    let mut p = pair_problem(32, 41).with_regularization(1e-4).unwrap();
    perturb(&mut p, 0.1, 4);
    let err = fd_gradient_error(&mut p, 20, 14);
    assert!(err < 1e-4, "relative error {err:e}");
}

#[test]
fn gradient_matches_finite_differences_landau_zener() {
    let mut p = lz_problem(201, 0.01).with_regularization(1e-3).unwrap();
    perturb(&mut p, 1.0, 5);
    let err = fd_gradient_error(&mut p, 24, 15);
    assert!(err < 1e-4, "relative error {err:e}");
}

#[test]
fn gradient_matches_finite_differences_two_fields() {
    let sz = DMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)]);
    let sx = DMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]);
    let sy = DMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)]);
    let h = FewModeHamiltonian::new(sz.clone() * c(0.5, 0.0), vec![sx, sy]).unwrap();
    let b = ultracold::qcore::Basis::FewMode { dim: 2 };
    let psi0 = StateVector::new(vec![c(1.0, 0.0), c(0.0, 0.0)], b).unwrap();
    let target = StateVector::new(vec![c(0.0, 0.0), c(1.0, 0.0)], b).unwrap();
    let tg = TimeGrid::new(101, 0.02).unwrap();
    let u = ControlField::constant(tg, 2, 0.2).unwrap();
    let mut p = StateTransferProblem::new(Arc::new(FewModeSystem::new(h)), psi0, target, u)
        .unwrap()
        .with_regularization(1e-3)
        .unwrap();
    perturb(&mut p, 0.5, 6);
    let err = fd_gradient_error(&mut p, 24, 16);
    assert!(err < 1e-4, "relative error {err:e}");
}

#[test]
fn gradient_endpoints_are_zero() {
    let mut p = gpe_problem(32, 1.0, 31).with_regularization(1e-3).unwrap();
    perturb(&mut p, 0.1, 7);
    let g = p.gradient_l2().unwrap();
    assert_eq!(g[0], 0.0);
    assert_eq!(g[30], 0.0);
    assert!(g[1..30].iter().any(|&v| v != 0.0));
}

#[test]
fn perfect_transfer_is_a_critical_point() {
    let p0 = gpe_problem(32, 0.0, 41);
    let mut probe = p0.clone();
    let end = probe.propagate_forward().unwrap().pop().unwrap();
    let mut p = StateTransferProblem::new(
        Arc::clone(p0.system()),
        p0.initial_state().clone(),
        end.normalized().unwrap(),
        p0.control().clone(),
    )
    .unwrap();
    assert!(p.cost().unwrap().abs() < 1e-12);
    let g = p.gradient_l2().unwrap();
    let norm = l2_inner(&g, &g, 0.002).sqrt();
    assert!(norm < 1e-6, "{norm:e}");
}

#[test]
fn costate_norm_is_constant_for_linear_dynamics() {
    let mut p = gpe_problem(32, 0.0, 81);
    p.set_control(ControlField::constant(p.control().time_grid(), 1, 0.1).unwrap()).unwrap();
    let o = p.fidelity().unwrap().sqrt();
    let chi = p.propagate_adjoint().unwrap();
    for c in &chi {
        assert!((c.norm() - o).abs() < 1e-10, "{} vs {o}", c.norm());
    }
}

#[test]
fn terminal_costate() {
    let mut p = lz_problem(51, 0.02);
    let psi = p.propagate_forward().unwrap();
    let chi = p.propagate_adjoint().unwrap();
    let o = ultracold::qcore::overlap(p.target_state(), psi.last().unwrap()).unwrap();
    let expect: Vec<Complex64> = p.target_state().amplitudes().iter().map(|t| c(0.0, 1.0) * o * t).collect();
    assert!(max_diff(chi.last().unwrap().amplitudes(), &expect) < 1e-14);
}

#[test]
fn costate_matches_dense_backward_propagation() {
    // static control: chi(0) = U^dagger^(N-1) chi(T) with U the dense split-step matrix
    let n = 24;
    let steps = 51;
    let dt = 0.002;
    let mut p = gpe_problem(n, 0.0, steps);
    let u0 = 0.07;
    p.set_control(ControlField::constant(p.control().time_grid(), 1, u0).unwrap()).unwrap();
    let chi = p.propagate_adjoint().unwrap();

    let grid = SpatialGrid::new(-2.0, 2.0, n).unwrap();
    let v: Vec<f64> = grid.x().iter().map(|&x| AnharmonicParams::ATOM_CHIP.value(x, u0)).collect();
    let t = to_complex(&dense_spectral_kinetic(n, grid.dx(), KAPPA));
    // backward: K^+ T^+ K^+ with K = exp(-i dt/2 V)
    let mut x = chi.last().unwrap().amplitudes().to_vec();
    for _ in 0..steps - 1 {
        x.iter_mut().zip(&v).for_each(|(z, vi)| *z *= Complex64::from_polar(1.0, 0.5 * dt * vi));
        x = expm_apply(&t, -dt, &x);
        x.iter_mut().zip(&v).for_each(|(z, vi)| *z *= Complex64::from_polar(1.0, 0.5 * dt * vi));
    }
    let err = l2_diff(chi[0].amplitudes(), &x, grid.dx());
    assert!(err < 1e-8, "{err:e}");
}

#[test]
fn cost_of_perfect_transfer_and_regularization_of_constant() {
    let mut p = lz_problem(11, 0.1).with_regularization(1e-5).unwrap();
    p.set_control(ControlField::constant(p.control().time_grid(), 1, 0.3).unwrap()).unwrap();
    assert_eq!(p.evaluate().unwrap().cost_regularization, 0.0);
}

#[test]
fn h1_gradient_inverts_the_laplacian() {
    let mut p = gpe_problem(32, 1.0, 61).with_regularization(1e-3).unwrap();
    perturb(&mut p, 0.1, 8);
    let l2 = p.gradient_l2().unwrap();
    let dt = p.control().dt();
    let h1 = gradient_h1(&l2, 1, dt);
    let scale = l2.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    for i in 1..l2.len() - 1 {
        let lap = -(h1[i + 1] - 2.0 * h1[i] + h1[i - 1]) / (dt * dt);
        assert!((lap - l2[i]).abs() < 1e-10 * scale, "{i}");
    }
    // directional derivatives agree in either metric
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let d = random_direction(&mut rng, 61, 1);
    let a = l2_inner(&l2, &d, dt);
    let b = h1_inner(&h1, &d, 1, dt);
    assert!((a - b).abs() < 1e-10 * a.abs());
}

#[test]
fn h1_spike_gives_tent() {
    let n = 21;
    let dt = 0.1;
    let mut f = vec![0.0; n];
    f[7] = 1.0;
    let g = gradient_h1(&f, 1, dt);
    // dense solve of the interior system
    let m = n - 2;
    let a = DMatrix::from_fn(m, m, |i, j| match i.abs_diff(j) {
        0 => 2.0 / (dt * dt),
        1 => -1.0 / (dt * dt),
        _ => 0.0,
    });
    let rhs = nalgebra::DVector::from_fn(m, |i, _| f[i + 1]);
    let x = a.lu().solve(&rhs).unwrap();
    for i in 0..m {
        assert!((g[i + 1] - x[i]).abs() < 1e-12);
    }
    // piecewise linear with its peak at the spike
    for i in 1..n - 1 {
        let second = g[i + 1] - 2.0 * g[i] + g[i - 1];
        if i != 7 {
            assert!(second.abs() < 1e-12);
        }
    }
    assert!(g.iter().all(|&v| v >= 0.0));
}

#[test]
fn group_gradient_is_projection_of_l2_gradient() {
    let mut p = gpe_problem(32, 1.0, 61).with_regularization(1e-4).unwrap();
    perturb(&mut p, 0.1, 9);
    let basis = shaped_basis(p.control().time_grid(), 8, 0.2, 4);
    let l2 = p.gradient_l2().unwrap();
    let gc = group_gradient(&mut p, &basis).unwrap();
    for (m, col) in basis.columns().iter().enumerate() {
        let q: f64 = col.iter().zip(&l2).map(|(b, g)| b * g).sum::<f64>() * 0.002;
        assert!((gc[m] - q).abs() <= 1e-12 * q.abs().max(1e-3), "{m}");
    }
}

#[test]
fn group_gradient_matches_finite_differences() {
    let mut p = gpe_problem(32, 1.8299, 61).with_regularization(1e-3).unwrap();
    let basis = shaped_basis(p.control().time_grid(), 6, 0.2, 5);
    let mut obj = GroupObjective::new(&mut p, basis).unwrap();
    let c0 = vec![0.05, -0.02, 0.03, 0.0, 0.01, -0.04];
    obj.set_params(&c0).unwrap();
    let g = obj.gradient().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..20 {
        let d: Vec<f64> = (0..6).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let an: f64 = g.iter().zip(&d).map(|(a, b)| a * b).sum();
        let eps = 1e-6;
        let mut at = |s: f64| {
            let x: Vec<f64> = c0.iter().zip(&d).map(|(a, b)| a + s * b).collect();
            obj.set_params(&x).unwrap();
            obj.evaluate().unwrap().cost
        };
        let fd = (at(eps) - at(-eps)) / (2.0 * eps);
        assert!((fd - an).abs() < 1e-4 * an.abs(), "{fd} vs {an}");
    }
}

#[test]
fn group_coefficient_orthogonal_to_gradient_vanishes() {
    let mut p = gpe_problem(32, 0.0, 61);
    perturb(&mut p, 0.1, 10);
    let tg = p.control().time_grid();
    let l2 = p.gradient_l2().unwrap();
    let raw = shaped_basis(tg, 1, 0.0, 0);
    let b = raw.column(0);
    let proj = b.iter().zip(&l2).map(|(x, y)| x * y).sum::<f64>() / l2.iter().map(|y| y * y).sum::<f64>();
    let ortho: Vec<f64> = b.iter().zip(&l2).map(|(x, y)| x - proj * y).collect();
    let basis = GroupBasis::new(tg, vec![b.to_vec(), ortho]).unwrap();
    let gc = group_gradient(&mut p, &basis).unwrap();
    assert!(gc[1].abs() < 1e-14 * gc[0].abs().max(1.0), "{gc:?}");
    assert!(gc[0].abs() > 0.0);
}

#[test]
fn group_with_unit_basis_follows_grape_direction() {
    let mut p = gpe_problem(32, 0.0, 41);
    perturb(&mut p, 0.1, 11);
    let tg = p.control().time_grid();
    let columns: Vec<Vec<f64>> = (1..40)
        .map(|i| (0..41).map(|j| if j == i { 1.0 } else { 0.0 }).collect())
        .collect();
    let basis = GroupBasis::new(tg, columns).unwrap();
    let l2 = p.gradient_l2().unwrap();
    let gc = group_gradient(&mut p, &basis).unwrap();
    for i in 1..40 {
        assert!((gc[i - 1] - l2[i] * tg.dt()).abs() < 1e-15 * l2[i].abs().max(1.0));
    }
}

#[test]
fn group_rejects_unshaped_basis() {
    let mut p = lz_problem(51, 0.02);
    let raw = make_sine_basis(4, p.control().time_grid(), 0.3, 1).unwrap();
    assert!(GroupObjective::new(&mut p, raw).is_err());
    let other = shaped_basis(TimeGrid::new(52, 0.02).unwrap(), 4, 0.0, 1);
    assert!(group_gradient(&mut p, &other).is_err());
}

#[test]
fn line_search_on_quadratic() {
    let ls = InterpolatingStepSize::default();
    for &(curv, slope) in &[(1.0, -1.0), (10.0, -1.0), (0.3, -1.0), (0.05, -0.1), (100.0, -3.0)] {
        let mut phi = |a: f64| -> ultracold::Result<f64> { Ok(2.0 + slope * a + 0.5 * curv * a * a) };
        let (a, fa) = ls.search(&mut phi, 2.0, slope, None).unwrap().unwrap();
        let exact = (-slope / curv).min(5.0);
        assert!((a - exact).abs() <= 0.05 * exact, "{a} vs {exact}");
        assert!(a <= 5.0);
        assert!(fa <= 2.0 + 1e-4 * a * slope);
    }
}

#[test]
fn line_search_non_smooth_and_failure() {
    let ls = InterpolatingStepSize::default();
    let mut phi = |a: f64| -> ultracold::Result<f64> { Ok(if a > 1e-3 { f64::NAN } else { 1.0 - a }) };
    let (a, _) = ls.search(&mut phi, 1.0, -1.0, Some(0.4)).unwrap().unwrap();
    assert!(a <= 1e-3);
    let mut up = |a: f64| -> ultracold::Result<f64> { Ok(1.0 + a) };
    assert!(ls.search(&mut up, 1.0, -1.0, None).unwrap().is_none());
    assert!(ls.search(&mut up, 1.0, 1.0, None).is_err());
}

/// `0.5 (x - x*)^T A (x - x*)` with SPD `A`, written as `0.5 x^T A x - b^T x + c`.
struct Quadratic {
    a: DMatrix<f64>,
    b: Vec<f64>,
    c: f64,
    x: Vec<f64>,
}

impl Quadratic {
    fn new(d: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let r = DMatrix::from_fn(d, d, |_, _| rng.gen_range(-1.0..1.0));
        let a = &r * r.transpose() + DMatrix::identity(d, d) * 0.5;
        let xs = nalgebra::DVector::from_fn(d, |_, _| rng.gen_range(-1.0..1.0));
        let b: Vec<f64> = (&a * &xs).iter().copied().collect();
        let c = 0.5 * xs.dot(&(&a * &xs));
        Self { a, b, c, x: vec![0.0; d] }
    }

    fn grad(&self) -> Vec<f64> {
        let ax = &self.a * nalgebra::DVector::from_column_slice(&self.x);
        ax.iter().zip(&self.b).map(|(p, q)| p - q).collect()
    }
}

impl Objective for Quadratic {
    fn params(&self) -> Vec<f64> {
        self.x.clone()
    }

    fn set_params(&mut self, x: &[f64]) -> ultracold::Result<()> {
        self.x = x.to_vec();
        Ok(())
    }

    fn evaluate(&mut self) -> ultracold::Result<Evaluation> {
        let g = self.grad();
        let cost: f64 = self.c + self.x.iter().zip(&g).zip(&self.b).map(|((x, gi), bi)| 0.5 * x * (gi - bi)).sum::<f64>();
        Ok(Evaluation {
            fidelity: 0.0,
            cost,
            cost_fidelity: cost,
            cost_regularization: 0.0,
            cost_bounds: 0.0,
        })
    }

    fn gradient(&mut self) -> ultracold::Result<Vec<f64>> {
        Ok(self.grad())
    }

    fn inner(&self, a: &[f64], b: &[f64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| x * y).sum()
    }
}

#[test]
fn lbfgs_minimizes_quadratic() {
    let mut q = Quadratic::new(12, 1);
    let gnorm = Rc::new(RefCell::new(f64::INFINITY));
    let opts = OptimizerOptions {
        stopper: make_stopper(vec![
            Box::new(|v: &OptimizerView| (v.gradient_norm < 1e-8).then(|| "converged".to_string())),
            Box::new(|v: &OptimizerView| (v.iteration >= 50).then(|| "limit".to_string())),
        ]),
        ..Default::default()
    };
    let rec = Rc::clone(&gnorm);
    let mut col = make_collector(move |v| {
        *rec.borrow_mut() = v.gradient_norm;
        Ok(())
    });
    let r = minimize(&mut q, Direction::Lbfgs, &opts, &mut col).unwrap();
    assert_eq!(r.status, Status::Stopped("converged".into()), "{r:?}");
    assert!(r.iterations < 50);
    assert!(*gnorm.borrow() < 1e-8);
    for w in r.cost_history.windows(2) {
        assert!(w[1] <= w[0]);
    }
}

#[test]
fn lbfgs_with_exact_line_search_terminates_in_d_steps() {
    let d = 8;
    let q = Quadratic::new(d, 2);
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    let mut lb = Lbfgs::new(d);
    let mut x = vec![0.0; d];
    let grad = |x: &[f64]| -> Vec<f64> {
        let ax = &q.a * nalgebra::DVector::from_column_slice(x);
        ax.iter().zip(&q.b).map(|(p, r)| p - r).collect()
    };
    let mut g = grad(&x);
    let mut iters = 0;
    while dot(&g, &g).sqrt() > 1e-9 && iters < 3 * d {
        let p = lb.direction(&g, &dot);
        let ap = &q.a * nalgebra::DVector::from_column_slice(&p);
        let alpha = -dot(&g, &p) / dot(&p, ap.as_slice());
        let xn: Vec<f64> = x.iter().zip(&p).map(|(a, b)| a + alpha * b).collect();
        let gn = grad(&xn);
        lb.update(
            xn.iter().zip(&x).map(|(a, b)| a - b).collect(),
            gn.iter().zip(&g).map(|(a, b)| a - b).collect(),
            &dot,
        );
        x = xn;
        g = gn;
        iters += 1;
    }
    assert!(iters <= d + 1, "{iters} iterations");
}

fn quick_options(max_iter: usize) -> OptimizerOptions {
    OptimizerOptions {
        stopper: Stopper::with_limits(0.999, 1e-7, max_iter),
        ..Default::default()
    }
}

#[derive(Default)]
struct Record {
    fidelities: Vec<f64>,
    steps: Vec<u64>,
    controls: Vec<Vec<f64>>,
}

fn recorder() -> (Rc<RefCell<Record>>, Collector) {
    let rec = Rc::new(RefCell::new(Record::default()));
    let r = Rc::clone(&rec);
    let col = make_collector(move |v| {
        let mut r = r.borrow_mut();
        r.fidelities.push(v.fidelity);
        r.steps.push(v.propagation_steps);
        r.controls.push(v.control.unwrap().values().to_vec());
        Ok(())
    });
    (rec, col)
}

fn check_run(p0: &StateTransferProblem, report: &OptimizationReport, rec: &Record) {
    assert_eq!(rec.fidelities.len(), report.iterations + 1);
    assert_eq!(rec.fidelities, report.fidelity_history);
    for w in report.cost_history.windows(2) {
        assert!(w[1] <= w[0], "cost increased {} -> {}", w[0], w[1]);
    }
    for w in rec.steps.windows(2) {
        assert!(w[1] > w[0]);
    }
    let (first, last) = (p0.control().first()[0], p0.control().last()[0]);
    for u in &rec.controls {
        assert_eq!(u[0], first);
        assert_eq!(*u.last().unwrap(), last);
    }
    // replay the recorded controls
    let mut replay = p0.clone();
    for k in [0, rec.controls.len() / 2, rec.controls.len() - 1] {
        let u = ControlField::new(p0.control().time_grid(), 1, rec.controls[k].clone()).unwrap();
        replay.set_control(u).unwrap();
        assert_eq!(replay.fidelity().unwrap(), rec.fidelities[k]);
    }
}

fn lz_hard() -> StateTransferProblem {
    // fast sweep: the linear ramp is far from adiabatic
    let mut p = lz_problem(301, 0.01).with_regularization(1e-4).unwrap();
    p.set_control(ControlField::from_fn(p.control().time_grid(), |t| -5.0 + 10.0 * t / 3.0).unwrap()).unwrap();
    p
}

#[test]
fn grape_variants_improve_landau_zener() {
    for (dir, metric) in [
        (Direction::Lbfgs, Metric::L2),
        (Direction::Lbfgs, Metric::H1),
        (Direction::Steepest, Metric::L2),
        (Direction::Steepest, Metric::H1),
    ] {
        let p0 = lz_hard();
        let mut p = p0.clone();
        let f0 = p.fidelity().unwrap();
        let (rec, mut col) = recorder();
        let r = grape_optimize(&mut p, dir, metric, &quick_options(150), &mut col).unwrap();
        check_run(&p0, &r, &rec.borrow());
        assert!(r.final_fidelity() > f0.max(0.9), "{dir:?} {metric:?}: {f0} -> {}", r.final_fidelity());
        if dir == Direction::Lbfgs {
            assert!(r.final_fidelity() > 0.999, "{dir:?} {metric:?}: {}", r.final_fidelity());
        }
    }
}

#[test]
fn group_and_dgroup_on_landau_zener() {
    let p0 = lz_hard();
    let tg = p0.control().time_grid();
    let mut p = p0.clone();
    let (rec, mut col) = recorder();
    let (r, c) = group_optimize(
        &mut p,
        shaped_basis(tg, 10, 0.0, 0),
        None,
        Direction::Lbfgs,
        &quick_options(200),
        &mut col,
    )
    .unwrap();
    check_run(&p0, &r, &rec.borrow());
    assert_eq!(c.len(), 10);
    assert!(r.final_fidelity() > 0.99, "{}", r.final_fidelity());

    let mut p = p0.clone();
    let (rec, mut col) = recorder();
    let shape = make_sigmoid_shape(tg, 0.999).unwrap();
    let mut maker = make_rand_sine_basis_maker(4, tg, shape, 0.3, 17);
    let mut every = make_dressed_restarter(|v| v.iteration % 2 == 0);
    let r = dgroup_optimize(&mut p, &mut maker, None, Direction::Lbfgs, &quick_options(60), &mut every, &mut col).unwrap();
    check_run(&p0, &r, &rec.borrow());
    assert!(r.restarts.len() >= 2, "{} restarts in {} iterations", r.restarts.len(), r.iterations);
    for s in &r.restarts {
        assert!((s.cost_after - s.cost_before).abs() <= 1e-12, "{s:?}");
    }
    assert!(r.final_fidelity() > 0.99, "{}", r.final_fidelity());
}

#[test]
fn group_coefficient_injection_reproduces_control() {
    let p0 = lz_problem(51, 0.02);
    let tg = p0.control().time_grid();
    let mut p = p0.clone();
    p.set_control(ControlField::constant(tg, 1, 0.0).unwrap()).unwrap();
    let basis = make_sine_basis(3, tg, 0.0, 0).unwrap();
    let mut obj = GroupObjective::new(&mut p, basis).unwrap();
    obj.set_params(&[0.55, 0.0, 0.0]).unwrap();
    let u = obj.control().unwrap();
    for i in 0..51 {
        let t = tg.t(i);
        assert!((u.at(i)[0] - 0.55 * (std::f64::consts::PI * t / tg.duration()).sin()).abs() < 1e-14);
    }
}

#[test]
fn absorption_preserves_the_control_exactly() {
    let mut p = lz_hard();
    let tg = p.control().time_grid();
    let mut obj = GroupObjective::new(&mut p, shaped_basis(tg, 5, 0.2, 1)).unwrap();
    obj.set_params(&[0.3, -0.2, 0.1, 0.05, 0.4]).unwrap();
    let before = obj.control().unwrap().clone();
    let cost_before = obj.evaluate().unwrap().cost;
    obj.redress(shaped_basis(tg, 5, 0.2, 2)).unwrap();
    assert_eq!(obj.coefficients(), &[0.0; 5]);
    obj.set_params(&[0.0; 5]).unwrap();
    assert_eq!(obj.control().unwrap(), &before);
    assert_eq!(obj.evaluate().unwrap().cost, cost_before);
}

#[test]
fn optimization_is_deterministic() {
    let run = || {
        let mut p = lz_hard();
        let tg = p.control().time_grid();
        let shape = make_sigmoid_shape(tg, 0.999).unwrap();
        let mut maker = make_rand_sine_basis_maker(4, tg, shape, 0.3, 99);
        let mut rs = make_dressed_restarter(|v| v.iteration % 4 == 0);
        dgroup_optimize(&mut p, &mut maker, None, Direction::Lbfgs, &quick_options(30), &mut rs, &mut Collector::silent())
            .unwrap()
    };
    let (a, b) = (run(), run());
    assert_eq!(a.fidelity_history, b.fidelity_history);
    assert_eq!(a.cost_history, b.cost_history);
}

#[test]
fn collector_failure_aborts() {
    let mut p = lz_hard();
    let mut col = make_collector(|v| if v.iteration >= 2 { Err("disk full".into()) } else { Ok(()) });
    let r = grape_optimize(&mut p, Direction::Lbfgs, Metric::L2, &quick_options(100), &mut col).unwrap();
    assert_eq!(r.status, Status::CollectorFailure("disk full".into()));
    assert_eq!(r.iterations, 2);
}

#[test]
fn stopper_fires_at_start_when_already_converged() {
    let p0 = lz_problem(51, 0.02);
    let mut probe = p0.clone();
    let end = probe.propagate_forward().unwrap().pop().unwrap();
    let mut p =
        StateTransferProblem::new(Arc::clone(p0.system()), p0.initial_state().clone(), end, p0.control().clone())
            .unwrap();
    let r = grape_optimize(&mut p, Direction::Lbfgs, Metric::L2, &quick_options(10), &mut Collector::silent()).unwrap();
    assert_eq!(r.iterations, 0);
    assert_eq!(r.status, Status::Stopped("fidelity criterion satisfied".into()));
}

#[test]
fn problem_validation() {
    let p = lz_problem(11, 0.1);
    let sys = Arc::clone(p.system());
    let b = ultracold::qcore::Basis::FewMode { dim: 2 };
    let bad = StateVector::new(vec![c(1.0, 0.0), c(1.0, 0.0)], b).unwrap();
    assert!(StateTransferProblem::new(Arc::clone(&sys), bad, p.target_state().clone(), p.control().clone()).is_err());
    let two = ControlField::constant(p.control().time_grid(), 2, 0.0).unwrap();
    assert!(StateTransferProblem::new(sys, p.initial_state().clone(), p.target_state().clone(), two).is_err());
    assert!(p.clone().with_regularization(-1.0).is_err());
    let f = fidelity(p.initial_state(), p.target_state()).unwrap();
    assert!(f < 0.1);
}
