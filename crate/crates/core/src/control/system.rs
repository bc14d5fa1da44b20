use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::field::ControlField;
use crate::error::{Error, Result};
use crate::gpe::GpeHamiltonian;
use crate::lattice::{lanczos_step, FewModeHamiltonian, LatticeHamiltonian};
use crate::pair::TwoParticleHamiltonian;
use crate::qcore::linalg::hermitian_eigen;
use crate::qcore::Basis;

/// Result of a backward sweep.
#[derive(Debug, Clone)]
pub struct Sensitivity {
    /// Costates `lambda_i`, with `dJ = Re <lambda_i, dpsi_i>` for a
    /// perturbation of the state at step `i`.
    pub costates: Vec<Vec<Complex64>>,
    /// `dJ/du_i` for every sample, time-major like [`ControlField::values`].
    pub control_derivative: Vec<f64>,
}

/// A controllable Hamiltonian together with its time stepper.
///
/// The forward map is `psi_{i+1} = Phi(psi_i; u_i, u_{i+1})`. `backward`
/// returns the exact derivative of that discrete map, so gradients agree
/// with finite differences of the simulated cost rather than only with the
/// continuous-time limit.
pub trait ControlSystem: fmt::Debug + Send + Sync {
    fn basis(&self) -> Basis;

    fn n_fields(&self) -> usize {
        1
    }

    /// Trajectory `psi_0 .. psi_{N-1}` with `psi_0` copied from the input.
    fn forward(&self, psi0: &[Complex64], u: &ControlField) -> Result<Vec<Vec<Complex64>>>;

    /// Pulls the terminal costate back through the trajectory.
    fn backward(&self, states: &[Vec<Complex64>], u: &ControlField, terminal: Vec<Complex64>) -> Result<Sensitivity>;
}

fn check_shapes(sys: &dyn ControlSystem, u: &ControlField, len: usize) -> Result<()> {
    if u.n_fields() != sys.n_fields() {
        return Err(Error::invalid(format!(
            "control has {} fields, system expects {}",
            u.n_fields(),
            sys.n_fields()
        )));
    }
    if len != sys.basis().dim() {
        return Err(Error::invalid(format!(
            "state dimension {len} does not match system dimension {}",
            sys.basis().dim()
        )));
    }
    Ok(())
}

fn check_trajectory(u: &ControlField, states: &[Vec<Complex64>], terminal: &[Complex64]) -> Result<()> {
    if states.len() != u.n_steps() {
        return Err(Error::invalid(format!("{} states for {} time steps", states.len(), u.n_steps())));
    }
    if terminal.len() != states[0].len() {
        return Err(Error::invalid("terminal costate has the wrong dimension"));
    }
    Ok(())
}

/// Adjoint of `y = exp(-i h (v + beta |x|^2)) x` at `x`. Returns the costate
/// before the kick and adds `h Im(conj(nu) x)` to `gv`, the sensitivity to `v`.
fn kick_adjoint(mu: &mut [Complex64], x: &[Complex64], v: &[f64], beta: f64, h: f64, gv: &mut [f64]) {
    for (((m, xi), vi), g) in mu.iter_mut().zip(x).zip(v).zip(gv.iter_mut()) {
        let theta = h * (vi + beta * xi.norm_sqr());
        let nu = *m * Complex64::from_polar(1.0, theta);
        let im = (nu.conj() * xi).im;
        *g += h * im;
        *m = nu + xi * (2.0 * h * beta * im);
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Gross-Pitaevskii (or single-particle) system with the split-step stepper.
#[derive(Debug, Clone)]
pub struct GpeSystem {
    h: GpeHamiltonian,
}

impl GpeSystem {
    pub fn new(h: GpeHamiltonian) -> Self {
        Self { h }
    }

    pub fn hamiltonian(&self) -> &GpeHamiltonian {
        &self.h
    }
}

impl ControlSystem for GpeSystem {
    fn basis(&self) -> Basis {
        self.h.basis()
    }

    fn forward(&self, psi0: &[Complex64], u: &ControlField) -> Result<Vec<Vec<Complex64>>> {
        check_shapes(self, u, psi0.len())?;
        let kernel = self.h.kernel(u.dt())?;
        let pot = self.h.potential();
        let mut out = Vec::with_capacity(u.n_steps());
        let mut psi = psi0.to_vec();
        let mut v_prev = pot.eval(u.at(0)[0]).into_values();
        out.push(psi.clone());
        for i in 1..u.n_steps() {
            let v_next = pot.eval(u.at(i)[0]).into_values();
            let mid: Vec<f64> = v_prev.iter().zip(&v_next).map(|(a, b)| 0.5 * (a + b)).collect();
            kernel.step(&mut psi, &mid, self.h.beta());
            out.push(psi.clone());
            v_prev = v_next;
        }
        Ok(out)
    }

    fn backward(&self, states: &[Vec<Complex64>], u: &ControlField, terminal: Vec<Complex64>) -> Result<Sensitivity> {
        check_trajectory(u, states, &terminal)?;
        let n = u.n_steps();
        let kernel = self.h.kernel(u.dt())?;
        let pot = self.h.potential();
        let (beta, h, w) = (self.h.beta(), 0.5 * u.dt(), self.basis().weight());
        let mut grad = vec![0.0; n];
        let mut costates = vec![Vec::new(); n];
        let mut lam = terminal;
        let mut v_next = pot.eval(u.at(n - 1)[0]).into_values();
        let mut dv_next = pot.derivative(u.at(n - 1)[0]).into_values();
        costates[n - 1] = lam.clone();
        for i in (0..n - 1).rev() {
            let v_i = pot.eval(u.at(i)[0]).into_values();
            let dv_i = pot.derivative(u.at(i)[0]).into_values();
            let mid: Vec<f64> = v_i.iter().zip(&v_next).map(|(a, b)| 0.5 * (a + b)).collect();
            // state just before the second kick
            let mut x = states[i].clone();
            kernel.half_kick(&mut x, &mid, beta);
            kernel.kinetic(&mut x, false);
            let mut gv = vec![0.0; x.len()];
            kick_adjoint(&mut lam, &x, &mid, beta, h, &mut gv);
            kernel.kinetic(&mut lam, true);
            kick_adjoint(&mut lam, &states[i], &mid, beta, h, &mut gv);
            grad[i] += 0.5 * w * dot(&gv, &dv_i);
            grad[i + 1] += 0.5 * w * dot(&gv, &dv_next);
            costates[i] = lam.clone();
            v_next = v_i;
            dv_next = dv_i;
        }
        Ok(Sensitivity {
            costates,
            control_derivative: grad,
        })
    }
}

/// Two particles in a shared trap, split-step on the tensor grid.
#[derive(Debug, Clone)]
pub struct PairSystem {
    h: TwoParticleHamiltonian,
}

impl PairSystem {
    pub fn new(h: TwoParticleHamiltonian) -> Self {
        Self { h }
    }

    pub fn hamiltonian(&self) -> &TwoParticleHamiltonian {
        &self.h
    }

    /// `sum_{x1,x2} g(x1,x2) (f(x1) + f(x2))` without forming the lift.
    fn lifted_dot(&self, g: &[f64], f: &[f64]) -> f64 {
        let n = self.h.grid().n();
        g.iter().enumerate().map(|(idx, gi)| gi * (f[idx / n] + f[idx % n])).sum()
    }
}

impl ControlSystem for PairSystem {
    fn basis(&self) -> Basis {
        self.h.basis()
    }

    fn forward(&self, psi0: &[Complex64], u: &ControlField) -> Result<Vec<Vec<Complex64>>> {
        check_shapes(self, u, psi0.len())?;
        let kernel = self.h.kernel(u.dt())?;
        let mut out = Vec::with_capacity(u.n_steps());
        let mut psi = psi0.to_vec();
        out.push(psi.clone());
        for i in 1..u.n_steps() {
            kernel.step(&mut psi, &self.h.midpoint_diagonal(u.at(i - 1)[0], u.at(i)[0]));
            out.push(psi.clone());
        }
        Ok(out)
    }

    fn backward(&self, states: &[Vec<Complex64>], u: &ControlField, terminal: Vec<Complex64>) -> Result<Sensitivity> {
        check_trajectory(u, states, &terminal)?;
        let n = u.n_steps();
        let kernel = self.h.kernel(u.dt())?;
        let pot = self.h.potential();
        let (h, w) = (0.5 * u.dt(), self.basis().weight());
        let mut grad = vec![0.0; n];
        let mut costates = vec![Vec::new(); n];
        let mut lam = terminal;
        let mut dv_next = pot.derivative(u.at(n - 1)[0]).into_values();
        costates[n - 1] = lam.clone();
        for i in (0..n - 1).rev() {
            let dv_i = pot.derivative(u.at(i)[0]).into_values();
            let neg: Vec<f64> = self.h.midpoint_diagonal(u.at(i)[0], u.at(i + 1)[0]).iter().map(|d| -d).collect();
            let mut gv: Vec<f64> = lam.iter().zip(&states[i + 1]).map(|(l, p)| h * (l.conj() * p).im).collect();
            kernel.half_kick(&mut lam, &neg);
            kernel.kinetic(&mut lam, true);
            kernel.half_kick(&mut lam, &neg);
            for ((g, l), p) in gv.iter_mut().zip(&lam).zip(&states[i]) {
                *g += h * (l.conj() * p).im;
            }
            grad[i] += 0.5 * w * self.lifted_dot(&gv, &dv_i);
            grad[i + 1] += 0.5 * w * self.lifted_dot(&gv, &dv_next);
            costates[i] = lam.clone();
            dv_next = dv_i;
        }
        Ok(Sensitivity {
            costates,
            control_derivative: grad,
        })
    }
}

/// Simpson rule for `int_0^dt Im <lambda(s)| O |psi(s)> ds` given the
/// values of `Im <.|O|.>` at both ends and the midpoint.
fn simpson(dt: f64, f0: f64, fh: f64, f1: f64) -> f64 {
    dt / 6.0 * (f0 + 4.0 * fh + f1)
}

/// Bose-Hubbard chain with the interaction strength as control, propagated
/// by Lanczos steps with the midpoint Hamiltonian.
#[derive(Debug, Clone)]
pub struct LatticeSystem {
    h: LatticeHamiltonian,
    krylov_order: usize,
    onsite_diag: Vec<f64>,
}

impl LatticeSystem {
    pub fn new(h: LatticeHamiltonian, krylov_order: usize) -> Result<Self> {
        if krylov_order < 2 {
            return Err(Error::invalid(format!("Krylov order must be at least 2, got {krylov_order}")));
        }
        Ok(Self {
            onsite_diag: h.onsite().diagonal_values(),
            h,
            krylov_order,
        })
    }

    pub fn hamiltonian(&self) -> &LatticeHamiltonian {
        &self.h
    }

    pub fn krylov_order(&self) -> usize {
        self.krylov_order
    }

    fn midpoint_interaction(&self, u0: f64, u1: f64) -> f64 {
        0.5 * (self.h.interaction(u0) + self.h.interaction(u1))
    }

    fn onsite_im(&self, a: &[Complex64], b: &[Complex64]) -> f64 {
        a.iter().zip(b).zip(&self.onsite_diag).map(|((x, y), d)| d * (x.conj() * y).im).sum()
    }
}

impl ControlSystem for LatticeSystem {
    fn basis(&self) -> Basis {
        self.h.fock_basis().basis()
    }

    fn forward(&self, psi0: &[Complex64], u: &ControlField) -> Result<Vec<Vec<Complex64>>> {
        check_shapes(self, u, psi0.len())?;
        let mut out = Vec::with_capacity(u.n_steps());
        out.push(psi0.to_vec());
        for i in 1..u.n_steps() {
            let op = self.h.operator_with_interaction(self.midpoint_interaction(u.at(i - 1)[0], u.at(i)[0]));
            let next = lanczos_step(&op, &out[i - 1], u.dt(), self.krylov_order)?;
            out.push(next);
        }
        Ok(out)
    }

    fn backward(&self, states: &[Vec<Complex64>], u: &ControlField, terminal: Vec<Complex64>) -> Result<Sensitivity> {
        check_trajectory(u, states, &terminal)?;
        let (n, dt, k) = (u.n_steps(), u.dt(), self.krylov_order);
        let mut grad = vec![0.0; n];
        let mut costates = vec![Vec::new(); n];
        costates[n - 1] = terminal;
        for i in (0..n - 1).rev() {
            let (u0, u1) = (u.at(i)[0], u.at(i + 1)[0]);
            let op = self.h.operator_with_interaction(self.midpoint_interaction(u0, u1));
            let lam1 = &costates[i + 1];
            let lam_half = lanczos_step(&op, lam1, -0.5 * dt, k)?;
            let lam0 = lanczos_step(&op, lam1, -dt, k)?;
            let psi_half = lanczos_step(&op, &states[i], 0.5 * dt, k)?;
            let integral = simpson(
                dt,
                self.onsite_im(&lam0, &states[i]),
                self.onsite_im(&lam_half, &psi_half),
                self.onsite_im(lam1, &states[i + 1]),
            );
            // dH_mid/du_j = U'(u_j)/4 * onsite
            grad[i] += 0.25 * self.h.interaction_derivative(u0) * integral;
            grad[i + 1] += 0.25 * self.h.interaction_derivative(u1) * integral;
            costates[i] = lam0;
        }
        Ok(Sensitivity {
            costates,
            control_derivative: grad,
        })
    }
}

/// Eigendecomposition of a small Hermitian matrix, reused for several
/// exponentials with the same generator.
struct Exponential {
    vals: Vec<f64>,
    vecs: DMatrix<Complex64>,
}

impl Exponential {
    fn new(h: DMatrix<Complex64>) -> Self {
        let (vals, vecs) = hermitian_eigen(h);
        Self { vals, vecs }
    }

    /// `exp(-i H s) x`.
    fn apply(&self, s: f64, x: &[Complex64]) -> Vec<Complex64> {
        let d = self.vals.len();
        let mut c = vec![Complex64::new(0.0, 0.0); d];
        for (j, cj) in c.iter_mut().enumerate() {
            let proj: Complex64 = (0..d).map(|r| self.vecs[(r, j)].conj() * x[r]).sum();
            *cj = proj * Complex64::from_polar(1.0, -self.vals[j] * s);
        }
        (0..d).map(|r| (0..d).map(|j| self.vecs[(r, j)] * c[j]).sum()).collect()
    }
}

fn im_inner(a: &[Complex64], m: &DMatrix<Complex64>, b: &[Complex64]) -> f64 {
    let d = a.len();
    let mut acc = Complex64::new(0.0, 0.0);
    for r in 0..d {
        let mb: Complex64 = (0..d).map(|c| m[(r, c)] * b[c]).sum();
        acc += a[r].conj() * mb;
    }
    acc.im
}

/// Few-level system `H0 + sum_k u_k H_k`, one field per control operator,
/// propagated exactly.
#[derive(Debug, Clone)]
pub struct FewModeSystem {
    h: FewModeHamiltonian,
}

impl FewModeSystem {
    pub fn new(h: FewModeHamiltonian) -> Self {
        Self { h }
    }

    pub fn hamiltonian(&self) -> &FewModeHamiltonian {
        &self.h
    }

    fn midpoint(&self, u: &ControlField, i: usize) -> Result<Exponential> {
        let mid: Vec<f64> = u.at(i).iter().zip(u.at(i + 1)).map(|(a, b)| 0.5 * (a + b)).collect();
        Ok(Exponential::new(self.h.at(&mid)?))
    }
}

impl ControlSystem for FewModeSystem {
    fn basis(&self) -> Basis {
        self.h.basis()
    }

    fn n_fields(&self) -> usize {
        self.h.n_controls()
    }

    fn forward(&self, psi0: &[Complex64], u: &ControlField) -> Result<Vec<Vec<Complex64>>> {
        check_shapes(self, u, psi0.len())?;
        let mut out = Vec::with_capacity(u.n_steps());
        out.push(psi0.to_vec());
        for i in 0..u.n_steps() - 1 {
            let next = self.midpoint(u, i)?.apply(u.dt(), &out[i]);
            out.push(next);
        }
        Ok(out)
    }

    fn backward(&self, states: &[Vec<Complex64>], u: &ControlField, terminal: Vec<Complex64>) -> Result<Sensitivity> {
        check_trajectory(u, states, &terminal)?;
        let (n, m, dt) = (u.n_steps(), self.n_fields(), u.dt());
        let mut grad = vec![0.0; n * m];
        let mut costates = vec![Vec::new(); n];
        costates[n - 1] = terminal;
        for i in (0..n - 1).rev() {
            let e = self.midpoint(u, i)?;
            let lam1 = &costates[i + 1];
            let lam_half = e.apply(-0.5 * dt, lam1);
            let lam0 = e.apply(-dt, lam1);
            let psi_half = e.apply(0.5 * dt, &states[i]);
            for k in 0..m {
                let op = self.h.control_operator(k);
                let integral = simpson(
                    dt,
                    im_inner(&lam0, op, &states[i]),
                    im_inner(&lam_half, op, &psi_half),
                    im_inner(lam1, op, &states[i + 1]),
                );
                // midpoint control: dH/du_j = H_k / 2
                grad[i * m + k] += 0.5 * integral;
                grad[(i + 1) * m + k] += 0.5 * integral;
            }
            costates[i] = lam0;
        }
        Ok(Sensitivity {
            costates,
            control_derivative: grad,
        })
    }
}
