use nalgebra::DMatrix;
use num_complex::Complex64;

use super::hamiltonian::GpeHamiltonian;
use crate::error::{Error, Result};
use crate::qcore::linalg::symmetric_eigen;
use crate::qcore::StateVector;

/// Iteration cap of the self-consistent stationary-state solver.
pub const MAX_SCF_ITERATIONS: usize = 1000;

/// Ground state of `H(u)`.
///
/// Damped self-consistent iteration: the density entering `beta |psi|^2` is
/// mixed between iterations with an adaptive factor, and each iterate is the
/// lowest eigenvector of the linearized banded Hamiltonian. Converged when
/// the energy changes by less than `tol` and `||(H[psi] - mu) psi|| < 100 tol`.
pub fn ground_state(h: &GpeHamiltonian, u: f64, tol: f64) -> Result<StateVector> {
    self_consistent(h, u, tol, None)
}

/// Lowest stationary state orthogonal to the ground state (one node).
pub fn first_excited_state(h: &GpeHamiltonian, u: f64, tol: f64) -> Result<StateVector> {
    let ground = ground_state(h, u, tol)?;
    first_excited_state_with(h, u, tol, &ground)
}

/// Like [`first_excited_state`] with a precomputed ground state.
pub fn first_excited_state_with(h: &GpeHamiltonian, u: f64, tol: f64, ground: &StateVector) -> Result<StateVector> {
    if ground.basis() != h.basis() {
        return Err(Error::invalid("ground state does not live on the Hamiltonian's grid"));
    }
    // Ground states are real up to a global phase.
    let phase = ground
        .amplitudes()
        .iter()
        .max_by(|a, b| a.norm_sqr().total_cmp(&b.norm_sqr()))
        .map(|z| z.conj() / z.norm())
        .unwrap_or(Complex64::new(1.0, 0.0));
    let w = h.grid().dx().sqrt();
    let unit: Vec<f64> = ground.amplitudes().iter().map(|z| (z * phase).re * w).collect();
    self_consistent(h, u, tol, Some(&unit))
}

fn self_consistent(h: &GpeHamiltonian, u: f64, tol: f64, project_out: Option<&[f64]>) -> Result<StateVector> {
    if !(tol > 0.0) {
        return Err(Error::invalid(format!("tolerance must be positive, got {tol}")));
    }
    let n = h.grid().len();
    let dx = h.grid().dx();
    let beta = h.beta();
    let t = h.kinetic().to_dense();
    let v = h.potential().eval(u).into_values();

    // Orthonormal unit vectors (Euclidean) are used inside; psi = e / sqrt(dx).
    let solve = |density: &[f64]| -> Vec<f64> {
        let mut m = t.clone();
        for i in 0..n {
            m[(i, i)] += v[i] + beta * density[i];
        }
        if let Some(p) = project_out {
            m = project(&m, p);
        }
        let (_, vecs) = symmetric_eigen(m);
        let col = match project_out {
            None => 0,
            Some(p) => (0..n)
                .find(|&c| {
                    let ov: f64 = (0..n).map(|r| vecs[(r, c)] * p[r]).sum();
                    ov.abs() < 0.5
                })
                .unwrap_or(1),
        };
        let mut e: Vec<f64> = (0..n).map(|r| vecs[(r, col)]).collect();
        if let Some(p) = project_out {
            let ov: f64 = e.iter().zip(p).map(|(a, b)| a * b).sum();
            e.iter_mut().zip(p).for_each(|(a, b)| *a -= ov * b);
        }
        let norm = e.iter().map(|a| a * a).sum::<f64>().sqrt();
        e.iter_mut().for_each(|a| *a /= norm);
        e
    };

    let density_of = |e: &[f64]| -> Vec<f64> { e.iter().map(|a| a * a / dx).collect() };

    let mut e_vec = solve(&vec![0.0; n]);
    let mut density = density_of(&e_vec);
    let mut mixing: f64 = 0.5;
    let mut prev_energy = f64::INFINITY;
    let mut prev_residual = f64::INFINITY;
    let mut residual = f64::INFINITY;

    for _ in 0..MAX_SCF_ITERATIONS {
        let out = solve(&density);
        // keep a consistent sign so the mixture does not cancel
        let sign = if out.iter().zip(&e_vec).map(|(a, b)| a * b).sum::<f64>() < 0.0 { -1.0 } else { 1.0 };
        e_vec = out.into_iter().map(|a| a * sign).collect();

        let psi = to_state(h, &e_vec, dx);
        let energy = h.energy(u, &psi);
        residual = stationary_residual(h, u, &psi, project_out);
        if (energy - prev_energy).abs() < tol && residual < 100.0 * tol {
            return Ok(psi);
        }
        if beta == 0.0 && residual < 100.0 * tol {
            return Ok(psi);
        }

        mixing = if residual < prev_residual { (mixing * 1.25).min(1.0) } else { (mixing * 0.5).max(0.05) };
        let new_density = density_of(&e_vec);
        density
            .iter_mut()
            .zip(&new_density)
            .for_each(|(d, nd)| *d = (1.0 - mixing) * *d + mixing * nd);
        prev_energy = energy;
        prev_residual = residual;
    }
    Err(Error::ConvergenceFailure {
        what: "stationary-state iteration".into(),
        residual,
    })
}

fn project(m: &DMatrix<f64>, p: &[f64]) -> DMatrix<f64> {
    // (I - p p^T) M (I - p p^T)
    let n = m.nrows();
    let pv = nalgebra::DVector::from_column_slice(p);
    let mp = m * &pv;
    let pmp = pv.dot(&mp);
    let mut out = m.clone();
    for i in 0..n {
        for j in 0..n {
            out[(i, j)] += -mp[i] * p[j] - p[i] * mp[j] + p[i] * p[j] * pmp;
        }
    }
    out
}

fn to_state(h: &GpeHamiltonian, e: &[f64], dx: f64) -> StateVector {
    let s = 1.0 / dx.sqrt();
    StateVector::from_parts(e.iter().map(|&a| Complex64::new(a * s, 0.0)).collect(), h.basis())
}

/// `||(H[psi] - mu) psi||` with `mu = <psi|H[psi]|psi>`, projected onto the
/// complement of `project_out` when given.
pub(crate) fn stationary_residual(h: &GpeHamiltonian, u: f64, psi: &StateVector, project_out: Option<&[f64]>) -> f64 {
    let dx = h.grid().dx();
    let hp = h.apply(u, psi.amplitudes());
    let mu: f64 = psi.amplitudes().iter().zip(&hp).map(|(a, b)| (a.conj() * b).re).sum::<f64>() * dx;
    let mut r: Vec<Complex64> = hp.iter().zip(psi.amplitudes()).map(|(a, b)| a - b * mu).collect();
    if let Some(p) = project_out {
        let w = dx.sqrt();
        let ov: Complex64 = r.iter().zip(p).map(|(a, b)| a * (b / w)).sum::<Complex64>() * dx;
        r.iter_mut().zip(p).for_each(|(a, b)| *a -= ov * (b / w));
    }
    (r.iter().map(|z| z.norm_sqr()).sum::<f64>() * dx).sqrt()
}

/// `||(H[psi] - mu) psi||` for a state on the Hamiltonian's grid.
pub fn residual(h: &GpeHamiltonian, u: f64, psi: &StateVector) -> f64 {
    stationary_residual(h, u, psi, None)
}
