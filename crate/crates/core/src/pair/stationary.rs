use num_complex::Complex64;

use super::hamiltonian::TwoParticleHamiltonian;
use crate::error::{Error, Result};
use crate::lattice::lanczos_ground_state;
use crate::qcore::{Fft2d, LinearOperator, StateVector};

const IMAGINARY_TIME_STEP: f64 = 2e-3;
const IMAGINARY_TIME_MAX_STEPS: usize = 20_000;

/// Lowest stationary state of `H(u)`.
///
/// Imaginary-time split-step with renormalization brings the state close
/// to the ground state; restarted Lanczos then removes the splitting bias. Converged when `||(H - E) psi|| < 100 tol`.
pub fn ground_state_2d(h: &TwoParticleHamiltonian, u: f64, tol: f64) -> Result<StateVector> {
    if !(tol > 0.0) {
        return Err(Error::invalid(format!("tolerance must be positive, got {tol}")));
    }
    let seed = imaginary_time(h, u, tol)?;
    let op = h.operator(u);
    let (_, v) = lanczos_ground_state(&op, Some(&seed), 100.0 * tol)?;
    let w = h.grid().dx();
    let mut amps: Vec<Complex64> = v.iter().map(|z| z / w).collect();
    if let Some(p) = amps.iter().copied().max_by(|a, b| a.norm_sqr().total_cmp(&b.norm_sqr())) {
        let phase = p.conj() / p.norm();
        amps.iter_mut().for_each(|z| *z *= phase);
    }
    StateVector::new(amps, h.basis())?.normalized()
}

fn imaginary_time(h: &TwoParticleHamiltonian, u: f64, tol: f64) -> Result<Vec<Complex64>> {
    let grid = h.grid();
    let n = grid.n();
    let tau = IMAGINARY_TIME_STEP;
    let decay: Vec<f64> = h.kinetic_symbol().iter().map(|s| (-s * tau).exp()).collect();
    let d = h.diagonal(u);
    let dmin = d.iter().copied().fold(f64::INFINITY, f64::min);
    let half: Vec<f64> = d.iter().map(|v| (-(v - dmin) * 0.5 * tau).exp()).collect();
    let fft = Fft2d::new(n);

    // Gaussian start centred on the potential minimum
    let v1 = h.potential().eval(u);
    let (imin, _) = v1
        .values()
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("non-empty axis");
    let x = grid.axis().x();
    let x0 = x[imin];
    let mut psi: Vec<Complex64> = (0..n * n)
        .map(|idx| {
            let (a, b) = (x[idx / n] - x0, x[idx % n] - x0);
            Complex64::new((-(a * a + b * b) * 4.0).exp(), 0.0)
        })
        .collect();
    normalize(&mut psi);

    let op = h.operator(u);
    let mut hp = vec![Complex64::new(0.0, 0.0); psi.len()];
    let mut prev = f64::INFINITY;
    for it in 0..IMAGINARY_TIME_MAX_STEPS {
        psi.iter_mut().zip(&half).for_each(|(z, f)| *z *= f);
        fft.forward(&mut psi);
        psi.iter_mut().zip(&decay).for_each(|(z, f)| *z *= f);
        fft.inverse(&mut psi);
        psi.iter_mut().zip(&half).for_each(|(z, f)| *z *= f);
        normalize(&mut psi);
        if it % 20 == 19 {
            op.apply_into(&psi, &mut hp);
            let e: f64 = psi.iter().zip(&hp).map(|(a, b)| (a.conj() * b).re).sum();
            // the splitting bias is O(tau^2); stop once the energy settles
            if (prev - e).abs() < tol.max(1e-9) * e.abs().max(1.0) {
                return Ok(psi);
            }
            prev = e;
        }
    }
    Ok(psi)
}

fn normalize(psi: &mut [Complex64]) {
    let nrm = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    psi.iter_mut().for_each(|z| *z /= nrm);
}

/// `||(H - E) psi||` for a state on the tensor grid.
pub fn residual_2d(h: &TwoParticleHamiltonian, u: f64, psi: &StateVector) -> f64 {
    let hp = h.apply(u, psi.amplitudes());
    let w = psi.weight();
    let e: f64 = psi.amplitudes().iter().zip(&hp).map(|(a, b)| (a.conj() * b).re).sum::<f64>() * w;
    (hp.iter().zip(psi.amplitudes()).map(|(a, b)| (a - b * e).norm_sqr()).sum::<f64>() * w).sqrt()
}
