use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::grid::SpatialGrid;
use super::state::{Basis, StateVector};
use crate::error::{Error, Result};

/// Planned 1D transforms. Forward is unnormalized; inverse divides by `n`.
#[derive(Clone)]
pub struct Fft1d {
    n: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for Fft1d {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Fft1d").field("n", &self.n).finish()
    }
}

impl Fft1d {
    pub fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            n,
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn forward(&self, data: &mut [Complex64]) {
        self.forward.process(data);
    }

    pub fn inverse(&self, data: &mut [Complex64]) {
        self.inverse.process(data);
        let s = 1.0 / self.n as f64;
        data.iter_mut().for_each(|z| *z *= s);
    }
}

/// Row-major `n x n` transforms built from 1D passes.
#[derive(Debug, Clone)]
pub struct Fft2d {
    inner: Fft1d,
}

impl Fft2d {
    pub fn new(n: usize) -> Self {
        Self { inner: Fft1d::new(n) }
    }

    pub fn forward(&self, data: &mut [Complex64]) {
        self.pass(data, true);
    }

    pub fn inverse(&self, data: &mut [Complex64]) {
        self.pass(data, false);
    }

    fn pass(&self, data: &mut [Complex64], forward: bool) {
        let n = self.inner.n;
        let run = |row: &mut [Complex64]| {
            if forward {
                self.inner.forward(row)
            } else {
                self.inner.inverse(row)
            }
        };
        data.chunks_exact_mut(n).for_each(run);
        let mut col = vec![Complex64::new(0.0, 0.0); n];
        for j in 0..n {
            for i in 0..n {
                col[i] = data[i * n + j];
            }
            run(&mut col);
            for i in 0..n {
                data[i * n + j] = col[i];
            }
        }
    }
}

/// Spectral action of `-kappa d^2/dx^2`: `IFFT(kappa k^2 FFT(psi))`.
pub fn apply_kinetic_spectral(psi: &StateVector, grid: &SpatialGrid, kappa: f64) -> Result<StateVector> {
    match psi.basis() {
        Basis::Spatial1d { n, dx } if n == grid.len() && dx == grid.dx() => {}
        other => {
            return Err(Error::invalid(format!(
                "spectral kinetic operator needs a state on this 1D grid, got {other:?}"
            )))
        }
    }
    let fft = Fft1d::new(grid.len());
    let mut data = psi.amplitudes().to_vec();
    fft.forward(&mut data);
    for (z, k) in data.iter_mut().zip(grid.k()) {
        *z *= kappa * k * k;
    }
    fft.inverse(&mut data);
    Ok(StateVector::from_parts(data, psi.basis()))
}
