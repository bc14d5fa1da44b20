use num_complex::Complex64;

use super::potential::PotentialFunction;
use super::propagate::SplitStepKernel;
use crate::error::{Error, Result};
use crate::qcore::{BandedKineticOperator, Basis, LinearOperator, SpatialGrid, StateVector};

/// `-kappa d^2/dx^2 + V(x, u) + beta |psi|^2` on a 1D grid.
///
/// With `beta = 0` this is the single-particle Schrödinger Hamiltonian.
#[derive(Debug, Clone)]
pub struct GpeHamiltonian {
    grid: SpatialGrid,
    kappa: f64,
    kinetic: BandedKineticOperator,
    potential: PotentialFunction,
    beta: f64,
}

impl GpeHamiltonian {
    pub fn new(grid: SpatialGrid, kappa: f64, potential: PotentialFunction, beta: f64) -> Result<Self> {
        if !(kappa > 0.0 && kappa.is_finite()) {
            return Err(Error::invalid(format!("kinetic factor must be positive, got {kappa}")));
        }
        if !(beta >= 0.0 && beta.is_finite()) {
            return Err(Error::invalid(format!("nonlinearity must be finite and >= 0, got {beta}")));
        }
        let probe = potential.eval(potential.initial_control());
        if probe.values().len() != grid.len() {
            return Err(Error::invalid(format!(
                "potential has {} samples, grid has {}",
                probe.values().len(),
                grid.len()
            )));
        }
        Ok(Self {
            kinetic: BandedKineticOperator::new(&grid, kappa),
            grid,
            kappa,
            potential,
            beta,
        })
    }

    pub fn single_particle(grid: SpatialGrid, kappa: f64, potential: PotentialFunction) -> Result<Self> {
        Self::new(grid, kappa, potential, 0.0)
    }

    pub fn grid(&self) -> &SpatialGrid {
        &self.grid
    }

    pub fn basis(&self) -> Basis {
        Basis::Spatial1d {
            n: self.grid.len(),
            dx: self.grid.dx(),
        }
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn kinetic(&self) -> &BandedKineticOperator {
        &self.kinetic
    }

    pub fn potential(&self) -> &PotentialFunction {
        &self.potential
    }

    pub fn is_nonlinear(&self) -> bool {
        self.beta != 0.0
    }

    /// `H[psi] psi` with the banded kinetic operator.
    pub fn apply(&self, u: f64, psi: &[Complex64]) -> Vec<Complex64> {
        let v = self.potential.eval(u);
        let mut out = self.kinetic.apply(psi);
        for ((o, p), vi) in out.iter_mut().zip(psi).zip(v.values()) {
            *o += p * (vi + self.beta * p.norm_sqr());
        }
        out
    }

    /// Energy functional `<T + V> + beta/2 \int |psi|^4`.
    pub fn energy(&self, u: f64, psi: &StateVector) -> f64 {
        let w = self.grid.dx();
        let v = self.potential.eval(u);
        let t = self.kinetic.apply(psi.amplitudes());
        let mut e = 0.0;
        for ((p, tp), vi) in psi.amplitudes().iter().zip(&t).zip(v.values()) {
            let d = p.norm_sqr();
            e += (p.conj() * tp).re + vi * d + 0.5 * self.beta * d * d;
        }
        e * w
    }

    /// Energy functional with the spectral kinetic term used by the
    /// propagator.
    pub fn spectral_energy(&self, u: f64, psi: &StateVector) -> f64 {
        let w = self.grid.dx();
        let v = self.potential.eval(u);
        let fft = crate::qcore::Fft1d::new(self.grid.len());
        let mut t = psi.amplitudes().to_vec();
        fft.forward(&mut t);
        for (z, k) in t.iter_mut().zip(self.grid.k()) {
            *z *= self.kappa * k * k;
        }
        fft.inverse(&mut t);
        let mut e = 0.0;
        for ((p, tp), vi) in psi.amplitudes().iter().zip(&t).zip(v.values()) {
            let d = p.norm_sqr();
            e += (p.conj() * tp).re + vi * d + 0.5 * self.beta * d * d;
        }
        e * w
    }

    pub fn kernel(&self, dt: f64) -> Result<SplitStepKernel> {
        SplitStepKernel::new(&self.grid, self.kappa, dt)
    }

    /// Midpoint potential `(V(u0) + V(u1)) / 2`.
    pub fn midpoint_potential(&self, u0: f64, u1: f64) -> Vec<f64> {
        let a = self.potential.eval(u0);
        if u0 == u1 {
            return a.into_values();
        }
        let b = self.potential.eval(u1);
        a.values().iter().zip(b.values()).map(|(x, y)| 0.5 * (x + y)).collect()
    }
}
