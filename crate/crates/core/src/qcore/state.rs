use num_complex::Complex64;

use crate::error::{Error, Result};

/// Basis a [`StateVector`] is expressed in.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Basis {
    /// Samples on a 1D grid with spacing `dx`.
    Spatial1d { n: usize, dx: f64 },
    /// Row-major samples on an `n x n` tensor grid; index `i1 * n + i2`.
    Spatial2d { n: usize, dx: f64 },
    /// Bose-Hubbard Fock space of `dim` occupation states.
    Fock { sites: usize, particles: usize, dim: usize },
    /// Generic few-level system.
    FewMode { dim: usize },
}

impl Basis {
    pub fn dim(&self) -> usize {
        match *self {
            Basis::Spatial1d { n, .. } => n,
            Basis::Spatial2d { n, .. } => n * n,
            Basis::Fock { dim, .. } => dim,
            Basis::FewMode { dim } => dim,
        }
    }

    /// Quadrature weight of the inner product.
    pub fn weight(&self) -> f64 {
        match *self {
            Basis::Spatial1d { dx, .. } => dx,
            Basis::Spatial2d { dx, .. } => dx * dx,
            Basis::Fock { .. } | Basis::FewMode { .. } => 1.0,
        }
    }
}

/// Complex amplitudes together with the basis they live in.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amps: Vec<Complex64>,
    basis: Basis,
}

impl StateVector {
    pub fn new(amps: Vec<Complex64>, basis: Basis) -> Result<Self> {
        if amps.len() != basis.dim() {
            return Err(Error::invalid(format!(
                "state has {} amplitudes but basis dimension is {}",
                amps.len(),
                basis.dim()
            )));
        }
        if amps.iter().any(|a| !(a.re.is_finite() && a.im.is_finite())) {
            return Err(Error::invalid("state contains non-finite amplitudes"));
        }
        Ok(Self { amps, basis })
    }

    pub(crate) fn from_parts(amps: Vec<Complex64>, basis: Basis) -> Self {
        Self { amps, basis }
    }

    pub fn from_real(values: &[f64], basis: Basis) -> Result<Self> {
        Self::new(values.iter().map(|&v| Complex64::new(v, 0.0)).collect(), basis)
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amps
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn len(&self) -> usize {
        self.amps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amps.is_empty()
    }

    pub fn weight(&self) -> f64 {
        self.basis.weight()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.weight() * self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Rescales to unit norm; fails on the zero vector.
    pub fn normalize(&mut self) -> Result<()> {
        let n = self.norm();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::invalid("cannot normalize a zero or non-finite state"));
        }
        let s = 1.0 / n;
        self.amps.iter_mut().for_each(|a| *a *= s);
        Ok(())
    }

    pub fn normalized(mut self) -> Result<Self> {
        self.normalize()?;
        Ok(self)
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        Self {
            amps: self.amps.iter().map(|a| a * factor).collect(),
            basis: self.basis,
        }
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    pub fn check_compatible(&self, other: &StateVector) -> Result<()> {
        if self.basis != other.basis || self.amps.len() != other.amps.len() {
            return Err(Error::invalid(format!(
                "basis mismatch: {:?} vs {:?}",
                self.basis, other.basis
            )));
        }
        Ok(())
    }
}

/// Weighted inner product `<a|b>`.
pub fn overlap(a: &StateVector, b: &StateVector) -> Result<Complex64> {
    a.check_compatible(b)?;
    Ok(weighted_dot(&a.amps, &b.amps, a.weight()))
}

/// `|<a|b>|^2`.
pub fn fidelity(a: &StateVector, b: &StateVector) -> Result<f64> {
    Ok(overlap(a, b)?.norm_sqr())
}

pub(crate) fn weighted_dot(a: &[Complex64], b: &[Complex64], w: f64) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum::<Complex64>() * w
}
