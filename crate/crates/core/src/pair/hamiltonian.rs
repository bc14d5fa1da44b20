use num_complex::Complex64;

use super::grid::TensorGrid2D;
use super::propagate::SplitStep2dKernel;
use crate::error::{Error, Result};
use crate::gpe::PotentialFunction;
use crate::qcore::{Basis, DiagonalOperator, Fft2d, LinearOperator, StateVector};

/// `g delta(x1 - x2)` on the grid: `g / dx` where `x1 = x2`, zero elsewhere.
pub fn contact_interaction(grid: &TensorGrid2D, g: f64) -> Result<DiagonalOperator> {
    if !g.is_finite() {
        return Err(Error::invalid("interaction strength must be finite"));
    }
    let n = grid.n();
    let mut v = vec![0.0; grid.len()];
    for i in 0..n {
        v[i * n + i] = g / grid.dx();
    }
    DiagonalOperator::new(v)
}

/// `-kappa (d^2/dx1^2 + d^2/dx2^2) + V(x1, u) + V(x2, u) + g delta(x1 - x2)`.
///
/// The kinetic term is spectral everywhere (propagation, energies and
/// stationary states), so ground states are eigenstates of the operator
/// the propagator splits.
#[derive(Debug, Clone)]
pub struct TwoParticleHamiltonian {
    grid: TensorGrid2D,
    kappa: f64,
    kinetic_symbol: Vec<f64>,
    fft: Fft2d,
    potential: PotentialFunction,
    g: f64,
    contact: Vec<f64>,
}

impl TwoParticleHamiltonian {
    /// `potential` acts on one axis and is applied to both particles.
    pub fn new(grid: TensorGrid2D, kappa: f64, potential: PotentialFunction, g: f64) -> Result<Self> {
        if !(kappa > 0.0 && kappa.is_finite()) {
            return Err(Error::invalid(format!("kinetic factor must be positive, got {kappa}")));
        }
        let probe = potential.eval(potential.initial_control());
        if probe.values().len() != grid.n() {
            return Err(Error::invalid(format!(
                "potential has {} samples, axis has {}",
                probe.values().len(),
                grid.n()
            )));
        }
        let contact = contact_interaction(&grid, g)?.into_values();
        let n = grid.n();
        let k = grid.axis().k();
        let kinetic_symbol = (0..n * n)
            .map(|idx| kappa * (k[idx / n] * k[idx / n] + k[idx % n] * k[idx % n]))
            .collect();
        Ok(Self {
            kinetic_symbol,
            fft: Fft2d::new(n),
            grid,
            kappa,
            potential,
            g,
            contact,
        })
    }

    pub fn grid(&self) -> &TensorGrid2D {
        &self.grid
    }

    pub fn basis(&self) -> Basis {
        self.grid.basis()
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn interaction(&self) -> f64 {
        self.g
    }

    pub fn potential(&self) -> &PotentialFunction {
        &self.potential
    }

    /// Lifts a per-axis field `f` to `f(x1) + f(x2)` on the tensor grid.
    pub fn lift(&self, f: &[f64]) -> Vec<f64> {
        let n = self.grid.n();
        (0..n * n).map(|idx| f[idx / n] + f[idx % n]).collect()
    }

    /// Diagonal part `V(x1) + V(x2) + contact` at control `u`.
    pub fn diagonal(&self, u: f64) -> Vec<f64> {
        let mut d = self.lift(self.potential.eval(u).values());
        d.iter_mut().zip(&self.contact).for_each(|(a, c)| *a += c);
        d
    }

    /// Midpoint diagonal `(D(u0) + D(u1)) / 2`.
    pub fn midpoint_diagonal(&self, u0: f64, u1: f64) -> Vec<f64> {
        let a = self.diagonal(u0);
        if u0 == u1 {
            return a;
        }
        a.iter().zip(self.diagonal(u1)).map(|(x, y)| 0.5 * (x + y)).collect()
    }

    /// `kappa |k|^2` on the 2D frequency grid.
    pub fn kinetic_symbol(&self) -> &[f64] {
        &self.kinetic_symbol
    }

    /// `H(u) psi`.
    pub fn apply(&self, u: f64, psi: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); psi.len()];
        self.operator(u).apply_into(psi, &mut out);
        out
    }

    pub fn operator(&self, u: f64) -> TwoParticleOperator<'_> {
        TwoParticleOperator {
            h: self,
            diagonal: self.diagonal(u),
        }
    }

    /// `<psi|H(u)|psi>`.
    pub fn energy(&self, u: f64, psi: &StateVector) -> f64 {
        let hp = self.apply(u, psi.amplitudes());
        psi.amplitudes().iter().zip(&hp).map(|(a, b)| (a.conj() * b).re).sum::<f64>() * psi.weight()
    }

    pub fn kernel(&self, dt: f64) -> Result<SplitStep2dKernel> {
        SplitStep2dKernel::new(&self.grid, &self.kinetic_symbol, dt)
    }
}

/// `H(u)` with the diagonal evaluated once.
#[derive(Debug, Clone)]
pub struct TwoParticleOperator<'a> {
    h: &'a TwoParticleHamiltonian,
    diagonal: Vec<f64>,
}

impl LinearOperator for TwoParticleOperator<'_> {
    fn dim(&self) -> usize {
        self.h.grid.len()
    }

    fn apply_into(&self, x: &[Complex64], out: &mut [Complex64]) {
        out.copy_from_slice(x);
        self.h.fft.forward(out);
        out.iter_mut().zip(&self.h.kinetic_symbol).for_each(|(z, s)| *z *= s);
        self.h.fft.inverse(out);
        for ((o, xi), d) in out.iter_mut().zip(x).zip(&self.diagonal) {
            *o += xi * d;
        }
    }

    fn is_hermitian(&self) -> bool {
        true
    }
}
