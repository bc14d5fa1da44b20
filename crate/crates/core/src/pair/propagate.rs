use num_complex::Complex64;

use super::grid::TensorGrid2D;
use super::hamiltonian::TwoParticleHamiltonian;
use crate::error::{Error, Result};
use crate::qcore::{Fft2d, StateVector};

/// Strang-split step on the tensor grid: half kick, 2D kinetic step in
/// momentum space, half kick.
#[derive(Debug, Clone)]
pub struct SplitStep2dKernel {
    fft: Fft2d,
    phases: Vec<Complex64>,
    dt: f64,
}

impl SplitStep2dKernel {
    pub fn new(grid: &TensorGrid2D, kinetic_symbol: &[f64], dt: f64) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::invalid(format!("time step must be positive, got {dt}")));
        }
        let phases = kinetic_symbol.iter().map(|s| Complex64::from_polar(1.0, -s * dt)).collect();
        Ok(Self {
            fft: Fft2d::new(grid.n()),
            phases,
            dt,
        })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// `psi <- exp(-i kappa |k|^2 dt) psi`; `inverse` undoes it.
    pub fn kinetic(&self, psi: &mut [Complex64], inverse: bool) {
        self.fft.forward(psi);
        if inverse {
            psi.iter_mut().zip(&self.phases).for_each(|(z, p)| *z *= p.conj());
        } else {
            psi.iter_mut().zip(&self.phases).for_each(|(z, p)| *z *= p);
        }
        self.fft.inverse(psi);
    }

    /// `psi <- exp(-i dt/2 d) psi`, pointwise.
    pub fn half_kick(&self, psi: &mut [Complex64], d: &[f64]) {
        let h = 0.5 * self.dt;
        psi.iter_mut().zip(d).for_each(|(z, di)| *z *= Complex64::from_polar(1.0, -h * di));
    }

    pub fn step(&self, psi: &mut [Complex64], d_mid: &[f64]) {
        self.half_kick(psi, d_mid);
        self.kinetic(psi, false);
        self.half_kick(psi, d_mid);
    }
}

/// Advances a two-particle state from control `u_now` to `u_next`.
pub fn split_step_2d(
    psi: &StateVector,
    h: &TwoParticleHamiltonian,
    u_now: f64,
    u_next: f64,
    dt: f64,
) -> Result<StateVector> {
    if psi.basis() != h.basis() {
        return Err(Error::invalid("state does not live on the Hamiltonian's grid"));
    }
    let kernel = h.kernel(dt)?;
    let mut amps = psi.amplitudes().to_vec();
    kernel.step(&mut amps, &h.midpoint_diagonal(u_now, u_next));
    StateVector::new(amps, psi.basis())
}

/// Stateful two-particle propagator.
#[derive(Debug, Clone)]
pub struct TwoParticleStepper<'a> {
    hamiltonian: &'a TwoParticleHamiltonian,
    kernel: SplitStep2dKernel,
    state: Vec<Complex64>,
    control: f64,
}

impl<'a> TwoParticleStepper<'a> {
    pub fn new(hamiltonian: &'a TwoParticleHamiltonian, psi0: &StateVector, u0: f64, dt: f64) -> Result<Self> {
        if psi0.basis() != hamiltonian.basis() {
            return Err(Error::invalid("state does not live on the Hamiltonian's grid"));
        }
        Ok(Self {
            kernel: hamiltonian.kernel(dt)?,
            hamiltonian,
            state: psi0.amplitudes().to_vec(),
            control: u0,
        })
    }

    pub fn state(&self) -> StateVector {
        StateVector::from_parts(self.state.clone(), self.hamiltonian.basis())
    }

    pub fn step(&mut self, u_next: f64) {
        let d = self.hamiltonian.midpoint_diagonal(self.control, u_next);
        self.kernel.step(&mut self.state, &d);
        self.control = u_next;
    }

    pub fn cstep(&mut self) {
        self.step(self.control);
    }
}
