use num_complex::Complex64;

use super::hamiltonian::GpeHamiltonian;
use crate::error::{Error, Result};
use crate::qcore::{Fft1d, SpatialGrid, StateVector};

/// Strang-split step for a fixed `dt`: half potential kick, full kinetic
/// step in momentum space, half potential kick.
#[derive(Debug, Clone)]
pub struct SplitStepKernel {
    fft: Fft1d,
    phases: Vec<Complex64>,
    dt: f64,
}

impl SplitStepKernel {
    pub fn new(grid: &SpatialGrid, kappa: f64, dt: f64) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::invalid(format!("time step must be positive, got {dt}")));
        }
        Ok(Self {
            fft: Fft1d::new(grid.len()),
            phases: grid.k().iter().map(|k| Complex64::from_polar(1.0, -kappa * k * k * dt)).collect(),
            dt,
        })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// `psi <- exp(-i kappa k^2 dt) psi` in momentum space; `inverse` undoes it.
    pub fn kinetic(&self, psi: &mut [Complex64], inverse: bool) {
        self.fft.forward(psi);
        if inverse {
            psi.iter_mut().zip(&self.phases).for_each(|(z, p)| *z *= p.conj());
        } else {
            psi.iter_mut().zip(&self.phases).for_each(|(z, p)| *z *= p);
        }
        self.fft.inverse(psi);
    }

    /// `psi <- exp(-i dt/2 (v + beta |psi|^2)) psi`, pointwise.
    pub fn half_kick(&self, psi: &mut [Complex64], v: &[f64], beta: f64) {
        let h = 0.5 * self.dt;
        for (z, vi) in psi.iter_mut().zip(v) {
            let theta = h * (vi + beta * z.norm_sqr());
            *z *= Complex64::from_polar(1.0, -theta);
        }
    }

    /// One full step with midpoint potential `v_mid`. The nonlinear term of
    /// the second kick is re-evaluated from the intermediate state.
    pub fn step(&self, psi: &mut [Complex64], v_mid: &[f64], beta: f64) {
        self.half_kick(psi, v_mid, beta);
        self.kinetic(psi, false);
        self.half_kick(psi, v_mid, beta);
    }
}

/// Advances `psi` from control `u_now` to `u_next` with the midpoint rule.
pub fn split_step(psi: &StateVector, h: &GpeHamiltonian, u_now: f64, u_next: f64, dt: f64) -> Result<StateVector> {
    if psi.basis() != h.basis() {
        return Err(Error::invalid("state does not live on the Hamiltonian's grid"));
    }
    let kernel = h.kernel(dt)?;
    let mut amps = psi.amplitudes().to_vec();
    kernel.step(&mut amps, &h.midpoint_potential(u_now, u_next), h.beta());
    StateVector::new(amps, psi.basis())
}

/// Stateful propagator: remembers the last control so only the next value is
/// needed per step.
#[derive(Debug, Clone)]
pub struct GpeStepper<'a> {
    hamiltonian: &'a GpeHamiltonian,
    kernel: SplitStepKernel,
    state: Vec<Complex64>,
    control: f64,
}

impl<'a> GpeStepper<'a> {
    pub fn new(hamiltonian: &'a GpeHamiltonian, psi0: &StateVector, u0: f64, dt: f64) -> Result<Self> {
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

    pub fn control(&self) -> f64 {
        self.control
    }

    pub fn step(&mut self, u_next: f64) {
        let v = self.hamiltonian.midpoint_potential(self.control, u_next);
        self.kernel.step(&mut self.state, &v, self.hamiltonian.beta());
        self.control = u_next;
    }

    /// Step with the control held at its current value.
    pub fn cstep(&mut self) {
        self.step(self.control);
    }
}
