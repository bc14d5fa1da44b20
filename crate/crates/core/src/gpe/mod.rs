//! Gross-Pitaevskii and single-particle Hamiltonians on a 1D grid.
//!
//! Time evolution uses the split-step Fourier method with a midpoint
//! potential; stationary states use the 5-diagonal kinetic operator.

mod hamiltonian;
mod potential;
mod propagate;
mod stationary;

pub use hamiltonian::GpeHamiltonian;
pub use potential::{
    anharmonic_potential, anharmonic_potential_derivative, AnharmonicParams, PotentialFunction, TweezerParams,
    FD_CONTROL_STEP,
};
pub use propagate::{split_step, GpeStepper, SplitStepKernel};
pub use stationary::{first_excited_state, first_excited_state_with, ground_state, residual, MAX_SCF_ITERATIONS};
