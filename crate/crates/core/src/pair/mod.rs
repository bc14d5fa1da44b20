//! Two interacting particles on a 1D trap, represented on a 2D tensor grid.

mod grid;
mod hamiltonian;
mod propagate;
mod stationary;

pub use grid::TensorGrid2D;
pub use hamiltonian::{contact_interaction, TwoParticleHamiltonian, TwoParticleOperator};
pub use propagate::{split_step_2d, SplitStep2dKernel, TwoParticleStepper};
pub use stationary::{ground_state_2d, residual_2d};
