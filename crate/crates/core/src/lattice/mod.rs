//! Bose-Hubbard Fock spaces, sparse operators and Krylov propagation, plus
//! dense few-level models.

mod basis;
mod density;
mod few_mode;
mod hamiltonian;
mod krylov;
mod sparse;

pub use basis::{fock_dimension, FockBasis, DEFAULT_BASIS_CAP};
pub use density::single_particle_density_matrix;
pub use few_mode::{landau_zener_hamiltonian, FewModeHamiltonian};
pub use hamiltonian::{
    hopping_operator, onsite_operator, site_potential_operator, BoundTransform, LatticeHamiltonian, LatticeOperator,
};
pub use krylov::{
    ground_state_sparse, lanczos_ground_state, lanczos_step, BREAKDOWN_THRESHOLD, DENSE_GROUND_STATE_LIMIT,
};
pub use sparse::SparseOperator;
