//! Shared numerical substrate: grids, states, operators and spectral transforms.

mod fft;
mod grid;
pub mod linalg;
mod operators;
mod state;

pub use fft::{apply_kinetic_spectral, Fft1d, Fft2d};
pub use grid::{wavenumbers, SpatialGrid, TimeGrid, MIN_GRID_POINTS};
pub use operators::{
    expectation_value, BandedKineticOperator, DenseOperator, DiagonalOperator, LinearOperator,
    IMAGINARY_RESIDUE_LIMIT, SECOND_DERIVATIVE_STENCIL,
};
pub use state::{fidelity, overlap, Basis, StateVector};
pub(crate) use state::weighted_dot;

pub use num_complex::Complex64;

/// Shorthand for `Complex64::new(re, im)`.
pub const fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}
