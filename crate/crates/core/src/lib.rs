//! Simulation and gradient-based optimal control of one-dimensional
//! ultracold-atom systems.

pub mod control;
pub mod error;
pub mod gpe;
pub mod lattice;
pub mod pair;
pub mod qcore;
pub mod runner;

pub use error::{Error, Result};
