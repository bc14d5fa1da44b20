use crate::error::Result;
use crate::qcore::{Basis, SpatialGrid};

/// Two identical 1D axes; amplitudes are stored row-major with index
/// `i1 * n + i2`.
#[derive(Debug, Clone, PartialEq)]
pub struct TensorGrid2D {
    axis: SpatialGrid,
}

impl TensorGrid2D {
    pub fn new(axis: SpatialGrid) -> Self {
        Self { axis }
    }

    pub fn from_bounds(x_min: f64, x_max: f64, n: usize) -> Result<Self> {
        Ok(Self::new(SpatialGrid::new(x_min, x_max, n)?))
    }

    pub fn axis(&self) -> &SpatialGrid {
        &self.axis
    }

    /// Points per axis.
    pub fn n(&self) -> usize {
        self.axis.len()
    }

    pub fn dx(&self) -> f64 {
        self.axis.dx()
    }

    /// Total number of grid points, `n^2`.
    pub fn len(&self) -> usize {
        self.n() * self.n()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn basis(&self) -> Basis {
        Basis::Spatial2d {
            n: self.n(),
            dx: self.dx(),
        }
    }

    /// Index of the exchanged point `(x2, x1)`.
    pub fn swapped(&self, idx: usize) -> usize {
        let n = self.n();
        (idx % n) * n + idx / n
    }
}
