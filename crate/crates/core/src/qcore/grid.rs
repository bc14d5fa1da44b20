use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Smallest grid accepted by [`SpatialGrid::new`].
pub const MIN_GRID_POINTS: usize = 8;

/// Closed, uniform one-dimensional grid including both endpoints.
///
/// Spacing is `(x_max - x_min) / (n - 1)`. The wavenumbers follow FFT
/// ordering for a periodic box of length `n * dx`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpatialGrid {
    x_min: f64,
    x_max: f64,
    dx: f64,
    x: Vec<f64>,
    k: Vec<f64>,
}

impl SpatialGrid {
    pub fn new(x_min: f64, x_max: f64, n: usize) -> Result<Self> {
        if !(x_min.is_finite() && x_max.is_finite()) || x_max <= x_min {
            return Err(Error::invalid(format!(
                "grid bounds must satisfy x_min < x_max, got [{x_min}, {x_max}]"
            )));
        }
        if n < MIN_GRID_POINTS {
            return Err(Error::invalid(format!(
                "grid needs at least {MIN_GRID_POINTS} points, got {n}"
            )));
        }
        let dx = (x_max - x_min) / (n - 1) as f64;
        // Offsets from the centre are exact half-integers, so symmetric
        // grids are exactly antisymmetric about zero.
        let centre = 0.5 * (x_min + x_max);
        let half = 0.5 * (n - 1) as f64;
        let x = (0..n).map(|i| centre + (i as f64 - half) * dx).collect();
        Ok(Self {
            x_min,
            x_max,
            dx,
            x,
            k: wavenumbers(n, dx),
        })
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn k(&self) -> &[f64] {
        &self.k
    }
}

/// FFT-ordered angular wavenumbers for `n` samples spaced `dx`.
pub fn wavenumbers(n: usize, dx: f64) -> Vec<f64> {
    let dk = 2.0 * PI / (n as f64 * dx);
    (0..n)
        .map(|j| {
            let j = if j < n.div_ceil(2) {
                j as f64
            } else {
                j as f64 - n as f64
            };
            j * dk
        })
        .collect()
}

/// Uniform time discretization: `n_steps` samples `t_i = i * dt`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    dt: f64,
    n_steps: usize,
}

impl TimeGrid {
    pub fn new(n_steps: usize, dt: f64) -> Result<Self> {
        if n_steps < 2 {
            return Err(Error::invalid(format!("need at least 2 time steps, got {n_steps}")));
        }
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::invalid(format!("time step must be positive, got {dt}")));
        }
        Ok(Self { dt, n_steps })
    }

    /// `n_steps = floor(duration / dt) + 1`.
    pub fn from_duration(duration: f64, dt: f64) -> Result<Self> {
        if !(duration > 0.0 && duration.is_finite()) {
            return Err(Error::invalid(format!("duration must be positive, got {duration}")));
        }
        // Ratios like 1.25 / 0.002 can land one ulp below an integer.
        let ratio = duration / dt;
        let n = (ratio * (1.0 + 1e-12)).floor() as usize + 1;
        Self::new(n, dt)
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn n_steps(&self) -> usize {
        self.n_steps
    }

    /// Time of the last sample, `(n_steps - 1) * dt`.
    pub fn duration(&self) -> f64 {
        (self.n_steps - 1) as f64 * self.dt
    }

    pub fn t(&self, i: usize) -> f64 {
        i as f64 * self.dt
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.n_steps).map(|i| self.t(i)).collect()
    }
}
