use crate::error::{Error, Result};
use crate::qcore::TimeGrid;

/// Sampled control `u(t)` with one or more fields, stored time-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ControlField {
    time_grid: TimeGrid,
    n_fields: usize,
    values: Vec<f64>,
}

impl ControlField {
    pub fn new(time_grid: TimeGrid, n_fields: usize, values: Vec<f64>) -> Result<Self> {
        if n_fields == 0 {
            return Err(Error::invalid("a control needs at least one field"));
        }
        if values.len() != time_grid.n_steps() * n_fields {
            return Err(Error::invalid(format!(
                "{} values for {} steps x {} fields",
                values.len(),
                time_grid.n_steps(),
                n_fields
            )));
        }
        check_finite(&values)?;
        Ok(Self {
            time_grid,
            n_fields,
            values,
        })
    }

    /// Single field from samples.
    pub fn single(time_grid: TimeGrid, values: Vec<f64>) -> Result<Self> {
        Self::new(time_grid, 1, values)
    }

    /// Single field `f(t_i)`.
    pub fn from_fn(time_grid: TimeGrid, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::single(time_grid, time_grid.times().into_iter().map(f).collect())
    }

    pub fn constant(time_grid: TimeGrid, n_fields: usize, value: f64) -> Result<Self> {
        Self::new(time_grid, n_fields, vec![value; time_grid.n_steps() * n_fields])
    }

    pub fn time_grid(&self) -> TimeGrid {
        self.time_grid
    }

    pub fn dt(&self) -> f64 {
        self.time_grid.dt()
    }

    pub fn n_steps(&self) -> usize {
        self.time_grid.n_steps()
    }

    pub fn n_fields(&self) -> usize {
        self.n_fields
    }

    /// All samples, `values[i * n_fields + k]` is field `k` at step `i`.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn set_values(&mut self, values: &[f64]) -> Result<()> {
        if values.len() != self.values.len() {
            return Err(Error::invalid(format!("expected {} values, got {}", self.values.len(), values.len())));
        }
        check_finite(values)?;
        self.values.copy_from_slice(values);
        Ok(())
    }

    /// Control slice at step `i`.
    pub fn at(&self, i: usize) -> &[f64] {
        &self.values[i * self.n_fields..(i + 1) * self.n_fields]
    }

    pub fn first(&self) -> &[f64] {
        self.at(0)
    }

    pub fn last(&self) -> &[f64] {
        self.at(self.n_steps() - 1)
    }

    /// Time series of field `k`.
    pub fn field(&self, k: usize) -> Vec<f64> {
        self.values.iter().skip(k).step_by(self.n_fields).copied().collect()
    }

    /// Pointwise map, keeping the grid.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(self.time_grid, self.n_fields, self.values.iter().map(|&v| f(v)).collect())
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub(crate) fn same_shape(&self, other: &ControlField) -> bool {
        self.n_fields == other.n_fields && self.time_grid == other.time_grid
    }
}

fn check_finite(values: &[f64]) -> Result<()> {
    match values.iter().position(|v| !v.is_finite()) {
        Some(i) => Err(Error::invalid(format!("control value {i} is not finite"))),
        None => Ok(()),
    }
}

/// The time samples `t_i = i dt` as a control; a starting point for
/// building fields by pointwise maps.
pub fn make_time_control(n_steps: usize, dt: f64) -> Result<ControlField> {
    let grid = TimeGrid::new(n_steps, dt)?;
    ControlField::from_fn(grid, |t| t)
}
