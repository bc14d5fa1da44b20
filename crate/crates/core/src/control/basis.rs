use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::qcore::TimeGrid;

/// Reduced basis for GROUP: columns `S(t) f_m(t)` sampled on a time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupBasis {
    time_grid: TimeGrid,
    columns: Vec<Vec<f64>>,
    thetas: Vec<f64>,
}

impl GroupBasis {
    pub fn new(time_grid: TimeGrid, columns: Vec<Vec<f64>>) -> Result<Self> {
        let thetas = vec![0.0; columns.len()];
        Self::with_thetas(time_grid, columns, thetas)
    }

    fn with_thetas(time_grid: TimeGrid, columns: Vec<Vec<f64>>, thetas: Vec<f64>) -> Result<Self> {
        if columns.is_empty() {
            return Err(Error::invalid("basis needs at least one function"));
        }
        for (m, c) in columns.iter().enumerate() {
            if c.len() != time_grid.n_steps() {
                return Err(Error::invalid(format!(
                    "basis function {m} has {} samples, grid has {}",
                    c.len(),
                    time_grid.n_steps()
                )));
            }
            if c.iter().any(|v| !v.is_finite()) {
                return Err(Error::invalid(format!("basis function {m} is not finite")));
            }
        }
        Ok(Self {
            time_grid,
            columns,
            thetas,
        })
    }

    pub fn time_grid(&self) -> TimeGrid {
        self.time_grid
    }

    pub fn size(&self) -> usize {
        self.columns.len()
    }

    pub fn column(&self, m: usize) -> &[f64] {
        &self.columns[m]
    }

    pub fn columns(&self) -> &[Vec<f64>] {
        &self.columns
    }

    /// Random offsets `theta_m` the sine frequencies were drawn with.
    pub fn thetas(&self) -> &[f64] {
        &self.thetas
    }

    /// Every column multiplied pointwise by `shape`.
    pub fn shaped(&self, shape: &[f64]) -> Result<Self> {
        if shape.len() != self.time_grid.n_steps() {
            return Err(Error::invalid("shape function and basis use different grids"));
        }
        let columns = self
            .columns
            .iter()
            .map(|c| c.iter().zip(shape).map(|(a, s)| a * s).collect())
            .collect();
        Self::with_thetas(self.time_grid, columns, self.thetas.clone())
    }

    /// Whether every column is zero at the first and last sample.
    pub fn vanishes_at_ends(&self) -> bool {
        self.columns.iter().all(|c| c[0] == 0.0 && c[c.len() - 1] == 0.0)
    }
}

/// Sine basis `sin((m + theta_m) pi t / T)`, `m = 1..M`, with
/// `theta_m ~ U(-max_rand, max_rand)` drawn from a seeded stream.
pub fn make_sine_basis(size: usize, time_grid: TimeGrid, max_rand: f64, seed: u64) -> Result<GroupBasis> {
    if size == 0 {
        return Err(Error::invalid("basis size must be at least 1"));
    }
    if !(0.0..=0.5).contains(&max_rand) {
        return Err(Error::invalid(format!("max_rand must lie in [0, 0.5], got {max_rand}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let thetas: Vec<f64> = (0..size)
        .map(|_| if max_rand > 0.0 { rng.gen_range(-max_rand..max_rand) } else { 0.0 })
        .collect();
    let t_final = time_grid.duration();
    let times = time_grid.times();
    let columns = thetas
        .iter()
        .enumerate()
        .map(|(j, th)| {
            let freq = (j as f64 + 1.0 + th) * PI / t_final;
            let mut col: Vec<f64> = times.iter().map(|t| (freq * t).sin()).collect();
            if *th == 0.0 {
                // sin(m pi) is zero; drop the rounding residue
                *col.last_mut().expect("at least two samples") = 0.0;
            }
            col
        })
        .collect();
    GroupBasis::with_thetas(time_grid, columns, thetas)
}

fn logistic(a: f64, t: f64, t0: f64) -> f64 {
    1.0 / (1.0 + (-a * (t - t0)).exp())
}

/// Height of the normalized ramp at `0.1 T` for steepness `a` (in units of 1/T).
fn ramp_height(a: f64) -> f64 {
    let r = |t: f64| logistic(a, t, 0.05);
    (r(0.1) - r(0.0)) / (r(0.5) - r(0.0))
}

/// Symmetric sigmoid envelope: zero at both ends, one at the centre and
/// `plateau` at `t = 0.1 T`.
///
/// Built from a logistic ramp centred at `0.05 T`, mirrored with
/// `min(r(t), r(T - t))`, shifted to start at zero and scaled to peak at one.
pub fn make_sigmoid_shape(time_grid: TimeGrid, plateau: f64) -> Result<Vec<f64>> {
    if !(plateau > 0.0 && plateau < 1.0) {
        return Err(Error::invalid(format!("plateau must lie in (0, 1), got {plateau}")));
    }
    // a -> 0 makes the ramp linear, so 0.1T sits at 1/5 of the peak
    let (mut lo, mut hi) = (1e-6, 1e4);
    if !(ramp_height(lo) < plateau && ramp_height(hi) > plateau) {
        return Err(Error::invalid(format!("plateau {plateau} is not reachable at 0.1 T")));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if ramp_height(mid) < plateau {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let a = 0.5 * (lo + hi);
    let n = time_grid.n_steps();
    let t_final = time_grid.duration();
    let r: Vec<f64> = (0..n).map(|i| logistic(a, time_grid.t(i) / t_final, 0.05)).collect();
    let s: Vec<f64> = (0..n).map(|i| r[i].min(r[n - 1 - i])).collect();
    let base = s[0];
    let peak = s.iter().fold(f64::NEG_INFINITY, |m, &v| m.max(v)) - base;
    Ok(s.iter().map(|v| (v - base) / peak).collect())
}

/// Produces a fresh basis for each dGROUP superiteration.
pub trait BasisMaker {
    fn make(&mut self, superiteration: usize) -> Result<GroupBasis>;
}

impl<F: FnMut(usize) -> Result<GroupBasis>> BasisMaker for F {
    fn make(&mut self, superiteration: usize) -> Result<GroupBasis> {
        self(superiteration)
    }
}

/// Randomized shaped sine bases; superiteration `s` uses seed `seed + s`.
pub fn make_rand_sine_basis_maker(
    size: usize,
    time_grid: TimeGrid,
    shape: Vec<f64>,
    max_rand: f64,
    seed: u64,
) -> impl BasisMaker {
    move |s: usize| make_sine_basis(size, time_grid, max_rand, seed.wrapping_add(s as u64))?.shaped(&shape)
}
