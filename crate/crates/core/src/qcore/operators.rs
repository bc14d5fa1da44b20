use nalgebra::DMatrix;
use num_complex::Complex64;

use super::grid::SpatialGrid;
use super::state::{weighted_dot, StateVector};
use crate::error::{Error, Result};

/// A linear map on state amplitudes.
pub trait LinearOperator {
    fn dim(&self) -> usize;

    /// Writes `A x` into `out`. Both slices have length [`dim`](Self::dim).
    fn apply_into(&self, x: &[Complex64], out: &mut [Complex64]);

    fn is_hermitian(&self) -> bool;

    fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); x.len()];
        self.apply_into(x, &mut out);
        out
    }
}

/// Imaginary parts of `<psi|A|psi>` larger than this are reported as errors.
pub const IMAGINARY_RESIDUE_LIMIT: f64 = 1e-8;

/// `<psi|A|psi>` for a Hermitian operator.
pub fn expectation_value<A: LinearOperator + ?Sized>(op: &A, psi: &StateVector) -> Result<f64> {
    if op.dim() != psi.len() {
        return Err(Error::invalid(format!(
            "operator dimension {} does not match state dimension {}",
            op.dim(),
            psi.len()
        )));
    }
    if !op.is_hermitian() {
        return Err(Error::invalid("expectation value requires a Hermitian operator"));
    }
    let a_psi = op.apply(psi.amplitudes());
    let e = weighted_dot(psi.amplitudes(), &a_psi, psi.weight());
    if e.im.abs() > IMAGINARY_RESIDUE_LIMIT * e.re.abs().max(1.0) {
        return Err(Error::NumericalInconsistency(format!(
            "expectation value has imaginary residue {:e}",
            e.im
        )));
    }
    Ok(e.re)
}

/// Real potential sampled pointwise on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalOperator {
    values: Vec<f64>,
}

impl DiagonalOperator {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("diagonal operator has non-finite entries"));
        }
        Ok(Self { values })
    }

    pub fn zeros(n: usize) -> Self {
        Self { values: vec![0.0; n] }
    }

    pub fn from_fn(grid: &SpatialGrid, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(grid.x().iter().map(|&x| f(x)).collect())
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }
}

impl LinearOperator for DiagonalOperator {
    fn dim(&self) -> usize {
        self.values.len()
    }

    fn apply_into(&self, x: &[Complex64], out: &mut [Complex64]) {
        for ((o, xi), v) in out.iter_mut().zip(x).zip(&self.values) {
            *o = xi * v;
        }
    }

    fn is_hermitian(&self) -> bool {
        true
    }
}

/// Fourth-order central stencil for the second derivative.
pub const SECOND_DERIVATIVE_STENCIL: [f64; 5] = [-1.0 / 12.0, 4.0 / 3.0, -5.0 / 2.0, 4.0 / 3.0, -1.0 / 12.0];

/// `-kappa d^2/dx^2` as a symmetric 5-diagonal matrix.
///
/// Points outside the grid are treated as zero (hard walls), which keeps
/// the matrix symmetric. Interior rows are exact for polynomials up to
/// degree five.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandedKineticOperator {
    kappa: f64,
    dx: f64,
    n: usize,
}

impl BandedKineticOperator {
    pub fn new(grid: &SpatialGrid, kappa: f64) -> Self {
        Self {
            kappa,
            dx: grid.dx(),
            n: grid.len(),
        }
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    /// Coefficient multiplying `x[i + offset]`, `offset` in `-2..=2`.
    pub fn coefficient(&self, offset: isize) -> f64 {
        -self.kappa * SECOND_DERIVATIVE_STENCIL[(offset + 2) as usize] / (self.dx * self.dx)
    }

    pub fn apply_real(&self, x: &[f64]) -> Vec<f64> {
        let n = self.n;
        let c: Vec<f64> = (-2..=2).map(|o| self.coefficient(o)).collect();
        (0..n)
            .map(|i| {
                let mut acc = 0.0;
                for (j, cj) in c.iter().enumerate() {
                    let idx = i as isize + j as isize - 2;
                    if idx >= 0 && (idx as usize) < n {
                        acc += cj * x[idx as usize];
                    }
                }
                acc
            })
            .collect()
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let n = self.n;
        DMatrix::from_fn(n, n, |i, j| {
            let off = j as isize - i as isize;
            if off.abs() <= 2 {
                self.coefficient(off)
            } else {
                0.0
            }
        })
    }
}

impl LinearOperator for BandedKineticOperator {
    fn dim(&self) -> usize {
        self.n
    }

    fn apply_into(&self, x: &[Complex64], out: &mut [Complex64]) {
        let n = self.n;
        let c: [f64; 5] = std::array::from_fn(|j| self.coefficient(j as isize - 2));
        for (i, o) in out.iter_mut().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            let lo = i.saturating_sub(2);
            let hi = (i + 2).min(n - 1);
            for idx in lo..=hi {
                acc += x[idx] * c[idx + 2 - i];
            }
            *o = acc;
        }
    }

    fn is_hermitian(&self) -> bool {
        true
    }
}

/// Dense complex matrix acting on few-mode states.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseOperator {
    matrix: DMatrix<Complex64>,
}

impl DenseOperator {
    pub fn new(matrix: DMatrix<Complex64>) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::invalid("dense operator must be square"));
        }
        Ok(Self { matrix })
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }
}

impl LinearOperator for DenseOperator {
    fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    fn apply_into(&self, x: &[Complex64], out: &mut [Complex64]) {
        let n = self.dim();
        for (i, o) in out.iter_mut().enumerate().take(n) {
            *o = (0..n).map(|j| self.matrix[(i, j)] * x[j]).sum();
        }
    }

    fn is_hermitian(&self) -> bool {
        let n = self.dim();
        let scale = self.matrix.iter().map(|z| z.norm()).fold(1.0, f64::max);
        (0..n).all(|i| (0..n).all(|j| (self.matrix[(i, j)] - self.matrix[(j, i)].conj()).norm() <= 1e-14 * scale))
    }
}
