//! Independent reference computations shared by the integration tests.
//!
//! Nothing in here calls into the propagators or solvers under test; the
//! dense matrices are built from explicit sums.
#![allow(dead_code)]

pub mod problems;

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use ultracold::qcore::Complex64;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// `-kappa d^2/dx^2` as a dense periodic spectral matrix, built from the
/// explicit Fourier sum rather than an FFT.
pub fn dense_spectral_kinetic(n: usize, dx: f64, kappa: f64) -> DMatrix<f64> {
    let dk = 2.0 * PI / (n as f64 * dx);
    let ks: Vec<f64> = (0..n)
        .map(|j| if j < n.div_ceil(2) { j as f64 * dk } else { (j as f64 - n as f64) * dk })
        .collect();
    DMatrix::from_fn(n, n, |a, b| {
        let d = a as f64 - b as f64;
        ks.iter()
            .map(|k| kappa * k * k * (2.0 * PI * d * (k / dk) / n as f64).cos())
            .sum::<f64>()
            / n as f64
    })
}

/// Dense 5-point stencil matrix, zero outside the grid.
pub fn dense_stencil_kinetic(n: usize, dx: f64, kappa: f64) -> DMatrix<f64> {
    let s = [-1.0 / 12.0, 4.0 / 3.0, -5.0 / 2.0, 4.0 / 3.0, -1.0 / 12.0];
    DMatrix::from_fn(n, n, |i, j| {
        let o = j as isize - i as isize;
        if o.abs() <= 2 {
            -kappa * s[(o + 2) as usize] / (dx * dx)
        } else {
            0.0
        }
    })
}

/// Classic RK4 for `i psi' = (H_lin + beta |psi|^2) psi`, with `H_lin`
/// held constant over the interval.
pub fn rk4_gpe(h_lin: &DMatrix<f64>, beta: f64, psi: &[Complex64], t_total: f64, steps: usize) -> Vec<Complex64> {
    let n = psi.len();
    let h = t_total / steps as f64;
    let rhs = |y: &[Complex64]| -> Vec<Complex64> {
        (0..n)
            .map(|i| {
                let mut acc = Complex64::new(0.0, 0.0);
                for j in 0..n {
                    acc += y[j] * h_lin[(i, j)];
                }
                acc += y[i] * beta * y[i].norm_sqr();
                acc * Complex64::new(0.0, -1.0)
            })
            .collect()
    };
    let mut y = psi.to_vec();
    for _ in 0..steps {
        let k1 = rhs(&y);
        let y2: Vec<_> = y.iter().zip(&k1).map(|(a, k)| a + k * (h / 2.0)).collect();
        let k2 = rhs(&y2);
        let y3: Vec<_> = y.iter().zip(&k2).map(|(a, k)| a + k * (h / 2.0)).collect();
        let k3 = rhs(&y3);
        let y4: Vec<_> = y.iter().zip(&k3).map(|(a, k)| a + k * h).collect();
        let k4 = rhs(&y4);
        for i in 0..n {
            y[i] += (k1[i] + k2[i] * 2.0 + k3[i] * 2.0 + k4[i]) * (h / 6.0);
        }
    }
    y
}

/// `exp(-i H t) x` by scaling and squaring of a Taylor series, for a real
/// symmetric or complex Hermitian `H`.
pub fn expm_apply(h: &DMatrix<Complex64>, t: f64, x: &[Complex64]) -> Vec<Complex64> {
    let n = h.nrows();
    let a = h * Complex64::new(0.0, -t);
    let norm = a.iter().map(|z| z.norm()).fold(0.0, f64::max) * n as f64;
    let mut s = 0;
    let mut scale = 1.0;
    while norm * scale > 0.5 {
        scale *= 0.5;
        s += 1;
    }
    let a = a * Complex64::new(scale, 0.0);
    let mut term = DMatrix::<Complex64>::identity(n, n);
    let mut sum = term.clone();
    for k in 1..30 {
        term = &term * &a * Complex64::new(1.0 / k as f64, 0.0);
        sum += &term;
    }
    for _ in 0..s {
        sum = &sum * &sum;
    }
    let v = sum * DVector::from_column_slice(x);
    v.iter().copied().collect()
}

pub fn to_complex(m: &DMatrix<f64>) -> DMatrix<Complex64> {
    m.map(|v| Complex64::new(v, 0.0))
}

/// Ascending eigenvalues of a dense symmetric matrix.
pub fn dense_eigenvalues(m: &DMatrix<f64>) -> Vec<f64> {
    let mut v: Vec<f64> = nalgebra::SymmetricEigen::new(m.clone()).eigenvalues.iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

/// Unit eigenvector for an isolated eigenvalue `lambda` by inverse
/// iteration with a dense LU factorization.
pub fn dense_eigenvector(m: &DMatrix<f64>, lambda: f64) -> DVector<f64> {
    let n = m.nrows();
    let shift = lambda - 1e-10 * lambda.abs().max(1.0);
    let lu = (m - DMatrix::<f64>::identity(n, n) * shift).lu();
    let mut v = DVector::from_fn(n, |i, _| 1.0 + 0.01 * (i as f64).sin());
    for _ in 0..6 {
        v = lu.solve(&v).expect("shifted matrix is invertible");
        v /= v.norm();
    }
    v
}

pub fn max_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Weighted 2-norm of `a - b`.
pub fn l2_diff(a: &[Complex64], b: &[Complex64], w: f64) -> f64 {
    (a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>() * w).sqrt()
}

/// RK4 for `i Psi' = T Psi + Psi T^T + D .* Psi` with `Psi` the row-major
/// `n x n` amplitude matrix, `T` a dense 1D kinetic matrix and `D` diagonal.
pub fn rk4_pair(t: &DMatrix<f64>, d: &[f64], psi: &[Complex64], t_total: f64, steps: usize) -> Vec<Complex64> {
    let n = t.nrows();
    let tc = to_complex(t);
    let dm = DMatrix::from_row_slice(n, n, d).map(|v| Complex64::new(v, 0.0));
    let rhs = |y: &DMatrix<Complex64>| -> DMatrix<Complex64> {
        (&tc * y + y * tc.transpose() + dm.component_mul(y)) * Complex64::new(0.0, -1.0)
    };
    let h = Complex64::new(t_total / steps as f64, 0.0);
    let half = h * 0.5;
    let mut y = DMatrix::from_row_slice(n, n, psi);
    for _ in 0..steps {
        let k1 = rhs(&y);
        let k2 = rhs(&(&y + &k1 * half));
        let k3 = rhs(&(&y + &k2 * half));
        let k4 = rhs(&(&y + &k3 * h));
        y += (k1 + k2 * Complex64::new(2.0, 0.0) + k3 * Complex64::new(2.0, 0.0) + k4) * (h / 6.0);
    }
    // back to row-major
    (0..n * n).map(|idx| y[(idx / n, idx % n)]).collect()
}
