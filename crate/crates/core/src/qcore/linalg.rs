//! Dense eigensolvers and matrix exponentials on `nalgebra` matrices.

use faer::complex_native::c64;
use faer::{Mat, Side};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

/// Eigenpairs of a real symmetric matrix, ascending eigenvalues.
/// Column `j` of the returned matrix is the eigenvector of `values[j]`.
pub fn symmetric_eigen(m: DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let n = m.nrows();
    let eig = Mat::from_fn(n, n, |i, j| m[(i, j)]).selfadjoint_eigendecomposition(Side::Lower);
    let s = eig.s().column_vector();
    let u = eig.u();
    let values = (0..n).map(|i| s.read(i)).collect();
    (values, DMatrix::from_fn(n, n, |r, c| u.read(r, c)))
}

/// Eigenpairs of a complex Hermitian matrix, ascending eigenvalues.
pub fn hermitian_eigen(m: DMatrix<Complex64>) -> (Vec<f64>, DMatrix<Complex64>) {
    let n = m.nrows();
    let eig = Mat::from_fn(n, n, |i, j| {
        let z = m[(i, j)];
        c64::new(z.re, z.im)
    })
    .selfadjoint_eigendecomposition(Side::Lower);
    let s = eig.s().column_vector();
    let u = eig.u();
    let values = (0..n).map(|i| s.read(i).re).collect();
    let vectors = DMatrix::from_fn(n, n, |r, c| {
        let z = u.read(r, c);
        Complex64::new(z.re, z.im)
    });
    (values, vectors)
}

/// `exp(-i H dt) x` for Hermitian `H` via its eigendecomposition.
pub fn expm_hermitian_apply(h: &DMatrix<Complex64>, dt: f64, x: &[Complex64]) -> Vec<Complex64> {
    let (values, vectors) = hermitian_eigen(h.clone());
    let xv = DVector::from_column_slice(x);
    let mut coeffs = vectors.adjoint() * xv;
    for (c, e) in coeffs.iter_mut().zip(&values) {
        *c *= Complex64::from_polar(1.0, -e * dt);
    }
    (vectors * coeffs).iter().copied().collect()
}
