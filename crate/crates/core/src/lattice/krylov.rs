use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::sparse::SparseOperator;
use crate::error::{Error, Result};
use crate::qcore::linalg::symmetric_eigen;
use crate::qcore::{Basis, LinearOperator, StateVector};

/// Lanczos coefficients below this end the Krylov recursion early.
pub const BREAKDOWN_THRESHOLD: f64 = 1e-14;

/// Below this dimension [`ground_state_sparse`] diagonalizes densely.
pub const DENSE_GROUND_STATE_LIMIT: usize = 512;

const GROUND_STATE_KRYLOV_DIM: usize = 80;
const GROUND_STATE_MAX_RESTARTS: usize = 500;

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(a: &[Complex64]) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Orthonormal Krylov basis of `op` started from unit `v0`, with full
/// reorthogonalization, together with the tridiagonal projection.
struct Krylov {
    vectors: Vec<Vec<Complex64>>,
    alpha: Vec<f64>,
    beta: Vec<f64>,
}

fn build_krylov<A: LinearOperator + ?Sized>(op: &A, v0: Vec<Complex64>, order: usize) -> Krylov {
    let mut k = Krylov {
        vectors: vec![v0],
        alpha: Vec::with_capacity(order),
        beta: Vec::with_capacity(order),
    };
    let mut w = vec![Complex64::new(0.0, 0.0); op.dim()];
    for j in 0..order {
        op.apply_into(&k.vectors[j], &mut w);
        let a = dot(&k.vectors[j], &w).re;
        k.alpha.push(a);
        if j + 1 == order {
            break;
        }
        // two passes of classical Gram-Schmidt against every basis vector
        for _ in 0..2 {
            for v in &k.vectors {
                let c = dot(v, &w);
                w.iter_mut().zip(v).for_each(|(x, y)| *x -= c * y);
            }
        }
        let b = norm(&w);
        if b < BREAKDOWN_THRESHOLD {
            break;
        }
        k.beta.push(b);
        k.vectors.push(w.iter().map(|z| z / b).collect());
    }
    k
}

impl Krylov {
    fn tridiagonal(&self) -> DMatrix<f64> {
        let m = self.alpha.len();
        let mut t = DMatrix::zeros(m, m);
        for i in 0..m {
            t[(i, i)] = self.alpha[i];
            if i + 1 < m {
                t[(i, i + 1)] = self.beta[i];
                t[(i + 1, i)] = self.beta[i];
            }
        }
        t
    }

    fn combine(&self, coeffs: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); self.vectors[0].len()];
        for (c, v) in coeffs.iter().zip(&self.vectors) {
            out.iter_mut().zip(v).for_each(|(o, x)| *o += c * x);
        }
        out
    }
}

/// `exp(-i H dt) psi` in the order-`krylov_order` Krylov subspace of `psi`.
///
/// The norm of `psi` is carried through, so unit input gives unit output
/// up to rounding. A breakdown of the recursion shrinks the subspace.
pub fn lanczos_step<A: LinearOperator + ?Sized>(
    h: &A,
    psi: &[Complex64],
    dt: f64,
    krylov_order: usize,
) -> Result<Vec<Complex64>> {
    if krylov_order < 2 {
        return Err(Error::invalid(format!("Krylov order must be at least 2, got {krylov_order}")));
    }
    if psi.len() != h.dim() {
        return Err(Error::invalid(format!(
            "state dimension {} does not match operator dimension {}",
            psi.len(),
            h.dim()
        )));
    }
    if !dt.is_finite() {
        return Err(Error::invalid("time step must be finite"));
    }
    let n0 = norm(psi);
    if n0 == 0.0 {
        return Ok(psi.to_vec());
    }
    let k = build_krylov(h, psi.iter().map(|z| z / n0).collect(), krylov_order.min(h.dim()));
    let (vals, vecs) = symmetric_eigen(k.tridiagonal());
    let m = vals.len();
    let coeffs: Vec<Complex64> = (0..m)
        .map(|i| {
            (0..m)
                .map(|j| Complex64::from_polar(vecs[(0, j)] * vecs[(i, j)] * n0, -vals[j] * dt))
                .sum()
        })
        .collect();
    Ok(k.combine(&coeffs))
}

/// Lowest eigenpair of a Hermitian operator by restarted Lanczos with full
/// reorthogonalization. Returns the Euclidean-normalized eigenvector.
pub fn lanczos_ground_state<A: LinearOperator + ?Sized>(
    op: &A,
    start: Option<&[Complex64]>,
    tol: f64,
) -> Result<(f64, Vec<Complex64>)> {
    let dim = op.dim();
    if dim == 0 {
        return Err(Error::invalid("empty operator"));
    }
    let mut v: Vec<Complex64> = match start {
        Some(s) if s.len() == dim && norm(s) > 0.0 => s.to_vec(),
        Some(_) => return Err(Error::invalid("start vector does not match the operator")),
        None => {
            let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
            (0..dim).map(|_| Complex64::new(rng.gen_range(0.5..1.5), 0.0)).collect()
        }
    };
    let n0 = norm(&v);
    v.iter_mut().for_each(|z| *z /= n0);

    let mut residual = f64::INFINITY;
    let mut hv = vec![Complex64::new(0.0, 0.0); dim];
    for _ in 0..GROUND_STATE_MAX_RESTARTS {
        let k = build_krylov(op, v, GROUND_STATE_KRYLOV_DIM.min(dim));
        let (vals, vecs) = symmetric_eigen(k.tridiagonal());
        let coeffs: Vec<Complex64> = (0..vals.len()).map(|i| Complex64::new(vecs[(i, 0)], 0.0)).collect();
        v = k.combine(&coeffs);
        let nv = norm(&v);
        v.iter_mut().for_each(|z| *z /= nv);
        op.apply_into(&v, &mut hv);
        let e = dot(&v, &hv).re;
        residual = hv.iter().zip(&v).map(|(a, b)| (a - b * e).norm_sqr()).sum::<f64>().sqrt();
        if residual < tol {
            return Ok((e, v));
        }
    }
    Err(Error::ConvergenceFailure {
        what: "Lanczos ground-state iteration".into(),
        residual,
    })
}

/// Lowest eigenpair of a Hermitian sparse operator with residual
/// `||H psi - E psi|| < tol`.
pub fn ground_state_sparse(h: &SparseOperator, basis: Basis, tol: f64) -> Result<(f64, StateVector)> {
    if !h.is_hermitian() {
        return Err(Error::invalid("ground state requires a Hermitian operator"));
    }
    if basis.dim() != h.dim() {
        return Err(Error::invalid("basis does not match the operator dimension"));
    }
    if !(tol > 0.0) {
        return Err(Error::invalid(format!("tolerance must be positive, got {tol}")));
    }
    let (e, mut amps) = if h.dim() < DENSE_GROUND_STATE_LIMIT {
        let (vals, vecs) = symmetric_eigen(h.to_dense());
        let v: Vec<Complex64> = vecs.column(0).iter().map(|&a| Complex64::new(a, 0.0)).collect();
        let hv = h.apply(&v);
        let r = hv.iter().zip(&v).map(|(a, b)| (a - b * vals[0]).norm_sqr()).sum::<f64>().sqrt();
        if r >= tol {
            return Err(Error::ConvergenceFailure {
                what: "dense diagonalization".into(),
                residual: r,
            });
        }
        (vals[0], v)
    } else {
        lanczos_ground_state(h, None, tol)?
    };
    // fix the global phase: largest component real and positive
    if let Some(p) = amps.iter().copied().max_by(|a, b| a.norm_sqr().total_cmp(&b.norm_sqr())) {
        let phase = p.conj() / p.norm();
        amps.iter_mut().for_each(|z| *z *= phase);
    }
    Ok((e, StateVector::new(amps, basis)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_gives_exact_phase() {
        let h = SparseOperator::diagonal(&[1.0, 2.5, -0.5]).unwrap();
        let psi = [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)];
        let out = lanczos_step(&h, &psi, 0.3, 4).unwrap();
        assert!((out[1] - Complex64::from_polar(1.0, -2.5 * 0.3)).norm() < 1e-14);
        assert!(out[0].norm() < 1e-15 && out[2].norm() < 1e-15);
    }

    #[test]
    fn diagonal_ground_state() {
        let h = SparseOperator::diagonal(&[3.0, -1.0, 2.0]).unwrap();
        let (e, psi) = ground_state_sparse(&h, Basis::FewMode { dim: 3 }, 1e-10).unwrap();
        assert_eq!(e, -1.0);
        assert!((psi.amplitudes()[1].re - 1.0).abs() < 1e-14);
    }

    #[test]
    fn rejects_low_order() {
        let h = SparseOperator::diagonal(&[1.0, 2.0]).unwrap();
        assert!(lanczos_step(&h, &[Complex64::new(1.0, 0.0); 2], 0.1, 1).is_err());
    }
}
