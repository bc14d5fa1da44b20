use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::qcore::linalg::{expm_hermitian_apply, hermitian_eigen};
use crate::qcore::{Basis, StateVector};

/// `H(u) = H_0 + sum_k u_k H_k` on a few-level system.
#[derive(Debug, Clone, PartialEq)]
pub struct FewModeHamiltonian {
    drift: DMatrix<Complex64>,
    controls: Vec<DMatrix<Complex64>>,
}

fn check_hermitian(m: &DMatrix<Complex64>, what: &str) -> Result<()> {
    if !m.is_square() {
        return Err(Error::invalid(format!("{what} must be square")));
    }
    let scale = m.iter().map(|z| z.norm()).fold(1.0, f64::max);
    if (&m.adjoint() - m).iter().any(|z| z.norm() > 1e-14 * scale) {
        return Err(Error::invalid(format!("{what} is not Hermitian")));
    }
    Ok(())
}

impl FewModeHamiltonian {
    pub fn new(drift: DMatrix<Complex64>, controls: Vec<DMatrix<Complex64>>) -> Result<Self> {
        check_hermitian(&drift, "drift Hamiltonian")?;
        for (k, c) in controls.iter().enumerate() {
            check_hermitian(c, &format!("control Hamiltonian {k}"))?;
            if c.shape() != drift.shape() {
                return Err(Error::invalid(format!("control Hamiltonian {k} has the wrong shape")));
            }
        }
        if controls.is_empty() {
            return Err(Error::invalid("at least one control Hamiltonian is required"));
        }
        Ok(Self { drift, controls })
    }

    pub fn dim(&self) -> usize {
        self.drift.nrows()
    }

    pub fn basis(&self) -> Basis {
        Basis::FewMode { dim: self.dim() }
    }

    pub fn n_controls(&self) -> usize {
        self.controls.len()
    }

    pub fn drift(&self) -> &DMatrix<Complex64> {
        &self.drift
    }

    pub fn control_operator(&self, k: usize) -> &DMatrix<Complex64> {
        &self.controls[k]
    }

    pub fn at(&self, u: &[f64]) -> Result<DMatrix<Complex64>> {
        if u.len() != self.controls.len() {
            return Err(Error::invalid(format!(
                "{} control values for {} control Hamiltonians",
                u.len(),
                self.controls.len()
            )));
        }
        let mut h = self.drift.clone();
        for (c, &v) in self.controls.iter().zip(u) {
            h += c * Complex64::new(v, 0.0);
        }
        Ok(h)
    }

    /// Exact `exp(-i H(u) dt) psi`.
    pub fn propagate(&self, u: &[f64], psi: &[Complex64], dt: f64) -> Result<Vec<Complex64>> {
        Ok(expm_hermitian_apply(&self.at(u)?, dt, psi))
    }

    /// Ascending eigenpairs of `H(u)`.
    pub fn eigen(&self, u: &[f64]) -> Result<(Vec<f64>, DMatrix<Complex64>)> {
        Ok(hermitian_eigen(self.at(u)?))
    }

    pub fn ground_state(&self, u: &[f64]) -> Result<(f64, StateVector)> {
        let (vals, vecs) = self.eigen(u)?;
        Ok((vals[0], StateVector::new(vecs.column(0).iter().copied().collect(), self.basis())?))
    }
}

/// Two-level `H(u) = u sigma_z + delta sigma_x`.
pub fn landau_zener_hamiltonian(delta: f64) -> Result<FewModeHamiltonian> {
    if !delta.is_finite() {
        return Err(Error::invalid("coupling must be finite"));
    }
    let z = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let d = Complex64::new(delta, 0.0);
    FewModeHamiltonian::new(
        DMatrix::from_row_slice(2, 2, &[z, d, d, z]),
        vec![DMatrix::from_row_slice(2, 2, &[one, z, z, -one])],
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn landau_zener_spectrum() {
        let h = landau_zener_hamiltonian(1.0).unwrap();
        let (v, _) = h.eigen(&[0.0]).unwrap();
        assert!((v[0] + 1.0).abs() < 1e-14 && (v[1] - 1.0).abs() < 1e-14);
        let (v, _) = h.eigen(&[2.0]).unwrap();
        assert!((v[1] - v[0] - 2.0 * 5f64.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn decoupled_eigenstates_are_basis_vectors() {
        let h = landau_zener_hamiltonian(0.0).unwrap();
        let (_, psi) = h.ground_state(&[1.5]).unwrap();
        assert!((psi.amplitudes()[1].norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = DMatrix::from_row_slice(2, 2, &[Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)]);
        assert!(FewModeHamiltonian::new(m.clone(), vec![m]).is_err());
    }
}
