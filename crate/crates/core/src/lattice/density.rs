use nalgebra::DMatrix;
use num_complex::Complex64;

use super::basis::FockBasis;
use crate::error::{Error, Result};
use crate::qcore::StateVector;

/// `rho[i][j] = <psi| a+_i a_j |psi>`.
pub fn single_particle_density_matrix(psi: &StateVector, basis: &FockBasis) -> Result<DMatrix<Complex64>> {
    if psi.basis() != basis.basis() {
        return Err(Error::invalid("state does not live in the given Fock basis"));
    }
    let l = basis.sites();
    let amps = psi.amplitudes();
    let mut rho = DMatrix::from_element(l, l, Complex64::new(0.0, 0.0));
    let mut target = vec![0u16; l];
    for (col, state) in basis.states().enumerate() {
        let a = amps[col];
        if a.norm_sqr() == 0.0 {
            continue;
        }
        for j in 0..l {
            if state[j] == 0 {
                continue;
            }
            rho[(j, j)] += a.norm_sqr() * state[j] as f64;
            for i in (0..l).filter(|&i| i != j) {
                target.copy_from_slice(state);
                target[j] -= 1;
                target[i] += 1;
                let row = basis.index_of(&target).expect("hop stays in the basis");
                let coeff = (state[j] as f64 * (state[i] as f64 + 1.0)).sqrt();
                rho[(i, j)] += amps[row].conj() * a * coeff;
            }
        }
    }
    Ok(rho)
}
