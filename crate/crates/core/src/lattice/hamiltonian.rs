use num_complex::Complex64;

use super::basis::FockBasis;
use super::sparse::SparseOperator;
use crate::error::{Error, Result};
use crate::qcore::{LinearOperator, StateVector};

/// `sum_i (a+_{i+1} a_i + h.c.)`, with the bond `(L-1, 0)` added when
/// `periodic`. For `L <= 2` the wrap bond would duplicate an existing one
/// and is skipped.
pub fn hopping_operator(basis: &FockBasis, periodic: bool) -> SparseOperator {
    let l = basis.sites();
    let mut bonds: Vec<(usize, usize)> = (0..l.saturating_sub(1)).map(|i| (i, i + 1)).collect();
    if periodic && l > 2 {
        bonds.push((l - 1, 0));
    }
    let mut triplets = Vec::new();
    let mut target = vec![0u16; l];
    for (col, state) in basis.states().enumerate() {
        for &(i, j) in &bonds {
            for (from, to) in [(i, j), (j, i)] {
                if state[from] == 0 {
                    continue;
                }
                target.copy_from_slice(state);
                target[from] -= 1;
                target[to] += 1;
                let row = basis.index_of(&target).expect("hop stays in the basis");
                let amp = (state[from] as f64 * (state[to] as f64 + 1.0)).sqrt();
                triplets.push((row, col, amp));
            }
        }
    }
    SparseOperator::from_triplets(basis.dim(), triplets).expect("indices come from the basis")
}

/// Diagonal operator `sum_i n_i (n_i - 1)`.
pub fn onsite_operator(basis: &FockBasis) -> SparseOperator {
    let d: Vec<f64> = basis
        .states()
        .map(|s| s.iter().map(|&n| n as f64 * (n as f64 - 1.0)).sum())
        .collect();
    SparseOperator::diagonal(&d).expect("finite entries")
}

/// Diagonal operator `sum_i V_i n_i`.
pub fn site_potential_operator(basis: &FockBasis, potential: &[f64]) -> Result<SparseOperator> {
    if potential.len() != basis.sites() {
        return Err(Error::invalid(format!(
            "site potential has {} entries for {} sites",
            potential.len(),
            basis.sites()
        )));
    }
    let d: Vec<f64> = basis
        .states()
        .map(|s| s.iter().zip(potential).map(|(&n, v)| n as f64 * v).sum())
        .collect();
    SparseOperator::diagonal(&d)
}

/// `U(u) = A (tanh u + B)`, mapping the real line onto `(U_min, U_max)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundTransform {
    u_min: f64,
    u_max: f64,
    a: f64,
    b: f64,
}

impl BoundTransform {
    pub fn new(u_min: f64, u_max: f64) -> Result<Self> {
        if !(u_min > 0.0 && u_max > u_min && u_max.is_finite()) {
            return Err(Error::invalid(format!("bounds need 0 < U_min < U_max, got ({u_min}, {u_max})")));
        }
        let r = u_min / u_max;
        let b = (1.0 + r) / (1.0 - r);
        Ok(Self {
            u_min,
            u_max,
            a: u_max / (1.0 + b),
            b,
        })
    }

    pub fn bounds(&self) -> (f64, f64) {
        (self.u_min, self.u_max)
    }

    pub fn apply(&self, u: f64) -> f64 {
        self.a * (u.tanh() + self.b)
    }

    pub fn derivative(&self, u: f64) -> f64 {
        let c = u.cosh();
        self.a / (c * c)
    }

    pub fn inverse(&self, big_u: f64) -> Result<f64> {
        if !(big_u > self.u_min && big_u < self.u_max) {
            return Err(Error::Domain(format!(
                "U = {big_u} outside the open interval ({}, {})",
                self.u_min, self.u_max
            )));
        }
        Ok((big_u / self.a - self.b).atanh())
    }
}

/// Bose-Hubbard Hamiltonian `H(u) = H_const + U(u)/2 sum_i n_i (n_i - 1)`
/// with `H_const = -J hopping + sum_i V_i n_i`.
///
/// Without a transform the control is `U` itself.
#[derive(Debug, Clone)]
pub struct LatticeHamiltonian {
    basis: FockBasis,
    constant: SparseOperator,
    onsite: SparseOperator,
    transform: Option<BoundTransform>,
}

impl LatticeHamiltonian {
    pub fn new(
        basis: FockBasis,
        hopping: f64,
        potential: &[f64],
        periodic: bool,
        transform: Option<BoundTransform>,
    ) -> Result<Self> {
        let hop = hopping_operator(&basis, periodic);
        let pot = site_potential_operator(&basis, potential)?;
        let constant = SparseOperator::linear_combination(&[(-hopping, &hop), (1.0, &pot)])?;
        Ok(Self {
            onsite: onsite_operator(&basis),
            basis,
            constant,
            transform,
        })
    }

    pub fn fock_basis(&self) -> &FockBasis {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    pub fn constant_part(&self) -> &SparseOperator {
        &self.constant
    }

    pub fn onsite(&self) -> &SparseOperator {
        &self.onsite
    }

    pub fn transform(&self) -> Option<&BoundTransform> {
        self.transform.as_ref()
    }

    /// Interaction strength `U(u)`.
    pub fn interaction(&self, u: f64) -> f64 {
        self.transform.map_or(u, |t| t.apply(u))
    }

    /// `dU/du`.
    pub fn interaction_derivative(&self, u: f64) -> f64 {
        self.transform.map_or(1.0, |t| t.derivative(u))
    }

    /// Control value giving interaction strength `big_u`.
    pub fn control_for(&self, big_u: f64) -> Result<f64> {
        match self.transform {
            Some(t) => t.inverse(big_u),
            None => Ok(big_u),
        }
    }

    pub fn at(&self, u: f64) -> SparseOperator {
        SparseOperator::linear_combination(&[(1.0, &self.constant), (0.5 * self.interaction(u), &self.onsite)])
            .expect("operators share the basis")
    }

    /// Borrowing view of `H(u)` as a linear operator.
    pub fn operator(&self, u: f64) -> LatticeOperator<'_> {
        LatticeOperator {
            h: self,
            onsite_factor: 0.5 * self.interaction(u),
        }
    }

    /// View of `H_const + big_u/2 sum_i n_i (n_i - 1)` for a given interaction
    /// strength rather than a control value.
    pub fn operator_with_interaction(&self, big_u: f64) -> LatticeOperator<'_> {
        LatticeOperator {
            h: self,
            onsite_factor: 0.5 * big_u,
        }
    }

    /// Lowest eigenpair of `H(u)`.
    pub fn ground_state(&self, u: f64, tol: f64) -> Result<(f64, StateVector)> {
        super::krylov::ground_state_sparse(&self.at(u), self.basis.basis(), tol)
    }
}

/// `H(u)` applied without assembling it.
#[derive(Debug, Clone, Copy)]
pub struct LatticeOperator<'a> {
    h: &'a LatticeHamiltonian,
    onsite_factor: f64,
}

impl LinearOperator for LatticeOperator<'_> {
    fn dim(&self) -> usize {
        self.h.dim()
    }

    fn apply_into(&self, x: &[Complex64], out: &mut [Complex64]) {
        self.h.constant.apply_into(x, out);
        self.h.onsite.accumulate(self.onsite_factor, x, out);
    }

    fn is_hermitian(&self) -> bool {
        true
    }
}
