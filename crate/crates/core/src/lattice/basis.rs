use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::qcore::Basis;

/// Largest Fock-space dimension [`FockBasis::new`] will enumerate.
pub const DEFAULT_BASIS_CAP: usize = 2_000_000;

/// Occupation-number basis of `particles` bosons on `sites` lattice sites.
///
/// States are ordered lexicographically descending, so the first state
/// is `(N, 0, ..., 0)` and the last `(0, ..., 0, N)`.
#[derive(Debug, Clone)]
pub struct FockBasis {
    sites: usize,
    particles: usize,
    occupations: Vec<u16>,
    index: HashMap<Vec<u16>, usize>,
}

/// `C(N + L - 1, L - 1)`, or `None` on overflow.
pub fn fock_dimension(sites: usize, particles: usize) -> Option<usize> {
    if sites == 0 {
        return Some(0);
    }
    let k = (sites - 1).min(particles);
    let n = particles + sites - 1;
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > usize::MAX as u128 {
            return None;
        }
    }
    Some(acc as usize)
}

impl FockBasis {
    pub fn new(sites: usize, particles: usize) -> Result<Self> {
        Self::with_cap(sites, particles, DEFAULT_BASIS_CAP)
    }

    pub fn with_cap(sites: usize, particles: usize, cap: usize) -> Result<Self> {
        if sites == 0 || particles == 0 {
            return Err(Error::invalid(format!(
                "Fock basis needs at least one site and one particle, got L={sites}, N={particles}"
            )));
        }
        if particles > u16::MAX as usize {
            return Err(Error::Capacity(format!("{particles} particles exceed the occupation range")));
        }
        let dim = fock_dimension(sites, particles)
            .filter(|&d| d <= cap)
            .ok_or_else(|| Error::Capacity(format!("Fock space L={sites}, N={particles} exceeds cap {cap}")))?;

        let mut occupations = Vec::with_capacity(dim * sites);
        let mut current = vec![0u16; sites];
        enumerate(&mut current, 0, particles as u16, &mut occupations);
        debug_assert_eq!(occupations.len(), dim * sites);

        let index = occupations
            .chunks_exact(sites)
            .enumerate()
            .map(|(i, s)| (s.to_vec(), i))
            .collect();
        Ok(Self {
            sites,
            particles,
            occupations,
            index,
        })
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn particles(&self) -> usize {
        self.particles
    }

    pub fn dim(&self) -> usize {
        self.occupations.len() / self.sites
    }

    pub fn state(&self, i: usize) -> &[u16] {
        &self.occupations[i * self.sites..(i + 1) * self.sites]
    }

    pub fn states(&self) -> impl Iterator<Item = &[u16]> {
        self.occupations.chunks_exact(self.sites)
    }

    pub fn index_of(&self, occupation: &[u16]) -> Option<usize> {
        self.index.get(occupation).copied()
    }

    pub fn basis(&self) -> Basis {
        Basis::Fock {
            sites: self.sites,
            particles: self.particles,
            dim: self.dim(),
        }
    }
}

fn enumerate(current: &mut [u16], site: usize, remaining: u16, out: &mut Vec<u16>) {
    if site + 1 == current.len() {
        current[site] = remaining;
        out.extend_from_slice(current);
        return;
    }
    for n in (0..=remaining).rev() {
        current[site] = n;
        enumerate(current, site + 1, remaining - n, out);
    }
    current[site] = 0;
}
