//! Dyadic configurations and the candidate lattice.
//!
//! A configuration (m, n) inside ambient exponents (M, N) splits a
//! 2^M × 2^N matrix into a 2^m × 2^n grid of 2^{M−m} × 2^{N−n} blocks:
//! the left Kronecker factor gets shape 2^m × 2^n, the right factor the
//! complementary shape.

use crate::error::{KopaError, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Configuration {
    /// log2 of the left factor's row count
    pub m: u32,
    /// log2 of the left factor's column count
    pub n: u32,
    /// ambient row exponent (matrix has 2^M rows)
    #[serde(rename = "M")]
    pub big_m: u32,
    /// ambient column exponent (matrix has 2^N columns)
    #[serde(rename = "N")]
    pub big_n: u32,
}

impl Configuration {
    pub fn new(m: u32, n: u32, big_m: u32, big_n: u32) -> Result<Self> {
        if m > big_m || n > big_n {
            return Err(KopaError::dim(format!(
                "configuration ({m},{n}) outside ambient ({big_m},{big_n})"
            )));
        }
        Ok(Configuration { m, n, big_m, big_n })
    }

    pub fn m_dagger(&self) -> u32 {
        self.big_m - self.m
    }

    pub fn n_dagger(&self) -> u32 {
        self.big_n - self.n
    }

    /// Shape of the left factor: 2^m × 2^n.
    pub fn a_shape(&self) -> (usize, usize) {
        (1usize << self.m, 1usize << self.n)
    }

    /// Shape of the right factor: 2^{m†} × 2^{n†}.
    pub fn b_shape(&self) -> (usize, usize) {
        (1usize << self.m_dagger(), 1usize << self.n_dagger())
    }

    /// Shape of the ambient matrix: 2^M × 2^N.
    pub fn ambient_shape(&self) -> (usize, usize) {
        (1usize << self.big_m, 1usize << self.big_n)
    }

    /// Shape of the rearranged matrix: 2^{m+n} × 2^{m†+n†}.
    pub fn rearranged_shape(&self) -> (usize, usize) {
        (
            1usize << (self.m + self.n),
            1usize << (self.m_dagger() + self.n_dagger()),
        )
    }

    /// Parameter count η = 2^{m+n} + 2^{m†+n†}.
    pub fn eta(&self) -> u64 {
        (1u64 << (self.m + self.n)) + (1u64 << (self.m_dagger() + self.n_dagger()))
    }

    /// The over-fitting corners (0,0) and (M,N) reconstruct the matrix
    /// exactly and are excluded from selection.
    pub fn is_corner(&self) -> bool {
        (self.m == 0 && self.n == 0) || (self.m == self.big_m && self.n == self.big_n)
    }

    pub fn pair(&self) -> (u32, u32) {
        (self.m, self.n)
    }
}

impl std::fmt::Display for Configuration {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({},{})", self.m, self.n)
    }
}

/// All candidate configurations for a 2^M × 2^N matrix, in lexicographic
/// (m, n) order, with the two corners removed.
#[derive(Debug, Clone)]
pub struct ConfigLattice {
    pub big_m: u32,
    pub big_n: u32,
    entries: Vec<Configuration>,
}

impl ConfigLattice {
    pub fn entries(&self) -> &[Configuration] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Configuration> {
        self.entries.iter()
    }
}

impl<'a> IntoIterator for &'a ConfigLattice {
    type Item = &'a Configuration;
    type IntoIter = std::slice::Iter<'a, Configuration>;
    fn into_iter(self) -> Self::IntoIter {
        self.entries.iter()
    }
}

/// Candidate set: {0..M} × {0..N} minus the corners (0,0) and (M,N).
/// Errors when the lattice has no candidates (M = N = 0, or M + N = 1).
pub fn candidate_configs(big_m: u32, big_n: u32) -> Result<ConfigLattice> {
    let total = (big_m as usize + 1) * (big_n as usize + 1);
    if total <= 2 {
        return Err(KopaError::domain(format!(
            "no candidate configurations for ambient exponents ({big_m},{big_n})"
        )));
    }
    let mut entries = Vec::with_capacity(total - 2);
    for m in 0..=big_m {
        for n in 0..=big_n {
            let cfg = Configuration { m, n, big_m, big_n };
            if !cfg.is_corner() {
                entries.push(cfg);
            }
        }
    }
    Ok(ConfigLattice {
        big_m,
        big_n,
        entries,
    })
}

/// Exponent of a power-of-two dimension, or a dimension error.
pub fn log2_exact(v: usize) -> Result<u32> {
    if v == 0 || !v.is_power_of_two() {
        return Err(KopaError::dim(format!("{v} is not a power of two")));
    }
    Ok(v.trailing_zeros())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lattice_1x1_drops_corners() {
        let l = candidate_configs(1, 1).unwrap();
        let pairs: Vec<_> = l.iter().map(|c| c.pair()).collect();
        assert_eq!(pairs, vec![(0, 1), (1, 0)]);
    }

    #[test]
    fn lattice_9x9_has_98_entries() {
        let l = candidate_configs(9, 9).unwrap();
        assert_eq!(l.len(), 98);
        // lexicographic order
        let pairs: Vec<_> = l.iter().map(|c| c.pair()).collect();
        let mut sorted = pairs.clone();
        sorted.sort();
        assert_eq!(pairs, sorted);
        assert!(!pairs.contains(&(0, 0)));
        assert!(!pairs.contains(&(9, 9)));
    }

    #[test]
    fn degenerate_lattices_error() {
        assert!(matches!(candidate_configs(0, 0), Err(KopaError::Domain(_))));
        // {(0,0),(1,0)} minus both corners is empty
        assert!(matches!(candidate_configs(1, 0), Err(KopaError::Domain(_))));
        assert!(matches!(candidate_configs(0, 1), Err(KopaError::Domain(_))));
        assert!(candidate_configs(2, 0).is_ok());
    }

    #[test]
    fn eta_and_shapes() {
        let c = Configuration::new(4, 5, 9, 9).unwrap();
        assert_eq!(c.a_shape(), (16, 32));
        assert_eq!(c.b_shape(), (32, 16));
        assert_eq!(c.eta(), (1 << 9) + (1 << 9));
        assert_eq!(c.rearranged_shape(), (512, 512));
        assert!(!c.is_corner());
        assert!(Configuration::new(0, 0, 3, 3).unwrap().is_corner());
        assert!(Configuration::new(3, 3, 3, 3).unwrap().is_corner());
        assert!(Configuration::new(4, 0, 3, 3).is_err());
    }
}
