//! Kronecker product approximation (KoPA).
//!
//! A 2^M × 2^N matrix can be approximated by λ·A⊗B for any *configuration*
//! (m, n): A is 2^m × 2^n, B is 2^{M−m} × 2^{N−n}. After a configuration-
//! indexed rearrangement of entries this is exactly a rank-one problem, so
//! the best approximation comes from the leading singular triplet of the
//! rearranged matrix — and sums of K Kronecker products come from the top-K
//! triplets. The interesting question is which configuration to use; an
//! extended information criterion
//!
//! IC_κ(m, n) = 2^{M+N}·ln‖Y − Ŷ‖²_F + κ·(2^{m+n} + 2^{M+N−m−n})
//!
//! scans the whole candidate lattice and picks the argmin (κ = 0 is plain
//! RSS, κ = 2 AIC, κ = (M+N)ln2 BIC).
//!
//! Modules:
//! * [`matrix`] / [`config`] / [`rearrange`] — exact Kronecker algebra and
//!   the rearrangement bijection,
//! * [`spectral`] / [`angles`] — singular triplets, spectra, principal
//!   angles, the norm-of-sum bound,
//! * [`fit`] — one- and K-term estimation at a fixed configuration,
//! * [`select`] — the IC scan and representation-gap diagnostics,
//! * [`sim`] — seeded generators and the Monte Carlo harness,
//! * [`image`] — PGM images, corruption, denoising and compression curves.

pub mod angles;
pub mod config;
pub mod error;
pub mod fit;
pub mod image;
pub mod matrix;
pub mod rearrange;
pub mod rng;
pub mod select;
pub mod sim;
pub mod spectral;

pub use config::{candidate_configs, ConfigLattice, Configuration};
pub use error::{KopaError, Result};
pub use fit::{fit_k_terms, fit_one_term, reconstruct, variance_explained, KopaModel, KroneckerTerm};
pub use matrix::{kron, pad_to_dyadic, unvectorize, vectorize, DenseMatrix};
pub use rearrange::{inverse_rearrange, rearrange};
pub use select::{
    information_criterion, representation_gap, select_configuration, two_term_diagnostics,
    Criterion, SelectionReport,
};
pub use spectral::{
    leading_triplet, singular_values, spectral_norm, top_k_triplets, IterationControl,
    SingularTriplet,
};
