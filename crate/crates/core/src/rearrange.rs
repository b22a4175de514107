//! The configuration-indexed rearrangement operator and its inverse.
//!
//! `rearrange` maps a 2^M × 2^N matrix C to a 2^{m+n} × 2^{m†+n†} matrix
//! whose row i·2^n + j is the row-stacked vectorization of block (i, j) when
//! C is viewed as a 2^m × 2^n grid of blocks. It is a bijection on entries
//! (an isometry under the Frobenius norm) and sends A ⊗ B to the rank-one
//! outer product vectorize(A)·vectorize(B)ᵀ.
//!
//! Both directions are implemented as closed-form index maps; no block
//! buffers are materialized.

use crate::config::Configuration;
use crate::error::{KopaError, Result};
use crate::matrix::DenseMatrix;

fn check_ambient(c: &DenseMatrix, cfg: Configuration) -> Result<()> {
    let (rows, cols) = cfg.ambient_shape();
    if c.rows() != rows || c.cols() != cols {
        return Err(KopaError::dim(format!(
            "matrix is {}x{} but configuration {} expects {}x{}",
            c.rows(),
            c.cols(),
            cfg,
            rows,
            cols
        )));
    }
    Ok(())
}

/// R_{m,n}[C]: output entry (i·q + j, k·q† + l) = C[i·p† + k, j·q† + l]
/// with p = 2^m, q = 2^n, p† = 2^{m†}, q† = 2^{n†}.
pub fn rearrange(c: &DenseMatrix, cfg: Configuration) -> Result<DenseMatrix> {
    check_ambient(c, cfg)?;
    let (_, q) = cfg.a_shape();
    let (bp, bq) = cfg.b_shape();
    let (out_rows, out_cols) = cfg.rearranged_shape();
    let src = c.data();
    let c_cols = c.cols();

    let mut out = vec![0.0; src.len()];
    // Walk the output row-major; each output row is a contiguous scan of one
    // block, bq entries at a time.
    for r in 0..out_rows {
        let i = r / q;
        let j = r % q;
        let dst_row = &mut out[r * out_cols..(r + 1) * out_cols];
        for k in 0..bp {
            let src_off = (i * bp + k) * c_cols + j * bq;
            dst_row[k * bq..(k + 1) * bq].copy_from_slice(&src[src_off..src_off + bq]);
        }
    }
    Ok(DenseMatrix::from_parts(out_rows, out_cols, out))
}

/// Inverse of [`rearrange`]; exact (bit-identical) round trip.
pub fn inverse_rearrange(r: &DenseMatrix, cfg: Configuration) -> Result<DenseMatrix> {
    let (exp_rows, exp_cols) = cfg.rearranged_shape();
    if r.rows() != exp_rows || r.cols() != exp_cols {
        return Err(KopaError::dim(format!(
            "rearranged matrix is {}x{} but configuration {} expects {}x{}",
            r.rows(),
            r.cols(),
            cfg,
            exp_rows,
            exp_cols
        )));
    }
    let (_, q) = cfg.a_shape();
    let (bp, bq) = cfg.b_shape();
    let (c_rows, c_cols) = cfg.ambient_shape();
    let src = r.data();

    let mut out = vec![0.0; src.len()];
    for row in 0..exp_rows {
        let i = row / q;
        let j = row % q;
        let src_row = &src[row * exp_cols..(row + 1) * exp_cols];
        for k in 0..bp {
            let dst_off = (i * bp + k) * c_cols + j * bq;
            out[dst_off..dst_off + bq].copy_from_slice(&src_row[k * bq..(k + 1) * bq]);
        }
    }
    Ok(DenseMatrix::from_parts(c_rows, c_cols, out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{kron, unvectorize, vectorize};
    use crate::rng::SeedStream;

    fn random_matrix(rows: usize, cols: usize, seed: u64) -> DenseMatrix {
        let mut rng = SeedStream::new(seed, &[0]);
        DenseMatrix::new(rows, cols, (0..rows * cols).map(|_| rng.normal()).collect()).unwrap()
    }

    #[test]
    fn full_split_is_vectorize_column() {
        let c = random_matrix(4, 8, 1);
        let cfg = Configuration::new(2, 3, 2, 3).unwrap();
        let r = rearrange(&c, cfg).unwrap();
        assert_eq!((r.rows(), r.cols()), (32, 1));
        assert_eq!(r.data(), vectorize(&c).as_slice());
    }

    #[test]
    fn trivial_split_is_vectorize_row() {
        let c = random_matrix(4, 8, 2);
        let cfg = Configuration::new(0, 0, 2, 3).unwrap();
        let r = rearrange(&c, cfg).unwrap();
        assert_eq!((r.rows(), r.cols()), (1, 32));
        assert_eq!(r.data(), vectorize(&c).as_slice());
    }

    #[test]
    fn kron_becomes_rank_one_outer_product() {
        let a = random_matrix(2, 2, 3);
        let b = random_matrix(2, 4, 4);
        let c = kron(&a, &b).unwrap();
        let cfg = Configuration::new(1, 1, 2, 3).unwrap();
        let r = rearrange(&c, cfg).unwrap();
        let va = vectorize(&a);
        let vb = vectorize(&b);
        for i in 0..va.len() {
            for j in 0..vb.len() {
                assert!(
                    (r.get(i, j) - va[i] * vb[j]).abs() <= 1e-15 * (va[i] * vb[j]).abs().max(1.0),
                    "entry ({i},{j})"
                );
            }
        }
    }

    #[test]
    fn round_trip_is_bit_exact() {
        let c = random_matrix(8, 8, 5);
        let cfg = Configuration::new(1, 2, 3, 3).unwrap();
        let r = rearrange(&c, cfg).unwrap();
        let back = inverse_rearrange(&r, cfg).unwrap();
        assert_eq!(back.data(), c.data());
    }

    #[test]
    fn inverse_of_outer_product_is_kron() {
        let a = random_matrix(2, 4, 6);
        let b = random_matrix(4, 2, 7);
        let va = vectorize(&a);
        let vb = vectorize(&b);
        let mut outer = DenseMatrix::zeros(va.len(), vb.len());
        for i in 0..va.len() {
            for j in 0..vb.len() {
                outer.set(i, j, va[i] * vb[j]);
            }
        }
        let cfg = Configuration::new(1, 2, 3, 3).unwrap();
        let c = inverse_rearrange(&outer, cfg).unwrap();
        let k = kron(&a, &b).unwrap();
        assert_eq!(c.data(), k.data());
        // and via unvectorize of the outer factors
        let a2 = unvectorize(&va, 2, 4).unwrap();
        let b2 = unvectorize(&vb, 4, 2).unwrap();
        assert_eq!(kron(&a2, &b2).unwrap().data(), k.data());
    }

    #[test]
    fn isometry_is_exact_entry_multiset() {
        let c = random_matrix(8, 16, 8);
        for cfg in crate::config::candidate_configs(3, 4).unwrap().iter() {
            let r = rearrange(&c, *cfg).unwrap();
            let mut xs: Vec<u64> = c.data().iter().map(|x| x.to_bits()).collect();
            let mut ys: Vec<u64> = r.data().iter().map(|x| x.to_bits()).collect();
            xs.sort_unstable();
            ys.sort_unstable();
            assert_eq!(xs, ys, "cfg {cfg}");
            // summation order differs, so compare norms to rounding only
            let (a, b) = (r.frob_norm_sq(), c.frob_norm_sq());
            assert!((a - b).abs() <= 1e-12 * b, "cfg {cfg}: {a} vs {b}");
        }
    }

    #[test]
    fn bilinearity_bit_exact() {
        let c1 = random_matrix(8, 8, 9);
        let c2 = random_matrix(8, 8, 10);
        let (a, b) = (0.37, -1.25);
        let cfg = Configuration::new(2, 1, 3, 3).unwrap();
        let lhs = rearrange(&c1.scale(a).add(&c2.scale(b)).unwrap(), cfg).unwrap();
        let rhs = rearrange(&c1, cfg)
            .unwrap()
            .scale(a)
            .add(&rearrange(&c2, cfg).unwrap().scale(b))
            .unwrap();
        assert_eq!(lhs.data(), rhs.data());
    }

    #[test]
    fn dimension_mismatch_errors() {
        let c = random_matrix(8, 8, 11);
        let cfg = Configuration::new(1, 1, 4, 3).unwrap();
        assert!(rearrange(&c, cfg).is_err());
        // (1,1) in ambient (3,3) expects a 4x16 rearranged matrix
        let r = random_matrix(8, 8, 12);
        let cfg2 = Configuration::new(1, 1, 3, 3).unwrap();
        assert!(inverse_rearrange(&r, cfg2).is_err());
    }

    #[test]
    fn matches_naive_block_copy_oracle() {
        let c = random_matrix(16, 8, 13);
        for cfg in crate::config::candidate_configs(4, 3).unwrap().iter() {
            let r = rearrange(&c, *cfg).unwrap();
            let (p, q) = cfg.a_shape();
            let (or, oc, odata) = kopa_testkit::naive_rearrange(16, 8, c.data(), p, q);
            assert_eq!((r.rows(), r.cols()), (or, oc));
            assert_eq!(r.data(), odata.as_slice());
        }
    }
}
