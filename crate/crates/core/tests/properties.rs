//! Property tests for the algebraic invariants.

use kopa_core::matrix::{kron, pad_to_dyadic, unvectorize, vectorize, DenseMatrix};
use kopa_core::rearrange::{inverse_rearrange, rearrange};
use kopa_core::rng::SeedStream;
use kopa_core::{fit_one_term, Configuration, IterationControl};
use proptest::prelude::*;

fn matrix_strategy(max_exp: u32) -> impl Strategy<Value = (DenseMatrix, u32, u32)> {
    (0..=max_exp, 0..=max_exp, any::<u64>()).prop_map(|(bm, bn, seed)| {
        let rows = 1usize << bm;
        let cols = 1usize << bn;
        let mut rng = SeedStream::new(seed, &[0xAB]);
        (
            DenseMatrix::new(rows, cols, rng.normal_vec(rows * cols)).unwrap(),
            bm,
            bn,
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn rearrange_round_trip_bit_exact((c, bm, bn) in matrix_strategy(4), m in 0u32..=4, n in 0u32..=4) {
        let m = m.min(bm);
        let n = n.min(bn);
        let cfg = Configuration::new(m, n, bm, bn).unwrap();
        let r = rearrange(&c, cfg).unwrap();
        let back = inverse_rearrange(&r, cfg).unwrap();
        prop_assert_eq!(back.data(), c.data());
    }

    #[test]
    fn rearrange_is_entry_permutation((c, bm, bn) in matrix_strategy(4), m in 0u32..=4, n in 0u32..=4) {
        let cfg = Configuration::new(m.min(bm), n.min(bn), bm, bn).unwrap();
        let r = rearrange(&c, cfg).unwrap();
        let mut a: Vec<u64> = c.data().iter().map(|x| x.to_bits()).collect();
        let mut b: Vec<u64> = r.data().iter().map(|x| x.to_bits()).collect();
        a.sort_unstable();
        b.sort_unstable();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn vectorize_round_trip((c, _, _) in matrix_strategy(3)) {
        let v = vectorize(&c);
        let back = unvectorize(&v, c.rows(), c.cols()).unwrap();
        prop_assert_eq!(back.data(), c.data());
    }

    #[test]
    fn kron_rank_one_rearrangement(sa in any::<u64>(), sb in any::<u64>(),
                                   am in 0u32..=2, an in 0u32..=2, bm in 0u32..=2, bn in 0u32..=2) {
        let (ar, ac) = (1usize << am, 1usize << an);
        let (br, bc) = (1usize << bm, 1usize << bn);
        let mut ra = SeedStream::new(sa, &[1]);
        let mut rb = SeedStream::new(sb, &[2]);
        let a = DenseMatrix::new(ar, ac, ra.normal_vec(ar * ac)).unwrap();
        let b = DenseMatrix::new(br, bc, rb.normal_vec(br * bc)).unwrap();
        let prod = kron(&a, &b).unwrap();
        let cfg = Configuration::new(am, an, am + bm, an + bn).unwrap();
        let r = rearrange(&prod, cfg).unwrap();
        let va = vectorize(&a);
        let vb = vectorize(&b);
        for i in 0..va.len() {
            for j in 0..vb.len() {
                let want = va[i] * vb[j];
                prop_assert!((r.get(i, j) - want).abs() <= 1e-12 * want.abs().max(1.0));
            }
        }
    }

    #[test]
    fn pad_preserves_entries_and_energy(rows in 1usize..=9, cols in 1usize..=9, seed in any::<u64>()) {
        let mut rng = SeedStream::new(seed, &[3]);
        let a = DenseMatrix::new(rows, cols, rng.normal_vec(rows * cols)).unwrap();
        let p = pad_to_dyadic(&a);
        prop_assert!(p.rows().is_power_of_two() && p.cols().is_power_of_two());
        prop_assert!(p.rows() >= rows && p.cols() >= cols);
        prop_assert_eq!(p.frob_norm_sq(), a.frob_norm_sq());
        for i in 0..rows {
            for j in 0..cols {
                prop_assert_eq!(p.get(i, j), a.get(i, j));
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    /// ‖Y‖² = λ̂² + ‖Y − Ŷ‖² to 1e-8 relative, for any configuration.
    #[test]
    fn one_term_energy_decomposition(seed in any::<u64>(), m in 0u32..=3, n in 0u32..=3) {
        let (bm, bn) = (3u32, 3u32);
        let mut rng = SeedStream::new(seed, &[4]);
        let y = DenseMatrix::new(8, 8, rng.normal_vec(64)).unwrap();
        let cfg = Configuration::new(m.min(bm), n.min(bn), bm, bn).unwrap();
        let model = fit_one_term(&y, cfg, IterationControl::default()).unwrap();
        let recon = kopa_core::reconstruct(&model);
        let resid = recon.sub(&y).unwrap().frob_norm_sq();
        let lam2 = model.terms[0].lambda * model.terms[0].lambda;
        let total = y.frob_norm_sq();
        prop_assert!(((resid + lam2) - total).abs() <= 1e-8 * total,
            "{resid} + {lam2} vs {total}");
    }
}
