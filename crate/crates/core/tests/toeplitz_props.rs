use num_rational::Rational64;
use proptest::prelude::*;

use subsys_core::toeplitz::{
    exotic_report, fredholm_index, kernel_dims, operator_index, region_classify, toeplitz_idempotent_law,
    is_upper_triangular_toeplitz, LaurentSymbol,
};
use subsys_core::{Field, GaussRat, QMatrix};

fn coeff() -> impl Strategy<Value = GaussRat> {
    (-3i64..=3, -2i64..=2).prop_map(|(a, b)| GaussRat::gaussian(a, b))
}

fn symbol() -> impl Strategy<Value = LaurentSymbol> {
    (-2i64..=0, proptest::collection::vec(coeff(), 1..=4))
        .prop_filter_map("zero symbol", |(lo, cs)| {
            let terms: Vec<_> = cs.into_iter().enumerate().map(|(k, c)| (lo + k as i64, c)).collect();
            LaurentSymbol::scalar(&terms).ok()
        })
}

/// `m = Σ cₖ Nᵏ` for the nilpotent shift `N` of size `n`.
fn toeplitz(n: usize, first_row: &[GaussRat]) -> QMatrix {
    QMatrix::from_fn(n, n, |i, j| if j >= i { first_row[j - i].clone() } else { GaussRat::zero() })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn winding_index_matches_kernel_counts(sym in symbol()) {
        let rep = fredholm_index(&sym, 256).unwrap();
        prop_assume!(rep.fredholm);
        let kd = kernel_dims(&sym, 200).unwrap();
        prop_assume!(kd.certified);
        prop_assert_eq!(rep.index, Some(kd.ker as i64 - kd.coker as i64));
    }

    #[test]
    fn adjoint_negates_index(sym in symbol()) {
        if let (Ok((a, _)), Ok((b, _))) = (operator_index(&sym), operator_index(&sym.adjoint())) {
            prop_assert_eq!(a, -b);
        }
    }

    #[test]
    fn region_defect_is_locally_constant(re in -15i64..=25, im in -15i64..=15) {
        let alpha = &GaussRat::gaussian(re, im) * &GaussRat::ratio(1, 10);
        let nudged = &alpha + &GaussRat::ratio(1, 1000);
        // Skip points within the perturbation of a boundary circle.
        let near = |z: &GaussRat| {
            let r = z.to_c64().norm();
            (r - 1.0).abs() < 2e-3
        };
        prop_assume!(!near(&alpha) && !near(&(&alpha - &GaussRat::one())));
        let a = region_classify(&alpha).unwrap();
        let b = region_classify(&nudged).unwrap();
        prop_assert_eq!(a, b);
        prop_assert!(a == Rational64::new(0, 1) || a == Rational64::new(-1, 3) || a == Rational64::new(-2, 3));
    }

    #[test]
    fn idempotent_toeplitz_matrices_are_trivial(n in 1usize..=6, row in proptest::collection::vec(prop_oneof![Just(GaussRat::zero()), Just(GaussRat::one()), coeff()], 6)) {
        let m = toeplitz(n, &row);
        prop_assert!(is_upper_triangular_toeplitz(&m));
        prop_assert!(toeplitz_idempotent_law(&m));
        if m.mul(&m) == m {
            prop_assert!(m.is_zero() || m.is_identity());
        }
    }
}

#[test]
fn non_toeplitz_idempotent_is_outside_the_law() {
    let p = QMatrix::from_i64_rows(&[&[1, 1], &[0, 0]]);
    assert_eq!(p.mul(&p), p);
    assert!(!is_upper_triangular_toeplitz(&p));
}

#[test]
fn exotic_defect_estimate_is_stable_for_large_truncations() {
    let gamma = GaussRat::int(2);
    let estimates: Vec<_> = [16, 20, 24]
        .iter()
        .map(|&n| exotic_report(&gamma, n, 1e-6).unwrap().defect_estimate)
        .collect();
    assert!(estimates.windows(2).all(|w| w[0] == w[1]), "{estimates:?}");
}
