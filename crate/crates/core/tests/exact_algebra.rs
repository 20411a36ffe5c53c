use proptest::prelude::*;

use subsys_core::poly::{factor_over_gaussian_rationals, minimal_polynomial};
use subsys_core::{Field, GaussRat, Polynomial, QMatrix, Subspace};

fn scalar() -> impl Strategy<Value = GaussRat> {
    (-3i64..=3, -2i64..=2, 1i64..=3).prop_map(|(a, b, d)| {
        let d = if d == 3 { 1 } else { d };
        &GaussRat::gaussian(a, b) * &GaussRat::ratio(1, d)
    })
}

/// Sparse-ish entries so that rank deficiency is common.
fn entry() -> impl Strategy<Value = GaussRat> {
    prop_oneof![2 => Just(GaussRat::zero()), 3 => scalar()]
}

fn matrix(max: usize) -> impl Strategy<Value = QMatrix> {
    (1..=max, 1..=max).prop_flat_map(|(r, c)| {
        proptest::collection::vec(entry(), r * c).prop_map(move |v| QMatrix::from_vec(r, c, v))
    })
}

fn square(max: usize) -> impl Strategy<Value = QMatrix> {
    (1..=max).prop_flat_map(|n| proptest::collection::vec(entry(), n * n).prop_map(move |v| QMatrix::from_vec(n, n, v)))
}

fn subspace_pair(max: usize) -> impl Strategy<Value = (Subspace<GaussRat>, Subspace<GaussRat>, Subspace<GaussRat>)> {
    (1..=max, 0..=max, 0..=max, 0..=max).prop_flat_map(|(d, ka, kb, kc)| {
        let vecs = move |k: usize| proptest::collection::vec(proptest::collection::vec(entry(), d), k.min(d));
        (vecs(ka), vecs(kb), vecs(kc)).prop_map(move |(a, b, c)| {
            (Subspace::span_vectors(d, &a), Subspace::span_vectors(d, &b), Subspace::span_vectors(d, &c))
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn nullspace_is_annihilated_and_rank_nullity_holds(m in matrix(6)) {
        let k = m.nullspace();
        prop_assert!(m.mul(&k).is_zero());
        prop_assert_eq!(m.rank() + k.cols(), m.cols());
    }

    #[test]
    fn rref_is_idempotent(m in matrix(6)) {
        let (r, piv) = m.rref();
        let (rr, piv2) = r.rref();
        prop_assert!(rr == r);
        prop_assert_eq!(piv, piv2);
    }

    #[test]
    fn minimal_polynomial_annihilates(m in square(5)) {
        let p = minimal_polynomial(&m).unwrap();
        prop_assert!(p.eval_matrix(&m).is_zero());
        prop_assert!(p.degree() <= m.rows());
        prop_assert!(p.is_monic());
    }

    #[test]
    fn factorisation_multiplies_back(roots in proptest::collection::vec(scalar(), 1..5), extra in -3i64..=3) {
        let mut p = roots.iter().fold(Polynomial::one(), |acc, r| acc.mul(&Polynomial::linear(r)));
        // A quadratic factor that usually has no root in ℚ(i).
        p = p.mul(&Polynomial::from_i64(&[extra, 0, 1]));
        let f = factor_over_gaussian_rationals(&p).unwrap();
        prop_assert!(f.product() == p);
        for r in &roots {
            prop_assert!(f.factors.iter().any(|(l, _)| l.eval(r).is_zero()));
        }
    }

    #[test]
    fn modular_law((a, b, _) in subspace_pair(5)) {
        let meet = a.intersect(&b).unwrap();
        let join = a.sum(&b).unwrap();
        prop_assert_eq!(meet.dim() + join.dim(), a.dim() + b.dim());
    }

    #[test]
    fn orthocomplement_laws((a, b, _) in subspace_pair(5)) {
        prop_assert!(a.orthocomplement().orthocomplement() == a);
        let ab_perp = a.sum(&b).unwrap().orthocomplement();
        prop_assert!(ab_perp == a.orthocomplement().intersect(&b.orthocomplement()).unwrap());
        let meet_perp = a.intersect(&b).unwrap().orthocomplement();
        prop_assert!(meet_perp == a.orthocomplement().sum(&b.orthocomplement()).unwrap());
    }

    #[test]
    fn lattice_operations_commute_and_associate((a, b, c) in subspace_pair(4)) {
        prop_assert!(a.sum(&b).unwrap() == b.sum(&a).unwrap());
        prop_assert!(a.intersect(&b).unwrap() == b.intersect(&a).unwrap());
        prop_assert!(a.sum(&b).unwrap().sum(&c).unwrap() == a.sum(&b.sum(&c).unwrap()).unwrap());
        prop_assert!(
            a.intersect(&b).unwrap().intersect(&c).unwrap() == a.intersect(&b.intersect(&c).unwrap()).unwrap()
        );
    }
}

#[test]
fn scalar_text_round_trip() {
    for text in ["3", "-1/2i", "2+1/3i", "i", "-i", "0", "-7/3-2/5i"] {
        let g: GaussRat = text.parse().unwrap();
        assert_eq!(g.to_string(), text);
    }
}
