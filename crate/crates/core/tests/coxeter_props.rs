use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use subsys_core::catalog::{transposition, CatalogKey};
use subsys_core::coxeter::{p0_formula_agrees, perp_with_gram, phi_minus, phi_perp, phi_plus, phi_zero, tau};
use subsys_core::decompose::are_isomorphic;
use subsys_core::verify::random_system;
use subsys_core::{QSystem, Subspace};

fn system(seed: u64, n: usize, max_dim: usize) -> QSystem {
    random_system(&mut ChaCha8Rng::seed_from_u64(seed), n, max_dim)
}

fn sum_of(s: &QSystem, skip: Option<usize>) -> Subspace<subsys_core::GaussRat> {
    (0..s.n())
        .filter(|&i| Some(i) != skip)
        .fold(Subspace::zero(s.ambient_dim()), |acc, i| acc.sum(s.subspace(i)).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn kernel_basis_and_dimension(seed in any::<u64>(), n in 1usize..=5) {
        let s = system(seed, n, 5);
        let plus = phi_plus(&s).unwrap();
        prop_assert!(tau(&s).mul(&plus.kernel_basis).is_zero());
        let expected = s.dims().iter().sum::<usize>() - sum_of(&s, None).dim();
        prop_assert_eq!(plus.system.ambient_dim(), expected);
    }

    #[test]
    fn pair_intersection_lemma_all_permutations(seed in any::<u64>()) {
        let s = system(seed, 4, 5);
        for i in 1..=4 {
            for j in 1..=4 {
                let t = s.permute(&transposition(1, i)).unwrap().permute(&transposition(2, j)).unwrap();
                let plus = phi_plus(&t).unwrap().system;
                let lhs = plus.subspace(0).intersect(plus.subspace(1)).unwrap().dim();
                let rhs = t.subspace(2).intersect(t.subspace(3)).unwrap().dim();
                prop_assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn complementary_pair_gives_full_sum(seed in any::<u64>()) {
        let s = system(seed, 4, 5);
        let meet = s.subspace(2).intersect(s.subspace(3)).unwrap();
        let join = s.subspace(2).sum(s.subspace(3)).unwrap();
        if meet.is_zero() && join.is_full() {
            let plus = phi_plus(&s).unwrap().system;
            prop_assert!(plus.subspace(0).sum(plus.subspace(1)).unwrap().is_full());
        }
    }

    #[test]
    fn functors_commute_with_direct_sums(a in any::<u64>(), b in any::<u64>()) {
        let (s, t) = (system(a, 4, 3), system(b, 4, 3));
        let st = s.direct_sum(&t).unwrap();
        let lhs = phi_plus(&st).unwrap().system;
        let rhs = phi_plus(&s).unwrap().system.direct_sum(&phi_plus(&t).unwrap().system).unwrap();
        prop_assert!(are_isomorphic(&lhs, &rhs, a).unwrap().witness().is_some());
        let lhs = phi_minus(&st).unwrap().system;
        let rhs = phi_minus(&s).unwrap().system.direct_sum(&phi_minus(&t).unwrap().system).unwrap();
        prop_assert!(are_isomorphic(&lhs, &rhs, b).unwrap().witness().is_some());
        prop_assert!(phi_perp(&st) == phi_perp(&s).direct_sum(&phi_perp(&t)).unwrap());
    }

    #[test]
    fn vanishing_criterion_and_reduced_systems(seed in any::<u64>(), n in 2usize..=4) {
        let s = system(seed, n, 4);
        let plus = phi_plus(&s).unwrap().system;
        let criterion = (0..n).all(|k| s.subspace(k).intersect(&sum_of(&s, Some(k))).unwrap().is_zero());
        prop_assert_eq!(plus.ambient_dim() == 0, criterion);
        if s.reduced_above() && !s.is_zero() {
            prop_assert!(plus.ambient_dim() > 0);
        }
    }
}

#[test]
fn phi_plus_is_gram_perp_of_phi_zero() {
    let mut checked = 0;
    let mut formula = 0;
    for seed in 0..50u64 {
        let s = system(seed, 4, 5);
        let zero = phi_zero(&s).unwrap();
        let plus = phi_plus(&s).unwrap();
        assert!(perp_with_gram(&zero.system, &zero.gram).unwrap() == plus.system, "seed {seed}");
        checked += 1;
        if let Some(ok) = p0_formula_agrees(&s).unwrap() {
            assert!(ok, "seed {seed}");
            formula += 1;
        }
    }
    assert_eq!(checked, 50);
    assert!(formula > 0);
}

#[test]
fn catalog_duality_spot_checks() {
    for key in ["gp4:S(2k,-1).k=2.i=1", "gp4:S(2k+1,1).k=1.i=3", "gp4:S(2k,0;l).k=2.l=3+i"] {
        let s = key.parse::<CatalogKey>().unwrap().build().unwrap();
        assert!(s.reduced_above(), "{key}");
        let back = phi_minus(&phi_plus(&s).unwrap().system).unwrap().system;
        assert!(are_isomorphic(&back, &s, 0).unwrap().witness().is_some(), "{key}");
    }
}
