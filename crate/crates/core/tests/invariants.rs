use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use rpcheck_core::algebra::random::{random_element, Half};
use rpcheck_core::algebra::{theta, AlgebraConfig, AlgebraElement, Monomial, StateFunctional};
use rpcheck_core::linalg::{hermitian_eigen, CMat};
use rpcheck_core::pictures::{convolution_residual, dft_zd, star_product, cup_cap, Box22};
use rpcheck_core::reconstruction::time_shift;
use rpcheck_core::verifier::ensembles::theorem_hamiltonian;
use rpcheck_core::verifier::{coupling_decomposition, gram, plus_basis, DEFAULT_TOL};

fn config() -> impl Strategy<Value = AlgebraConfig> {
    (2u32..=4, prop::sample::select(vec![2usize, 4])).prop_map(|(d, m)| AlgebraConfig::new(d, m).unwrap())
}

fn element(cfg: &AlgebraConfig, seed: u64, half: Half) -> AlgebraElement {
    random_element(cfg, &mut ChaCha8Rng::seed_from_u64(seed), half, 4)
}

fn complex() -> impl Strategy<Value = Complex64> {
    (-1.0f64..1.0, -1.0f64..1.0).prop_map(|(re, im)| Complex64::new(re, im))
}

fn boxes() -> impl Strategy<Value = Box22> {
    (2usize..=3).prop_flat_map(|d| {
        prop::collection::vec(complex(), d.pow(4)).prop_map(move |v| Box22::new(d, CMat::from_vec(d * d, d * d, v)).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn reflection_is_an_involution(cfg in config(), seed in any::<u64>()) {
        let a = element(&cfg, seed, Half::Full);
        prop_assert!(theta(&theta(&a)).coeff_distance(&a) < 1e-12);
    }

    #[test]
    fn reflection_is_multiplicative(cfg in config(), seed in any::<u64>()) {
        let a = element(&cfg, seed, Half::Full);
        let b = element(&cfg, seed ^ 0x5555, Half::Full);
        let lhs = theta(&a.mul(&b).unwrap());
        let rhs = theta(&a).mul(&theta(&b)).unwrap();
        prop_assert!(lhs.coeff_distance(&rhs) < 1e-12);
        prop_assert!(lhs.rep_distance(&rhs) < 1e-12);
    }

    #[test]
    fn reflection_commutes_with_star(cfg in config(), seed in any::<u64>()) {
        let a = element(&cfg, seed, Half::Full);
        prop_assert!(theta(&a.star()).coeff_distance(&theta(&a).star()) < 1e-12);
    }

    #[test]
    fn reflection_swaps_halves(cfg in config(), seed in any::<u64>()) {
        prop_assert!(theta(&element(&cfg, seed, Half::Plus)).in_minus());
        prop_assert!(theta(&element(&cfg, seed, Half::Minus)).in_plus());
    }

    #[test]
    fn symbolic_product_matches_matrices(cfg in config(), seed in any::<u64>()) {
        let a = element(&cfg, seed, Half::Full);
        let b = element(&cfg, seed.wrapping_add(1), Half::Full);
        let ab = a.mul(&b).unwrap();
        prop_assert!(ab.rep_residual() < 1e-12);
        prop_assert!(a.star().rep_residual() < 1e-12);
    }

    #[test]
    fn gram_spectrum_ignores_basis_order(seed in any::<u64>(), beta in 0.1f64..2.0, rotate in 0usize..16) {
        let cfg = AlgebraConfig::new(2, 4).unwrap();
        let h = theorem_hamiltonian(&cfg, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        let state = StateFunctional::gibbs(&h, beta).unwrap();
        let mut basis = plus_basis(&cfg, None).unwrap();
        let a = gram(&state, &basis, DEFAULT_TOL).unwrap();
        let k = rotate % basis.len();
        basis.rotate_left(k);
        let last = basis.len() - 1;
        basis.swap(0, last);
        let b = gram(&state, &basis, DEFAULT_TOL).unwrap();
        for (x, y) in a.eigenvalues.iter().zip(&b.eigenvalues) {
            prop_assert!((x - y).abs() < 1e-12);
        }
        prop_assert_eq!(a.verdict, b.verdict);
    }

    #[test]
    fn decomposition_reassembles(cfg in config(), seed in any::<u64>()) {
        let x = element(&cfg, seed, Half::Full);
        let h = x.add(&x.star()).unwrap();
        let dec = coupling_decomposition(&h).unwrap();
        prop_assert!(dec.reassemble().unwrap().coeff_distance(&h) < 1e-12);
    }

    #[test]
    fn shifts_compose(exps in prop::collection::vec(0i64..3, 6), a in 0i64..4, b in 0i64..4) {
        let cfg = AlgebraConfig::new(3, 6).unwrap();
        let mut e = exps;
        e[..3].iter_mut().for_each(|x| *x = 0);
        let k = Monomial::new(&cfg, &e).unwrap();
        let stepwise = time_shift(&k, a).unwrap().and_then(|s| time_shift(&s, b).unwrap());
        prop_assert_eq!(stepwise, time_shift(&k, a + b).unwrap());
    }

    #[test]
    fn rotated_reflection_is_adjoint(t in boxes()) {
        prop_assert_eq!(t.theta().rot_pi(), t.adjoint());
    }

    #[test]
    fn sft_has_order_four(t in boxes()) {
        prop_assert_eq!(t.sft().sft().sft().sft(), t.clone());
        prop_assert_eq!(t.sft().sft_inv(), t);
    }

    #[test]
    fn sft_is_linear(s in boxes(), z in complex()) {
        let t = Box22::identity(s.d());
        let lhs = s.scale(z).add(&t).unwrap().sft();
        let rhs = s.sft().scale(z).add(&t.sft()).unwrap();
        prop_assert!(lhs.distance(&rhs) < 1e-15);
    }

    #[test]
    fn horizontal_unit(t in boxes()) {
        prop_assert!(star_product(&t, &cup_cap(t.d())).unwrap().distance(&t) < 1e-14);
    }

    #[test]
    fn convolution_theorem(v in (2usize..=4).prop_flat_map(|d| (prop::collection::vec(complex(), d), prop::collection::vec(complex(), d)))) {
        prop_assert!(convolution_residual(&v.0, &v.1).unwrap() < 1e-12);
        let twice = dft_zd(&dft_zd(&v.0));
        let d = v.0.len();
        for (j, z) in twice.iter().enumerate() {
            prop_assert!((z - v.0[(d - j) % d] * d as f64).norm() < 1e-12);
        }
    }

    #[test]
    fn gibbs_gram_is_hermitian(seed in any::<u64>(), beta in 0.1f64..2.0) {
        let cfg = AlgebraConfig::new(3, 2).unwrap();
        let h = theorem_hamiltonian(&cfg, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        let state = StateFunctional::gibbs(&h, beta).unwrap();
        let g = gram(&state, &plus_basis(&cfg, None).unwrap(), DEFAULT_TOL).unwrap();
        prop_assert!(g.hermiticity_defect < 1e-12);
        let (values, _) = hermitian_eigen(&g.matrix);
        prop_assert!(values[0] >= -1e-9);
    }
}
