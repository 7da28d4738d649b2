//! Seeded random elements for property suites.

use num_complex::Complex64;
use rand::Rng;

use super::element::AlgebraElement;
use super::monomial::Monomial;
use super::AlgebraConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Half {
    Minus,
    Plus,
    Full,
}

pub fn random_coeff<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

pub fn random_monomial<R: Rng + ?Sized>(cfg: &AlgebraConfig, rng: &mut R, half: Half) -> Monomial {
    let m = cfg.m();
    let range = match half {
        Half::Minus => 0..m / 2,
        Half::Plus => m / 2..m,
        Half::Full => 0..m,
    };
    let k: Vec<i64> = (0..m)
        .map(|j| {
            if range.contains(&j) {
                rng.gen_range(0..cfg.d() as i64)
            } else {
                0
            }
        })
        .collect();
    Monomial::new(cfg, &k).expect("length matches")
}

/// Sum of `terms` random monomials with coefficients in the unit square.
pub fn random_element<R: Rng + ?Sized>(
    cfg: &AlgebraConfig,
    rng: &mut R,
    half: Half,
    terms: usize,
) -> AlgebraElement {
    let items: Vec<_> = (0..terms)
        .map(|_| (random_coeff(rng), random_monomial(cfg, rng, half)))
        .collect();
    AlgebraElement::from_terms(cfg, items).expect("monomials belong to cfg")
}
