//! Seeded Hamiltonian families for the positivity suites.
//!
//! Every family is reflection symmetric and star-invariant:
//! `H = h + Θ(h) - (X + X*)` with `h` neutral in the positive half and
//! `X = Σ K_kl Θ(B_k)∘B_l` over positive-half monomials of matching grade.
//! Taking each grade block of `K` PSD gives the theorem class; taking it
//! Hermitian but indefinite gives couplings that usually fail the criterion.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::Rng;

use crate::algebra::random::{random_coeff, random_element, Half};
use crate::algebra::{theta, twisted_product, AlgebraConfig, AlgebraElement, Monomial};
use crate::error::Result;
use crate::linalg::CMat;

use super::plus_basis;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CouplingKind {
    Psd,
    Indefinite,
}

fn grade_classes(cfg: &AlgebraConfig) -> Result<BTreeMap<u32, Vec<Monomial>>> {
    let mut classes: BTreeMap<u32, Vec<Monomial>> = BTreeMap::new();
    for k in plus_basis(cfg, None)? {
        if !k.is_identity() {
            classes.entry(k.grade(cfg.d())).or_default().push(k);
        }
    }
    Ok(classes)
}

fn random_block<R: Rng + ?Sized>(rng: &mut R, n: usize, kind: CouplingKind) -> CMat {
    let w = CMat::from_fn(n, n, |_, _| random_coeff(rng));
    match kind {
        CouplingKind::Psd => {
            let rank = rng.gen_range(1..=n);
            let w = w.rows(0, rank).into_owned();
            w.adjoint() * w / Complex64::new(n as f64, 0.0)
        }
        CouplingKind::Indefinite => (&w + w.adjoint()) / Complex64::new(2.0 * n as f64, 0.0),
    }
}

/// `Σ K_kl Θ(B_k)∘B_l` over one block.
pub fn cross_sum(cfg: &AlgebraConfig, monomials: &[Monomial], k: &CMat) -> Result<AlgebraElement> {
    let mut total = AlgebraElement::zero(cfg);
    let elements: Vec<AlgebraElement> = monomials
        .iter()
        .map(|b| AlgebraElement::from_monomial(cfg, b.clone()))
        .collect::<Result<_>>()?;
    for (a, left) in elements.iter().enumerate() {
        let reflected = theta(left);
        for (b, right) in elements.iter().enumerate() {
            if k[(a, b)] == Complex64::new(0.0, 0.0) {
                continue;
            }
            total = total.add(&twisted_product(&reflected, right)?.scale(k[(a, b)]))?;
        }
    }
    Ok(total)
}

/// Neutral Hermitian element of the positive half.
pub fn neutral_plus_term<R: Rng + ?Sized>(cfg: &AlgebraConfig, rng: &mut R) -> Result<AlgebraElement> {
    let d = cfg.d();
    let terms: Vec<(Complex64, Monomial)> = plus_basis(cfg, None)?
        .into_iter()
        .filter(|k| !k.is_identity() && k.grade(d) == 0)
        .map(|k| (random_coeff(rng), k))
        .collect();
    let h = AlgebraElement::from_terms(cfg, terms)?;
    Ok(h.add(&h.star())?.scale(Complex64::new(0.5, 0.0)))
}

pub fn reflection_symmetric_hamiltonian<R: Rng + ?Sized>(
    cfg: &AlgebraConfig,
    rng: &mut R,
    kind: CouplingKind,
) -> Result<AlgebraElement> {
    let h = neutral_plus_term(cfg, rng)?;
    let mut x = AlgebraElement::zero(cfg);
    for monomials in grade_classes(cfg)?.values() {
        let k = random_block(rng, monomials.len(), kind);
        x = x.add(&cross_sum(cfg, monomials, &k)?)?;
    }
    h.add(&theta(&h))?.sub(&x.add(&x.star())?)
}

/// Theorem class: zero residual and PSD coupling.
pub fn theorem_hamiltonian<R: Rng + ?Sized>(cfg: &AlgebraConfig, rng: &mut R) -> Result<AlgebraElement> {
    reflection_symmetric_hamiltonian(cfg, rng, CouplingKind::Psd)
}

/// Star-invariant Hamiltonian with arbitrary terms, neutral or not.
pub fn generic_hamiltonian<R: Rng + ?Sized>(cfg: &AlgebraConfig, rng: &mut R, terms: usize) -> Result<AlgebraElement> {
    let x = random_element(cfg, rng, Half::Full, terms);
    x.add(&x.star())
}
