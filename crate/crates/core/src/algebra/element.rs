use std::collections::BTreeMap;

use num_complex::Complex64;

use super::monomial::{Monomial, MonomialRep};
use super::AlgebraConfig;
use crate::error::{Error, Result};
use crate::linalg::{max_abs, CMat};

/// Sums that cancel below this fraction of their absolute mass are dropped.
const CANCEL_EPS: f64 = 8.0 * f64::EPSILON;

#[derive(Debug, Clone)]
pub struct AlgebraElement {
    cfg: AlgebraConfig,
    coeffs: BTreeMap<Monomial, Complex64>,
    rep: CMat,
}

#[derive(Default)]
struct Accumulator(BTreeMap<Monomial, (Complex64, f64)>);

impl Accumulator {
    fn push(&mut self, k: Monomial, c: Complex64) {
        let entry = self.0.entry(k).or_insert((Complex64::new(0.0, 0.0), 0.0));
        entry.0 += c;
        entry.1 += c.norm();
    }

    fn finish(self) -> BTreeMap<Monomial, Complex64> {
        self.0
            .into_iter()
            .filter(|(_, (c, mass))| c.norm() > CANCEL_EPS * mass)
            .map(|(k, (c, _))| (k, c))
            .collect()
    }
}

fn rebuild(cfg: &AlgebraConfig, coeffs: &BTreeMap<Monomial, Complex64>) -> CMat {
    let n = cfg.dim();
    let mut rep = CMat::zeros(n, n);
    for (k, &c) in coeffs {
        MonomialRep::new(cfg, k).add_to(&mut rep, c);
    }
    rep
}

impl AlgebraElement {
    fn from_table(cfg: AlgebraConfig, coeffs: BTreeMap<Monomial, Complex64>) -> Self {
        let rep = rebuild(&cfg, &coeffs);
        AlgebraElement { cfg, coeffs, rep }
    }

    pub fn from_terms(
        cfg: &AlgebraConfig,
        terms: impl IntoIterator<Item = (Complex64, Monomial)>,
    ) -> Result<Self> {
        let mut acc = Accumulator::default();
        for (c, k) in terms {
            if k.len() != cfg.m() || k.exponents().iter().any(|&e| e >= cfg.d()) {
                return Err(Error::InvalidArgument(format!(
                    "monomial {k} does not belong to the algebra"
                )));
            }
            acc.push(k, c);
        }
        Ok(Self::from_table(*cfg, acc.finish()))
    }

    pub fn from_monomial(cfg: &AlgebraConfig, k: Monomial) -> Result<Self> {
        Self::from_terms(cfg, [(Complex64::new(1.0, 0.0), k)])
    }

    /// `c_1^{k_1} ··· c_m^{k_m}`, exponents taken mod d.
    pub fn monomial(cfg: &AlgebraConfig, k: &[i64]) -> Result<Self> {
        Self::from_monomial(cfg, Monomial::new(cfg, k)?)
    }

    pub fn scalar(cfg: &AlgebraConfig, z: Complex64) -> Self {
        let mut coeffs = BTreeMap::new();
        if z != Complex64::new(0.0, 0.0) {
            coeffs.insert(Monomial::identity(cfg), z);
        }
        Self::from_table(*cfg, coeffs)
    }

    pub fn identity(cfg: &AlgebraConfig) -> Self {
        Self::scalar(cfg, Complex64::new(1.0, 0.0))
    }

    pub fn zero(cfg: &AlgebraConfig) -> Self {
        Self::scalar(cfg, Complex64::new(0.0, 0.0))
    }

    /// `c_j`, counted from 1.
    pub fn generator(cfg: &AlgebraConfig, j: usize) -> Result<Self> {
        Self::from_monomial(cfg, Monomial::generator(cfg, j)?)
    }

    pub fn cfg(&self) -> &AlgebraConfig {
        &self.cfg
    }

    pub fn coeffs(&self) -> &BTreeMap<Monomial, Complex64> {
        &self.coeffs
    }

    pub fn coeff(&self, k: &Monomial) -> Complex64 {
        self.coeffs.get(k).copied().unwrap_or_default()
    }

    pub fn rep(&self) -> &CMat {
        &self.rep
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Common grade of all terms, `None` when mixed. Zero has grade 0.
    pub fn grade(&self) -> Option<u32> {
        let mut grades = self.coeffs.keys().map(|k| k.grade(self.cfg.d()));
        let first = grades.next().unwrap_or(0);
        grades.all(|g| g == first).then_some(first)
    }

    /// Homogeneous components keyed by grade.
    pub fn grade_parts(&self) -> BTreeMap<u32, AlgebraElement> {
        let mut tables: BTreeMap<u32, BTreeMap<Monomial, Complex64>> = BTreeMap::new();
        for (k, &c) in &self.coeffs {
            tables
                .entry(k.grade(self.cfg.d()))
                .or_default()
                .insert(k.clone(), c);
        }
        tables
            .into_iter()
            .map(|(g, t)| (g, Self::from_table(self.cfg, t)))
            .collect()
    }

    pub fn in_plus(&self) -> bool {
        self.coeffs.keys().all(Monomial::in_plus)
    }

    pub fn in_minus(&self) -> bool {
        self.coeffs.keys().all(Monomial::in_minus)
    }

    fn same_cfg(&self, other: &AlgebraElement) -> Result<()> {
        if self.cfg == other.cfg {
            Ok(())
        } else {
            Err(Error::ConfigMismatch)
        }
    }

    pub fn add(&self, other: &AlgebraElement) -> Result<AlgebraElement> {
        self.same_cfg(other)?;
        let mut acc = Accumulator::default();
        for (k, &c) in self.coeffs.iter().chain(&other.coeffs) {
            acc.push(k.clone(), c);
        }
        Ok(AlgebraElement {
            cfg: self.cfg,
            coeffs: acc.finish(),
            rep: &self.rep + &other.rep,
        })
    }

    pub fn sub(&self, other: &AlgebraElement) -> Result<AlgebraElement> {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, z: Complex64) -> AlgebraElement {
        let coeffs = self
            .coeffs
            .iter()
            .map(|(k, &c)| (k.clone(), c * z))
            .filter(|(_, c)| *c != Complex64::new(0.0, 0.0))
            .collect();
        AlgebraElement {
            cfg: self.cfg,
            coeffs,
            rep: &self.rep * z,
        }
    }

    pub fn mul(&self, other: &AlgebraElement) -> Result<AlgebraElement> {
        self.same_cfg(other)?;
        let d = self.cfg.d();
        let mut acc = Accumulator::default();
        for (a, &ca) in &self.coeffs {
            for (b, &cb) in &other.coeffs {
                let (e, ab) = a.mul(b, d);
                acc.push(ab, ca * cb * self.cfg.q_pow(e));
            }
        }
        Ok(AlgebraElement {
            cfg: self.cfg,
            coeffs: acc.finish(),
            rep: &self.rep * &other.rep,
        })
    }

    /// Adjoint: conjugated coefficients on reversed products.
    pub fn star(&self) -> AlgebraElement {
        let d = self.cfg.d();
        let mut acc = Accumulator::default();
        for (k, &c) in &self.coeffs {
            let (e, ks) = k.star(d);
            acc.push(ks, c.conj() * self.cfg.q_pow(e));
        }
        AlgebraElement {
            cfg: self.cfg,
            coeffs: acc.finish(),
            rep: self.rep.adjoint(),
        }
    }

    /// Largest coefficient difference.
    pub fn coeff_distance(&self, other: &AlgebraElement) -> f64 {
        let mut worst: f64 = 0.0;
        for (k, &c) in &self.coeffs {
            worst = worst.max((c - other.coeff(k)).norm());
        }
        for (k, &c) in &other.coeffs {
            worst = worst.max((c - self.coeff(k)).norm());
        }
        worst
    }

    /// Largest matrix-entry difference.
    pub fn rep_distance(&self, other: &AlgebraElement) -> f64 {
        max_abs(&(&self.rep - &other.rep))
    }

    /// Distance of `A` from `A^*` in coefficients.
    pub fn star_defect(&self) -> f64 {
        self.coeff_distance(&self.star())
    }

    /// Mismatch between the stored matrix and the one rebuilt from coefficients.
    pub fn rep_residual(&self) -> f64 {
        max_abs(&(&self.rep - rebuild(&self.cfg, &self.coeffs)))
    }

    pub fn max_coeff(&self) -> f64 {
        self.coeffs.values().fold(0.0, |acc, c| acc.max(c.norm()))
    }
}

/// Generators `c_1 … c_m`.
pub fn build_algebra(cfg: &AlgebraConfig) -> Result<Vec<AlgebraElement>> {
    (1..=cfg.m())
        .map(|j| AlgebraElement::generator(cfg, j))
        .collect()
}

/// Antilinear reflection with `Θ(c_j) = c_{m+1-j}^*`, exchanging the halves.
pub fn theta(a: &AlgebraElement) -> AlgebraElement {
    let d = a.cfg.d();
    let mut acc = Accumulator::default();
    for (k, &c) in &a.coeffs {
        let (e, kt) = k.theta(d);
        acc.push(kt, c.conj() * a.cfg.q_pow(e));
    }
    AlgebraElement::from_table(a.cfg, acc.finish())
}

/// Graded product of `a ∈ 𝔄₋` and `b ∈ 𝔄₊`.
///
/// A homogeneous `a` of grade `g` is the reflection of an element of grade
/// `-g`, and the pair picks up `zeta^((-g)·h)` against grade `h` of `b`. At
/// d = 2 this is `zeta^(g·h)`; on even parts it is the plain product.
pub fn twisted_product(a: &AlgebraElement, b: &AlgebraElement) -> Result<AlgebraElement> {
    a.same_cfg(b)?;
    if !a.in_minus() {
        return Err(Error::WrongHalf { expected: "minus" });
    }
    if !b.in_plus() {
        return Err(Error::WrongHalf { expected: "plus" });
    }
    let cfg = a.cfg;
    let d = cfg.d();
    let mut acc = Accumulator::default();
    for (ka, &ca) in &a.coeffs {
        let preimage = ((d - ka.grade(d)) % d) as i64;
        for (kb, &cb) in &b.coeffs {
            let (e, kab) = ka.mul(kb, d);
            let twist = cfg.zeta_pow(preimage * kb.grade(d) as i64);
            acc.push(kab, ca * cb * cfg.q_pow(e) * twist);
        }
    }
    Ok(AlgebraElement::from_table(cfg, acc.finish()))
}
