use std::collections::HashMap;
use std::fmt;

use num_complex::Complex64;

use crate::algebra::{AlgebraConfig, Monomial, StateFunctional};
use crate::error::{check_cap, Error, Result};
use crate::linalg::{hermitian_eigen, hermitian_part, hermiticity_defect, quadratic_form, CMat, CVec, PsdCheck};
use crate::verdict::Verdict;

pub const DEFAULT_TOL: f64 = 1e-10;

/// Above this the raw form is reported as not Hermitian.
const HERMITICITY_WARNING: f64 = 1e-8;
const REFLECTION_GATE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum BasisLabel {
    Monomial(Monomial),
    Site(usize),
    TestFunction(usize),
    /// Product of field values at the listed sites; empty is the constant 1.
    Wick(Vec<usize>),
}

impl fmt::Display for BasisLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BasisLabel::Monomial(k) => write!(f, "{k}"),
            BasisLabel::Site(s) => write!(f, "x{s}"),
            BasisLabel::TestFunction(i) => write!(f, "f{i}"),
            BasisLabel::Wick(sites) if sites.is_empty() => write!(f, "1"),
            BasisLabel::Wick(sites) => {
                let parts: Vec<String> = sites.iter().map(|s| format!("phi({s})")).collect();
                write!(f, "{}", parts.join(" "))
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct GramReport {
    pub basis: Vec<BasisLabel>,
    /// Hermitian part of the assembled form.
    pub matrix: CMat,
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: CMat,
    pub min_eig: f64,
    pub witness: CVec,
    pub psd: bool,
    pub marginal: bool,
    pub tol: f64,
    /// `max |M - M*|` before symmetrization.
    pub hermiticity_defect: f64,
    /// `max |ω(Θ(A)) - conj ω(A)|` over the basis, when a state was involved.
    pub reflection_defect: Option<f64>,
    pub verdict: Verdict,
}

impl GramReport {
    pub fn from_matrix(basis: Vec<BasisLabel>, raw: &CMat, tol: f64) -> Self {
        let hermiticity_defect = hermiticity_defect(raw);
        let matrix = hermitian_part(raw);
        let (eigenvalues, eigenvectors) = hermitian_eigen(&matrix);
        let check = PsdCheck {
            min_eig: eigenvalues.first().copied().unwrap_or(0.0),
            witness: if eigenvalues.is_empty() {
                CVec::zeros(0)
            } else {
                eigenvectors.column(0).into_owned()
            },
            eigenvalues: eigenvalues.clone(),
            tol,
        };
        GramReport {
            basis,
            matrix,
            eigenvalues,
            eigenvectors,
            min_eig: check.min_eig,
            psd: check.psd(),
            marginal: check.marginal(),
            verdict: Verdict::from_psd(check.psd()),
            witness: check.witness,
            tol,
            hermiticity_defect,
            reflection_defect: None,
        }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn hermiticity_warning(&self) -> bool {
        self.hermiticity_defect > HERMITICITY_WARNING
    }

    pub fn reflection_invariant(&self) -> bool {
        self.reflection_defect.is_none_or(|r| r < REFLECTION_GATE)
    }

    /// `v* M v` for the stored witness.
    pub fn witness_value(&self) -> f64 {
        quadratic_form(&self.matrix, &self.witness).re
    }

    pub fn rank(&self) -> usize {
        self.eigenvalues.iter().filter(|&&e| e > self.tol).count()
    }
}

/// Monomials on generators `m/2+1..=m`, the first of them varying fastest.
pub fn plus_basis(cfg: &AlgebraConfig, max_grade: Option<u32>) -> Result<Vec<Monomial>> {
    let half = cfg.half();
    let d = cfg.d();
    check_cap("basis size", cfg.dim(), cfg.size_cap())?;
    let mut out = Vec::with_capacity(cfg.dim());
    for index in 0..cfg.dim() {
        let mut rest = index;
        let mut k = vec![0i64; cfg.m()];
        for slot in k[half..].iter_mut() {
            *slot = (rest % d as usize) as i64;
            rest /= d as usize;
        }
        let degree: i64 = k.iter().sum();
        if max_grade.is_none_or(|g| degree <= g as i64) {
            out.push(Monomial::new(cfg, &k)?);
        }
    }
    Ok(out)
}

/// `M_ab = ω(Θ(A_a)∘A_b)` over monomials of the positive half.
pub fn gram(state: &StateFunctional, basis: &[Monomial], tol: f64) -> Result<GramReport> {
    let cfg = *state.cfg();
    check_cap("basis size", basis.len(), cfg.size_cap())?;
    if let Some(bad) = basis.iter().find(|k| k.len() != cfg.m() || !k.in_plus()) {
        return Err(Error::WrongHalf { expected: if bad.len() == cfg.m() { "plus" } else { "plus (length mismatch)" } });
    }
    let d = cfg.d();
    let mut cache: HashMap<Monomial, Complex64> = HashMap::new();
    let mut expect = |k: &Monomial| -> Complex64 {
        *cache
            .entry(k.clone())
            .or_insert_with(|| state.evaluate_monomial(k))
    };

    let mut reflection_defect: f64 = 0.0;
    for k in basis {
        let (e, kt) = k.theta(d);
        let lhs = cfg.q_pow(e) * expect(&kt);
        reflection_defect = reflection_defect.max((lhs - expect(k).conj()).norm());
    }

    let reflected: Vec<(i64, Monomial, u32)> = basis
        .iter()
        .map(|k| {
            let (e, kt) = k.theta(d);
            (e, kt, k.grade(d))
        })
        .collect();
    let n = basis.len();
    let mut raw = CMat::zeros(n, n);
    for (a, (ea, ta, ga)) in reflected.iter().enumerate() {
        for (b, kb) in basis.iter().enumerate() {
            let (e, k) = ta.mul(kb, d);
            let twist = cfg.zeta_pow(*ga as i64 * kb.grade(d) as i64);
            raw[(a, b)] = cfg.q_pow(ea + e) * twist * expect(&k);
        }
    }
    let labels = basis.iter().cloned().map(BasisLabel::Monomial).collect();
    let mut report = GramReport::from_matrix(labels, &raw, tol);
    report.reflection_defect = Some(reflection_defect);
    if !report.reflection_invariant() {
        report.verdict = Verdict::NotApplicable;
    }
    Ok(report)
}

/// Orthonormal kernel of a PSD form: eigenvectors with `|λ| ≤ tol`.
pub fn null_basis(report: &GramReport) -> Result<Vec<CVec>> {
    if !report.psd {
        return Err(Error::PreconditionViolation(format!(
            "null basis requested for a form with min eigenvalue {:.3e}",
            report.min_eig
        )));
    }
    Ok(report
        .eigenvalues
        .iter()
        .enumerate()
        .filter(|(_, e)| e.abs() <= report.tol)
        .map(|(i, _)| report.eigenvectors.column(i).into_owned())
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{theta, twisted_product, AlgebraElement};
    use crate::linalg::{max_abs, ONE, ZERO};

    fn cfg(d: u32, m: usize) -> AlgebraConfig {
        AlgebraConfig::new(d, m).unwrap()
    }

    #[test]
    fn plus_basis_enumeration() {
        let c = cfg(2, 2);
        let b: Vec<String> = plus_basis(&c, None).unwrap().iter().map(|k| k.to_string()).collect();
        assert_eq!(b, ["1", "c2"]);
        let b: Vec<String> = plus_basis(&cfg(2, 4), None).unwrap().iter().map(|k| k.to_string()).collect();
        assert_eq!(b, ["1", "c3", "c4", "c3 c4"]);
        let b: Vec<String> = plus_basis(&cfg(3, 2), None).unwrap().iter().map(|k| k.to_string()).collect();
        assert_eq!(b, ["1", "c2", "c2^2"]);
        assert_eq!(plus_basis(&cfg(2, 6), Some(1)).unwrap().len(), 4);
        let small = AlgebraConfig::with_cap(2, 4, 4).unwrap();
        assert_eq!(plus_basis(&small, None).unwrap().len(), 4);
    }

    #[test]
    fn trace_gram_for_one_majorana_pair() {
        let c = cfg(2, 2);
        let w = StateFunctional::trace(&c);
        let r = gram(&w, &plus_basis(&c, None).unwrap(), DEFAULT_TOL).unwrap();
        let expect = CMat::from_row_slice(2, 2, &[ONE, ZERO, ZERO, ZERO]);
        assert!(max_abs(&(&r.matrix - expect)) < 1e-15);
        assert!(r.psd);
        assert_eq!(r.verdict, Verdict::Positive);
        assert_eq!(null_basis(&r).unwrap().len(), 1);
        let kernel = &null_basis(&r).unwrap()[0];
        assert!(kernel[0].norm() < 1e-15 && (kernel[1].norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn entries_match_element_route() {
        let c = cfg(3, 4);
        let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(11);
        let x = crate::algebra::random::random_element(&c, &mut rng, crate::algebra::random::Half::Full, 10);
        let h = x.add(&x.star()).unwrap();
        let w = StateFunctional::gibbs(&h, 0.8).unwrap();
        let basis = plus_basis(&c, None).unwrap();
        let r = gram(&w, &basis, DEFAULT_TOL).unwrap();
        let raw = r.matrix.clone();
        for (a, ka) in basis.iter().enumerate().step_by(2) {
            for (b, kb) in basis.iter().enumerate().step_by(3) {
                let ea = AlgebraElement::from_monomial(&c, ka.clone()).unwrap();
                let eb = AlgebraElement::from_monomial(&c, kb.clone()).unwrap();
                let tw = twisted_product(&theta(&ea), &eb).unwrap();
                let v = w.evaluate(&tw).unwrap();
                let sym = 0.5 * (v + {
                    let tw2 = twisted_product(&theta(&eb), &ea).unwrap();
                    w.evaluate(&tw2).unwrap().conj()
                });
                assert!((raw[(a, b)] - sym).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn wrong_half_rejected() {
        let c = cfg(2, 4);
        let w = StateFunctional::trace(&c);
        let bad = vec![Monomial::generator(&c, 1).unwrap()];
        assert!(matches!(gram(&w, &bad, DEFAULT_TOL), Err(Error::WrongHalf { .. })));
    }

    #[test]
    fn null_basis_requires_psd() {
        let m = CMat::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE]);
        let r = GramReport::from_matrix(vec![BasisLabel::Site(0), BasisLabel::Site(1)], &m, DEFAULT_TOL);
        assert!(matches!(null_basis(&r), Err(Error::PreconditionViolation(_))));
        let r = GramReport::from_matrix(vec![BasisLabel::Site(0)], &CMat::identity(1, 1), DEFAULT_TOL);
        assert!(null_basis(&r).unwrap().is_empty());
    }

    #[test]
    fn trace_gram_rank_nullity() {
        let c = cfg(2, 4);
        let r = gram(&StateFunctional::trace(&c), &plus_basis(&c, None).unwrap(), DEFAULT_TOL).unwrap();
        let nullity = null_basis(&r).unwrap().len();
        assert_eq!(r.rank() + nullity, 4);
    }
}
