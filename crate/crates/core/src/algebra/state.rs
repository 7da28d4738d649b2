use num_complex::Complex64;

use super::element::AlgebraElement;
use super::monomial::{Monomial, MonomialRep};
use super::AlgebraConfig;
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigen, CMat};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StateKind {
    Trace,
    Gibbs,
}

/// Normalized trace, or `A ↦ Tr(e^{-βH} A) / Tr(e^{-βH})`.
#[derive(Debug, Clone)]
pub struct StateFunctional {
    kind: StateKind,
    beta: f64,
    hamiltonian: Option<AlgebraElement>,
    cfg: AlgebraConfig,
    density: CMat,
}

impl StateFunctional {
    pub fn trace(cfg: &AlgebraConfig) -> Self {
        let n = cfg.dim();
        StateFunctional {
            kind: StateKind::Trace,
            beta: 0.0,
            hamiltonian: None,
            cfg: *cfg,
            density: CMat::identity(n, n) / Complex64::new(n as f64, 0.0),
        }
    }

    pub fn gibbs(h: &AlgebraElement, beta: f64) -> Result<Self> {
        if !(beta.is_finite() && beta >= 0.0) {
            return Err(Error::InvalidState(format!("inverse temperature {beta} must be finite and nonnegative")));
        }
        let defect = h.star_defect();
        if defect > 1e-12 * h.max_coeff().max(1.0) {
            return Err(Error::InvalidState(format!(
                "Hamiltonian is not star-invariant (defect {defect:.3e})"
            )));
        }
        let (values, vectors) = hermitian_eigen(h.rep());
        let ground = values.first().copied().unwrap_or(0.0);
        let weights: Vec<f64> = values.iter().map(|&e| (-beta * (e - ground)).exp()).collect();
        let z: f64 = weights.iter().sum();
        let n = values.len();
        let scaled = CMat::from_fn(n, n, |r, c| vectors[(r, c)] * (weights[c] / z));
        let density = scaled * vectors.adjoint();
        Ok(StateFunctional {
            kind: StateKind::Gibbs,
            beta,
            hamiltonian: Some(h.clone()),
            cfg: *h.cfg(),
            density,
        })
    }

    pub fn kind(&self) -> StateKind {
        self.kind
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn hamiltonian(&self) -> Option<&AlgebraElement> {
        self.hamiltonian.as_ref()
    }

    pub fn cfg(&self) -> &AlgebraConfig {
        &self.cfg
    }

    pub fn density(&self) -> &CMat {
        &self.density
    }

    pub fn evaluate(&self, a: &AlgebraElement) -> Result<Complex64> {
        if *a.cfg() != self.cfg {
            return Err(Error::ConfigMismatch);
        }
        Ok((&self.density * a.rep()).trace())
    }

    /// `ω(M_k)` without forming a dense matrix for the monomial.
    pub fn evaluate_monomial(&self, k: &Monomial) -> Complex64 {
        MonomialRep::new(&self.cfg, k).trace_against(&self.density)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::random::random_element;
    use crate::algebra::random::Half;
    use rand::SeedableRng;

    #[test]
    fn trace_state_basics() {
        let cfg = AlgebraConfig::new(2, 2).unwrap();
        let w = StateFunctional::trace(&cfg);
        let c1 = AlgebraElement::generator(&cfg, 1).unwrap();
        assert_eq!(w.evaluate(&c1).unwrap(), Complex64::new(0.0, 0.0));
        let one = AlgebraElement::identity(&cfg);
        assert!((w.evaluate(&one).unwrap() - 1.0).norm() < 1e-14);
    }

    #[test]
    fn gibbs_at_zero_hamiltonian_is_trace() {
        let cfg = AlgebraConfig::new(3, 4).unwrap();
        let h = AlgebraElement::zero(&cfg);
        let g = StateFunctional::gibbs(&h, 1.3).unwrap();
        let t = StateFunctional::trace(&cfg);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..10 {
            let a = random_element(&cfg, &mut rng, Half::Full, 6);
            let diff = g.evaluate(&a).unwrap() - t.evaluate(&a).unwrap();
            assert!(diff.norm() < 1e-12);
        }
    }

    #[test]
    fn gibbs_rejects_non_hermitian() {
        let cfg = AlgebraConfig::new(2, 2).unwrap();
        let c1c2 = AlgebraElement::monomial(&cfg, &[1, 1]).unwrap();
        assert!(matches!(StateFunctional::gibbs(&c1c2, 1.0), Err(Error::InvalidState(_))));
        let h = c1c2.scale(Complex64::new(0.0, 1.0));
        let g = StateFunctional::gibbs(&h, 2.0).unwrap();
        let one = AlgebraElement::identity(&cfg);
        assert!((g.evaluate(&one).unwrap() - 1.0).norm() < 1e-14);
        assert!(StateFunctional::gibbs(&h, -1.0).is_err());
    }

    #[test]
    fn star_conjugates_expectation() {
        let cfg = AlgebraConfig::new(3, 4).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        let x = random_element(&cfg, &mut rng, Half::Full, 8);
        let h = x.add(&x.star()).unwrap();
        let w = StateFunctional::gibbs(&h, 0.7).unwrap();
        let a = random_element(&cfg, &mut rng, Half::Full, 8);
        let lhs = w.evaluate(&a.star()).unwrap();
        let rhs = w.evaluate(&a).unwrap().conj();
        assert!((lhs - rhs).norm() < 1e-12);
        for k in a.coeffs().keys() {
            let single = AlgebraElement::from_monomial(&cfg, k.clone()).unwrap();
            let dense = w.evaluate(&single).unwrap();
            assert!((dense - w.evaluate_monomial(k)).norm() < 1e-13);
        }
    }
}
