use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::algebra::{theta, twisted_product, AlgebraConfig, AlgebraElement, Monomial, Support};
use crate::error::{Error, Result};
use crate::linalg::{CMat, CVec, PsdCheck};
use crate::pictures::{dft_zd, reshuffled_coupling};
use crate::verdict::Verdict;

use super::DEFAULT_TOL;

/// Residual above this makes the coupling criterion inapplicable.
const RESIDUAL_GATE: f64 = 1e-10;
/// Largest number of distinct cross monomials routed through the box picture.
const BOX_ROUTE_MAX: usize = 16;

/// One term `-J · Θ(B_left)∘B_right` of the cross-plane part.
#[derive(Debug, Clone, PartialEq)]
pub struct CrossTerm {
    pub coupling: Complex64,
    pub left: Monomial,
    pub right: Monomial,
}

/// `H = h_minus + h_plus - Σ J Θ(B_k)∘B_l + residual`.
///
/// `h_minus = Θ(h_plus)` and the cross terms come from the reflection-even
/// part of H; the residual is its reflection-odd part `(H - Θ(H))/2`.
#[derive(Debug, Clone)]
pub struct CouplingDecomposition {
    pub h_plus: AlgebraElement,
    pub h_minus: AlgebraElement,
    pub cross: Vec<CrossTerm>,
    pub residual: AlgebraElement,
    /// All terms of H have grade 0.
    pub neutral: bool,
}

impl CouplingDecomposition {
    pub fn cfg(&self) -> &AlgebraConfig {
        self.h_plus.cfg()
    }

    pub fn residual_norm(&self) -> f64 {
        self.residual.max_coeff()
    }

    pub fn cross_part(&self) -> Result<AlgebraElement> {
        let cfg = *self.cfg();
        let mut total = AlgebraElement::zero(&cfg);
        for t in &self.cross {
            let left = AlgebraElement::from_monomial(&cfg, t.left.clone())?;
            let right = AlgebraElement::from_monomial(&cfg, t.right.clone())?;
            let term = twisted_product(&theta(&left), &right)?.scale(-t.coupling);
            total = total.add(&term)?;
        }
        Ok(total)
    }

    pub fn reassemble(&self) -> Result<AlgebraElement> {
        self.h_minus
            .add(&self.h_plus)?
            .add(&self.cross_part()?)?
            .add(&self.residual)
    }

    /// Distinct cross monomials and the matrix `J[k,l]` over them.
    pub fn coupling_matrix(&self) -> (Vec<Monomial>, CMat) {
        let mut index: BTreeMap<Monomial, usize> = BTreeMap::new();
        for t in &self.cross {
            for k in [&t.left, &t.right] {
                let next = index.len();
                index.entry(k.clone()).or_insert(next);
            }
        }
        let mut order: Vec<(Monomial, usize)> = index.into_iter().collect();
        order.sort_by_key(|(_, i)| *i);
        let n = order.len();
        let position: BTreeMap<&Monomial, usize> =
            order.iter().enumerate().map(|(p, (k, _))| (k, p)).collect();
        let mut j = CMat::zeros(n, n);
        for t in &self.cross {
            j[(position[&t.left], position[&t.right])] += t.coupling;
        }
        (order.into_iter().map(|(k, _)| k).collect(), j)
    }
}

/// Coefficients below this (relative) count as round-off when testing grade.
const NEUTRAL_FLOOR: f64 = 1e-13;

/// Splits H across the reflection plane in the normal-ordered monomial basis.
pub fn coupling_decomposition(h: &AlgebraElement) -> Result<CouplingDecomposition> {
    let cfg = *h.cfg();
    let d = cfg.d();
    let reflected = theta(h);
    let half = Complex64::new(0.5, 0.0);
    let even = h.add(&reflected)?.scale(half);
    let residual = h.sub(&reflected)?.scale(half);

    let mut plus_terms = Vec::new();
    let mut minus_terms = Vec::new();
    let mut cross = Vec::new();
    for (k, &c) in even.coeffs() {
        match k.support() {
            Support::Identity => {
                plus_terms.push((c * half, k.clone()));
                minus_terms.push((c * half, k.clone()));
            }
            Support::Plus => plus_terms.push((c, k.clone())),
            Support::Minus => minus_terms.push((c, k.clone())),
            Support::Cross => {
                // M_k = M_L M_R with M_L = q^-e Θ(M_B) for the mirror image B of L.
                let m = cfg.m();
                let mut left_exps = vec![0i64; m];
                let mut right_exps = vec![0i64; m];
                for (j, &e) in k.exponents().iter().enumerate() {
                    if j < m / 2 {
                        left_exps[m - 1 - j] = -(e as i64);
                    } else {
                        right_exps[j] = e as i64;
                    }
                }
                let b = Monomial::new(&cfg, &left_exps)?;
                let r = Monomial::new(&cfg, &right_exps)?;
                let (e, image) = b.theta(d);
                debug_assert_eq!(image.minus_part(), k.minus_part());
                let gb = b.grade(d) as i64;
                let gr = r.grade(d) as i64;
                let factor = cfg.q_pow(-e) * cfg.zeta_pow(-gb * gr);
                cross.push(CrossTerm {
                    coupling: -c * factor,
                    left: b,
                    right: r,
                });
            }
        }
    }
    let floor = NEUTRAL_FLOOR * h.max_coeff().max(1.0);
    let neutral = h.coeffs().iter().all(|(k, c)| k.grade(d) == 0 || c.norm() <= floor);
    Ok(CouplingDecomposition {
        h_plus: AlgebraElement::from_terms(&cfg, plus_terms)?,
        h_minus: AlgebraElement::from_terms(&cfg, minus_terms)?,
        cross,
        residual,
        neutral,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SftReport {
    pub verdict: Verdict,
    /// Smallest eigenvalue of the reshuffled coupling; 0 without cross terms.
    pub min_eig: f64,
    pub witness: CVec,
    pub monomials: Vec<Monomial>,
    pub residual_norm: f64,
    pub reason: Option<String>,
}

/// Positivity of the string-Fourier-transformed cross coupling.
pub fn sft_positivity(dec: &CouplingDecomposition, tol: f64) -> Result<SftReport> {
    let residual_norm = dec.residual_norm();
    let not_applicable = |reason: &str| SftReport {
        verdict: Verdict::NotApplicable,
        min_eig: 0.0,
        witness: CVec::zeros(0),
        monomials: Vec::new(),
        residual_norm,
        reason: Some(reason.to_string()),
    };
    if residual_norm > RESIDUAL_GATE {
        return Ok(not_applicable("reflection-odd residual"));
    }
    if !dec.neutral {
        return Ok(not_applicable("Hamiltonian has nonzero grade"));
    }
    let (monomials, j) = dec.coupling_matrix();
    if monomials.is_empty() {
        return Ok(SftReport {
            verdict: Verdict::Positive,
            min_eig: 0.0,
            witness: CVec::zeros(0),
            monomials,
            residual_norm,
            reason: None,
        });
    }
    let reshuffled = if monomials.len() <= BOX_ROUTE_MAX {
        let (block, outside) = reshuffled_coupling(&j)?;
        if outside > 0.0 {
            return Err(Error::PreconditionViolation(
                "reshuffled coupling leaked outside its support".into(),
            ));
        }
        block
    } else {
        j
    };
    let check = PsdCheck::of_hermitian(&reshuffled, tol);
    Ok(SftReport {
        verdict: Verdict::from_psd(check.psd()),
        min_eig: check.min_eig,
        witness: check.witness,
        monomials,
        residual_norm,
        reason: None,
    })
}

/// Bochner test for a coupling sequence on the `Z_d` ladder: its transform
/// must be real and nonnegative. Mode 0 multiplies `Θ(1)∘1`, a constant in
/// the Hamiltonian, so only its reality is required.
pub fn ladder_verdict(sequence: &[Complex64], tol: f64) -> (Verdict, Vec<Complex64>) {
    let spectrum = dft_zd(sequence);
    let ok = spectrum
        .iter()
        .enumerate()
        .all(|(j, z)| (j == 0 || z.re >= -tol) && z.im.abs() <= tol.max(DEFAULT_TOL));
    (Verdict::from_psd(ok), spectrum)
}

/// `-Σ_{x,y} f(x-y) Θ(P_x)∘P_y`, with `P_y` the spectral projections of the
/// first generator of the positive half.
pub fn circulant_coupling(cfg: &AlgebraConfig, f: &[Complex64]) -> Result<AlgebraElement> {
    let d = cfg.d() as usize;
    if f.len() != d {
        return Err(Error::InvalidArgument(format!(
            "coupling sequence has length {}, expected {d}",
            f.len()
        )));
    }
    let projector = |y: usize| -> Result<AlgebraElement> {
        let terms = (0..d).map(|k| {
            let mut e = vec![0i64; cfg.m()];
            e[cfg.half()] = k as i64;
            let phase = cfg.q_pow(-((y * k) as i64)) / d as f64;
            (phase, Monomial::new(cfg, &e).expect("valid exponents"))
        });
        AlgebraElement::from_terms(cfg, terms)
    };
    let projectors: Vec<AlgebraElement> = (0..d).map(projector).collect::<Result<_>>()?;
    let mut total = AlgebraElement::zero(cfg);
    for x in 0..d {
        let reflected = theta(&projectors[x]);
        for y in 0..d {
            let weight = f[(x + d - y) % d];
            if weight == Complex64::new(0.0, 0.0) {
                continue;
            }
            let term = twisted_product(&reflected, &projectors[y])?.scale(-weight);
            total = total.add(&term)?;
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::I;

    fn cfg(d: u32, m: usize) -> AlgebraConfig {
        AlgebraConfig::new(d, m).unwrap()
    }

    fn re(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn one_sided_mirror_pair() {
        let c = cfg(2, 4);
        let x = AlgebraElement::monomial(&c, &[0, 0, 1, 1]).unwrap().scale(I);
        let h = x.add(&theta(&x)).unwrap();
        let dec = coupling_decomposition(&h).unwrap();
        assert!(dec.h_plus.coeff_distance(&x) < 1e-15);
        assert!(dec.cross.is_empty());
        assert_eq!(dec.residual_norm(), 0.0);
        assert!(dec.reassemble().unwrap().coeff_distance(&h) < 1e-15);
    }

    #[test]
    fn one_sided_term_alone_is_reflection_odd() {
        let c = cfg(2, 4);
        let h = AlgebraElement::monomial(&c, &[0, 0, 1, 1]).unwrap().scale(I);
        let dec = coupling_decomposition(&h).unwrap();
        assert!((dec.residual_norm() - 0.5).abs() < 1e-15);
        assert!(dec.reassemble().unwrap().coeff_distance(&h) < 1e-15);
        let s = sft_positivity(&dec, DEFAULT_TOL).unwrap();
        assert_eq!(s.verdict, Verdict::NotApplicable);
    }

    #[test]
    fn canonical_cross_term() {
        let c = cfg(2, 4);
        let b = AlgebraElement::generator(&c, 3).unwrap();
        let t = twisted_product(&theta(&b), &b).unwrap();
        let h = t.add(&t.star()).unwrap();
        let dec = coupling_decomposition(&h).unwrap();
        assert_eq!(dec.residual_norm(), 0.0);
        assert_eq!(dec.cross.len(), 1);
        assert_eq!(dec.cross[0].left, Monomial::generator(&c, 3).unwrap());
        assert!((dec.cross[0].coupling - re(-2.0)).norm() < 1e-15);
        assert!(dec.reassemble().unwrap().coeff_distance(&h) < 1e-15);
        assert_eq!(sft_positivity(&dec, DEFAULT_TOL).unwrap().verdict, Verdict::Negative);
    }

    #[test]
    fn hopping_across_the_plane() {
        // i c2 c3 = Θ(c3)∘c3 at d = 2, so its Boltzmann coupling is -1.
        let c = cfg(2, 4);
        let h = AlgebraElement::monomial(&c, &[0, 1, 1, 0]).unwrap().scale(I);
        assert!(h.star_defect() < 1e-15);
        let dec = coupling_decomposition(&h).unwrap();
        assert_eq!(dec.residual_norm(), 0.0);
        assert_eq!(dec.cross.len(), 1);
        assert!((dec.cross[0].coupling - re(-1.0)).norm() < 1e-15);
        assert!(dec.reassemble().unwrap().coeff_distance(&h) < 1e-15);
        let flipped = coupling_decomposition(&h.scale(re(-1.0))).unwrap();
        let s = sft_positivity(&flipped, DEFAULT_TOL).unwrap();
        assert_eq!(s.verdict, Verdict::Positive);
        assert!((s.min_eig - 1.0).abs() < 1e-15);
    }

    #[test]
    fn nonnegative_diagonal_coupling_is_positive() {
        let c = cfg(3, 4);
        let mut h = AlgebraElement::zero(&c);
        for (j, k) in [(0.5, [0i64, 0, 1, 0]), (1.5, [0, 0, 0, 1]), (0.25, [0, 0, 1, 2])] {
            let b = AlgebraElement::monomial(&c, &k).unwrap();
            let t = twisted_product(&theta(&b), &b).unwrap().scale(re(-j));
            h = h.add(&t).unwrap().add(&t.star()).unwrap();
        }
        let dec = coupling_decomposition(&h).unwrap();
        assert!(dec.residual_norm() < 1e-15);
        assert_eq!(sft_positivity(&dec, DEFAULT_TOL).unwrap().verdict, Verdict::Positive);
    }

    #[test]
    fn ladder_examples() {
        let (v, spec) = ladder_verdict(&[re(1.0), re(2.0)], DEFAULT_TOL);
        assert_eq!(v, Verdict::Negative);
        assert_eq!(spec, vec![re(3.0), re(-1.0)]);
        let (v, spec) = ladder_verdict(&[re(1.0), re(1.0)], DEFAULT_TOL);
        assert_eq!(v, Verdict::Positive);
        assert_eq!(spec, vec![re(2.0), re(0.0)]);
        let (v, _) = ladder_verdict(&[re(-1.0), re(-1.0)], DEFAULT_TOL);
        assert_eq!(v, Verdict::Positive);
    }

    #[test]
    fn ladder_agrees_with_sft_positivity() {
        let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(11);
        let mut seen = [0usize; 2];
        for d in 2..=4u32 {
            let c = cfg(d, 2);
            for _ in 0..40 {
                let mut f = vec![re(0.0); d as usize];
                for z in 0..d as usize {
                    let w = rand::Rng::gen_range(&mut rng, -1.0..1.0);
                    f[z] += re(w / 2.0);
                    f[(d as usize - z) % d as usize] += re(w / 2.0);
                }
                let (ladder, _) = ladder_verdict(&f, DEFAULT_TOL);
                let dec = coupling_decomposition(&circulant_coupling(&c, &f).unwrap()).unwrap();
                let sft = sft_positivity(&dec, DEFAULT_TOL).unwrap();
                assert_eq!(sft.verdict, ladder, "d={d} f={f:?}");
                seen[usize::from(ladder == Verdict::Positive)] += 1;
            }
        }
        assert!(seen[0] > 0 && seen[1] > 0);
    }

    #[test]
    fn circulant_coupling_is_diagonal_in_monomials() {
        for d in 2..=4u32 {
            let c = cfg(d, 2);
            let f: Vec<Complex64> = (0..d).map(|z| re(1.0 + (z.min(d - z)) as f64)).collect();
            let h = circulant_coupling(&c, &f).unwrap();
            let dec = coupling_decomposition(&h).unwrap();
            assert!(dec.residual_norm() < 1e-14, "d={d}");
            let (monos, j) = dec.coupling_matrix();
            let spectrum = dft_zd(&f);
            for (p, k) in monos.iter().enumerate() {
                let power = k.exponents()[1] as usize;
                assert!((j[(p, p)] - spectrum[power] / d as f64).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn reassembly_of_generic_hamiltonian() {
        let c = cfg(3, 4);
        let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(3);
        let x = crate::algebra::random::random_element(&c, &mut rng, crate::algebra::random::Half::Full, 12);
        let h = x.add(&x.star()).unwrap();
        let dec = coupling_decomposition(&h).unwrap();
        assert!(dec.reassemble().unwrap().coeff_distance(&h) < 1e-12);
        assert!(dec.h_minus.coeff_distance(&theta(&dec.h_plus)) < 1e-12);
    }
}
