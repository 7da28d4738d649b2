//! One function per subcommand. Each fills a report; errors that stop a
//! pipeline before it produces a verdict are returned to the caller.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use rpcheck_core::algebra::random::{random_coeff, random_element, Half};
use rpcheck_core::algebra::{build_algebra, theta, AlgebraConfig, AlgebraElement, StateFunctional};
use rpcheck_core::gaussian::{
    covariance_rp, green_set, half_space_basis, monotonicity_verdict, stochastic_covariance, stochastic_rp_scan,
    wick_system,
};
use rpcheck_core::linalg::max_abs_real;
use rpcheck_core::pictures::{convolution_residual, Box22};
use rpcheck_core::reconstruction::{
    iterate_shift, monomial_shift_map, quantize, semigroup_residual, spectrum_report, transfer_operator,
};
use rpcheck_core::verifier::ensembles::{generic_hamiltonian, reflection_symmetric_hamiltonian, CouplingKind};
use rpcheck_core::verifier::{
    circulant_coupling, coupling_decomposition, gram, ladder_verdict, plus_basis, sft_positivity, GramReport,
};
use rpcheck_core::{Error, Result, Verdict};

use crate::config::{hamiltonian_from_terms, Ensemble, ModelKind, RunConfig, StateKind};
use crate::report::{CurvePoint, Real, RunReport, VerdictField};

/// Exact algebraic identities are held to this.
pub const IDENTITY_LIMIT: f64 = 1e-12;
pub const ENERGY_FLOOR: f64 = -1e-9;
pub const WELL_DEFINED_LIMIT: f64 = 1e-8;
pub const SEMIGROUP_LIMIT: f64 = 1e-8;
pub const CONTRACTION_SLACK: f64 = 1e-10;
pub const WITNESS_LIMIT: f64 = 1e-10;
/// Gram matrices larger than this are summarized rather than written out.
pub const MATRIX_EMIT_MAX: usize = 64;
pub const DEFAULT_SAMPLES: usize = 100;
const GENERIC_TERMS: usize = 6;
const RANDOM_TERMS: usize = 4;

fn rng(config: &RunConfig) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(config.seed())
}

fn verdict_of(ok: bool) -> VerdictField {
    if ok {
        VerdictField::Positive
    } else {
        VerdictField::Negative
    }
}

pub fn algebra_check(config: &RunConfig, report: &mut RunReport) -> Result<()> {
    let cfg = config.algebra_config()?;
    let d = cfg.d();
    let gens = build_algebra(&cfg)?;
    let one = AlgebraElement::identity(&cfg);

    let mut power = 0.0f64;
    let mut power_sym = 0.0f64;
    for c in &gens {
        let mut p = one.clone();
        for _ in 0..d {
            p = p.mul(c)?;
        }
        power = power.max(p.rep_distance(&one));
        power_sym = power_sym.max(p.coeff_distance(&one));
    }
    let mut comm = 0.0f64;
    let mut comm_sym = 0.0f64;
    for i in 0..gens.len() {
        for j in i + 1..gens.len() {
            let lhs = gens[i].mul(&gens[j])?;
            let rhs = gens[j].mul(&gens[i])?.scale(cfg.q());
            comm = comm.max(lhs.rep_distance(&rhs));
            comm_sym = comm_sym.max(lhs.coeff_distance(&rhs));
        }
    }
    let rep = gens.iter().map(|c| c.rep_residual()).fold(0.0, f64::max);

    let mut rng = rng(config);
    let samples = config.samples.unwrap_or(DEFAULT_SAMPLES);
    let (mut involution, mut homomorphism, mut antilinear, mut star_commutes) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for _ in 0..samples {
        let a = random_element(&cfg, &mut rng, Half::Full, RANDOM_TERMS);
        let b = random_element(&cfg, &mut rng, Half::Full, RANDOM_TERMS);
        let lambda = random_coeff(&mut rng);
        let ta = theta(&a);
        involution = involution.max(theta(&ta).rep_distance(&a));
        homomorphism = homomorphism.max(theta(&a.mul(&b)?).rep_distance(&ta.mul(&theta(&b))?));
        antilinear = antilinear.max(theta(&a.scale(lambda)).rep_distance(&ta.scale(lambda.conj())));
        star_commutes = star_commutes.max(theta(&a.star()).rep_distance(&ta.star()));
    }

    let mut ok = true;
    ok &= report.check_below("generator-power", power, IDENTITY_LIMIT);
    ok &= report.check_below("generator-power-symbolic", power_sym, IDENTITY_LIMIT);
    ok &= report.check_below("exchange-relation", comm, IDENTITY_LIMIT);
    ok &= report.check_below("exchange-relation-symbolic", comm_sym, IDENTITY_LIMIT);
    ok &= report.check_below("representation-consistency", rep, IDENTITY_LIMIT);
    ok &= report.check_below("reflection-involution", involution, IDENTITY_LIMIT);
    ok &= report.check_below("reflection-homomorphism", homomorphism, IDENTITY_LIMIT);
    ok &= report.check_below("reflection-antilinear", antilinear, IDENTITY_LIMIT);
    ok &= report.check_below("reflection-star-commute", star_commutes, IDENTITY_LIMIT);
    report.value("dimension", cfg.dim() as f64);
    report.note(format!("{samples} seeded random elements for the reflection identities"));
    report.verdict = verdict_of(ok);
    Ok(())
}

fn hamiltonian(config: &RunConfig, cfg: &AlgebraConfig) -> Result<Option<AlgebraElement>> {
    let state = config
        .state
        .as_ref()
        .ok_or_else(|| Error::InvalidConfig("missing state section".into()))?;
    if state.kind == StateKind::Trace {
        return Ok(None);
    }
    if let Some(terms) = &state.hamiltonian {
        return hamiltonian_from_terms(cfg, terms).map(Some);
    }
    let mut rng = rng(config);
    let h = match state.ensemble {
        Some(Ensemble::Theorem) => reflection_symmetric_hamiltonian(cfg, &mut rng, CouplingKind::Psd)?,
        Some(Ensemble::Indefinite) => reflection_symmetric_hamiltonian(cfg, &mut rng, CouplingKind::Indefinite)?,
        Some(Ensemble::Generic) => generic_hamiltonian(cfg, &mut rng, GENERIC_TERMS)?,
        None => return Err(Error::InvalidConfig("Gibbs state needs a Hamiltonian".into())),
    };
    Ok(Some(h))
}

fn state(config: &RunConfig, cfg: &AlgebraConfig, report: &mut RunReport) -> Result<StateFunctional> {
    match hamiltonian(config, cfg)? {
        None => Ok(StateFunctional::trace(cfg)),
        Some(h) => {
            for (k, &c) in h.coeffs() {
                report.hamiltonian.push(crate::report::TermField {
                    monomial: k.to_string(),
                    coeff: c.into(),
                });
            }
            let dec = coupling_decomposition(&h)?;
            let sft = sft_positivity(&dec, config.tol())?;
            report.value("hamiltonian-residual", sft.residual_norm);
            report.value("sft-min-eig", sft.min_eig);
            report.note(format!("sft criterion: {}", sft.verdict));
            if let Some(reason) = &sft.reason {
                report.note(format!("sft criterion not applicable: {reason}"));
            }
            let beta = config.state.as_ref().and_then(|s| s.beta).unwrap_or(1.0);
            StateFunctional::gibbs(&h, beta)
        }
    }
}

fn gram_section(report: &mut RunReport, g: &GramReport) {
    if g.dim() <= MATRIX_EMIT_MAX {
        report.matrix("gram", g.basis.iter().map(|b| b.to_string()).collect(), &g.matrix);
    } else {
        report.note(format!("gram matrix of dimension {} not written out", g.dim()));
    }
    report.spectrum("gram", &g.eigenvalues, None);
    report.value("gram-min-eig", g.min_eig);
    report.value("gram-rank", g.rank() as f64);
    report.value("hermiticity-defect", g.hermiticity_defect);
    if let Some(r) = g.reflection_defect {
        report.value("reflection-defect", r);
    }
    if g.hermiticity_warning() {
        report.note("raw form is not Hermitian; its Hermitian part was used");
    }
    if g.marginal {
        report.note("minimum eigenvalue lies within tolerance of zero");
    }
    if !g.witness.is_empty() {
        let w: Vec<Complex64> = g.witness.iter().copied().collect();
        report.witness("gram", &w);
        let gap = (g.witness_value() - g.min_eig).abs();
        report.check_below("witness-consistency", gap, WITNESS_LIMIT);
    }
}

fn algebra_gram(config: &RunConfig, report: &mut RunReport) -> Result<(GramReport, Vec<rpcheck_core::algebra::Monomial>)> {
    let cfg = config.algebra_config()?;
    let st = state(config, &cfg, report)?;
    let basis = plus_basis(&cfg, config.max_grade)?;
    let g = gram(&st, &basis, config.tol())?;
    gram_section(report, &g);
    Ok((g, basis))
}

pub fn rp_gram(config: &RunConfig, report: &mut RunReport) -> Result<()> {
    let (g, _) = algebra_gram(config, report)?;
    report.verdict = g.verdict.into();
    if !report.all_passed() && report.verdict == VerdictField::Positive {
        report.verdict = VerdictField::NotApplicable;
    }
    Ok(())
}

pub fn reconstruct(config: &RunConfig, report: &mut RunReport) -> Result<()> {
    let steps = config.steps.unwrap_or(1);
    let (g, shift) = match config.model.unwrap_or(ModelKind::Algebra) {
        ModelKind::Algebra => {
            let (g, basis) = algebra_gram(config, report)?;
            let shift = monomial_shift_map(&basis, 1);
            (g, shift)
        }
        ModelKind::Gaussian => {
            let model = config.lattice_model()?;
            let gs = green_set(&model)?;
            let (g, shift) = wick_system(&gs, config.max_degree.unwrap_or(2), config.tol())?;
            gram_section(report, &g);
            (g, shift)
        }
    };
    match g.verdict {
        Verdict::Negative => {
            report.note("reflection form is not positive; no Hilbert space to quantize");
            report.verdict = VerdictField::Negative;
            return Ok(());
        }
        Verdict::NotApplicable => {
            report.note("state is not reflection invariant");
            report.verdict = VerdictField::NotApplicable;
            return Ok(());
        }
        Verdict::Positive => {}
    }
    let q = quantize(&g)?;
    report.value("quotient-rank", q.rank as f64);
    let one_step = iterate_shift(&shift, steps);
    let td = match transfer_operator(&g, &q, &one_step, steps) {
        Ok(td) => td,
        Err(Error::IllDefined { residual, vector }) => {
            report.check_below("well-defined", residual, WELL_DEFINED_LIMIT);
            report.witness("ill-defined-direction", &vector);
            report.error = Some("transfer operator is not well defined on the quotient".into());
            report.verdict = VerdictField::NotApplicable;
            return Ok(());
        }
        Err(Error::NotShiftInvariant { defect }) => {
            report.check_below("shift-invariance", defect, q.tol);
            report.error = Some("state is not invariant under the time shift".into());
            report.verdict = VerdictField::NotApplicable;
            return Ok(());
        }
        Err(e) => return Err(e),
    };
    let mut ok = true;
    ok &= report.check_above("transfer-positive", td.min_transfer_eig(), -td.tol);
    ok &= report.check("transfer-contraction", td.norm(), 1.0 + CONTRACTION_SLACK, td.norm() <= 1.0 + CONTRACTION_SLACK);
    let min_energy = td.min_energy().unwrap_or(0.0);
    ok &= report.check_above("hamiltonian-bounded-below", min_energy, ENERGY_FLOOR);
    ok &= report.check_below("well-defined", td.well_defined_residual, WELL_DEFINED_LIMIT);
    let max_k = config.semigroup_max.unwrap_or(3);
    for k in 2..=max_k {
        let tk = transfer_operator(&g, &q, &iterate_shift(&shift, k * steps), k * steps)?;
        ok &= report.check_below(&format!("semigroup-{k}"), semigroup_residual(&td, &tk), SEMIGROUP_LIMIT);
    }
    let spec = spectrum_report(&td);
    report.spectrum("transfer", &td.transfer_eigenvalues, None);
    report.spectrum("energy", &spec.energies, Some(spec.gap));
    report.value("infinite-energy-modes", td.infinite_energy as f64);
    report.value("negative-transfer-modes", td.negative_modes as f64);
    report.value("dt", td.dt);
    report.verdict = verdict_of(ok);
    Ok(())
}

pub fn green(config: &RunConfig, report: &mut RunReport) -> Result<()> {
    let model = config.lattice_model()?;
    let gs = green_set(&model)?;
    let mono = monotonicity_verdict(&gs, config.tol());
    report.value("monotonicity-min-eig", mono.min_eig);
    let w: Vec<f64> = mono.witness.iter().copied().collect();
    report.witness("monotonicity", &w);
    let rp = covariance_rp(&gs, &half_space_basis(&gs), config.tol())?;
    report.value("covariance-rp-min-eig", rp.min_eig);
    let agree = rp.verdict == mono.verdict;
    report.check("verdicts-agree", if agree { 0.0 } else { 1.0 }, 0.0, agree);
    if let Some(r) = gs.stencil_residual {
        report.check_below("image-charge-stencil", r, 1e-8);
    }
    report.note(format!("covariance reflection positivity: {}", rp.verdict));
    report.verdict = mono.verdict.into();
    if !report.all_passed() {
        report.verdict = VerdictField::NotApplicable;
        report.error = Some("Green's function cross-checks disagree".into());
    }
    Ok(())
}

pub fn stochastic(config: &RunConfig, report: &mut RunReport) -> Result<()> {
    let model = config.lattice_model()?;
    let ts = config.t_grid.clone().unwrap_or_default();
    let scan = stochastic_rp_scan(&model, &ts, config.tol())?;
    for p in &scan {
        report.curve.push(CurvePoint {
            t: Real(p.t),
            min_eig: Real(p.min_eig),
            violated: p.violated,
        });
    }
    if let Some(last) = ts.iter().copied().fold(None, |acc: Option<f64>, t| Some(acc.map_or(t, |a| a.max(t)))) {
        let gs = green_set(&model)?;
        let dist = max_abs_real(&(stochastic_covariance(&model, last)? - &gs.c));
        report.value("relaxation-distance-at-max-t", dist);
    }
    if let Some(p) = scan.iter().filter(|p| p.violated).min_by(|a, b| a.min_eig.total_cmp(&b.min_eig)) {
        let w: Vec<f64> = p.witness.iter().copied().collect();
        report.witness(&format!("violation-at-t={}", p.t), &w);
    }
    report.verdict = verdict_of(scan.iter().all(|p| !p.violated));
    Ok(())
}

pub fn sft_check(config: &RunConfig, report: &mut RunReport) -> Result<()> {
    let mut rng = rng(config);
    let n = config.string_dim.unwrap_or(2);
    let samples = config.samples.unwrap_or(DEFAULT_SAMPLES);
    let (mut rot, mut four, mut conv) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..samples {
        let r = Box22::random(n, &mut rng);
        rot = rot.max(r.theta().rot_pi().distance(&r.adjoint()));
        four = four.max(r.sft().sft().sft().sft().distance(&r));
    }
    for d in 2..=4 {
        for _ in 0..samples.max(1) {
            let a: Vec<Complex64> = (0..d).map(|_| random_coeff(&mut rng)).collect();
            let b: Vec<Complex64> = (0..d).map(|_| random_coeff(&mut rng)).collect();
            conv = conv.max(convolution_residual(&a, &b)?);
        }
    }
    let mut ok = true;
    ok &= report.check("rotated-reflection-is-adjoint", rot, 0.0, rot == 0.0);
    ok &= report.check("sft-order-four", four, 0.0, four == 0.0);
    ok &= report.check_below("convolution-theorem", conv, IDENTITY_LIMIT);
    let mut verdict = verdict_of(ok);

    if let Some(seq) = &config.coupling_sequence {
        let f: Vec<Complex64> = seq.iter().map(|z| Complex64::new(z[0], z[1])).collect();
        let (ladder, spectrum) = ladder_verdict(&f, config.tol());
        let m = config.algebra.as_ref().map_or(2, |a| a.m);
        let cfg = AlgebraConfig::new(f.len() as u32, m)?;
        let h = circulant_coupling(&cfg, &f)?;
        let sft = sft_positivity(&coupling_decomposition(&h)?, config.tol())?;
        let spec: Vec<f64> = spectrum.iter().map(|z| z.re).collect();
        report.spectrum("coupling-transform", &spec, None);
        report.value("sft-min-eig", sft.min_eig);
        let agree = sft.verdict == ladder;
        report.check("bochner-agreement", if agree { 0.0 } else { 1.0 }, 0.0, agree);
        verdict = if !agree || !ok { VerdictField::NotApplicable } else { sft.verdict.into() };
    } else if config.state.as_ref().is_some_and(|s| s.kind == StateKind::Gibbs) {
        let cfg = config.algebra_config()?;
        let h = hamiltonian(config, &cfg)?.expect("Gibbs state carries a Hamiltonian");
        let dec = coupling_decomposition(&h)?;
        let sft = sft_positivity(&dec, config.tol())?;
        let (monomials, j) = dec.coupling_matrix();
        if !monomials.is_empty() && monomials.len() <= MATRIX_EMIT_MAX {
            report.matrix("coupling", monomials.iter().map(|k| k.to_string()).collect(), &j);
        }
        report.value("hamiltonian-residual", sft.residual_norm);
        report.value("sft-min-eig", sft.min_eig);
        if !sft.witness.is_empty() {
            let w: Vec<Complex64> = sft.witness.iter().copied().collect();
            report.witness("coupling", &w);
        }
        if let Some(reason) = sft.reason {
            report.note(reason);
        }
        verdict = if ok { sft.verdict.into() } else { VerdictField::NotApplicable };
    }
    report.note(format!("{samples} random boxes on strings of dimension {n}"));
    report.verdict = verdict;
    Ok(())
}
