//! Quantization of a positive reflection form: quotient by its kernel, the
//! transfer operator induced by the time shift, and the Hamiltonian
//! `H = -log(T)/dt`.
//!
//! The shift is only defined on basis elements whose image stays inside the
//! basis. `T` is built on the span of those classes and compressed to it, so
//! the domain never borrows the zero class for elements that fall off.

use num_complex::Complex64;

use crate::algebra::Monomial;
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigen, hermitian_part, hermiticity_defect, max_abs, CMat, CVec};
use crate::verifier::GramReport;

/// Gate on `T - T*` before the state counts as shift invariant.
const SYMMETRY_GATE: f64 = 1e-10;
/// Null vectors may leak into nonzero classes by at most this much.
const WELL_DEFINED_GATE: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct QuotientSpace {
    pub rank: usize,
    /// `n × rank`, columns orthonormal for the form.
    pub isometry: CMat,
    /// `rank × n` factor with `Fᴴ F = M` on the retained spectrum; column `b`
    /// holds the quotient coordinates of basis element `b`.
    pub gram_sqrt: CMat,
    pub tol: f64,
}

impl QuotientSpace {
    pub fn coordinates(&self, u: &CVec) -> CVec {
        &self.gram_sqrt * u
    }

    pub fn inner(&self, u: &CVec, v: &CVec) -> Complex64 {
        self.coordinates(u).dotc(&self.coordinates(v))
    }
}

pub fn quantize(report: &GramReport) -> Result<QuotientSpace> {
    if !report.psd {
        return Err(Error::PreconditionViolation(format!(
            "cannot quantize a form with min eigenvalue {:.3e}",
            report.min_eig
        )));
    }
    let n = report.dim();
    let kept: Vec<usize> = (0..n).filter(|&i| report.eigenvalues[i] > report.tol).collect();
    let rank = kept.len();
    let isometry = CMat::from_fn(n, rank, |r, c| {
        report.eigenvectors[(r, kept[c])] / report.eigenvalues[kept[c]].sqrt()
    });
    let gram_sqrt = CMat::from_fn(rank, n, |r, c| {
        report.eigenvectors[(c, kept[r])].conj() * report.eigenvalues[kept[r]].sqrt()
    });
    Ok(QuotientSpace {
        rank,
        isometry,
        gram_sqrt,
        tol: report.tol,
    })
}

/// Moves every generator `steps` places away from the reflection plane.
pub fn time_shift(k: &Monomial, steps: i64) -> Result<Option<Monomial>> {
    if steps < 0 {
        return Err(Error::InvalidArgument(format!("shift by {steps} steps")));
    }
    let steps = steps as usize;
    let e = k.exponents();
    let m = e.len();
    if e.iter().enumerate().any(|(j, &x)| x != 0 && j + steps >= m) {
        return Ok(None);
    }
    let mut shifted = vec![0u32; m];
    for (j, &x) in e.iter().enumerate() {
        if x != 0 {
            shifted[j + steps] = x;
        }
    }
    Ok(Some(Monomial::new_unchecked(shifted)))
}

/// Index of `shift(b, steps)` within `basis`, when it stays inside.
pub fn monomial_shift_map(basis: &[Monomial], steps: usize) -> Vec<Option<usize>> {
    basis
        .iter()
        .map(|k| {
            let moved = time_shift(k, steps as i64).ok().flatten()?;
            basis.iter().position(|b| *b == moved)
        })
        .collect()
}

/// The map applied `k` times.
pub fn iterate_shift(map: &[Option<usize>], k: usize) -> Vec<Option<usize>> {
    (0..map.len())
        .map(|b| (0..k).try_fold(b, |x, _| map[x]))
        .collect()
}

#[derive(Debug, Clone)]
pub struct TransferData {
    /// `T` on the span of the shift's domain, in the orthonormal frame `domain`.
    pub transfer: CMat,
    pub hamiltonian: CMat,
    pub dt: f64,
    pub steps: usize,
    /// Orthonormal frame of the domain inside quotient coordinates.
    pub domain: CMat,
    pub transfer_eigenvalues: Vec<f64>,
    /// Finite energies, ascending.
    pub energies: Vec<f64>,
    /// Kernel directions of `T`.
    pub infinite_energy: usize,
    /// Eigenvalues of `T` below `-tol`; excluded from `H`.
    pub negative_modes: usize,
    pub well_defined_residual: f64,
    pub symmetry_defect: f64,
    pub tol: f64,
}

impl TransferData {
    /// Transfer data from a Hermitian `T` given in an orthonormal frame.
    pub fn from_transfer(t: &CMat, steps: usize, tol: f64) -> Self {
        let symmetry_defect = hermiticity_defect(t);
        let t = hermitian_part(t);
        let r = t.nrows();
        let (values, vectors) = hermitian_eigen(&t);
        let dt = steps.max(1) as f64;
        let mut energies = Vec::new();
        let mut h = CMat::zeros(r, r);
        for (i, &tau) in values.iter().enumerate() {
            if tau > tol {
                let e = if steps == 0 { 0.0 } else { -tau.ln() / dt };
                energies.push(e);
                let v = vectors.column(i);
                h += (v * v.adjoint()) * Complex64::new(e, 0.0);
            }
        }
        energies.sort_by(f64::total_cmp);
        TransferData {
            infinite_energy: values.iter().filter(|t| t.abs() <= tol).count(),
            negative_modes: values.iter().filter(|&&t| t < -tol).count(),
            transfer: t,
            hamiltonian: h,
            dt,
            steps,
            domain: CMat::identity(r, r),
            transfer_eigenvalues: values,
            energies,
            well_defined_residual: 0.0,
            symmetry_defect,
            tol,
        }
    }

    pub fn min_transfer_eig(&self) -> f64 {
        self.transfer_eigenvalues.first().copied().unwrap_or(0.0)
    }

    pub fn norm(&self) -> f64 {
        self.transfer_eigenvalues.iter().fold(0.0, |acc, t| acc.max(t.abs()))
    }

    pub fn positive(&self) -> bool {
        self.min_transfer_eig() >= -self.tol
    }

    pub fn contraction(&self) -> bool {
        self.norm() <= 1.0 + self.tol
    }

    pub fn min_energy(&self) -> Option<f64> {
        self.energies.first().copied()
    }

    /// `T` as an operator on the whole quotient, zero off the domain.
    pub fn embedded(&self) -> CMat {
        &self.domain * &self.transfer * self.domain.adjoint()
    }
}

/// Orthonormal frame of the column span, singular values above `cutoff`.
fn column_frame(x: &CMat, cutoff: f64) -> (CMat, Vec<f64>, CMat) {
    if x.ncols() == 0 || x.nrows() == 0 {
        return (CMat::zeros(x.nrows(), 0), Vec::new(), CMat::zeros(0, x.ncols()));
    }
    let svd = x.clone().svd(true, true);
    let u = svd.u.expect("requested");
    let v_t = svd.v_t.expect("requested");
    let kept: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| svd.singular_values[i] > cutoff)
        .collect();
    let frame = CMat::from_fn(x.nrows(), kept.len(), |r, c| u[(r, kept[c])]);
    let values = kept.iter().map(|&i| svd.singular_values[i]).collect();
    let rows = CMat::from_fn(kept.len(), x.ncols(), |r, c| v_t[(kept[r], c)]);
    (frame, values, rows)
}

/// One quantized shift step. `shift[b]` is the index of the shifted basis
/// element `b`, and the map represents `steps` lattice steps.
pub fn transfer_operator(
    report: &GramReport,
    q: &QuotientSpace,
    shift: &[Option<usize>],
    steps: usize,
) -> Result<TransferData> {
    if shift.len() != report.dim() {
        return Err(Error::InvalidArgument("shift map does not match the basis".into()));
    }
    let pairs: Vec<(usize, usize)> = shift
        .iter()
        .enumerate()
        .filter_map(|(b, s)| s.map(|t| (b, t)))
        .collect();
    let f = &q.gram_sqrt;
    let x_d = CMat::from_fn(q.rank, pairs.len(), |r, c| f[(r, pairs[c].0)]);
    let x_s = CMat::from_fn(q.rank, pairs.len(), |r, c| f[(r, pairs[c].1)]);
    let (frame, singular, rows) = column_frame(&x_d, q.tol.sqrt());

    // T = X_S X_D^+ ; X_D^+ = V Σ^-1 Uᴴ.
    let k = singular.len();
    let inv_sigma = CMat::from_fn(k, k, |r, c| {
        if r == c {
            Complex64::new(1.0 / singular[r], 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    let pinv = rows.adjoint() * inv_sigma * frame.adjoint();
    let t_full = &x_s * &pinv;

    let leak = &x_s - &t_full * &x_d;
    let well_defined_residual = max_abs(&leak);
    if well_defined_residual > WELL_DEFINED_GATE {
        let (_, _, worst) = column_frame(&leak, 0.0);
        let mut vector = vec![Complex64::new(0.0, 0.0); report.dim()];
        if worst.nrows() > 0 {
            for (c, &(b, _)) in pairs.iter().enumerate() {
                vector[b] = worst[(0, c)].conj();
            }
        }
        return Err(Error::IllDefined {
            residual: well_defined_residual,
            vector,
        });
    }

    let compressed = frame.adjoint() * &t_full * &frame;
    let defect = hermiticity_defect(&compressed);
    if defect > SYMMETRY_GATE {
        return Err(Error::NotShiftInvariant { defect });
    }
    let mut td = TransferData::from_transfer(&compressed, steps, q.tol);
    td.domain = frame;
    td.well_defined_residual = well_defined_residual;
    Ok(td)
}

/// `max |T_k - P_k (T_1)^k P_k|`, comparing the k-step transfer with the
/// k-th power of the one-step transfer on the k-step domain.
pub fn semigroup_residual(one: &TransferData, k_step: &TransferData) -> f64 {
    let full = one.embedded();
    let power = (0..k_step.steps).fold(CMat::identity(full.nrows(), full.nrows()), |acc, _| &acc * &full);
    let projected = k_step.domain.adjoint() * power * &k_step.domain;
    max_abs(&(projected - &k_step.transfer))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumReport {
    pub energies: Vec<f64>,
    pub gap: f64,
}

pub fn spectrum_report(td: &TransferData) -> SpectrumReport {
    let energies = td.energies.clone();
    let gap = if energies.len() >= 2 { energies[1] - energies[0] } else { 0.0 };
    SpectrumReport { energies, gap }
}
