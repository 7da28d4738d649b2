//! Dense Hermitian helpers shared by the verifiers.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type CMat = DMatrix<Complex64>;
pub type CVec = DVector<Complex64>;
pub type RMat = DMatrix<f64>;
pub type RVec = DVector<f64>;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

pub fn max_abs(m: &CMat) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

pub fn max_abs_real(m: &RMat) -> f64 {
    m.iter().fold(0.0, |acc, x| acc.max(x.abs()))
}

pub fn hermiticity_defect(m: &CMat) -> f64 {
    max_abs(&(m - m.adjoint()))
}

pub fn hermitian_part(m: &CMat) -> CMat {
    (m + m.adjoint()).scale(0.5)
}

/// Eigenpairs of the Hermitian part of `m`, eigenvalues ascending.
pub fn hermitian_eigen(m: &CMat) -> (Vec<f64>, CMat) {
    let n = m.nrows();
    if n == 0 {
        return (Vec::new(), CMat::zeros(0, 0));
    }
    let eig = hermitian_part(m).symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMat::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

/// Eigenpairs of the symmetric part of a real matrix, eigenvalues ascending.
pub fn symmetric_eigen(m: &RMat) -> (Vec<f64>, RMat) {
    let n = m.nrows();
    if n == 0 {
        return (Vec::new(), RMat::zeros(0, 0));
    }
    let eig = ((m + m.transpose()) * 0.5).symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = RMat::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

/// `f` applied to a Hermitian matrix through its spectral decomposition.
pub fn hermitian_fn(m: &CMat, f: impl Fn(f64) -> f64) -> CMat {
    let (values, vectors) = hermitian_eigen(m);
    let n = values.len();
    let scaled = CMat::from_fn(n, n, |r, c| vectors[(r, c)] * f(values[c]));
    scaled * vectors.adjoint()
}

pub fn to_complex(m: &RMat) -> CMat {
    m.map(|x| Complex64::new(x, 0.0))
}

/// Smallest eigenvalue with its unit eigenvector.
#[derive(Debug, Clone, PartialEq)]
pub struct PsdCheck {
    pub min_eig: f64,
    pub witness: CVec,
    pub eigenvalues: Vec<f64>,
    pub tol: f64,
}

impl PsdCheck {
    pub fn of_hermitian(m: &CMat, tol: f64) -> Self {
        let (eigenvalues, vectors) = hermitian_eigen(m);
        let (min_eig, witness) = if eigenvalues.is_empty() {
            (0.0, CVec::zeros(0))
        } else {
            (eigenvalues[0], vectors.column(0).into_owned())
        };
        PsdCheck {
            min_eig,
            witness,
            eigenvalues,
            tol,
        }
    }

    pub fn of_symmetric(m: &RMat, tol: f64) -> Self {
        let (eigenvalues, vectors) = symmetric_eigen(m);
        let (min_eig, witness) = if eigenvalues.is_empty() {
            (0.0, CVec::zeros(0))
        } else {
            (
                eigenvalues[0],
                vectors.column(0).map(|x| Complex64::new(x, 0.0)),
            )
        };
        PsdCheck {
            min_eig,
            witness,
            eigenvalues,
            tol,
        }
    }

    pub fn psd(&self) -> bool {
        self.min_eig >= -self.tol
    }

    /// PSD at tolerance but with a slightly negative smallest eigenvalue.
    pub fn marginal(&self) -> bool {
        self.psd() && self.min_eig < 0.0
    }
}

pub fn quadratic_form(m: &CMat, v: &CVec) -> Complex64 {
    (v.adjoint() * m * v)[(0, 0)]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eigen_is_sorted_and_reconstructs() {
        let m = CMat::from_row_slice(
            3,
            3,
            &[
                Complex64::new(2.0, 0.0),
                Complex64::new(0.0, 1.0),
                ZERO,
                Complex64::new(0.0, -1.0),
                Complex64::new(-1.0, 0.0),
                ONE,
                ZERO,
                ONE,
                Complex64::new(0.5, 0.0),
            ],
        );
        let (values, vectors) = hermitian_eigen(&m);
        assert!(values.windows(2).all(|w| w[0] <= w[1]));
        let diag = CMat::from_diagonal(&CVec::from_iterator(
            3,
            values.iter().map(|&x| Complex64::new(x, 0.0)),
        ));
        let back = &vectors * diag * vectors.adjoint();
        assert!(max_abs(&(back - &m)) < 1e-12);
    }

    #[test]
    fn witness_attains_min_eig() {
        let m = RMat::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]);
        let check = PsdCheck::of_symmetric(&m, 1e-10);
        assert!((check.min_eig + 1.0).abs() < 1e-12);
        let q = quadratic_form(&to_complex(&m), &check.witness);
        assert!((q.re - check.min_eig).abs() < 1e-12);
        assert!(!check.psd());
    }

    #[test]
    fn marginal_flag() {
        let m = RMat::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1e-12]);
        let check = PsdCheck::of_symmetric(&m, 1e-10);
        assert!(check.psd() && check.marginal());
    }
}
