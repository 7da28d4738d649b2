use std::fmt;

use num_complex::Complex64;

use super::{root_of_unity, AlgebraConfig};
use crate::error::{Error, Result};
use crate::linalg::CMat;

/// Normal-ordered monomial `c_1^{k_1} ··· c_m^{k_m}` with exponents in `Z_d`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial(Vec<u32>);

/// Where a monomial lives relative to the reflection plane.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Support {
    Identity,
    /// Generators `1..=m/2` only.
    Minus,
    /// Generators `m/2+1..=m` only.
    Plus,
    Cross,
}

impl Monomial {
    pub fn new(cfg: &AlgebraConfig, exponents: &[i64]) -> Result<Self> {
        if exponents.len() != cfg.m() {
            return Err(Error::InvalidArgument(format!(
                "exponent tuple has length {}, expected {}",
                exponents.len(),
                cfg.m()
            )));
        }
        let d = cfg.d() as i64;
        Ok(Monomial(
            exponents.iter().map(|&k| k.rem_euclid(d) as u32).collect(),
        ))
    }


    pub(crate) fn new_unchecked(exponents: Vec<u32>) -> Self {
        Monomial(exponents)
    }

    pub fn identity(cfg: &AlgebraConfig) -> Self {
        Monomial(vec![0; cfg.m()])
    }

    /// The generator `c_j`, counted from 1.
    pub fn generator(cfg: &AlgebraConfig, j: usize) -> Result<Self> {
        if j == 0 || j > cfg.m() {
            return Err(Error::InvalidArgument(format!(
                "generator index {j} outside 1..={}",
                cfg.m()
            )));
        }
        let mut k = vec![0; cfg.m()];
        k[j - 1] = 1;
        Ok(Monomial(k))
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().all(|&k| k == 0)
    }

    pub fn grade(&self, d: u32) -> u32 {
        (self.0.iter().map(|&k| k as u64).sum::<u64>() % d as u64) as u32
    }

    pub fn support(&self) -> Support {
        let half = self.0.len() / 2;
        let minus = self.0[..half].iter().any(|&k| k != 0);
        let plus = self.0[half..].iter().any(|&k| k != 0);
        match (minus, plus) {
            (false, false) => Support::Identity,
            (true, false) => Support::Minus,
            (false, true) => Support::Plus,
            (true, true) => Support::Cross,
        }
    }

    pub fn in_plus(&self) -> bool {
        matches!(self.support(), Support::Identity | Support::Plus)
    }

    pub fn in_minus(&self) -> bool {
        matches!(self.support(), Support::Identity | Support::Minus)
    }

    /// `M_k M_l = q^e M_{k+l}`; returns `(e, M_{k+l})`.
    pub fn mul(&self, other: &Monomial, d: u32) -> (i64, Monomial) {
        let mut phase = 0i64;
        let mut tail = 0i64;
        for j in (0..self.0.len()).rev() {
            phase -= tail * other.0[j] as i64;
            tail += self.0[j] as i64;
        }
        let k = self
            .0
            .iter()
            .zip(&other.0)
            .map(|(&a, &b)| (a + b) % d)
            .collect();
        (phase, Monomial(k))
    }

    /// `Θ(M_k) = q^e M_{k'}` with `Θ(c_j) = c_{m+1-j}^*`.
    pub fn theta(&self, d: u32) -> (i64, Monomial) {
        let e: Vec<u32> = self.0.iter().rev().map(|&k| (d - k) % d).collect();
        (descending_phase(&e), Monomial(e))
    }

    /// `M_k^* = q^e M_{k'}`.
    pub fn star(&self, d: u32) -> (i64, Monomial) {
        let e: Vec<u32> = self.0.iter().map(|&k| (d - k) % d).collect();
        (descending_phase(&e), Monomial(e))
    }

    /// Exponents restricted to generators `m/2+1..=m`.
    pub fn plus_part(&self) -> &[u32] {
        &self.0[self.0.len() / 2..]
    }

    pub fn minus_part(&self) -> &[u32] {
        &self.0[..self.0.len() / 2]
    }
}

/// q-exponent that reorders `c_m^{e_m} ··· c_1^{e_1}` into normal order.
fn descending_phase(e: &[u32]) -> i64 {
    let mut phase = 0i64;
    let mut head = 0i64;
    for &x in e {
        phase -= head * x as i64;
        head += x as i64;
    }
    phase
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_identity() {
            return write!(f, "1");
        }
        let mut first = true;
        for (j, &k) in self.0.iter().enumerate() {
            if k == 0 {
                continue;
            }
            if !first {
                write!(f, " ")?;
            }
            first = false;
            if k == 1 {
                write!(f, "c{}", j + 1)?;
            } else {
                write!(f, "c{}^{}", j + 1, k)?;
            }
        }
        Ok(())
    }
}

/// Matrix of a monomial: exactly one nonzero per row, each a power of
/// `exp(iπ/d)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonomialRep {
    d: u32,
    cols: Vec<usize>,
    /// Phase exponents mod 2d.
    phases: Vec<u32>,
}

impl MonomialRep {
    fn local(d: u32, cols: Vec<usize>, phases: Vec<u32>) -> Self {
        MonomialRep { d, cols, phases }
    }

    fn identity(d: u32, n: usize) -> Self {
        MonomialRep::local(d, (0..n).collect(), vec![0; n])
    }

    fn clock(d: u32) -> Self {
        let n = d as usize;
        MonomialRep::local(d, (0..n).collect(), (0..d).map(|k| 2 * k).collect())
    }

    fn shift(d: u32) -> Self {
        let n = d as usize;
        MonomialRep::local(d, (0..n).map(|r| (r + 1) % n).collect(), vec![0; n])
    }

    fn times(&self, other: &MonomialRep) -> MonomialRep {
        let period = 2 * self.d;
        let cols = self.cols.iter().map(|&c| other.cols[c]).collect();
        let phases = self
            .cols
            .iter()
            .zip(&self.phases)
            .map(|(&c, &p)| (p + other.phases[c]) % period)
            .collect();
        MonomialRep::local(self.d, cols, phases)
    }

    fn power(&self, k: u32) -> MonomialRep {
        let mut out = MonomialRep::identity(self.d, self.cols.len());
        for _ in 0..k {
            out = out.times(self);
        }
        out
    }

    fn kron(&self, other: &MonomialRep) -> MonomialRep {
        let period = 2 * self.d;
        let nb = other.cols.len();
        let n = self.cols.len() * nb;
        let mut cols = Vec::with_capacity(n);
        let mut phases = Vec::with_capacity(n);
        for (&ca, &pa) in self.cols.iter().zip(&self.phases) {
            for (&cb, &pb) in other.cols.iter().zip(&other.phases) {
                cols.push(ca * nb + cb);
                phases.push((pa + pb) % period);
            }
        }
        MonomialRep::local(self.d, cols, phases)
    }

    /// Representation of `c_1^{k_1} ··· c_m^{k_m}`.
    ///
    /// Generator `2s+1` acts as `U^{⊗s} ⊗ V ⊗ 1`, generator `2s+2` as
    /// `χ U^{⊗s} ⊗ VU ⊗ 1` with `χ = exp(iπ(d-1)/d)`, which makes every
    /// generator a d-th root of the identity. On factor `s` the ordered product
    /// collapses to `V^a (VU)^b U^L` where `L` sums the exponents of all later
    /// generators.
    pub fn new(cfg: &AlgebraConfig, k: &Monomial) -> MonomialRep {
        let d = cfg.d();
        let sites = cfg.half();
        let e = k.exponents();
        let (u, v) = (MonomialRep::clock(d), MonomialRep::shift(d));
        let vu = v.times(&u);
        let mut later: u32 = e.iter().sum();
        let mut out = MonomialRep::identity(d, 1);
        let mut chi_count = 0u32;
        for s in 0..sites {
            let (a, b) = (e[2 * s], e[2 * s + 1]);
            later -= a + b;
            chi_count += b;
            let local = v.power(a).times(&vu.power(b)).times(&u.power(later % d));
            out = out.kron(&local);
        }
        let shift = ((d - 1) * chi_count) % (2 * d);
        for p in &mut out.phases {
            *p = (*p + shift) % (2 * d);
        }
        out
    }

    pub fn dim(&self) -> usize {
        self.cols.len()
    }

    pub fn col(&self, row: usize) -> usize {
        self.cols[row]
    }

    pub fn value(&self, row: usize) -> Complex64 {
        root_of_unity(2 * self.d, self.phases[row] as i64)
    }

    pub fn to_dense(&self) -> CMat {
        let n = self.dim();
        let mut m = CMat::zeros(n, n);
        for r in 0..n {
            m[(r, self.cols[r])] = self.value(r);
        }
        m
    }

    /// `Tr(ρ M)`.
    pub fn trace_against(&self, rho: &CMat) -> Complex64 {
        (0..self.dim())
            .map(|r| rho[(self.cols[r], r)] * self.value(r))
            .sum()
    }

    /// Accumulates `coeff · M` into a dense matrix.
    pub fn add_to(&self, target: &mut CMat, coeff: Complex64) {
        for r in 0..self.dim() {
            target[(r, self.cols[r])] += coeff * self.value(r);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn display_and_support() {
        let cfg = AlgebraConfig::new(3, 4).unwrap();
        let k = Monomial::new(&cfg, &[0, 0, 1, 2]).unwrap();
        assert_eq!(k.to_string(), "c3 c4^2");
        assert_eq!(k.support(), Support::Plus);
        assert_eq!(k.grade(3), 0);
        assert_eq!(Monomial::identity(&cfg).to_string(), "1");
        assert_eq!(Monomial::new(&cfg, &[1, 0, 0, 1]).unwrap().support(), Support::Cross);
        assert_eq!(Monomial::new(&cfg, &[-1, 0, 0, 0]).unwrap().exponents(), &[2, 0, 0, 0]);
        assert!(Monomial::new(&cfg, &[1, 0]).is_err());
    }

    #[test]
    fn symbolic_product_matches_matrices() {
        let cfg = AlgebraConfig::new(3, 4).unwrap();
        let a = Monomial::new(&cfg, &[2, 1, 0, 1]).unwrap();
        let b = Monomial::new(&cfg, &[1, 2, 2, 0]).unwrap();
        let (e, ab) = a.mul(&b, 3);
        let lhs = MonomialRep::new(&cfg, &a).to_dense() * MonomialRep::new(&cfg, &b).to_dense();
        let rhs = MonomialRep::new(&cfg, &ab).to_dense() * cfg.q_pow(e);
        assert!(crate::linalg::max_abs(&(lhs - rhs)) < 1e-13);
    }

    #[test]
    fn star_matches_adjoint() {
        let cfg = AlgebraConfig::new(4, 4).unwrap();
        let a = Monomial::new(&cfg, &[3, 1, 2, 1]).unwrap();
        let (e, s) = a.star(4);
        let lhs = MonomialRep::new(&cfg, &a).to_dense().adjoint();
        let rhs = MonomialRep::new(&cfg, &s).to_dense() * cfg.q_pow(e);
        assert!(crate::linalg::max_abs(&(lhs - rhs)) < 1e-13);
    }
}
