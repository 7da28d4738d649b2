//! Degree-d parafermion algebra on m generators.
//!
//! Generators satisfy `c_j^d = 1` and `c_i c_j = q c_j c_i` for `i < j`, with
//! `q = exp(2πi/d)`. They are realized on `(C^d)^{⊗ m/2}` by a Jordan–Wigner
//! pairing of clock and shift matrices, two generators per tensor factor.
//! Elements carry both a coefficient table over normal-ordered monomials and a
//! dense matrix, and the two are kept consistent.

mod element;
mod monomial;
pub mod random;
mod state;

pub use element::{build_algebra, theta, twisted_product, AlgebraElement};
pub use monomial::{Monomial, MonomialRep, Support};
pub use state::{StateFunctional, StateKind};

use crate::error::{check_cap, Error, Result, DEFAULT_SIZE_CAP};
use crate::linalg::CMat;
use num_complex::Complex64;

/// `exp(2πi k / n)`, exact at the quarter turns.
pub fn root_of_unity(n: u32, k: i64) -> Complex64 {
    let n64 = n as i64;
    let r = k.rem_euclid(n64);
    if r == 0 {
        Complex64::new(1.0, 0.0)
    } else if 2 * r == n64 {
        Complex64::new(-1.0, 0.0)
    } else if 4 * r == n64 {
        Complex64::new(0.0, 1.0)
    } else if 4 * r == 3 * n64 {
        Complex64::new(0.0, -1.0)
    } else {
        let angle = 2.0 * std::f64::consts::PI * r as f64 / n as f64;
        Complex64::new(angle.cos(), angle.sin())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct AlgebraConfig {
    d: u32,
    m: usize,
    size_cap: usize,
}

impl AlgebraConfig {
    pub fn new(d: u32, m: usize) -> Result<Self> {
        Self::with_cap(d, m, DEFAULT_SIZE_CAP)
    }

    pub fn with_cap(d: u32, m: usize, size_cap: usize) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidConfig(format!("degree d = {d} must be at least 2")));
        }
        if m == 0 || m % 2 == 1 {
            return Err(Error::InvalidConfig(format!(
                "generator count m = {m} must be even and positive"
            )));
        }
        let dim = (d as usize)
            .checked_pow((m / 2) as u32)
            .unwrap_or(usize::MAX);
        check_cap("representation dimension", dim, size_cap)?;
        Ok(AlgebraConfig { d, m, size_cap })
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Number of generators on each side of the reflection plane.
    pub fn half(&self) -> usize {
        self.m / 2
    }

    pub fn dim(&self) -> usize {
        (self.d as usize).pow(self.half() as u32)
    }

    pub fn size_cap(&self) -> usize {
        self.size_cap
    }

    pub fn q(&self) -> Complex64 {
        root_of_unity(self.d, 1)
    }

    /// Exponent `s` with `zeta = exp(iπ s/d)`.
    ///
    /// For even d this is `exp(iπ/d)`. For odd d the other square root of q,
    /// `-exp(iπ/d)`, is used so that `zeta^(d·d) = 1` and the twist phase only
    /// depends on grades mod d.
    fn zeta_step(&self) -> i64 {
        if self.d.is_multiple_of(2) {
            1
        } else {
            self.d as i64 + 1
        }
    }

    pub fn zeta(&self) -> Complex64 {
        self.zeta_pow(1)
    }

    pub fn zeta_pow(&self, n: i64) -> Complex64 {
        root_of_unity(2 * self.d, self.zeta_step() * n)
    }

    pub fn q_pow(&self, n: i64) -> Complex64 {
        root_of_unity(self.d, n)
    }
}

/// Clock `U = diag(q^k)` and shift `V|k> = |k-1>`, so that `VU = qUV`.
pub fn clock_shift(d: u32) -> Result<(CMat, CMat)> {
    if d < 2 {
        return Err(Error::InvalidConfig(format!("degree d = {d} must be at least 2")));
    }
    let n = d as usize;
    let u = CMat::from_fn(n, n, |r, c| {
        if r == c {
            root_of_unity(d, r as i64)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    let v = CMat::from_fn(n, n, |r, c| {
        if c == (r + 1) % n {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    Ok((u, v))
}
