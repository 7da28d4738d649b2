//! Two-string boxes: operators on `C^d ⊗ C^d` drawn with two strings in and
//! two strings out.
//!
//! Entries are indexed `T[(o1,o2),(i1,i2)]` with the outputs on top and the
//! inputs at the bottom, each read left to right; the pair `(x1,x2)` is stored
//! at row or column `x1·d + x2`. Vertical stacking is the matrix product.

use num_complex::Complex64;
use rand::Rng;

use crate::algebra::root_of_unity;
use crate::error::{Error, Result};
use crate::linalg::{max_abs, CMat};

#[derive(Debug, Clone, PartialEq)]
pub struct Box22 {
    d: usize,
    data: CMat,
}

impl Box22 {
    pub fn new(d: usize, data: CMat) -> Result<Self> {
        let n = d * d;
        if d < 2 || data.nrows() != n || data.ncols() != n {
            return Err(Error::InvalidArgument(format!(
                "box data is {}x{}, expected {n}x{n}",
                data.nrows(),
                data.ncols()
            )));
        }
        Ok(Box22 { d, data })
    }

    pub fn from_fn(d: usize, f: impl Fn(usize, usize, usize, usize) -> Complex64) -> Self {
        let data = CMat::from_fn(d * d, d * d, |r, c| f(r / d, r % d, c / d, c % d));
        Box22 { d, data }
    }

    pub fn identity(d: usize) -> Self {
        Box22 {
            d,
            data: CMat::identity(d * d, d * d),
        }
    }

    pub fn random<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Self {
        let n = d * d;
        let data = CMat::from_fn(n, n, |_, _| {
            Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        });
        Box22 { d, data }
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn data(&self) -> &CMat {
        &self.data
    }

    pub fn entry(&self, o1: usize, o2: usize, i1: usize, i2: usize) -> Complex64 {
        self.data[(o1 * self.d + o2, i1 * self.d + i2)]
    }

    fn remap(&self, f: impl Fn(usize, usize, usize, usize) -> Complex64) -> Self {
        Self::from_fn(self.d, f)
    }

    /// Vertical composition: `self` stacked on top of `other`.
    pub fn mul(&self, other: &Box22) -> Result<Box22> {
        if self.d != other.d {
            return Err(Error::InvalidArgument("boxes have different string dimensions".into()));
        }
        Ok(Box22 {
            d: self.d,
            data: &self.data * &other.data,
        })
    }

    pub fn add(&self, other: &Box22) -> Result<Box22> {
        if self.d != other.d {
            return Err(Error::InvalidArgument("boxes have different string dimensions".into()));
        }
        Ok(Box22 {
            d: self.d,
            data: &self.data + &other.data,
        })
    }

    pub fn scale(&self, z: Complex64) -> Box22 {
        Box22 {
            d: self.d,
            data: &self.data * z,
        }
    }

    /// Vertical reflection.
    pub fn adjoint(&self) -> Box22 {
        Box22 {
            d: self.d,
            data: self.data.adjoint(),
        }
    }

    /// Horizontal reflection: mirror left and right, conjugate entries.
    pub fn theta(&self) -> Box22 {
        self.remap(|o1, o2, i1, i2| self.entry(o2, o1, i2, i1).conj())
    }

    /// Half-turn rotation.
    pub fn rot_pi(&self) -> Box22 {
        self.remap(|o1, o2, i1, i2| self.entry(i2, i1, o2, o1))
    }

    /// Quarter turn of the boundary strings: `sft(T)[(a,c),(b,e)] = T[(c,e),(a,b)]`.
    pub fn sft(&self) -> Box22 {
        self.remap(|a, c, b, e| self.entry(c, e, a, b))
    }

    pub fn sft_inv(&self) -> Box22 {
        self.remap(|c, e, a, b| self.entry(a, c, b, e))
    }

    pub fn trace(&self) -> Complex64 {
        self.data.trace()
    }

    pub fn distance(&self, other: &Box22) -> f64 {
        max_abs(&(&self.data - &other.data))
    }
}

/// Horizontal product, `X ∗ Y = sft(sft⁻¹X · sft⁻¹Y)`.
pub fn star_product(x: &Box22, y: &Box22) -> Result<Box22> {
    Ok(x.sft_inv().mul(&y.sft_inv())?.sft())
}

/// `Σ_x |x,x⟩`.
pub fn cup(d: usize) -> Vec<Complex64> {
    (0..d * d)
        .map(|r| {
            if r / d == r % d {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .collect()
}

/// `sft(1) = |cup⟩⟨cup|`, the unit of the horizontal product.
pub fn cup_cap(d: usize) -> Box22 {
    Box22::from_fn(d, |o1, o2, i1, i2| {
        if o1 == o2 && i1 == i2 {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

/// Unnormalized transform `F[j] = Σ_k v[k] q^{jk}` with `q = exp(2πi/d)`.
pub fn dft_zd(v: &[Complex64]) -> Vec<Complex64> {
    let d = v.len() as u32;
    (0..d as i64)
        .map(|j| {
            v.iter()
                .enumerate()
                .map(|(k, &x)| x * root_of_unity(d, j * k as i64))
                .sum()
        })
        .collect()
}

pub fn cyclic_convolution(u: &[Complex64], v: &[Complex64]) -> Result<Vec<Complex64>> {
    if u.len() != v.len() {
        return Err(Error::InvalidArgument("sequences have different lengths".into()));
    }
    let d = u.len();
    Ok((0..d)
        .map(|z| (0..d).map(|x| u[x] * v[(z + d - x) % d]).sum())
        .collect())
}

/// `Σ_g a_g Z^g ⊗ Z^{-g}`: the group algebra of `Z_d` as neutral two-string boxes.
pub fn group_algebra_box(a: &[Complex64]) -> Box22 {
    let d = a.len();
    let symbol = dft_zd(a);
    Box22::from_fn(d, |o1, o2, i1, i2| {
        if o1 == i1 && o2 == i2 {
            symbol[(o1 + d - o2) % d]
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

/// Box with `u[(x - y) mod d]` between `|x,x⟩` and `⟨y,y|`, zero elsewhere.
pub fn circulant_box(u: &[Complex64]) -> Box22 {
    let d = u.len();
    Box22::from_fn(d, |o1, o2, i1, i2| {
        if o1 == o2 && i1 == i2 {
            u[(o1 + d - i1) % d]
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

/// Largest deviation in the two faces of the convolution theorem for the
/// group algebra of `Z_d`: `sft(A·B)` against the pointwise product of the
/// circulant symbols, and the vertical product of circulants against the
/// cyclic convolution of their sequences.
pub fn convolution_residual(a: &[Complex64], b: &[Complex64]) -> Result<f64> {
    let (sa, sb) = (dft_zd(a), dft_zd(b));
    let pointwise: Vec<Complex64> = sa.iter().zip(&sb).map(|(x, y)| x * y).collect();
    let product = group_algebra_box(a).mul(&group_algebra_box(b))?;
    let face1 = product.sft().distance(&circulant_box(&pointwise));
    let vertical = circulant_box(&sa).mul(&circulant_box(&sb))?;
    let face2 = vertical.distance(&circulant_box(&cyclic_convolution(&sa, &sb)?));
    Ok(face1.max(face2))
}

/// Places a coupling matrix `K` across the reflection plane:
/// `T[(o1,o2),(i1,i2)] = K[i1,i2]` when both outputs are 0.
pub fn coupling_box(k: &CMat) -> Result<Box22> {
    let n = k.nrows();
    if k.ncols() != n {
        return Err(Error::InvalidArgument("coupling matrix must be square".into()));
    }
    let n = n.max(2);
    Ok(Box22::from_fn(n, |o1, o2, i1, i2| {
        if o1 == 0 && o2 == 0 && i1 < k.nrows() && i2 < k.nrows() {
            k[(i1, i2)]
        } else {
            Complex64::new(0.0, 0.0)
        }
    }))
}

/// `sft(coupling_box(K))` restricted to its support `{|a,0⟩}`, together with
/// the largest entry found outside that support.
pub fn reshuffled_coupling(k: &CMat) -> Result<(CMat, f64)> {
    let b = coupling_box(k)?.sft();
    let n = k.nrows();
    let d = b.d();
    let mut outside: f64 = 0.0;
    for r in 0..d * d {
        for c in 0..d * d {
            let on = r % d == 0 && c % d == 0 && r / d < n && c / d < n;
            if !on {
                outside = outside.max(b.data[(r, c)].norm());
            }
        }
    }
    let block = CMat::from_fn(n, n, |a, c| b.entry(a, 0, c, 0));
    Ok((block, outside))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn rotation_of_reflection_is_adjoint() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        for d in 2..=4 {
            let t = Box22::random(d, &mut rng);
            assert_eq!(t.theta().rot_pi(), t.adjoint());
        }
    }

    #[test]
    fn sft_has_order_four() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
        let t = Box22::random(3, &mut rng);
        assert_eq!(t.sft().sft().sft().sft(), t);
        assert_eq!(t.sft().sft_inv(), t);
        assert_ne!(t.sft(), t);
    }

    #[test]
    fn sft_of_identity_is_cup_cap() {
        for d in 2..=4 {
            assert_eq!(Box22::identity(d).sft(), cup_cap(d));
        }
    }

    #[test]
    fn trace_through_cup() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let t = Box22::random(3, &mut rng);
        let omega = crate::linalg::CVec::from_vec(cup(3));
        let paired = (omega.adjoint() * t.sft().data() * &omega)[(0, 0)];
        assert!((paired - t.trace()).norm() < 1e-14);
    }

    #[test]
    fn dft_examples() {
        assert_eq!(dft_zd(&[c(1.0), c(0.0)]), vec![c(1.0), c(1.0)]);
        assert_eq!(dft_zd(&[c(1.0), c(1.0)]), vec![c(2.0), c(0.0)]);
        let e0 = [c(1.0), c(0.0), c(0.0)];
        let e1 = [c(0.0), c(1.0), c(0.0)];
        let conv = cyclic_convolution(&e0, &e1).unwrap();
        assert_eq!(conv, e1.to_vec());
        let lhs = dft_zd(&conv);
        let rhs: Vec<_> = dft_zd(&e0).iter().zip(dft_zd(&e1)).map(|(a, b)| a * b).collect();
        for (a, b) in lhs.iter().zip(&rhs) {
            assert!((a - b).norm() < 1e-15);
        }
    }

    #[test]
    fn group_algebra_goes_to_circulants() {
        let a = [c(1.0), c(0.0)];
        let b = [c(0.0), c(1.0)];
        let sa = group_algebra_box(&a).sft();
        let sb = group_algebra_box(&b).sft();
        assert_eq!(sa, circulant_box(&[c(1.0), c(1.0)]));
        assert_eq!(sb, circulant_box(&[c(1.0), c(-1.0)]));
        let prod = star_product(&sa, &sb).unwrap();
        assert!(prod.distance(&circulant_box(&[c(1.0), c(-1.0)])) < 1e-15);
    }

    #[test]
    fn convolution_theorem_holds() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        for d in 2..=4 {
            let a: Vec<Complex64> = (0..d).map(|_| crate::algebra::random::random_coeff(&mut rng)).collect();
            let b: Vec<Complex64> = (0..d).map(|_| crate::algebra::random::random_coeff(&mut rng)).collect();
            assert!(convolution_residual(&a, &b).unwrap() < 1e-12);
        }
        assert!(convolution_residual(&[c(1.0)], &[c(1.0), c(0.0)]).is_err());
    }

    #[test]
    fn cup_cap_is_unit() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
        let x = Box22::random(2, &mut rng);
        assert!(star_product(&x, &cup_cap(2)).unwrap().distance(&x) < 1e-15);
    }

    #[test]
    fn shape_errors() {
        assert!(Box22::new(2, CMat::zeros(3, 4)).is_err());
        let x = Box22::identity(2);
        let y = Box22::identity(3);
        assert!(x.mul(&y).is_err());
        assert!(star_product(&x, &y).is_err());
        assert!(cyclic_convolution(&[c(1.0)], &[c(1.0), c(2.0)]).is_err());
    }

    #[test]
    fn reshuffled_coupling_recovers_block() {
        let k = CMat::from_row_slice(3, 3, &[2.0, 1.0, 0.0, 1.0, 2.0, 1.0, 0.0, 1.0, 2.0].map(c));
        let (block, outside) = reshuffled_coupling(&k).unwrap();
        assert_eq!(block, k);
        assert_eq!(outside, 0.0);
    }
}
