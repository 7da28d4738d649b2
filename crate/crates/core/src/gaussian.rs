//! Free lattice field: Green operators, half-space Dirichlet and Neumann
//! kernels by image charges, Gaussian moments, and the stochastic relaxation
//! covariance.
//!
//! Sites are stored row-major with the time axis first. The reflection is the
//! mid-bond time mirror `t -> T-1-t`; the positive half is `t >= T/2` and the
//! time shift moves it away from the plane, `t -> t+1`.

use std::collections::HashMap;

use crate::error::{check_cap, Error, Result, DEFAULT_SIZE_CAP};
use crate::linalg::{max_abs_real, to_complex, symmetric_eigen, PsdCheck, RMat, RVec};
use crate::verdict::Verdict;
use crate::verifier::{BasisLabel, GramReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundary {
    /// Field vanishes outside the box on every axis.
    Dirichlet,
    /// Periodic on every axis.
    Torus,
    /// Time axis continued to infinity outside the box (the exterior is
    /// integrated out exactly), other axes periodic. Kernels on the box are
    /// then the infinite-volume ones.
    Window,
}

impl Boundary {
    pub fn as_str(&self) -> &'static str {
        match self {
            Boundary::Dirichlet => "box-dirichlet",
            Boundary::Torus => "torus",
            Boundary::Window => "window",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LatticeModel {
    dims: Vec<usize>,
    mass2: f64,
    bc: Boundary,
    reflection: Vec<usize>,
}

impl LatticeModel {
    pub fn new(dims: &[usize], mass2: f64, bc: Boundary) -> Result<Self> {
        Self::with_cap(dims, mass2, bc, DEFAULT_SIZE_CAP)
    }

    pub fn with_cap(dims: &[usize], mass2: f64, bc: Boundary, cap: usize) -> Result<Self> {
        if dims.is_empty() || dims.iter().any(|&n| n < 2) {
            return Err(Error::InvalidConfig(format!(
                "lattice dims {dims:?} must be nonempty with every axis at least 2"
            )));
        }
        if !(mass2.is_finite() && mass2 > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "mass2 = {mass2} must be positive (singular operator otherwise)"
            )));
        }
        let volume = dims
            .iter()
            .try_fold(1usize, |acc, &n| acc.checked_mul(n))
            .unwrap_or(usize::MAX);
        check_cap("lattice volume", volume, cap)?;
        let slice = volume / dims[0];
        let t_len = dims[0];
        let reflection = (0..volume)
            .map(|x| (t_len - 1 - x / slice) * slice + x % slice)
            .collect();
        Ok(LatticeModel {
            dims: dims.to_vec(),
            mass2,
            bc,
            reflection,
        })
    }

    /// Replaces the time mirror by another involution exchanging the halves.
    pub fn with_reflection(mut self, r: Vec<usize>) -> Result<Self> {
        let n = self.volume();
        if r.len() != n || r.iter().any(|&y| y >= n) || (0..n).any(|x| r[r[x]] != x) {
            return Err(Error::InvalidGeometry("reflection must be an involution of the sites".into()));
        }
        let half = self.half();
        let mut image: Vec<usize> = half.iter().map(|&x| r[x]).collect();
        image.sort_unstable();
        let negative: Vec<usize> = (0..n).filter(|x| !half.contains(x)).collect();
        if image != negative {
            return Err(Error::InvalidGeometry(
                "reflection must exchange the positive and negative halves".into(),
            ));
        }
        self.reflection = r;
        Ok(self)
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn mass2(&self) -> f64 {
        self.mass2
    }

    pub fn bc(&self) -> Boundary {
        self.bc
    }

    pub fn reflection(&self) -> &[usize] {
        &self.reflection
    }

    pub fn volume(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn time_len(&self) -> usize {
        self.dims[0]
    }

    /// Sites in one time slice.
    pub fn slice(&self) -> usize {
        self.volume() / self.dims[0]
    }

    /// Sites with `2t >= T`, ascending.
    pub fn half(&self) -> Vec<usize> {
        let start = self.time_len().div_ceil(2) * self.slice();
        (start..self.volume()).collect()
    }

    /// `t -> t + steps`, or `None` past the last row.
    pub fn time_shift(&self, site: usize, steps: usize) -> Option<usize> {
        let t = site / self.slice() + steps;
        (t < self.time_len()).then(|| t * self.slice() + site % self.slice())
    }

    fn axis_neighbors(&self, site: usize, axis: usize) -> (Option<usize>, Option<usize>) {
        let stride: usize = self.dims[axis + 1..].iter().product();
        let n = self.dims[axis];
        let coord = (site / stride) % n;
        let base = site - coord * stride;
        let periodic = match self.bc {
            Boundary::Torus => true,
            Boundary::Dirichlet => false,
            Boundary::Window => axis != 0,
        };
        let up = if coord + 1 < n {
            Some(base + (coord + 1) * stride)
        } else if periodic {
            Some(base)
        } else {
            None
        };
        let down = if coord > 0 {
            Some(base + (coord - 1) * stride)
        } else if periodic {
            Some(base + (n - 1) * stride)
        } else {
            None
        };
        (up, down)
    }

    fn stencil(&self, axes: std::ops::Range<usize>, sites: usize, diag: f64) -> RMat {
        let mut a = RMat::zeros(sites, sites);
        for x in 0..sites {
            a[(x, x)] += diag;
            for axis in axes.clone() {
                a[(x, x)] += 2.0;
                let (up, down) = self.axis_neighbors(x, axis);
                for y in [up, down].into_iter().flatten() {
                    a[(x, y)] -= 1.0;
                }
            }
        }
        a
    }

    /// Boundary self-energy of a half-infinite time axis: the fixed point of
    /// `Σ = (B - Σ)^{-1}` with `B` the slice operator.
    fn exterior_self_energy(&self) -> RMat {
        let transverse = LatticeModel {
            dims: self.dims[1..].to_vec(),
            mass2: self.mass2,
            bc: Boundary::Torus,
            reflection: Vec::new(),
        };
        let s = self.slice();
        let b = if self.dims.len() == 1 {
            RMat::from_element(1, 1, 2.0 + self.mass2)
        } else {
            transverse.stencil(0..transverse.dims.len(), s, 2.0 + self.mass2)
        };
        let mut sigma = RMat::zeros(s, s);
        for _ in 0..100_000 {
            let next = (&b - &sigma)
                .cholesky()
                .expect("slice operator stays positive definite")
                .inverse();
            let change = max_abs_real(&(&next - &sigma));
            sigma = next;
            if change <= 4.0 * f64::EPSILON * max_abs_real(&sigma) {
                break;
            }
        }
        (&sigma + sigma.transpose()) * 0.5
    }
}

/// `A = -Δ + mass2` with the model's boundary condition.
pub fn lattice_operator(model: &LatticeModel) -> RMat {
    let n = model.volume();
    let mut a = model.stencil(0..model.dims.len(), n, model.mass2);
    if model.bc == Boundary::Window {
        let sigma = model.exterior_self_energy();
        let s = model.slice();
        for start in [0, n - s] {
            for i in 0..s {
                for j in 0..s {
                    a[(start + i, start + j)] -= sigma[(i, j)];
                }
            }
        }
    }
    a
}

#[derive(Debug, Clone)]
pub struct GreenSet {
    pub c: RMat,
    /// `C_r[x,y] = C[x, r y]`.
    pub c_r: RMat,
    pub c_d: RMat,
    pub c_n: RMat,
    pub half: Vec<usize>,
    pub reflection: Vec<usize>,
    /// One-step time shift of every site, when the geometry is known.
    pub time_step: Option<Vec<Option<usize>>>,
    /// Largest deviation of `C_D`, `C_N` from the half-space stencil inverses.
    pub stencil_residual: Option<f64>,
}

fn submatrix(m: &RMat, rows: &[usize], cols: &[usize]) -> RMat {
    RMat::from_fn(rows.len(), cols.len(), |i, j| m[(rows[i], cols[j])])
}

fn symmetric_inverse(m: &RMat) -> Result<RMat> {
    let inv = m
        .clone()
        .cholesky()
        .ok_or_else(|| Error::PreconditionViolation("operator is not positive definite".into()))?
        .inverse();
    Ok((&inv + inv.transpose()) * 0.5)
}

impl GreenSet {
    /// Kernels from an arbitrary covariance, without stencil self-check.
    pub fn from_covariance(c: RMat, reflection: Vec<usize>, half: Vec<usize>) -> Result<Self> {
        let n = c.nrows();
        if c.ncols() != n || reflection.len() != n || (0..n).any(|x| reflection[x] >= n || reflection[reflection[x]] != x) {
            return Err(Error::InvalidGeometry("covariance and reflection do not match".into()));
        }
        if half.iter().any(|&x| x >= n || reflection[x] == x || half.contains(&reflection[x])) {
            return Err(Error::InvalidGeometry("reflection must move every half-space site across the plane".into()));
        }
        let c_r = RMat::from_fn(n, n, |x, y| c[(x, reflection[y])]);
        let c_h = submatrix(&c, &half, &half);
        let c_rh = submatrix(&c_r, &half, &half);
        Ok(GreenSet {
            c_d: &c_h - &c_rh,
            c_n: &c_h + &c_rh,
            c,
            c_r,
            half,
            reflection,
            time_step: None,
            stencil_residual: None,
        })
    }

    pub fn reflected_half(&self) -> RMat {
        submatrix(&self.c_r, &self.half, &self.half)
    }
}

pub fn green_set(model: &LatticeModel) -> Result<GreenSet> {
    if model.time_len() % 2 == 1 {
        return Err(Error::InvalidGeometry(format!(
            "time axis length {} must be even for a mid-bond reflection",
            model.time_len()
        )));
    }
    let a = lattice_operator(model);
    let c = symmetric_inverse(&a)?;
    let half = model.half();
    let mut gs = GreenSet::from_covariance(c, model.reflection.clone(), half.clone())?;
    let mirrored: Vec<usize> = half.iter().map(|&x| model.reflection[x]).collect();
    let a_pp = submatrix(&a, &half, &half);
    let a_pm = submatrix(&a, &half, &mirrored);
    let dirichlet = symmetric_inverse(&(&a_pp - &a_pm))?;
    let neumann = symmetric_inverse(&(&a_pp + &a_pm))?;
    let residual = max_abs_real(&(&dirichlet - &gs.c_d)).max(max_abs_real(&(&neumann - &gs.c_n)));
    gs.stencil_residual = Some(residual);
    gs.time_step = Some((0..model.volume()).map(|x| model.time_shift(x, 1)).collect());
    Ok(gs)
}

#[derive(Debug, Clone, PartialEq)]
pub struct MonotonicityReport {
    pub verdict: Verdict,
    pub min_eig: f64,
    pub witness: RVec,
    pub tol: f64,
}

/// PSD test of `C_N - C_D`.
pub fn monotonicity_verdict(gs: &GreenSet, tol: f64) -> MonotonicityReport {
    let check = PsdCheck::of_symmetric(&(&gs.c_n - &gs.c_d), tol);
    MonotonicityReport {
        verdict: Verdict::from_psd(check.psd()),
        min_eig: check.min_eig,
        witness: check.witness.map(|z| z.re),
        tol,
    }
}

/// Delta functions on the positive half.
pub fn half_space_basis(gs: &GreenSet) -> Vec<RVec> {
    let n = gs.c.nrows();
    gs.half
        .iter()
        .map(|&x| RVec::from_fn(n, |y, _| if y == x { 1.0 } else { 0.0 }))
        .collect()
}

/// `G_ij = (r f_i)ᵀ C f_j`.
pub fn covariance_rp(gs: &GreenSet, testfns: &[RVec], tol: f64) -> Result<GramReport> {
    let n = gs.c.nrows();
    let mut on_half = vec![false; n];
    for &x in &gs.half {
        on_half[x] = true;
    }
    for f in testfns {
        if f.len() != n {
            return Err(Error::InvalidArgument(format!("test function has length {}, expected {n}", f.len())));
        }
        if f.iter().enumerate().any(|(x, &v)| v != 0.0 && !on_half[x]) {
            return Err(Error::WrongHalf { expected: "positive-time" });
        }
    }
    let reflected: Vec<RVec> = testfns
        .iter()
        .map(|f| RVec::from_fn(n, |x, _| f[gs.reflection[x]]))
        .collect();
    let applied: Vec<RVec> = testfns.iter().map(|f| &gs.c * f).collect();
    let k = testfns.len();
    let g = RMat::from_fn(k, k, |i, j| reflected[i].dot(&applied[j]));
    let labels = (0..k).map(BasisLabel::TestFunction).collect();
    Ok(GramReport::from_matrix(labels, &to_complex(&g), tol))
}

/// Gaussian moment `E[φ(x_1)···φ(x_2k)]` as a sum over pairings.
pub fn schwinger_moment(c: &RMat, points: &[usize]) -> Result<f64> {
    if points.len() % 2 == 1 {
        return Err(Error::InvalidArgument(format!(
            "moment of {} points: count must be even",
            points.len()
        )));
    }
    if let Some(&bad) = points.iter().find(|&&x| x >= c.nrows()) {
        return Err(Error::InvalidArgument(format!("site {bad} outside the lattice")));
    }
    fn pairings(c: &RMat, rest: &[usize]) -> f64 {
        let Some((&first, tail)) = rest.split_first() else {
            return 1.0;
        };
        let mut total = 0.0;
        for i in 0..tail.len() {
            let mut remaining = tail.to_vec();
            let partner = remaining.remove(i);
            total += c[(first, partner)] * pairings(c, &remaining);
        }
        total
    }
    Ok(pairings(c, points))
}

/// Spectral data of `A` reused across stochastic times.
#[derive(Debug, Clone)]
pub struct Relaxation {
    eigenvalues: Vec<f64>,
    eigenvectors: RMat,
    half: Vec<usize>,
    mirrored: Vec<usize>,
}

impl Relaxation {
    pub fn new(model: &LatticeModel) -> Self {
        let (eigenvalues, eigenvectors) = symmetric_eigen(&lattice_operator(model));
        let half = model.half();
        let mirrored = half.iter().map(|&x| model.reflection[x]).collect();
        Relaxation {
            eigenvalues,
            eigenvectors,
            half,
            mirrored,
        }
    }

    /// `A^{-1}(1 - e^{-2tA})`.
    pub fn covariance(&self, t: f64) -> Result<RMat> {
        if t.is_nan() || t < 0.0 {
            return Err(Error::InvalidArgument(format!("stochastic time {t} must be nonnegative")));
        }
        let n = self.eigenvalues.len();
        let weights: Vec<f64> = self
            .eigenvalues
            .iter()
            .map(|&l| if t.is_infinite() { 1.0 / l } else { -(-2.0 * t * l).exp_m1() / l })
            .collect();
        let v = &self.eigenvectors;
        let scaled = RMat::from_fn(n, n, |r, c| v[(r, c)] * weights[c]);
        let ct = scaled * v.transpose();
        Ok((&ct + ct.transpose()) * 0.5)
    }

    /// Reflected Gram `C_t[r x, y]` over the half-space deltas.
    pub fn reflected_gram(&self, ct: &RMat) -> RMat {
        submatrix(ct, &self.mirrored, &self.half)
    }
}

pub fn stochastic_covariance(model: &LatticeModel, t: f64) -> Result<RMat> {
    Relaxation::new(model).covariance(t)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanPoint {
    pub t: f64,
    pub min_eig: f64,
    pub violated: bool,
    pub witness: RVec,
}

pub fn stochastic_rp_scan(model: &LatticeModel, ts: &[f64], tol: f64) -> Result<Vec<ScanPoint>> {
    let relax = Relaxation::new(model);
    ts.iter()
        .map(|&t| {
            let g = relax.reflected_gram(&relax.covariance(t)?);
            let check = PsdCheck::of_symmetric(&g, tol);
            Ok(ScanPoint {
                t,
                min_eig: check.min_eig,
                violated: !check.psd(),
                witness: check.witness.map(|z| z.re),
            })
        })
        .collect()
}

/// Products of field values on the positive half up to `max_degree`, their
/// reflection Gram form from Gaussian moments, and the one-step time shift
/// between them.
pub fn wick_system(gs: &GreenSet, max_degree: usize, tol: f64) -> Result<(GramReport, Vec<Option<usize>>)> {
    let step = gs
        .time_step
        .as_ref()
        .ok_or_else(|| Error::InvalidGeometry("covariance carries no time structure".into()))?;
    let mut basis: Vec<Vec<usize>> = vec![Vec::new()];
    let mut frontier: Vec<Vec<usize>> = vec![Vec::new()];
    for _ in 0..max_degree {
        let mut next = Vec::new();
        for word in &frontier {
            let from = word.last().map_or(0, |&last| gs.half.iter().position(|&x| x == last).unwrap_or(0));
            for &x in &gs.half[from..] {
                let mut w = word.clone();
                w.push(x);
                next.push(w);
            }
        }
        check_cap("basis size", basis.len() + next.len(), DEFAULT_SIZE_CAP)?;
        basis.extend(next.iter().cloned());
        frontier = next;
    }
    let index: HashMap<&Vec<usize>, usize> = basis.iter().enumerate().map(|(i, w)| (w, i)).collect();
    let shift = basis
        .iter()
        .map(|w| {
            let mut moved = w.iter().map(|&x| step[x]).collect::<Option<Vec<usize>>>()?;
            moved.sort_unstable();
            index.get(&moved).copied()
        })
        .collect();
    let n = basis.len();
    let mut g = RMat::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            if (basis[i].len() + basis[j].len()) % 2 == 1 {
                continue;
            }
            let points: Vec<usize> = basis[i]
                .iter()
                .map(|&x| gs.reflection[x])
                .chain(basis[j].iter().copied())
                .collect();
            g[(i, j)] = schwinger_moment(&gs.c, &points)?;
        }
    }
    let labels = basis.into_iter().map(BasisLabel::Wick).collect();
    Ok((GramReport::from_matrix(labels, &to_complex(&g), tol), shift))
}
