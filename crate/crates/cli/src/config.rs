//! Run configuration, read from the same JSON dialect the reports use.

use serde::{Deserialize, Serialize};

use rpcheck_core::algebra::{AlgebraConfig, AlgebraElement, Monomial};
use rpcheck_core::gaussian::{Boundary, LatticeModel};
use rpcheck_core::{Error as CoreError, Result as CoreResult};

use num_complex::Complex64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    AlgebraCheck,
    RpGram,
    Reconstruct,
    Green,
    Stochastic,
    SftCheck,
}

impl Command {
    pub fn as_str(&self) -> &'static str {
        match self {
            Command::AlgebraCheck => "algebra-check",
            Command::RpGram => "rp-gram",
            Command::Reconstruct => "reconstruct",
            Command::Green => "green",
            Command::Stochastic => "stochastic",
            Command::SftCheck => "sft-check",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebraSpec {
    pub d: u32,
    pub m: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub size_cap: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StateKind {
    Trace,
    Gibbs,
}

/// Seeded Hamiltonian families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Ensemble {
    /// Reflection-symmetric with PSD cross coupling.
    Theorem,
    /// Reflection-symmetric with indefinite cross coupling.
    Indefinite,
    /// Arbitrary star-invariant terms.
    Generic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Term {
    pub coeff: [f64; 2],
    pub exponents: Vec<i64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateSpec {
    pub kind: StateKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hamiltonian: Option<Vec<Term>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ensemble: Option<Ensemble>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundarySpec {
    BoxDirichlet,
    Torus,
    Window,
}

impl From<BoundarySpec> for Boundary {
    fn from(b: BoundarySpec) -> Self {
        match b {
            BoundarySpec::BoxDirichlet => Boundary::Dirichlet,
            BoundarySpec::Torus => Boundary::Torus,
            BoundarySpec::Window => Boundary::Window,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeSpec {
    pub dims: Vec<usize>,
    pub mass2: f64,
    pub bc: BoundarySpec,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    Algebra,
    Gaussian,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Command,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub algebra: Option<AlgebraSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub state: Option<StateSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_grade: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lattice: Option<LatticeSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_grid: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<ModelKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub steps: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub semigroup_max: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_degree: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub string_dim: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coupling_sequence: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ConfigError {
    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("field `{field}`: {message}")]
    Field { field: String, message: String },
}

fn field(name: &str, message: impl Into<String>) -> ConfigError {
    ConfigError::Field {
        field: name.to_string(),
        message: message.into(),
    }
}

fn finite(name: &str, x: f64) -> Result<(), ConfigError> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(field(name, "must be a finite number"))
    }
}

pub const DEFAULT_SEED: u64 = 0;

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| ConfigError::Syntax {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn tol(&self) -> f64 {
        self.tol.unwrap_or(rpcheck_core::verifier::DEFAULT_TOL)
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(DEFAULT_SEED)
    }

    pub fn require_algebra(&self) -> Result<&AlgebraSpec, ConfigError> {
        self.algebra.as_ref().ok_or_else(|| field("algebra", "required for this command"))
    }

    pub fn require_state(&self) -> Result<&StateSpec, ConfigError> {
        self.state.as_ref().ok_or_else(|| field("state", "required for this command"))
    }

    pub fn require_lattice(&self) -> Result<&LatticeSpec, ConfigError> {
        self.lattice.as_ref().ok_or_else(|| field("lattice", "required for this command"))
    }

    /// Checks every numeric field against the preconditions of its pipeline.
    pub fn validate(&self) -> Result<(), ConfigError> {
        if let Some(tol) = self.tol {
            finite("tol", tol)?;
            if tol < 0.0 {
                return Err(field("tol", "must be nonnegative"));
            }
        }
        if let Some(a) = &self.algebra {
            if a.d < 2 {
                return Err(field("algebra.d", "degree must be at least 2"));
            }
            if a.m == 0 || a.m % 2 == 1 {
                return Err(field("algebra.m", "generator count must be even and positive"));
            }
        }
        if let Some(s) = &self.state {
            if let Some(beta) = s.beta {
                finite("state.beta", beta)?;
                if beta < 0.0 {
                    return Err(field("state.beta", "must be nonnegative"));
                }
            }
            match s.kind {
                StateKind::Trace => {
                    if s.hamiltonian.is_some() || s.ensemble.is_some() {
                        return Err(field("state.kind", "trace state takes no Hamiltonian"));
                    }
                }
                StateKind::Gibbs => {
                    if s.beta.is_none() {
                        return Err(field("state.beta", "required for a Gibbs state"));
                    }
                    if s.hamiltonian.is_some() == s.ensemble.is_some() {
                        return Err(field("state.hamiltonian", "give exactly one of `hamiltonian` and `ensemble`"));
                    }
                }
            }
            if let (Some(terms), Some(a)) = (&s.hamiltonian, &self.algebra) {
                for (i, t) in terms.iter().enumerate() {
                    finite(&format!("state.hamiltonian[{i}].coeff"), t.coeff[0])?;
                    finite(&format!("state.hamiltonian[{i}].coeff"), t.coeff[1])?;
                    if t.exponents.len() != a.m {
                        return Err(field(
                            &format!("state.hamiltonian[{i}].exponents"),
                            format!("expected {} exponents, found {}", a.m, t.exponents.len()),
                        ));
                    }
                }
            }
        }
        if let Some(l) = &self.lattice {
            finite("lattice.mass2", l.mass2)?;
            if l.mass2 <= 0.0 {
                return Err(field("lattice.mass2", "must be positive"));
            }
            if l.dims.is_empty() || l.dims.iter().any(|&n| n < 2) {
                return Err(field("lattice.dims", "needs at least one axis, each of length at least 2"));
            }
        }
        if let Some(ts) = &self.t_grid {
            for (i, &t) in ts.iter().enumerate() {
                finite(&format!("t_grid[{i}]"), t)?;
                if t < 0.0 {
                    return Err(field(&format!("t_grid[{i}]"), "stochastic time must be nonnegative"));
                }
            }
        }
        if let Some(seq) = &self.coupling_sequence {
            for (i, z) in seq.iter().enumerate() {
                finite(&format!("coupling_sequence[{i}]"), z[0])?;
                finite(&format!("coupling_sequence[{i}]"), z[1])?;
            }
            if seq.len() < 2 {
                return Err(field("coupling_sequence", "needs at least two entries"));
            }
        }
        if self.string_dim.is_some_and(|d| d < 2) {
            return Err(field("string_dim", "must be at least 2"));
        }
        match self.command {
            Command::AlgebraCheck => {
                self.require_algebra()?;
            }
            Command::RpGram => {
                self.require_algebra()?;
                self.require_state()?;
            }
            Command::Reconstruct => match self.model.unwrap_or(ModelKind::Algebra) {
                ModelKind::Algebra => {
                    self.require_algebra()?;
                    self.require_state()?;
                }
                ModelKind::Gaussian => {
                    self.require_lattice()?;
                }
            },
            Command::Green => {
                self.require_lattice()?;
            }
            Command::Stochastic => {
                self.require_lattice()?;
                if self.t_grid.is_none() {
                    return Err(field("t_grid", "required for this command"));
                }
            }
            Command::SftCheck => {}
        }
        Ok(())
    }

    pub fn algebra_config(&self) -> CoreResult<AlgebraConfig> {
        let a = self
            .algebra
            .as_ref()
            .ok_or_else(|| CoreError::InvalidConfig("missing algebra section".into()))?;
        match a.size_cap {
            Some(cap) => AlgebraConfig::with_cap(a.d, a.m, cap),
            None => AlgebraConfig::new(a.d, a.m),
        }
    }

    pub fn lattice_model(&self) -> CoreResult<LatticeModel> {
        let l = self
            .lattice
            .as_ref()
            .ok_or_else(|| CoreError::InvalidConfig("missing lattice section".into()))?;
        LatticeModel::new(&l.dims, l.mass2, l.bc.into())
    }
}

pub fn hamiltonian_from_terms(cfg: &AlgebraConfig, terms: &[Term]) -> CoreResult<AlgebraElement> {
    let items = terms
        .iter()
        .map(|t| Ok((Complex64::new(t.coeff[0], t.coeff[1]), Monomial::new(cfg, &t.exponents)?)))
        .collect::<CoreResult<Vec<_>>>()?;
    AlgebraElement::from_terms(cfg, items)
}
