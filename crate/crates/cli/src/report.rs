//! Run reports and their two encodings: a JSON document and a CSV curve.

use std::fmt::Write as _;
use std::str::FromStr;

use num_complex::Complex64;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use rpcheck_core::Verdict;

use crate::config::RunConfig;

pub const TOOL: &str = "rpcheck";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
/// Witness vectors are cut to this many leading entries.
pub const WITNESS_ENTRIES: usize = 16;

/// A float written with 17 significant digits. Non-finite values are
/// written as the strings "NaN", "inf" and "-inf".
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Real(pub f64);

fn fmt_real(x: f64) -> String {
    let s = format!("{x:.16e}");
    match s.split_once('e') {
        Some((mantissa, exp)) if !exp.starts_with('-') => format!("{mantissa}e+{exp}"),
        _ => s,
    }
}

impl Serialize for Real {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let x = self.0;
        if x.is_nan() {
            s.serialize_str("NaN")
        } else if x.is_infinite() {
            s.serialize_str(if x > 0.0 { "inf" } else { "-inf" })
        } else {
            let n = serde_json::Number::from_str(&fmt_real(x)).map_err(serde::ser::Error::custom)?;
            n.serialize(s)
        }
    }
}

impl<'de> Deserialize<'de> for Real {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        match serde_json::Value::deserialize(d)? {
            serde_json::Value::Number(n) => n
                .as_f64()
                .map(Real)
                .ok_or_else(|| D::Error::custom("number out of range")),
            serde_json::Value::String(s) => match s.as_str() {
                "NaN" => Ok(Real(f64::NAN)),
                "inf" => Ok(Real(f64::INFINITY)),
                "-inf" => Ok(Real(f64::NEG_INFINITY)),
                other => Err(D::Error::custom(format!("not a number: {other}"))),
            },
            other => Err(D::Error::custom(format!("expected a number, found {other}"))),
        }
    }
}

impl From<f64> for Real {
    fn from(x: f64) -> Self {
        Real(x)
    }
}

/// A complex number as `[re, im]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Cx(pub Real, pub Real);

impl From<Complex64> for Cx {
    fn from(z: Complex64) -> Self {
        Cx(Real(z.re), Real(z.im))
    }
}

impl From<f64> for Cx {
    fn from(x: f64) -> Self {
        Cx(Real(x), Real(0.0))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VerdictField {
    Positive,
    Negative,
    NotApplicable,
}

impl From<Verdict> for VerdictField {
    fn from(v: Verdict) -> Self {
        match v {
            Verdict::Positive => VerdictField::Positive,
            Verdict::Negative => VerdictField::Negative,
            Verdict::NotApplicable => VerdictField::NotApplicable,
        }
    }
}

/// Conventions the computation depends on, echoed so that runs can be
/// compared across implementations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Conventions {
    pub twist_phase: String,
    pub reflection: String,
    pub coupling_sign: String,
    pub stochastic_dynamics: String,
    pub sft_index_order: String,
    pub transfer_domain: String,
    pub lattice_reflection: String,
}

impl Default for Conventions {
    fn default() -> Self {
        Conventions {
            twist_phase: "A∘B = zeta^(g'·h) A B for A of grade g in the negative half, B of grade h, \
                          g' = -g mod d; zeta = exp(iπ/d) for even d, -exp(iπ/d) for odd d"
                .into(),
            reflection: "Θ(c_j) = c_(m+1-j)^*, antilinear, reflection plane between c_(m/2) and c_(m/2+1)"
                .into(),
            coupling_sign: "H ⊇ -Σ J_kl Θ(B_k)∘B_l; positivity requires the reshuffled J to be PSD".into(),
            stochastic_dynamics: "dφ/dt = -Aφ + √2 ξ from φ(0) = 0, C_t = (1 - exp(-2tA)) A⁻¹".into(),
            sft_index_order: "sft(T)[(a,c),(b,e)] = T[(c,e),(a,b)], row index (out1,out2), column (in1,in2)".into(),
            transfer_domain: "T acts on classes whose shift stays in the basis; H = -log(T)/dt on eigenvalues above tol"
                .into(),
            lattice_reflection: "t -> T-1-t on the first axis, positive half t >= T/2, shift t -> t+1".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Check {
    pub name: String,
    pub value: Real,
    pub limit: Real,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NamedValue {
    pub name: String,
    pub value: Real,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Witness {
    pub name: String,
    /// Length of the full vector before truncation.
    pub length: usize,
    pub entries: Vec<Cx>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Spectrum {
    pub name: String,
    pub values: Vec<Real>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gap: Option<Real>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixField {
    pub name: String,
    pub labels: Vec<String>,
    pub rows: Vec<Vec<Cx>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermField {
    pub monomial: String,
    pub coeff: Cx,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurvePoint {
    pub t: Real,
    pub min_eig: Real,
    pub violated: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Timing {
    pub wall_seconds: Real,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunReport {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub config: RunConfig,
    pub conventions: Conventions,
    pub verdict: VerdictField,
    pub checks: Vec<Check>,
    pub eigenvalues: Vec<NamedValue>,
    pub witnesses: Vec<Witness>,
    pub spectra: Vec<Spectrum>,
    pub matrices: Vec<MatrixField>,
    pub hamiltonian: Vec<TermField>,
    pub curve: Vec<CurvePoint>,
    pub notes: Vec<String>,
    pub error: Option<String>,
    pub timing: Option<Timing>,
}

impl RunReport {
    pub fn new(config: &RunConfig) -> Self {
        RunReport {
            tool: TOOL.into(),
            version: VERSION.into(),
            command: config.command.as_str().into(),
            config: config.clone(),
            conventions: Conventions::default(),
            verdict: VerdictField::NotApplicable,
            checks: Vec::new(),
            eigenvalues: Vec::new(),
            witnesses: Vec::new(),
            spectra: Vec::new(),
            matrices: Vec::new(),
            hamiltonian: Vec::new(),
            curve: Vec::new(),
            notes: Vec::new(),
            error: None,
            timing: None,
        }
    }

    pub fn check(&mut self, name: &str, value: f64, limit: f64, passed: bool) -> bool {
        self.checks.push(Check {
            name: name.into(),
            value: Real(value),
            limit: Real(limit),
            passed,
        });
        passed
    }

    /// Records `value < limit`.
    pub fn check_below(&mut self, name: &str, value: f64, limit: f64) -> bool {
        self.check(name, value, limit, value < limit)
    }

    /// Records `value >= limit`.
    pub fn check_above(&mut self, name: &str, value: f64, limit: f64) -> bool {
        self.check(name, value, limit, value >= limit)
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn value(&mut self, name: &str, value: f64) {
        self.eigenvalues.push(NamedValue {
            name: name.into(),
            value: Real(value),
        });
    }

    pub fn witness<T: Into<Cx> + Copy>(&mut self, name: &str, v: &[T]) {
        self.witnesses.push(Witness {
            name: name.into(),
            length: v.len(),
            entries: v.iter().take(WITNESS_ENTRIES).map(|&z| z.into()).collect(),
        });
    }

    pub fn spectrum(&mut self, name: &str, values: &[f64], gap: Option<f64>) {
        self.spectra.push(Spectrum {
            name: name.into(),
            values: values.iter().map(|&x| Real(x)).collect(),
            gap: gap.map(Real),
        });
    }

    pub fn matrix(&mut self, name: &str, labels: Vec<String>, m: &rpcheck_core::linalg::CMat) {
        self.matrices.push(MatrixField {
            name: name.into(),
            labels,
            rows: (0..m.nrows()).map(|r| (0..m.ncols()).map(|c| m[(r, c)].into()).collect()).collect(),
        });
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }

    pub fn find_check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn find_value(&self, name: &str) -> Option<f64> {
        self.eigenvalues.iter().find(|v| v.name == name).map(|v| v.value.0)
    }

    pub fn find_spectrum(&self, name: &str) -> Option<&Spectrum> {
        self.spectra.iter().find(|s| s.name == name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Format {
    #[default]
    Structured,
    Csv,
}

pub const CSV_HEADER: &str = "t,min_eig,violated";

pub fn emit(report: &RunReport, format: Format) -> Vec<u8> {
    match format {
        Format::Structured => {
            let mut text = serde_json::to_string_pretty(report).expect("reports always serialize");
            text.push('\n');
            text.into_bytes()
        }
        Format::Csv => curve_csv(&report.curve).into_bytes(),
    }
}

pub fn curve_csv(curve: &[CurvePoint]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for p in curve {
        let _ = writeln!(out, "{},{},{}", fmt_real(p.t.0), fmt_real(p.min_eig.0), u8::from(p.violated));
    }
    out
}

pub fn parse_report(bytes: &[u8]) -> serde_json::Result<RunReport> {
    serde_json::from_slice(bytes)
}
