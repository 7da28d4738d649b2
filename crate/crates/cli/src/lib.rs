//! Command-line front end for the reflection-positivity checks.
//!
//! A run reads a JSON configuration, dispatches to one pipeline and writes a
//! report. Exit codes: 0 positive, 1 negative, 2 not applicable or failed,
//! 3 invalid configuration, 4 size cap exceeded, 5 I/O failure.

pub mod commands;
pub mod config;
pub mod report;

use std::io::Write;
use std::path::Path;
use std::time::Instant;

use rpcheck_core::Error as CoreError;

use crate::config::{Command, ConfigError, RunConfig};
use crate::report::{emit, Format, Real, RunReport, Timing, VerdictField};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(#[from] ConfigError),
    #[error("invalid configuration: {0}")]
    Validation(CoreError),
    #[error("{0}")]
    SizeLimit(CoreError),
    #[error("{0}")]
    Failure(CoreError),
    #[error("I/O error on {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Failure(_) => 2,
            CliError::Config(_) | CliError::Validation(_) => 3,
            CliError::SizeLimit(_) => 4,
            CliError::Io { .. } => 5,
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::SizeLimit { .. } => CliError::SizeLimit(e),
            CoreError::InvalidConfig(_)
            | CoreError::InvalidGeometry(_)
            | CoreError::InvalidArgument(_)
            | CoreError::InvalidState(_)
            | CoreError::ConfigMismatch => CliError::Validation(e),
            _ => CliError::Failure(e),
        }
    }
}

pub fn exit_code(verdict: VerdictField) -> u8 {
    match verdict {
        VerdictField::Positive => 0,
        VerdictField::Negative => 1,
        VerdictField::NotApplicable => 2,
    }
}

/// Runs one configured pipeline. Timing is recorded only on request so that
/// default reports are reproducible byte for byte.
pub fn run(config: &RunConfig, timing: bool) -> Result<RunReport, CliError> {
    config.validate()?;
    let start = Instant::now();
    let mut report = RunReport::new(config);
    let outcome = match config.command {
        Command::AlgebraCheck => commands::algebra_check(config, &mut report),
        Command::RpGram => commands::rp_gram(config, &mut report),
        Command::Reconstruct => commands::reconstruct(config, &mut report),
        Command::Green => commands::green(config, &mut report),
        Command::Stochastic => commands::stochastic(config, &mut report),
        Command::SftCheck => commands::sft_check(config, &mut report),
    };
    outcome?;
    if timing {
        report.timing = Some(Timing {
            wall_seconds: Real(start.elapsed().as_secs_f64()),
        });
    }
    Ok(report)
}

/// Writes through a sibling temporary file and renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let io = |source| CliError::Io {
        path: path.display().to_string(),
        source,
    };
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let name = path.file_name().ok_or_else(|| {
        io(std::io::Error::new(std::io::ErrorKind::InvalidInput, "output path has no file name"))
    })?;
    let tmp = dir.join(format!(".{}.tmp{}", name.to_string_lossy(), std::process::id()));
    let result = std::fs::File::create(&tmp)
        .and_then(|mut f| {
            f.write_all(bytes)?;
            f.sync_all()
        })
        .and_then(|_| std::fs::rename(&tmp, path));
    if result.is_err() {
        let _ = std::fs::remove_file(&tmp);
    }
    result.map_err(io)
}

/// Emits the report to `out` or to the given writer.
pub fn deliver(report: &RunReport, format: Format, out: Option<&Path>, stdout: &mut dyn Write) -> Result<(), CliError> {
    let bytes = emit(report, format);
    match out {
        Some(path) => write_atomic(path, &bytes),
        None => stdout.write_all(&bytes).map_err(|source| CliError::Io {
            path: "<stdout>".into(),
            source,
        }),
    }
}
