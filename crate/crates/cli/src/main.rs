use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use rpcheck::config::RunConfig;
use rpcheck::report::Format;
use rpcheck::{deliver, exit_code, run, CliError};

/// Reflection-positivity checks for parafermion algebras and lattice fields.
#[derive(Parser, Debug)]
#[command(name = "rpcheck", version)]
struct Cli {
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Eigenvalue tolerance; overrides the configuration.
    #[arg(long)]
    tol: Option<f64>,
    /// Seed for randomized draws; overrides the configuration.
    #[arg(long)]
    seed: Option<u64>,
    /// Output path, written atomically. Defaults to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Structured)]
    format: Format,
    /// Record wall-clock time in the report.
    #[arg(long)]
    timing: bool,
}

fn load(cli: &Cli) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(&cli.config).map_err(|source| CliError::Io {
        path: cli.config.display().to_string(),
        source,
    })?;
    let mut config = RunConfig::parse(&text)?;
    if cli.tol.is_some() {
        config.tol = cli.tol;
    }
    if cli.seed.is_some() {
        config.seed = cli.seed;
    }
    if let Some(out) = &cli.out {
        config.out = Some(out.display().to_string());
    }
    config.validate()?;
    Ok(config)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = load(&cli).and_then(|config| {
        let report = run(&config, cli.timing)?;
        let out = config.out.as_ref().map(PathBuf::from);
        deliver(&report, cli.format, out.as_deref(), &mut std::io::stdout().lock())?;
        Ok(report)
    });
    match result {
        Ok(report) => ExitCode::from(exit_code(report.verdict)),
        Err(e) => {
            eprintln!("rpcheck: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
