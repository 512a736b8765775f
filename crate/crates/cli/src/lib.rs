//! Command-line front end: flag parsing, orchestration and report emission.
//!
//! Reports go to standard output (or `--output`) as CSV or JSON; errors are
//! written to standard error as a JSON object and yield a nonzero exit code.

pub mod config;
pub mod report;
mod run;

use serde::Serialize;

pub use config::{Cli, CommandConfig, Format, RunConfig};
pub use report::Report;
pub use run::run;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CliError {
    pub kind: String,
    pub message: String,
    #[serde(skip)]
    pub exit_code: i32,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        Self { kind: "UsageError".into(), message: message.into(), exit_code: 2 }
    }

    pub fn io(err: impl std::fmt::Display) -> Self {
        Self { kind: "IoError".into(), message: err.to_string(), exit_code: 1 }
    }

    /// `{"schema_version": 1, "error": {"kind": ..., "message": ...}}`.
    pub fn to_json(&self) -> String {
        serde_json::json!({ "schema_version": SCHEMA_VERSION, "error": self }).to_string()
    }
}

impl From<phivar::Error> for CliError {
    fn from(err: phivar::Error) -> Self {
        Self { kind: err.kind().into(), message: err.to_string(), exit_code: 1 }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.kind, self.message)
    }
}

impl std::error::Error for CliError {}

/// Parses `args`, runs on a pool of the configured size and returns the
/// rendered report.
pub fn execute<I, S>(args: I) -> Result<(RunConfig, String), CliError>
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let config = RunConfig::parse_from(args)?;
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(t) = config.threads {
        pool = pool.num_threads(t);
    }
    let pool = pool.build().map_err(CliError::io)?;
    let report = pool.install(|| run(&config))?;
    let text = match config.format {
        Format::Csv => report.to_csv()?,
        Format::Json => report.to_json(),
    };
    Ok((config, text))
}
