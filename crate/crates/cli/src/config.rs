//! Command-line flags and their validation into a [`RunConfig`].

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use phivar::{Base, Sign, Spec};

use crate::CliError;

#[derive(Debug, Parser)]
#[command(name = "phivar", version, about = "Φ-variation of Weierstraß and Takagi–van der Waerden functions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Csv, global = true)]
    pub format: Format,

    /// Write the report here instead of standard output.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,

    /// Worker threads; results do not depend on this value.
    #[arg(long, env = "PHIVAR_THREADS", global = true)]
    pub threads: Option<usize>,

    /// Report progress on standard error.
    #[arg(long, global = true)]
    pub progress: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BaseKind {
    Tent,
    Trig,
}

#[derive(Debug, Clone, Args)]
pub struct SpecArgs {
    #[arg(long, value_enum, default_value_t = BaseKind::Tent)]
    pub base: BaseKind,
    /// Sine amplitude of the trigonometric base (default 1).
    #[arg(long, allow_hyphen_values = true)]
    pub nu: Option<f64>,
    /// Cosine amplitude of the trigonometric base (default 0).
    #[arg(long, allow_hyphen_values = true)]
    pub rho: Option<f64>,
    #[arg(long, default_value_t = 2)]
    pub b: u64,
    #[arg(long = "alpha-sign", default_value = "+", allow_hyphen_values = true)]
    pub alpha_sign: Sign,
    /// |α| = 1/b exactly.
    #[arg(long)]
    pub critical: bool,
    /// |α| in (0, 1) for the non-critical case.
    #[arg(long)]
    pub magnitude: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate f(t).
    Eval {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
        t: Vec<f64>,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
    },
    /// Φ-variation and q-variation along b-adic partitions.
    Variation {
        #[command(flatten)]
        spec: SpecArgs,
        /// Levels, comma separated.
        #[arg(long, value_delimiter = ',')]
        n: Vec<u32>,
        /// Inclusive level range `LO:HI`.
        #[arg(long = "n-range")]
        n_range: Option<String>,
        #[arg(long, value_delimiter = ',', default_value = "1")]
        t: Vec<f64>,
        #[arg(long, value_delimiter = ',')]
        q: Vec<f64>,
    },
    /// Closed-form Φ-variation limits and the variation index.
    Limit {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long, value_delimiter = ',', default_value = "1")]
        t: Vec<f64>,
    },
    /// Transition matrices, covariances and σ² of the odd-b chain.
    Chain {
        #[arg(long)]
        b: u64,
        #[arg(long, default_value = "+", allow_hyphen_values = true)]
        sign: Sign,
        /// Largest lag for covariances and n-step matrices.
        #[arg(long = "n-max", default_value_t = 5)]
        n_max: u32,
    },
    /// Monte Carlo ensemble statistics of Z_n.
    Mc {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long)]
        n: u32,
        #[arg(long, default_value_t = 10_000)]
        count: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Martingale residuals, predictable quadratic variation and
    /// equidistribution of a single path.
    Diagnose {
        #[command(flatten)]
        spec: SpecArgs,
        /// Path length.
        #[arg(long, default_value_t = 2000)]
        n: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Largest level of the exhaustive martingale residual table.
        #[arg(long, default_value_t = 8)]
        levels: u32,
    },
}

/// Validated configuration of one invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: CommandConfig,
    pub format: Format,
    pub output: Option<PathBuf>,
    pub threads: Option<usize>,
    pub progress: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub enum CommandConfig {
    Eval { spec: Spec, t: Vec<f64>, tol: f64 },
    Variation { spec: Spec, n: Vec<u32>, t: Vec<f64>, q: Vec<f64> },
    Limit { spec: Spec, t: Vec<f64> },
    Chain { b: u64, sign: Sign, n_max: u32 },
    Mc { spec: Spec, n: u32, count: u64, seed: u64 },
    Diagnose { spec: Spec, n: u32, seed: u64, levels: u32 },
}

impl CommandConfig {
    pub fn name(&self) -> &'static str {
        match self {
            CommandConfig::Eval { .. } => "eval",
            CommandConfig::Variation { .. } => "variation",
            CommandConfig::Limit { .. } => "limit",
            CommandConfig::Chain { .. } => "chain",
            CommandConfig::Mc { .. } => "mc",
            CommandConfig::Diagnose { .. } => "diagnose",
        }
    }
}

impl SpecArgs {
    pub fn to_spec(&self) -> Result<Spec, CliError> {
        let base = match self.base {
            BaseKind::Tent => {
                if self.nu.is_some() || self.rho.is_some() {
                    return Err(CliError::usage("--nu/--rho apply only to --base trig"));
                }
                Base::Tent
            }
            BaseKind::Trig => Base::trig(self.nu.unwrap_or(1.0), self.rho.unwrap_or(0.0)),
        };
        let spec = match (self.critical, self.magnitude) {
            (true, None) => Spec::critical(base, self.b, self.alpha_sign)?,
            (false, Some(m)) => Spec::general(base, self.b, self.alpha_sign, m)?,
            (true, Some(_)) => return Err(CliError::usage("--critical and --magnitude are mutually exclusive")),
            (false, None) => return Err(CliError::usage("one of --critical or --magnitude is required")),
        };
        Ok(spec)
    }
}

fn parse_range(s: &str) -> Result<Vec<u32>, CliError> {
    let bad = || CliError::usage(format!("invalid --n-range `{s}` (expected LO:HI)"));
    let (lo, hi) = s.split_once(':').ok_or_else(bad)?;
    let lo: u32 = lo.trim().parse().map_err(|_| bad())?;
    let hi: u32 = hi.trim().parse().map_err(|_| bad())?;
    if lo > hi {
        return Err(bad());
    }
    Ok((lo..=hi).collect())
}

impl RunConfig {
    pub fn from_cli(cli: Cli) -> Result<Self, CliError> {
        let command = match cli.command {
            Command::Eval { spec, t, tol } => CommandConfig::Eval { spec: spec.to_spec()?, t, tol },
            Command::Variation { spec, mut n, n_range, t, q } => {
                if let Some(r) = n_range {
                    n.extend(parse_range(&r)?);
                }
                if n.is_empty() {
                    return Err(CliError::usage("--n or --n-range is required"));
                }
                CommandConfig::Variation { spec: spec.to_spec()?, n, t, q }
            }
            Command::Limit { spec, t } => CommandConfig::Limit { spec: spec.to_spec()?, t },
            Command::Chain { b, sign, n_max } => CommandConfig::Chain { b, sign, n_max },
            Command::Mc { spec, n, count, seed } => CommandConfig::Mc { spec: spec.to_spec()?, n, count, seed },
            Command::Diagnose { spec, n, seed, levels } => {
                CommandConfig::Diagnose { spec: spec.to_spec()?, n, seed, levels }
            }
        };
        if cli.threads == Some(0) {
            return Err(CliError::usage("--threads must be at least 1"));
        }
        Ok(Self { command, format: cli.format, output: cli.output, threads: cli.threads, progress: cli.progress })
    }

    pub fn parse_from<I, S>(args: I) -> Result<Self, CliError>
    where
        I: IntoIterator<Item = S>,
        S: Into<std::ffi::OsString> + Clone,
    {
        let cli = Cli::try_parse_from(args).map_err(|e| match e.kind() {
            clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => e.exit(),
            _ => CliError::usage(e.to_string()),
        })?;
        Self::from_cli(cli)
    }
}
