//! Command-line diagnostics over finite Markov kernels with deterministic,
//! schema-validated JSON reports.
//!
//! Exit codes: 0 = computed (audits passed), 1 = an audited inequality
//! failed numerically (a bug, not bad input), 2 = input or schema error.

mod commands;
mod inputs;
mod manifest;
mod report;
mod schemas;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use macroscope_core::ToleranceConfig;

#[derive(Debug)]
pub enum CliError {
    /// Unreadable, unparsable, or schema-violating input. Exit 2.
    Input(String),
    /// Input rejected by a module contract (bad kernel, bad lens, ...). Exit 2.
    Module(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Input(m) => write!(f, "input error: {m}"),
            CliError::Module(m) => write!(f, "input error: {m}"),
        }
    }
}

impl From<macroscope_core::CoreError> for CliError {
    fn from(e: macroscope_core::CoreError) -> Self {
        CliError::Module(e.to_string())
    }
}

pub const TOL_PROFILE_ENV: &str = "MACROSCOPE_TOL_PROFILE";

#[derive(Debug, Clone, Args)]
pub struct ToleranceArgs {
    /// Row-sum acceptance tolerance for kernel validation.
    #[arg(long = "tol-row-sum", global = true)]
    pub row_sum: Option<f64>,
    /// L1 residual target for stationary solves.
    #[arg(long = "tol-stationarity", global = true)]
    pub stationarity: Option<f64>,
    /// Structural-zero threshold.
    #[arg(long = "tol-zero", global = true)]
    pub zero: Option<f64>,
    /// Power-iteration budget.
    #[arg(long = "max-power-iters", global = true)]
    pub max_power_iters: Option<usize>,
}

impl ToleranceArgs {
    /// Profile from the environment, then per-flag overrides.
    pub fn resolve(&self) -> Result<ToleranceConfig, CliError> {
        let mut cfg = match std::env::var(TOL_PROFILE_ENV).ok().as_deref() {
            None | Some("default") | Some("") => ToleranceConfig::default(),
            Some("strict") => ToleranceConfig::default()
                .with_row_sum_tol(1e-12)
                .with_stationarity_tol(1e-13),
            Some("relaxed") => ToleranceConfig::default()
                .with_row_sum_tol(1e-5)
                .with_stationarity_tol(1e-10)
                .with_zero_tol(1e-12),
            Some(other) => {
                return Err(CliError::Input(format!(
                    "unknown {TOL_PROFILE_ENV} value {other:?} (expected default, strict, or relaxed)"
                )));
            }
        };
        if let Some(v) = self.row_sum {
            cfg.row_sum_tol = v;
        }
        if let Some(v) = self.stationarity {
            cfg.stationarity_tol = v;
        }
        if let Some(v) = self.zero {
            cfg.zero_tol = v;
        }
        if let Some(v) = self.max_power_iters {
            cfg.max_power_iters = v;
        }
        cfg.validate().map_err(|e| CliError::Input(e.to_string()))?;
        Ok(cfg)
    }
}

/// How an initial distribution is specified on the command line.
#[derive(Debug, Clone)]
pub enum RhoSpec {
    Uniform,
    Stationary,
    File(PathBuf),
}

impl std::str::FromStr for RhoSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "uniform" => RhoSpec::Uniform,
            "stationary" => RhoSpec::Stationary,
            other => RhoSpec::File(PathBuf::from(other)),
        })
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "macroscope",
    version,
    about = "Diagnostics for finite Markov dynamics under coarse observation",
    propagate_version = true
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    #[command(flatten)]
    pub tolerances: ToleranceArgs,

    /// Cap on exhaustive path enumeration (table entries).
    #[arg(long, global = true, default_value_t = macroscope_core::DEFAULT_PATH_CAP)]
    pub cap: u128,

    /// Print the report JSON schema for the chosen subcommand and exit.
    #[arg(long = "json-schema", global = true)]
    pub json_schema: bool,

    /// Suppress progress notes on stderr.
    #[arg(long, global = true)]
    pub quiet: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Idempotence defect, retention error, and per-block stability of the
    /// packaging endomap induced by a kernel, lens, and time scale.
    Defect {
        kernel: PathBuf,
        #[arg(long)]
        lens: PathBuf,
        /// Prototype file; defaults to in-block uniform.
        #[arg(long)]
        prototypes: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        tau: usize,
    },
    /// Path reversal asymmetry of a kernel at a chosen initial distribution.
    Sigma {
        kernel: PathBuf,
        #[arg(long, default_value = "uniform")]
        rho: RhoSpec,
        #[arg(long = "T")]
        horizon: usize,
        /// Write the forward path law (lexicographically sorted entries)
        /// to this file.
        #[arg(long = "dump-law")]
        dump_law: Option<PathBuf>,
    },
    /// Micro-vs-macro asymmetry comparison through a lens; fails (exit 1)
    /// if coarse-graining ever increases the asymmetry.
    Dpi {
        kernel: PathBuf,
        #[arg(long)]
        lens: PathBuf,
        #[arg(long, default_value = "uniform")]
        rho: RhoSpec,
        #[arg(long = "T")]
        horizon: usize,
    },
    /// Clock audit of an autonomous protocol: lifted and projected
    /// asymmetry with hypothesis checks.
    ProtocolAudit {
        protocol: PathBuf,
        #[arg(long = "T", default_value_t = 3)]
        horizon: usize,
    },
    /// Ordered stroboscopic product of kernels and its asymmetry at the
    /// product's own stationary distribution.
    Strobe {
        #[arg(required = true)]
        kernels: Vec<PathBuf>,
        #[arg(long = "T", default_value_t = 2)]
        horizon: usize,
    },
    /// Cycle affinities, exactness, and potential of the log-ratio edge
    /// form on the bidirected support graph.
    Affinity { kernel: PathBuf },
    /// Delete undirected edges (both orientations) and renormalize;
    /// reports the cycle rank before and after.
    Gate {
        kernel: PathBuf,
        /// Comma-separated unordered pairs, e.g. "0-1,2-3".
        #[arg(long)]
        delete: String,
    },
    /// Spectral gap of the lazy walk for a reversible kernel.
    Gap {
        kernel: PathBuf,
        #[arg(long, default_value = "stationary")]
        pi: RhoSpec,
    },
    /// Definability counting for a lens: exact dyadic probability, block
    /// bounds, and optional seeded Monte Carlo confirmation.
    Forcing {
        /// State count for a balanced lens (used with --k).
        #[arg(long = "n", conflicts_with = "lens")]
        n: Option<usize>,
        /// Block count for a balanced lens (used with --n).
        #[arg(long = "k", conflicts_with = "lens", requires = "n")]
        k: Option<usize>,
        #[arg(long)]
        lens: Option<PathBuf>,
        /// Monte Carlo trial count.
        #[arg(long = "mc")]
        mc: Option<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Throughput audit of a convolution bridge against its kernel mass;
    /// exit 1 if any window beats the certified bound.
    Icap {
        bridge: PathBuf,
        /// Signal/window batch file; defaults to a seeded fuzz batch.
        #[arg(long)]
        signals: Option<PathBuf>,
        /// Fuzz batch size when no signal file is given.
        #[arg(long, default_value_t = 20)]
        fuzz: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Divergence verdict for a capacity schedule plus latency floors.
    Zeno { schedule: PathBuf },
    /// Route-mismatch defect and gain bound for one-shot vs two-step
    /// packaging maps; exit 1 if the bound fails.
    Route { file: PathBuf },
    /// Print the generated command reference page (markdown).
    Reference,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Defect { .. } => "defect",
            Command::Sigma { .. } => "sigma",
            Command::Dpi { .. } => "dpi",
            Command::ProtocolAudit { .. } => "protocol-audit",
            Command::Strobe { .. } => "strobe",
            Command::Affinity { .. } => "affinity",
            Command::Gate { .. } => "gate",
            Command::Gap { .. } => "gap",
            Command::Forcing { .. } => "forcing",
            Command::Icap { .. } => "icap",
            Command::Zeno { .. } => "zeno",
            Command::Route { .. } => "route",
            Command::Reference => "reference",
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();

    if cli.json_schema {
        return match schemas::schema_for(cli.command.name()) {
            Some(text) => {
                print!("{text}");
                ExitCode::SUCCESS
            }
            None => {
                eprintln!("no schema for subcommand {:?}", cli.command.name());
                ExitCode::from(2)
            }
        };
    }

    if matches!(cli.command, Command::Reference) {
        print!("{}", commands::reference_page());
        return ExitCode::SUCCESS;
    }

    let cfg = match cli.tolerances.resolve() {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("{e}");
            return ExitCode::from(2);
        }
    };

    match commands::run(&cli, &cfg) {
        Ok(outcome) => {
            print!("{}", report::render(&outcome.document));
            if outcome.audit_ok {
                ExitCode::SUCCESS
            } else {
                if !cli.quiet {
                    eprintln!("audit failed: a checked inequality was violated numerically");
                }
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(2)
        }
    }
}
