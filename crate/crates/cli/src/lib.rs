//! Command-line experiment runner for time-inhomogeneous decoherent quantum
//! walks.
//!
//! Every command reads an optional configuration file (`--config`), applies
//! flag overrides, and on success prints one JSON line naming its outputs.
//! Failures print one JSON line `{"error": {"kind": ..., "message": ...}}` on
//! stderr and exit nonzero.

pub mod commands;
pub mod config;
pub mod engine;
pub mod error;
pub mod output;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::commands::Report;
use crate::config::Settings;
use crate::error::{CliError, Result};

#[derive(Debug, Parser)]
#[command(name = "qwalk", version, about = "Simulate and analyse time-inhomogeneous decoherent quantum walks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute one position distribution and write it as CSV plus JSON metadata.
    Simulate(WalkArgs),
    /// Evaluate alpha_t or the variance over a parameter grid, optionally fitting decay models.
    Sweep {
        #[command(flatten)]
        walk: WalkArgs,
        #[command(flatten)]
        sweep: SweepArgs,
    },
    /// Fit decay models to a (t, value) series, or to the alpha_t series of one configuration.
    Fit {
        /// CSV with `t` and `value` (or `alpha_t`) columns; grouped by lambda, zeta, p if present.
        series: Option<PathBuf>,
        #[command(flatten)]
        walk: WalkArgs,
        #[command(flatten)]
        sweep: SweepArgs,
    },
    /// Distance between a distribution CSV and a reference density or another CSV.
    Compare {
        /// Distribution CSV as written by `simulate`.
        input: PathBuf,
        /// Second distribution CSV (lattice distance) instead of a reference density.
        #[arg(long)]
        against: Option<PathBuf>,
        /// arcsine, uniform, semicircle, konno, beta[:lambda], gaussian:variance, zhang[:p].
        #[arg(long)]
        reference: Option<String>,
        /// ks or tv.
        #[arg(long)]
        metric: Option<String>,
        #[command(flatten)]
        walk: WalkArgs,
    },
}

/// Flags shared by every command. Each overrides the key of the same name
/// in the configuration file.
#[derive(Debug, Args, Default)]
pub struct WalkArgs {
    /// Configuration file of `key = value` lines.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, allow_hyphen_values = true)]
    pub lambda: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub zeta: Option<String>,
    /// Decoherence strength in [0, 1].
    #[arg(long)]
    pub p: Option<String>,
    /// Horizon (number of steps).
    #[arg(long)]
    pub t: Option<String>,
    /// exact, trajectory, siy, classical or pure.
    #[arg(long)]
    pub method: Option<String>,
    /// Rescaling exponent: positions are reported as x / t^gamma.
    #[arg(long)]
    pub gamma: Option<String>,
    /// Tail level for alpha_t.
    #[arg(long)]
    pub alpha: Option<String>,
    /// Trajectory count, or `n_sigma,n_i,n_y` for siy.
    #[arg(long)]
    pub samples: Option<String>,
    #[arg(long)]
    pub seed: Option<String>,
    /// Output path.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// total, coin or position.
    #[arg(long)]
    pub family: Option<String>,
    /// 1, 2, symmetric or symmetric-i.
    #[arg(long)]
    pub init: Option<String>,
    /// Largest horizon the exact method accepts.
    #[arg(long)]
    pub cap: Option<String>,
}

#[derive(Debug, Args, Default)]
pub struct SweepArgs {
    /// Time grid: list `a,b,c` or range `start:stop:step`.
    #[arg(long)]
    pub times: Option<String>,
    /// alpha_t or variance.
    #[arg(long)]
    pub statistic: Option<String>,
    /// Decay models: none, rational, exponential or both.
    #[arg(long)]
    pub fit: Option<String>,
}

impl WalkArgs {
    fn settings(&self) -> Result<Settings> {
        let file = match &self.config {
            Some(path) => Settings::load(path)?,
            None => Settings::default(),
        };
        let mut flags = Settings::default();
        let pairs = [
            ("lambda", &self.lambda),
            ("zeta", &self.zeta),
            ("p", &self.p),
            ("t", &self.t),
            ("method", &self.method),
            ("gamma", &self.gamma),
            ("alpha", &self.alpha),
            ("samples", &self.samples),
            ("seed", &self.seed),
            ("family", &self.family),
            ("init", &self.init),
            ("cap", &self.cap),
        ];
        for (key, value) in pairs {
            if let Some(v) = value {
                flags.set(key, v.clone());
            }
        }
        if let Some(out) = &self.out {
            flags.set("out", out.to_string_lossy().into_owned());
        }
        Ok(file.overridden_by(&flags))
    }
}

impl SweepArgs {
    fn apply(&self, settings: &mut Settings) {
        for (key, value) in [("times", &self.times), ("statistic", &self.statistic), ("fit", &self.fit)] {
            if let Some(v) = value {
                settings.set(key, v.clone());
            }
        }
    }
}

/// Run a parsed command.
pub fn execute(cli: Cli) -> Result<Report> {
    match cli.command {
        Command::Simulate(walk) => commands::simulate(&walk.settings()?),
        Command::Sweep { walk, sweep } => {
            let mut settings = walk.settings()?;
            sweep.apply(&mut settings);
            commands::sweep(&settings)
        }
        Command::Fit { series, walk, sweep } => {
            let mut settings = walk.settings()?;
            sweep.apply(&mut settings);
            commands::fit(&settings, series.as_deref())
        }
        Command::Compare {
            input,
            against,
            reference,
            metric,
            walk,
        } => {
            let mut settings = walk.settings()?;
            if let Some(r) = reference {
                settings.set("reference", r);
            }
            if let Some(m) = metric {
                settings.set("metric", m);
            }
            commands::compare(&settings, &input, against.as_deref())
        }
    }
}

/// Parse `args`, run, and print the outcome. Returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            print!("{e}");
            return 0;
        }
        Err(e) => {
            let text = e.to_string();
            let first = text.lines().next().unwrap_or("invalid arguments");
            let err = CliError::Usage(first.trim_start_matches("error: ").to_string());
            eprintln!("{}", err.to_json_line());
            return err.exit_code();
        }
    };
    match execute(cli) {
        Ok(report) => {
            println!("{}", report.to_json_line());
            0
        }
        Err(err) => {
            eprintln!("{}", err.to_json_line());
            err.exit_code()
        }
    }
}
