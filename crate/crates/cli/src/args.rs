use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::config::Settings;

#[derive(Debug, Parser)]
#[command(name = "spzf", version, about = "Monte Carlo driver for successive partition zero-forcing")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Estimate f_Ray(m), the chance that m Rayleigh gains violate the polygon inequality.
    Fray(GridArgs),
    /// Error-event probabilities of the two-user scheme over a grid of (n, m, algo).
    Outage(GridArgs),
    /// Outage minimized over m, per n and algo.
    MinOutage(GridArgs),
    /// Mean secrecy rate over an SNR grid.
    Secrecy(GridArgs),
    /// Mean partition runtime per algo.
    Runtime(GridArgs),
    /// Run the two-user scheme once on channels read from files.
    Solve(SolveArgs),
}

/// Every flag mirrors a config-file key of the same name.
#[derive(Debug, Default, Args)]
pub struct GridArgs {
    /// Flat TOML file with default values for any of the flags below.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Antenna counts, e.g. `20`, `20,30` or `10..50`.
    #[arg(long)]
    pub n: Option<String>,
    /// Set counts, as a list.
    #[arg(long)]
    pub m: Option<String>,
    /// Set counts as an inclusive range `a..b`.
    #[arg(long)]
    pub m_range: Option<String>,
    /// Partition algorithms, comma-separated, or `all`.
    #[arg(long)]
    pub algo: Option<String>,
    /// rayleigh | geometric
    #[arg(long)]
    pub model: Option<String>,
    /// Paths of the geometric model.
    #[arg(long)]
    pub paths: Option<String>,
    /// Eavesdropper antennas.
    #[arg(long)]
    pub ne: Option<String>,
    /// SNR grid in dB, e.g. `30`, `0,10,20` or `0..40:5`.
    #[arg(long, allow_hyphen_values = true)]
    pub snr_db: Option<String>,
    #[arg(long)]
    pub trials: Option<String>,
    #[arg(long)]
    pub seed: Option<String>,
    /// CSV destination; standard output when absent.
    #[arg(long)]
    pub out: Option<String>,
    /// Worker threads (default: SPZF_THREADS, else all cores).
    #[arg(long)]
    pub threads: Option<String>,
    /// Secrecy outage policy: leaky-an | no-an | zero-rate | resample-partition
    #[arg(long)]
    pub policy: Option<String>,
    /// Floor per-trial secrecy rates at zero (true | false).
    #[arg(long)]
    pub clamp: Option<String>,
    /// bits | nats
    #[arg(long)]
    pub log_base: Option<String>,
}

impl GridArgs {
    /// Config file values overlaid by the flags given on the command line.
    pub fn settings(&self) -> Result<Settings, crate::config::ConfigError> {
        let mut s = match &self.config {
            Some(path) => Settings::load(path)?,
            None => Settings::default(),
        };
        let flags = [
            ("n", &self.n),
            ("m", &self.m),
            ("m-range", &self.m_range),
            ("algo", &self.algo),
            ("model", &self.model),
            ("paths", &self.paths),
            ("ne", &self.ne),
            ("snr-db", &self.snr_db),
            ("trials", &self.trials),
            ("seed", &self.seed),
            ("out", &self.out),
            ("threads", &self.threads),
            ("policy", &self.policy),
            ("clamp", &self.clamp),
            ("log-base", &self.log_base),
        ];
        for (key, value) in flags {
            s.overlay(key, value.as_deref());
        }
        Ok(s)
    }
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    /// First user's channel: one `re im` pair per line, `#` starts a comment.
    #[arg(long)]
    pub h1: PathBuf,
    /// Second user's channel, same format and length.
    #[arg(long)]
    pub h2: PathBuf,
    #[arg(long, default_value = "iterative")]
    pub algo: String,
    #[arg(long, default_value_t = 3)]
    pub m: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}
