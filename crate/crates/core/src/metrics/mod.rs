//! Monte Carlo estimators and closed-form outage expressions.
//!
//! Trial `t` of a run with master seed `s` always uses the random stream
//! `(s, t)`, and per-trial results are combined in trial order, so every
//! estimate is identical for any number of worker threads.

mod outage;
mod secrecy;

use rayon::prelude::*;

use crate::error::{invalid, Result};
use crate::rng::{SimRng, StreamFactory};

pub use outage::{
    closed_form_with_stderr, estimate_outage_two_user, fray_approx, fray_empirical,
    optimal_m_search, random_partition_outage_closed_form, reduced_channel_covariance,
    CovarianceEstimate, MSearch, OutageEstimate, TwoUserOutage,
};
pub use secrecy::{
    estimate_secrecy_rate, message_beamformer, secrecy_rate_sample, snr_from_db, LogBase,
    OutagePolicy, RateSample, SecrecyConfig, SecrecyEstimate, RESAMPLE_ATTEMPTS,
};

/// Sample mean with its standard error.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MeanEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub trials: u64,
}

impl MeanEstimate {
    /// Mean and `s / √T` of `samples`, summed in order.
    pub fn from_samples(samples: &[f64]) -> Self {
        let t = samples.len();
        if t == 0 {
            return Self {
                mean: f64::NAN,
                stderr: f64::NAN,
                trials: 0,
            };
        }
        let mean = samples.iter().sum::<f64>() / t as f64;
        let stderr = if t > 1 {
            let ss: f64 = samples.iter().map(|x| (x - mean).powi(2)).sum();
            (ss / (t - 1) as f64 / t as f64).sqrt()
        } else {
            0.0
        };
        Self {
            mean,
            stderr,
            trials: t as u64,
        }
    }
}

/// Runs `f` once per trial on the stream `(seed, trial)`, in parallel on the
/// current rayon pool, and returns the results in trial order.
pub fn run_trials<T, F>(trials: u64, seed: u64, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64, &mut SimRng) -> Result<T> + Sync,
{
    if trials == 0 {
        return Err(invalid("at least one trial is required"));
    }
    let factory = StreamFactory::new(seed);
    (0..trials)
        .into_par_iter()
        .map(|t| f(t, &mut factory.stream(t)))
        .collect()
}

/// Counts trials for which `f` returns true.
pub fn count_trials<F>(trials: u64, seed: u64, f: F) -> Result<u64>
where
    F: Fn(u64, &mut SimRng) -> Result<bool> + Sync,
{
    if trials == 0 {
        return Err(invalid("at least one trial is required"));
    }
    let factory = StreamFactory::new(seed);
    (0..trials)
        .into_par_iter()
        .map(|t| f(t, &mut factory.stream(t)).map(u64::from))
        .try_reduce(|| 0, |a, b| Ok(a + b))
}
