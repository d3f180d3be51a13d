use num_complex::Complex64;

use super::{count_trials, run_trials};
use crate::channel::{rayleigh_magnitude, ChannelModelConfig};
use crate::error::{invalid, Result};
use crate::partition::{AlgoSettings, PartitionAlgo};
use crate::polygon::polygon_distance_unchecked;
use crate::spzf::{feasible_m_range, reduced_channel, spzf_two_user, zero_force_sets, ErrorEvent};

/// Monte Carlo probability with its binomial standard error.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OutageEstimate {
    pub probability: f64,
    pub stderr: f64,
    pub count: u64,
    pub trials: u64,
}

impl OutageEstimate {
    /// `count / trials` with `sqrt(p(1-p)/trials)`; NaN when `trials == 0`.
    pub fn from_counts(count: u64, trials: u64) -> Self {
        let (probability, stderr) = if trials == 0 {
            (f64::NAN, f64::NAN)
        } else {
            let p = count as f64 / trials as f64;
            (p, (p * (1.0 - p) / trials as f64).sqrt())
        };
        Self {
            probability,
            stderr,
            count,
            trials,
        }
    }

    /// `sqrt(se_a² + se_b²)`.
    pub fn combined_stderr(&self, other: &OutageEstimate) -> f64 {
        self.stderr.hypot(other.stderr)
    }
}

/// `m · exp(-π m² / 16)`.
pub fn fray_approx(m: usize) -> f64 {
    let m = m as f64;
    m * (-std::f64::consts::PI * m * m / 16.0).exp()
}

/// Fraction of length-`m` Rayleigh vectors violating the polygon inequality.
pub fn fray_empirical(m: usize, sigma2: f64, trials: u64, seed: u64) -> Result<OutageEstimate> {
    if m == 0 {
        return Err(invalid("f_Ray needs m >= 1"));
    }
    ChannelModelConfig::rayleigh(sigma2).validate()?;
    let count = count_trials(trials, seed, |_, rng| {
        let mags: Vec<f64> = (0..m).map(|_| rayleigh_magnitude(sigma2, rng)).collect();
        Ok(polygon_distance_unchecked(&mags) > 0.0)
    })?;
    Ok(OutageEstimate::from_counts(count, trials))
}

/// Error-event counts of the two-user scheme.
///
/// `outage = e1 + e2` holds exactly, where `e2` counts second-stage failures
/// among trials without a first-stage failure.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TwoUserOutage {
    pub trials: u64,
    pub e1: u64,
    pub e2: u64,
}

impl TwoUserOutage {
    pub fn outage_count(&self) -> u64 {
        self.e1 + self.e2
    }

    pub fn outage(&self) -> OutageEstimate {
        OutageEstimate::from_counts(self.outage_count(), self.trials)
    }

    pub fn e1(&self) -> OutageEstimate {
        OutageEstimate::from_counts(self.e1, self.trials)
    }

    /// Conditional on no first-stage failure.
    pub fn e2_given_not_e1(&self) -> OutageEstimate {
        OutageEstimate::from_counts(self.e2, self.trials - self.e1)
    }
}

/// Per trial: draw `h1` then `h2`, partition `|h1|` into `m` sets with `algo`,
/// and classify the outcome. Trials with the same seed see the same channels
/// whichever algorithm is used.
pub fn estimate_outage_two_user(
    n: usize,
    m: usize,
    algo: PartitionAlgo,
    settings: &AlgoSettings,
    model: &ChannelModelConfig,
    trials: u64,
    seed: u64,
) -> Result<TwoUserOutage> {
    model.validate()?;
    if m == 0 || m > n {
        return Err(invalid(format!("set count {m} outside [1, {n}]")));
    }
    let events = run_trials(trials, seed, |_, rng| {
        let h1 = model.sample(n, rng)?;
        let h2 = model.sample(n, rng)?;
        let part = algo.partition_with(&h1.magnitudes(), m, settings, rng)?;
        Ok(spzf_two_user(&h1, &h2, &part)?.outage().map(|r| r.event()))
    })?;
    let e1 = events.iter().filter(|e| **e == Some(ErrorEvent::E1)).count() as u64;
    let e2 = events.iter().filter(|e| **e == Some(ErrorEvent::E2)).count() as u64;
    Ok(TwoUserOutage { trials, e1, e2 })
}

/// `1 - (1 - f(n/m))^m (1 - f(m))` for a random partition into sets of `n/m`.
pub fn random_partition_outage_closed_form(n: usize, m: usize, fray: impl Fn(usize) -> f64) -> Result<f64> {
    check_divides(n, m)?;
    Ok(1.0 - (1.0 - fray(n / m)).powi(m as i32) * (1.0 - fray(m)))
}

/// The closed form evaluated with estimated `f(n/m)` and `f(m)`, and its
/// delta-method standard error.
pub fn closed_form_with_stderr(
    n: usize,
    m: usize,
    f_set: &OutageEstimate,
    f_reduced: &OutageEstimate,
) -> Result<(f64, f64)> {
    check_divides(n, m)?;
    let a = 1.0 - f_set.probability;
    let b = 1.0 - f_reduced.probability;
    let mi = m as i32;
    let value = 1.0 - a.powi(mi) * b;
    let d_set = m as f64 * a.powi(mi - 1) * b;
    let d_reduced = a.powi(mi);
    Ok((value, (d_set * f_set.stderr).hypot(d_reduced * f_reduced.stderr)))
}

fn check_divides(n: usize, m: usize) -> Result<()> {
    if m == 0 || !n.is_multiple_of(m) {
        return Err(invalid(format!("{m} does not divide {n}")));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq)]
pub struct MSearch {
    pub m_star: usize,
    pub best: TwoUserOutage,
    /// Every candidate `m` with its estimate, ascending in `m`.
    pub curve: Vec<(usize, TwoUserOutage)>,
}

/// Estimates the outage for every `m` in `3..=n/3` and returns the smallest
/// minimizer. All candidates use the same seed.
pub fn optimal_m_search(
    n: usize,
    algo: PartitionAlgo,
    settings: &AlgoSettings,
    model: &ChannelModelConfig,
    trials: u64,
    seed: u64,
) -> Result<MSearch> {
    let range = feasible_m_range(n);
    if range.is_empty() {
        return Err(invalid(format!("no feasible set count for n = {n} (need n >= 9)")));
    }
    let curve = range
        .into_iter()
        .map(|m| Ok((m, estimate_outage_two_user(n, m, algo, settings, model, trials, seed)?)))
        .collect::<Result<Vec<_>>>()?;
    let (m_star, best) = *curve
        .iter()
        .min_by_key(|(m, o)| (o.outage_count(), *m))
        .expect("range is non-empty");
    Ok(MSearch { m_star, best, curve })
}

/// Sample covariance of the reduced channel `y` of the second user.
#[derive(Clone, Debug, PartialEq)]
pub struct CovarianceEstimate {
    pub cov: Vec<Vec<Complex64>>,
    /// Standard error of each entry, `sqrt(mean|z - cov|² / T)`.
    pub stderr: Vec<Vec<f64>>,
    /// Trials without a first-stage failure, over which `y` was collected.
    pub samples: u64,
}

/// Collects `y` from every trial in which the first user's sets are all
/// feasible and returns its sample covariance.
pub fn reduced_channel_covariance(
    n: usize,
    m: usize,
    algo: PartitionAlgo,
    model: &ChannelModelConfig,
    trials: u64,
    seed: u64,
) -> Result<CovarianceEstimate> {
    model.validate()?;
    if m == 0 || m > n {
        return Err(invalid(format!("set count {m} outside [1, {n}]")));
    }
    let ys = run_trials(trials, seed, |_, rng| {
        let h1 = model.sample(n, rng)?;
        let h2 = model.sample(n, rng)?;
        let part = algo.partition(&h1.magnitudes(), m, rng)?;
        match zero_force_sets(h1.as_slice(), &part)? {
            Ok(phases) => Ok(Some(reduced_channel(h2.as_slice(), &part, &phases)?)),
            Err(_) => Ok(None),
        }
    })?;
    let ys: Vec<Vec<Complex64>> = ys.into_iter().flatten().collect();
    let t = ys.len();
    if t < 2 {
        return Err(invalid("too few feasible trials to estimate a covariance"));
    }
    let tf = t as f64;
    let mut mean = vec![Complex64::new(0.0, 0.0); m];
    for y in &ys {
        for (acc, v) in mean.iter_mut().zip(y) {
            *acc += v;
        }
    }
    for v in &mut mean {
        *v /= tf;
    }
    let product = |y: &[Complex64], a: usize, b: usize| (y[a] - mean[a]) * (y[b] - mean[b]).conj();
    let mut cov = vec![vec![Complex64::new(0.0, 0.0); m]; m];
    let mut stderr = vec![vec![0.0; m]; m];
    for a in 0..m {
        for b in 0..m {
            let c = ys.iter().map(|y| product(y, a, b)).sum::<Complex64>() / tf;
            let spread = ys.iter().map(|y| (product(y, a, b) - c).norm_sqr()).sum::<f64>() / tf;
            cov[a][b] = c;
            stderr[a][b] = (spread / tf).sqrt();
        }
    }
    Ok(CovarianceEstimate {
        cov,
        stderr,
        samples: t as u64,
    })
}
