use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use super::{run_trials, MeanEstimate};
use crate::channel::{sample_eve_matrix, ChannelModelConfig, EveChannelMatrix};
use crate::error::{check_len, invalid, Result};
use crate::partition::{AlgoSettings, PartitionAlgo};
use crate::spzf::{spzf_two_user, spzf_two_user_best_effort, SpzfOutcome};

/// Partition attempts per trial under [`OutagePolicy::ResamplePartition`].
pub const RESAMPLE_ATTEMPTS: usize = 10;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum LogBase {
    #[default]
    Bits,
    Nats,
}

impl LogBase {
    /// `log(1 + x)` in this base.
    fn log1p(self, x: f64) -> f64 {
        match self {
            LogBase::Bits => x.ln_1p() / std::f64::consts::LN_2,
            LogBase::Nats => x.ln_1p(),
        }
    }
}

/// What a trial does when the scheme is in outage.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum OutagePolicy {
    /// Transmit the message without artificial noise.
    NoArtificialNoise,
    /// Count the trial as rate zero.
    ZeroRate,
    /// Re-run the partition algorithm up to [`RESAMPLE_ATTEMPTS`] times on the
    /// same channels, then fall back to no artificial noise.
    ResamplePartition,
    /// Transmit the best-effort noise beamformer, which leaks into the users.
    #[default]
    LeakyArtificialNoise,
}

impl OutagePolicy {
    pub fn name(&self) -> &'static str {
        match self {
            OutagePolicy::NoArtificialNoise => "no-an",
            OutagePolicy::ZeroRate => "zero-rate",
            OutagePolicy::ResamplePartition => "resample-partition",
            OutagePolicy::LeakyArtificialNoise => "leaky-an",
        }
    }
}

impl fmt::Display for OutagePolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for OutagePolicy {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        [
            OutagePolicy::NoArtificialNoise,
            OutagePolicy::ZeroRate,
            OutagePolicy::ResamplePartition,
            OutagePolicy::LeakyArtificialNoise,
        ]
        .into_iter()
        .find(|p| p.name() == s)
        .ok_or_else(|| format!("unknown outage policy '{s}' (expected no-an|zero-rate|resample-partition|leaky-an)"))
    }
}

/// Noise variance is 1, so the SNR equals the total power `P`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SecrecyConfig {
    pub snr_db: f64,
    pub n: usize,
    pub n_e: usize,
    pub policy: OutagePolicy,
    /// Floor per-trial rates at zero before averaging.
    pub clamp: bool,
    pub log_base: LogBase,
}

impl SecrecyConfig {
    pub fn new(snr_db: f64, n: usize, n_e: usize) -> Self {
        Self {
            snr_db,
            n,
            n_e,
            policy: OutagePolicy::default(),
            clamp: true,
            log_base: LogBase::default(),
        }
    }

    /// Number of artificial-noise chains.
    pub const NOISE_CHAINS: usize = 1;

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.n_e == 0 {
            return Err(invalid("secrecy needs n >= 1 and n_e >= 1"));
        }
        if !self.snr_db.is_finite() {
            return Err(invalid(format!("SNR {} dB is not finite", self.snr_db)));
        }
        Ok(())
    }

    pub fn power(&self) -> f64 {
        snr_from_db(self.snr_db)
    }
}

pub fn snr_from_db(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RateSample {
    pub legit_term: f64,
    pub eve_term: f64,
    /// `legit_term - eve_term`, not floored.
    pub rate: f64,
}

/// `v_i = exp(-j arg h_i)`, so that `hᵀv = Σ|h_i|`.
pub fn message_beamformer(h: &[Complex64]) -> Vec<Complex64> {
    h.iter().map(|z| Complex64::from_polar(1.0, -z.arg())).collect()
}

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Secrecy-rate terms for message beamformer `v` and noise beamformer `w`,
/// each scaled by `sqrt(P / 2N)`. `w` may be all zeros (no artificial noise).
///
/// The eavesdropper term uses
/// `det(I + aa† + bb†) = (1 + |a|²)(1 + |b|²) - |a†b|²` with `a = Gṽ`, `b = Gw̃`.
pub fn secrecy_rate_sample(
    h: &[Complex64],
    g: &EveChannelMatrix,
    v: &[Complex64],
    w: &[Complex64],
    p_total: f64,
    base: LogBase,
) -> Result<RateSample> {
    let n = h.len();
    check_len(n, v.len())?;
    check_len(n, w.len())?;
    check_len(n, g.n())?;
    if !(p_total >= 0.0) {
        return Err(invalid(format!("power {p_total} must be non-negative")));
    }
    let scale = (p_total / (2.0 * n as f64)).sqrt();
    let vs: Vec<Complex64> = v.iter().map(|z| z * scale).collect();
    let ws: Vec<Complex64> = w.iter().map(|z| z * scale).collect();

    let signal = dot(h, &vs).norm_sqr();
    let leak = dot(h, &ws).norm_sqr();
    let legit_term = base.log1p(signal / (1.0 + leak));

    let a = g.apply(&vs);
    let b = g.apply(&ws);
    let aa: f64 = a.iter().map(Complex64::norm_sqr).sum();
    let bb: f64 = b.iter().map(Complex64::norm_sqr).sum();
    let ab: f64 = a.iter().zip(&b).map(|(x, y)| x.conj() * y).sum::<Complex64>().norm_sqr();
    // Mathematically >= aa / (1 + bb) >= 0; the floor only absorbs rounding.
    let excess = (aa - ab / (1.0 + bb)).max(0.0);
    let eve_term = base.log1p(excess);

    Ok(RateSample {
        legit_term,
        eve_term,
        rate: legit_term - eve_term,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct SecrecyEstimate {
    /// Rate with `v` matched to the first user, evaluated on `h1`.
    pub user1: MeanEstimate,
    /// Rate with `v` matched to the second user, evaluated on `h2`.
    pub user2: MeanEstimate,
    /// Per-trial `min(R1, R2)`.
    pub min_rate: MeanEstimate,
    /// Per-trial first-user rates in trial order, for paired comparisons.
    pub user1_samples: Vec<f64>,
    /// Per-trial `min(R1, R2)` in trial order.
    pub min_rate_samples: Vec<f64>,
    /// Trials in which the scheme was in outage (after any resampling).
    pub outages: u64,
}

/// Per trial: draw `h1`, `h2`, then `G`, partition `|h1|` into `m` sets with
/// `algo` and evaluate the rate with the resulting noise beamformer.
pub fn estimate_secrecy_rate(
    cfg: &SecrecyConfig,
    algo: PartitionAlgo,
    m: usize,
    settings: &AlgoSettings,
    model: &ChannelModelConfig,
    trials: u64,
    seed: u64,
) -> Result<SecrecyEstimate> {
    cfg.validate()?;
    model.validate()?;
    let n = cfg.n;
    if m == 0 || m > n {
        return Err(invalid(format!("set count {m} outside [1, {n}]")));
    }
    let p = cfg.power();
    let per_trial = run_trials(trials, seed, |_, rng| {
        let h1 = model.sample(n, rng)?;
        let h2 = model.sample(n, rng)?;
        let g = sample_eve_matrix(cfg.n_e, n, model, rng)?;
        let mags = h1.magnitudes();

        let attempts = match cfg.policy {
            OutagePolicy::ResamplePartition => RESAMPLE_ATTEMPTS,
            _ => 1,
        };
        let mut w = None;
        let mut outage = true;
        for _ in 0..attempts {
            let part = algo.partition_with(&mags, m, settings, rng)?;
            if cfg.policy == OutagePolicy::LeakyArtificialNoise {
                let (sol, report) = spzf_two_user_best_effort(&h1, &h2, &part)?;
                outage = report.is_some();
                w = Some(sol.w);
                break;
            }
            if let SpzfOutcome::Solved(sol) = spzf_two_user(&h1, &h2, &part)? {
                w = Some(sol.w);
                outage = false;
                break;
            }
        }
        if outage && cfg.policy == OutagePolicy::ZeroRate {
            return Ok((0.0, 0.0, outage));
        }
        let w = w.unwrap_or_else(|| vec![Complex64::new(0.0, 0.0); n]);
        let rate = |h: &[Complex64]| -> Result<f64> {
            let r = secrecy_rate_sample(h, &g, &message_beamformer(h), &w, p, cfg.log_base)?.rate;
            Ok(if cfg.clamp { r.max(0.0) } else { r })
        };
        Ok((rate(h1.as_slice())?, rate(h2.as_slice())?, outage))
    })?;

    let r1: Vec<f64> = per_trial.iter().map(|t| t.0).collect();
    let r2: Vec<f64> = per_trial.iter().map(|t| t.1).collect();
    let rmin: Vec<f64> = per_trial.iter().map(|t| t.0.min(t.1)).collect();
    Ok(SecrecyEstimate {
        user1: MeanEstimate::from_samples(&r1),
        user2: MeanEstimate::from_samples(&r2),
        min_rate: MeanEstimate::from_samples(&rmin),
        user1_samples: r1,
        min_rate_samples: rmin,
        outages: per_trial.iter().filter(|t| t.2).count() as u64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{sample_rayleigh, ChannelVector};
    use crate::rng::trial_rng;

    /// Determinant by Gaussian elimination with partial pivoting.
    fn det(mut a: Vec<Vec<Complex64>>) -> Complex64 {
        let n = a.len();
        let mut d = Complex64::new(1.0, 0.0);
        for c in 0..n {
            let p = (c..n).max_by(|&x, &y| a[x][c].norm().total_cmp(&a[y][c].norm())).unwrap();
            if p != c {
                a.swap(p, c);
                d = -d;
            }
            let piv = a[c][c];
            d *= piv;
            for r in c + 1..n {
                let f = a[r][c] / piv;
                for k in c..n {
                    let sub = f * a[c][k];
                    a[r][k] -= sub;
                }
            }
        }
        d
    }

    fn dense_eve_term(g: &EveChannelMatrix, vs: &[Complex64], ws: &[Complex64]) -> f64 {
        let a = g.apply(vs);
        let b = g.apply(ws);
        let ne = a.len();
        let m = |with_a: bool| {
            (0..ne)
                .map(|r| {
                    (0..ne)
                        .map(|c| {
                            let id = if r == c { 1.0 } else { 0.0 };
                            let mut x = Complex64::new(id, 0.0) + b[r] * b[c].conj();
                            if with_a {
                                x += a[r] * a[c].conj();
                            }
                            x
                        })
                        .collect()
                })
                .collect::<Vec<Vec<Complex64>>>()
        };
        (det(m(true)).re / det(m(false)).re).log2()
    }

    fn random_unit(n: usize, rng: &mut crate::rng::SimRng) -> Vec<Complex64> {
        use rand::Rng;
        (0..n)
            .map(|_| Complex64::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU)))
            .collect()
    }

    #[test]
    fn eve_term_matches_dense_determinant() {
        for t in 0..1000 {
            let mut rng = trial_rng(21, t);
            let n = 12;
            let g = sample_eve_matrix(5, n, &ChannelModelConfig::default(), &mut rng).unwrap();
            let h = sample_rayleigh(n, 1.0, &mut rng).unwrap();
            let v = random_unit(n, &mut rng);
            let w = random_unit(n, &mut rng);
            let p = 100.0;
            let s = secrecy_rate_sample(h.as_slice(), &g, &v, &w, p, LogBase::Bits).unwrap();
            let scale = (p / (2.0 * n as f64)).sqrt();
            let vs: Vec<Complex64> = v.iter().map(|z| z * scale).collect();
            let ws: Vec<Complex64> = w.iter().map(|z| z * scale).collect();
            let dense = dense_eve_term(&g, &vs, &ws);
            assert!((s.eve_term - dense).abs() <= 1e-10 * dense.abs().max(1.0), "{} vs {dense}", s.eve_term);
            assert!(s.eve_term >= 0.0);
        }
    }

    #[test]
    fn single_eavesdropper_antenna_reduces_to_a_ratio() {
        let mut rng = trial_rng(22, 0);
        let n = 8;
        let g = sample_eve_matrix(1, n, &ChannelModelConfig::default(), &mut rng).unwrap();
        let h = sample_rayleigh(n, 1.0, &mut rng).unwrap();
        let v = random_unit(n, &mut rng);
        let w = random_unit(n, &mut rng);
        let s = secrecy_rate_sample(h.as_slice(), &g, &v, &w, 10.0, LogBase::Bits).unwrap();
        let scale = (10.0 / (2.0 * n as f64)).sqrt();
        let gv = dot(g.rows()[0].as_slice(), &v).norm_sqr() * scale * scale;
        let gw = dot(g.rows()[0].as_slice(), &w).norm_sqr() * scale * scale;
        assert!((s.eve_term - (1.0 + gv / (1.0 + gw)).log2()).abs() < 1e-10);
    }

    #[test]
    fn zero_forced_noise_leaves_the_user_clean() {
        let h = [Complex64::new(1.0, 0.0), Complex64::new(-1.0, 0.0), Complex64::new(0.0, 2.0)];
        let w = [Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)];
        let v = message_beamformer(&h);
        let g = EveChannelMatrix::new(vec![ChannelVector::new(vec![Complex64::new(0.0, 0.0); 3]).unwrap()]).unwrap();
        let s = secrecy_rate_sample(&h, &g, &v, &w, 6.0, LogBase::Bits).unwrap();
        let signal: f64 = 16.0;
        assert!((s.legit_term - (1.0 + signal).log2()).abs() < 1e-12);
        assert_eq!(s.eve_term, 0.0);
        assert_eq!(s.rate, s.legit_term);
        let nats = secrecy_rate_sample(&h, &g, &v, &w, 6.0, LogBase::Nats).unwrap();
        assert!((nats.legit_term - (1.0 + signal).ln()).abs() < 1e-12);
    }

    #[test]
    fn message_beamformer_examples() {
        let h = [Complex64::new(2.0, 0.0), Complex64::new(0.5, 0.0)];
        assert_eq!(message_beamformer(&h), vec![Complex64::new(1.0, 0.0); 2]);
        let h = [Complex64::new(0.0, 1.0), Complex64::new(0.0, -1.0)];
        let v = message_beamformer(&h);
        assert!((v[0] - Complex64::new(0.0, -1.0)).norm() < 1e-15);
        assert!((v[1] - Complex64::new(0.0, 1.0)).norm() < 1e-15);
        assert!((dot(&h, &v) - Complex64::new(2.0, 0.0)).norm() < 1e-15);
        for t in 0..100 {
            let h = sample_rayleigh(16, 1.0, &mut trial_rng(23, t)).unwrap();
            let s = dot(h.as_slice(), &message_beamformer(h.as_slice()));
            let total: f64 = h.iter().map(|z| z.norm()).sum();
            assert!((s - Complex64::new(total, 0.0)).norm() <= 1e-12 * total);
        }
    }

    #[test]
    fn vanishing_power_gives_vanishing_rate() {
        let cfg = SecrecyConfig::new(-100.0, 12, 3);
        let est = estimate_secrecy_rate(
            &cfg,
            PartitionAlgo::Random,
            3,
            &AlgoSettings::default(),
            &ChannelModelConfig::default(),
            200,
            1,
        )
        .unwrap();
        assert!(est.user1.mean.abs() < 1e-6);
        assert_eq!(est.user1_samples.len(), 200);
    }

    #[test]
    fn policies() {
        let model = ChannelModelConfig::default();
        let s = AlgoSettings::default();
        let run = |policy| {
            let mut cfg = SecrecyConfig::new(20.0, 12, 3);
            cfg.policy = policy;
            estimate_secrecy_rate(&cfg, PartitionAlgo::Random, 4, &s, &model, 300, 2).unwrap()
        };
        let none = run(OutagePolicy::NoArtificialNoise);
        let zero = run(OutagePolicy::ZeroRate);
        let retry = run(OutagePolicy::ResamplePartition);
        let leaky = run(OutagePolicy::LeakyArtificialNoise);
        assert!(none.outages > 0);
        assert_eq!(none.outages, zero.outages);
        assert_eq!(none.outages, leaky.outages);
        assert_eq!(OutagePolicy::default(), OutagePolicy::LeakyArtificialNoise);
        assert!(retry.outages < none.outages);
        assert!(zero.user1_samples.iter().filter(|&&r| r == 0.0).count() as u64 >= zero.outages);
        assert_eq!("zero-rate".parse::<OutagePolicy>().unwrap(), OutagePolicy::ZeroRate);
        assert!("nope".parse::<OutagePolicy>().is_err());
    }
}
