use std::time::Instant;

use anyhow::{bail, Context, Result};
use spzf_core::metrics::{
    estimate_outage_two_user, estimate_secrecy_rate, fray_approx, fray_empirical, optimal_m_search, LogBase,
    MeanEstimate, OutagePolicy, SecrecyConfig, TwoUserOutage,
};
use spzf_core::rng::trial_rng;
use spzf_core::spzf::feasible_m_range;
use spzf_core::{AlgoSettings, ChannelModelConfig, ModelKind, PartitionAlgo};

use crate::config::{parse_f64_list, parse_usize_list, Settings};
use crate::csv::ResultRow;

/// Algorithms run when `--algo` is not given.
pub const DEFAULT_ALGOS: [PartitionAlgo; 4] = [
    PartitionAlgo::Random,
    PartitionAlgo::Iterative,
    PartitionAlgo::IterativeFc,
    PartitionAlgo::Genetic,
];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Experiment {
    Fray,
    Outage,
    MinOutage,
    Secrecy,
    Runtime,
}

impl Experiment {
    /// Identifier written to the `experiment` column.
    pub fn id(&self) -> &'static str {
        match self {
            Experiment::Fray => "fray",
            Experiment::Outage => "outage-vs-m",
            Experiment::MinOutage => "min-outage-vs-n",
            Experiment::Secrecy => "secrecy-vs-snr",
            Experiment::Runtime => "runtime",
        }
    }

    fn default_trials(&self) -> u64 {
        match self {
            Experiment::Runtime => 1_000,
            _ => 10_000,
        }
    }

    fn default_ns(&self) -> &'static str {
        match self {
            Experiment::MinOutage => "10,20,30,40,50",
            Experiment::Runtime => "20,30",
            _ => "20",
        }
    }
}

/// A fully resolved experiment grid.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid {
    pub ns: Vec<usize>,
    /// `None` means the experiment picks its own set counts.
    pub ms: Option<Vec<usize>>,
    pub algos: Vec<PartitionAlgo>,
    pub model: ChannelModelConfig,
    pub n_e: usize,
    pub snr_db: Vec<f64>,
    pub trials: u64,
    pub seed: u64,
    pub policy: OutagePolicy,
    pub clamp: bool,
    pub log_base: LogBase,
}

fn parse_algos(s: &str) -> std::result::Result<Vec<PartitionAlgo>, String> {
    if s.trim().eq_ignore_ascii_case("all") {
        return Ok(PartitionAlgo::ALL.to_vec());
    }
    let mut out: Vec<PartitionAlgo> = Vec::new();
    for item in s.split(',').map(str::trim).filter(|x| !x.is_empty()) {
        let a: PartitionAlgo = item.parse()?;
        if !out.contains(&a) {
            out.push(a);
        }
    }
    if out.is_empty() {
        return Err("empty algorithm list".into());
    }
    Ok(out)
}

fn parse_log_base(s: &str) -> std::result::Result<LogBase, String> {
    match s.trim().to_ascii_lowercase().as_str() {
        "bits" | "2" => Ok(LogBase::Bits),
        "nats" | "e" => Ok(LogBase::Nats),
        other => Err(format!("unknown log base '{other}' (expected bits|nats)")),
    }
}

impl Grid {
    pub fn resolve(exp: Experiment, s: &Settings) -> Result<Self> {
        let ns = match s.parse_with("n", parse_usize_list)? {
            Some(ns) => ns,
            None => parse_usize_list(exp.default_ns()).expect("valid default"),
        };
        let ms = match (s.parse_with("m", parse_usize_list)?, s.parse_with("m-range", parse_usize_list)?) {
            (Some(_), Some(_)) => bail!("give either --m or --m-range, not both"),
            (a, b) => a.or(b),
        };
        let ms = match (exp, ms) {
            (Experiment::Fray, None) => Some((3..=8).collect()),
            (Experiment::Runtime, None) => Some(vec![4]),
            (_, ms) => ms,
        };
        let algos = s.parse_with("algo", parse_algos)?.unwrap_or_else(|| DEFAULT_ALGOS.to_vec());
        let kind: ModelKind = s.parse("model")?.unwrap_or(ModelKind::Rayleigh);
        let model = match kind {
            ModelKind::Rayleigh => ChannelModelConfig::rayleigh(1.0),
            ModelKind::Geometric => ChannelModelConfig::geometric(s.parse("paths")?.unwrap_or(10)),
        };
        model.validate()?;
        let trials = s.parse("trials")?.unwrap_or(exp.default_trials());
        if trials == 0 {
            bail!("trials must be at least 1");
        }
        let grid = Grid {
            ns,
            ms,
            algos,
            model,
            n_e: s.parse("ne")?.unwrap_or(5),
            snr_db: s
                .parse_with("snr-db", parse_f64_list)?
                .unwrap_or_else(|| parse_f64_list("0..40:5").expect("valid default")),
            trials,
            seed: s.parse("seed")?.unwrap_or(1),
            policy: s.parse("policy")?.unwrap_or_default(),
            clamp: s.parse("clamp")?.unwrap_or(true),
            log_base: s.parse_with("log-base", parse_log_base)?.unwrap_or_default(),
        };
        if grid.ms.as_ref().is_some_and(|ms| ms.contains(&0)) {
            bail!("set counts must be at least 1");
        }
        Ok(grid)
    }

    fn model_label(&self) -> String {
        match self.model.kind {
            ModelKind::Rayleigh => "rayleigh".into(),
            ModelKind::Geometric => format!("geometric:{}", self.model.paths),
        }
    }

    fn row(&self, exp: Experiment, algo: &str, n: usize, m: usize, metric: &'static str) -> ResultRow {
        ResultRow {
            experiment: exp.id(),
            algo: algo.to_string(),
            n,
            m,
            model: self.model_label(),
            n_e: None,
            snr_db: None,
            metric,
            value: 0.0,
            stderr: 0.0,
            trials: self.trials,
            seed: self.seed,
            wall_time_ms: 0.0,
        }
    }

    fn set_counts(&self, n: usize) -> Vec<usize> {
        self.ms.clone().unwrap_or_else(|| feasible_m_range(n))
    }
}

pub fn run_experiment(exp: Experiment, grid: &Grid) -> Result<Vec<ResultRow>> {
    match exp {
        Experiment::Fray => fray(grid),
        Experiment::Outage => outage(grid),
        Experiment::MinOutage => min_outage(grid),
        Experiment::Secrecy => secrecy(grid),
        Experiment::Runtime => runtime(grid),
    }
}

fn fray(g: &Grid) -> Result<Vec<ResultRow>> {
    let exp = Experiment::Fray;
    let mut rows = Vec::new();
    for &m in g.ms.as_deref().unwrap_or_default() {
        let est = fray_empirical(m, g.model.sigma2, g.trials, g.seed)?;
        rows.push(ResultRow {
            value: est.probability,
            stderr: est.stderr,
            ..g.row(exp, "", m, m, "fray")
        });
        rows.push(ResultRow {
            value: fray_approx(m),
            ..g.row(exp, "", m, m, "fray_approx")
        });
    }
    Ok(rows)
}

fn outage_rows(g: &Grid, exp: Experiment, algo: PartitionAlgo, n: usize, m: usize, o: &TwoUserOutage) -> [ResultRow; 3] {
    let (e1, e2, out) = (o.e1(), o.e2_given_not_e1(), o.outage());
    let mut e2_row = ResultRow {
        value: e2.probability,
        stderr: e2.stderr,
        ..g.row(exp, algo.name(), n, m, "pr_e2_given_not_e1")
    };
    e2_row.trials = e2.trials;
    [
        ResultRow {
            value: e1.probability,
            stderr: e1.stderr,
            ..g.row(exp, algo.name(), n, m, "pr_e1")
        },
        e2_row,
        ResultRow {
            value: out.probability,
            stderr: out.stderr,
            ..g.row(exp, algo.name(), n, m, "pr_outage")
        },
    ]
}

fn outage(g: &Grid) -> Result<Vec<ResultRow>> {
    let exp = Experiment::Outage;
    let settings = AlgoSettings::default();
    let mut rows = Vec::new();
    for &n in &g.ns {
        let ms = g.set_counts(n);
        if ms.is_empty() {
            bail!("no feasible set count for n = {n}; pass --m");
        }
        for &algo in &g.algos {
            for &m in &ms {
                let o = estimate_outage_two_user(n, m, algo, &settings, &g.model, g.trials, g.seed)
                    .with_context(|| format!("{algo} at n = {n}, m = {m}"))?;
                rows.extend(outage_rows(g, exp, algo, n, m, &o));
            }
        }
    }
    Ok(rows)
}

/// Smallest outage count over the candidate set counts, ties to the lower `m`.
fn best_m(g: &Grid, n: usize, algo: PartitionAlgo) -> Result<(usize, TwoUserOutage)> {
    let settings = AlgoSettings::default();
    let Some(ms) = &g.ms else {
        let search = optimal_m_search(n, algo, &settings, &g.model, g.trials, g.seed)?;
        return Ok((search.m_star, search.best));
    };
    let mut best: Option<(usize, TwoUserOutage)> = None;
    for &m in ms {
        let o = estimate_outage_two_user(n, m, algo, &settings, &g.model, g.trials, g.seed)?;
        if best.is_none_or(|(bm, b)| (o.outage_count(), m) < (b.outage_count(), bm)) {
            best = Some((m, o));
        }
    }
    best.context("empty set-count list")
}

fn min_outage(g: &Grid) -> Result<Vec<ResultRow>> {
    let exp = Experiment::MinOutage;
    let mut rows = Vec::new();
    for &n in &g.ns {
        for &algo in &g.algos {
            let (m, o) = best_m(g, n, algo).with_context(|| format!("{algo} at n = {n}"))?;
            let out = o.outage();
            rows.push(ResultRow {
                value: m as f64,
                ..g.row(exp, algo.name(), n, m, "m_star")
            });
            rows.push(ResultRow {
                value: out.probability,
                stderr: out.stderr,
                ..g.row(exp, algo.name(), n, m, "min_pr_outage")
            });
        }
    }
    Ok(rows)
}

fn secrecy(g: &Grid) -> Result<Vec<ResultRow>> {
    let exp = Experiment::Secrecy;
    let settings = AlgoSettings::default();
    let mut rows = Vec::new();
    for &n in &g.ns {
        for &algo in &g.algos {
            let ms = match &g.ms {
                Some(ms) => ms.clone(),
                None => vec![best_m(g, n, algo).with_context(|| format!("{algo} at n = {n}"))?.0],
            };
            for &m in &ms {
                for &snr in &g.snr_db {
                    let mut cfg = SecrecyConfig::new(snr, n, g.n_e);
                    cfg.policy = g.policy;
                    cfg.clamp = g.clamp;
                    cfg.log_base = g.log_base;
                    let est = estimate_secrecy_rate(&cfg, algo, m, &settings, &g.model, g.trials, g.seed)
                        .with_context(|| format!("{algo} at n = {n}, m = {m}, {snr} dB"))?;
                    let cell = |metric, e: &MeanEstimate| ResultRow {
                        n_e: Some(g.n_e),
                        snr_db: Some(snr),
                        value: e.mean,
                        stderr: e.stderr,
                        ..g.row(exp, algo.name(), n, m, metric)
                    };
                    rows.push(cell("rate_user1", &est.user1));
                    rows.push(cell("rate_user2", &est.user2));
                    rows.push(cell("rate_min", &est.min_rate));
                    let frac = est.outages as f64 / g.trials as f64;
                    rows.push(ResultRow {
                        value: frac,
                        stderr: (frac * (1.0 - frac) / g.trials as f64).sqrt(),
                        ..cell("outage_fraction", &est.user1)
                    });
                }
            }
        }
    }
    Ok(rows)
}

/// Times the partition step alone on a single thread, one channel draw per trial.
fn runtime(g: &Grid) -> Result<Vec<ResultRow>> {
    let exp = Experiment::Runtime;
    let settings = AlgoSettings::default();
    let mut rows = Vec::new();
    for &n in &g.ns {
        for &algo in &g.algos {
            for &m in &g.set_counts(n) {
                let start = Instant::now();
                let mut micros = Vec::with_capacity(g.trials as usize);
                for t in 0..g.trials {
                    let mut rng = trial_rng(g.seed, t);
                    let mags = g.model.sample(n, &mut rng)?.magnitudes();
                    let tick = Instant::now();
                    let part = algo.partition_with(&mags, m, &settings, &mut rng)?;
                    micros.push(tick.elapsed().as_secs_f64() * 1e6);
                    std::hint::black_box(part);
                }
                let est = MeanEstimate::from_samples(&micros);
                rows.push(ResultRow {
                    value: est.mean,
                    stderr: est.stderr,
                    wall_time_ms: start.elapsed().as_secs_f64() * 1e3,
                    ..g.row(exp, algo.name(), n, m, "mean_runtime_us")
                });
            }
        }
    }
    Ok(rows)
}
