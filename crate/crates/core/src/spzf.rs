//! Successive partition zero-forcing.
//!
//! Stage `k` partitions user `k`'s current (reduced) channel, zero-forces every
//! set with the polygon solver and folds each set into one entry of the next
//! reduced channel for all later users. The last stage puts everything in a
//! single set. The beamformer entry for antenna `i` is the product of the
//! phase rotations applied to the nested groups containing `i`.

use std::fmt;

use num_complex::Complex64;

use crate::channel::ChannelVector;
use crate::error::{check_len, invalid, Result, SpzfError};
use crate::partition::{Partition, set_distances};
use crate::polygon::{best_effort_phases, polygon_solver, CLOSURE_TOL};

/// Relative residual below which a user counts as zero-forced.
pub const ZF_TOL: f64 = CLOSURE_TOL;

#[derive(Clone, Debug, PartialEq)]
pub struct SpzfSolution {
    /// Unit-modulus beamformer, one entry per antenna.
    pub w: Vec<Complex64>,
    /// Phases applied at each stage; stage `k` has one phase per entry of
    /// the vector partitioned at that stage.
    pub stage_phases: Vec<Vec<f64>>,
    /// Partition used at each stage. The last one is always a single set.
    pub stage_partitions: Vec<Partition>,
    /// Relative residual `|h_kᵀ w| / Σ|h_ki|` for every user.
    pub residuals: Vec<f64>,
}

impl SpzfSolution {
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().copied().fold(0.0, f64::max)
    }
}

/// Which error event caused an outage in the two-user scheme.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ErrorEvent {
    /// A set of the first user's partition violates the polygon inequality.
    E1,
    /// The reduced channel of the second user violates it.
    E2,
}

impl fmt::Display for ErrorEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ErrorEvent::E1 => "E1",
            ErrorEvent::E2 => "E2",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OutageReport {
    /// Zero-based stage that failed.
    pub stage: usize,
    /// Lowest-index failing set of that stage.
    pub set: usize,
    /// Polygon distance of that set (positive).
    pub distance: f64,
    /// Partition that was attempted at the failing stage.
    pub partition: Partition,
}

impl OutageReport {
    /// First-stage failures are `E1`, later ones `E2`.
    pub fn event(&self) -> ErrorEvent {
        if self.stage == 0 {
            ErrorEvent::E1
        } else {
            ErrorEvent::E2
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum SpzfOutcome {
    Solved(SpzfSolution),
    Outage(OutageReport),
}

impl SpzfOutcome {
    pub fn is_outage(&self) -> bool {
        matches!(self, SpzfOutcome::Outage(_))
    }

    pub fn solution(&self) -> Option<&SpzfSolution> {
        match self {
            SpzfOutcome::Solved(s) => Some(s),
            SpzfOutcome::Outage(_) => None,
        }
    }

    pub fn outage(&self) -> Option<&OutageReport> {
        match self {
            SpzfOutcome::Solved(_) => None,
            SpzfOutcome::Outage(r) => Some(r),
        }
    }
}

/// `y_l = Σ_{i ∈ B_l} h_i e^{jφ_i}`.
pub fn reduced_channel(h: &[Complex64], part: &Partition, phases: &[f64]) -> Result<Vec<Complex64>> {
    check_len(h.len(), part.len())?;
    check_len(h.len(), phases.len())?;
    let mut y = vec![Complex64::new(0.0, 0.0); part.set_count()];
    for (i, (&hi, &p)) in h.iter().zip(phases).enumerate() {
        y[part.label(i)] += hi * Complex64::from_polar(1.0, p);
    }
    Ok(y)
}

/// `w_i = exp(j Σ_k φ_k[g_k(i)])` where `g_0(i) = i` and
/// `g_{k+1}(i)` is the stage-`k` label of `g_k(i)`.
pub fn compose_beamformer(partitions: &[Partition], phases: &[Vec<f64>]) -> Result<Vec<Complex64>> {
    check_len(partitions.len(), phases.len())?;
    let Some(first) = partitions.first() else {
        return Err(invalid("at least one stage is required"));
    };
    for (k, (p, ph)) in partitions.iter().zip(phases).enumerate() {
        check_len(p.len(), ph.len())?;
        if let Some(next) = partitions.get(k + 1) {
            if next.len() != p.set_count() {
                return Err(SpzfError::DimensionMismatch {
                    expected: p.set_count(),
                    found: next.len(),
                });
            }
        }
    }
    let w = (0..first.len())
        .map(|i| {
            let mut g = i;
            let mut theta = 0.0;
            for (p, ph) in partitions.iter().zip(phases) {
                theta += ph[g];
                g = p.label(g);
            }
            Complex64::from_polar(1.0, theta)
        })
        .collect();
    Ok(w)
}

/// Relative residual `|h_kᵀ w| / Σ_i |h_ki|` per channel; zero when the
/// channel itself is all zeros.
pub fn verify_zero_forcing(w: &[Complex64], channels: &[&[Complex64]]) -> Result<Vec<f64>> {
    channels
        .iter()
        .map(|h| {
            check_len(w.len(), h.len())?;
            let sum: Complex64 = h.iter().zip(w).map(|(a, b)| a * b).sum();
            let scale: f64 = h.iter().map(|z| z.norm()).sum();
            Ok(if scale > 0.0 { sum.norm() / scale } else { 0.0 })
        })
        .collect()
}

/// Set counts `m` with `3 ≤ m ≤ n/3` for the two-user scheme.
pub fn feasible_m_range(n: usize) -> Vec<usize> {
    (3..=n / 3).collect()
}

/// Every chain `[m_2, …, m_K]` with `3 ≤ m_{k+1} ≤ m_k / 3` and `m_1 = n`.
pub fn feasible_m_chains(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn extend(prev: usize, left: usize, chain: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if left == 0 {
            out.push(chain.clone());
            return;
        }
        for m in 3..=prev / 3 {
            chain.push(m);
            extend(m, left - 1, chain, out);
            chain.pop();
        }
    }
    let mut out = Vec::new();
    if k >= 1 {
        extend(n, k - 1, &mut Vec::new(), &mut out);
    }
    out
}

/// Checks `n ≥ 3^K` and the chain rule `3 ≤ m_{k+1} ≤ m_k / 3`.
pub fn validate_chain(n: usize, users: usize, set_counts: &[usize]) -> Result<()> {
    if users < 2 {
        return Err(invalid("at least two users are required"));
    }
    let min_n = 3usize.checked_pow(users as u32).unwrap_or(usize::MAX);
    if n < min_n {
        return Err(invalid(format!("{users} users need at least {min_n} antennas, got {n}")));
    }
    if set_counts.len() != users - 1 {
        return Err(invalid(format!(
            "{users} users need {} set counts, got {}",
            users - 1,
            set_counts.len()
        )));
    }
    let mut prev = n;
    for &m in set_counts {
        if m < 3 || m > prev / 3 {
            return Err(invalid(format!("set count {m} outside [3, {}]", prev / 3)));
        }
        prev = m;
    }
    Ok(())
}

/// Two-user scheme with a given partition of the first user's channel.
///
/// Any set count is accepted here, including degenerate ones such as `m = 1`.
pub fn spzf_two_user(h1: &ChannelVector, h2: &ChannelVector, part: &Partition) -> Result<SpzfOutcome> {
    check_len(h1.len(), h2.len())?;
    check_len(h1.len(), part.len())?;
    let run = run_stages(&[h1.as_slice(), h2.as_slice()], &[part.set_count()], |_, _, _| Ok(part.clone()), false)?;
    Ok(run.into_outcome())
}

/// Two-user scheme that keeps going past a failing set, giving it the phases
/// of least residual. Returns the beamformer with its actual residuals and
/// the first failure, if any.
pub fn spzf_two_user_best_effort(
    h1: &ChannelVector,
    h2: &ChannelVector,
    part: &Partition,
) -> Result<(SpzfSolution, Option<OutageReport>)> {
    check_len(h1.len(), h2.len())?;
    check_len(h1.len(), part.len())?;
    let run = run_stages(&[h1.as_slice(), h2.as_slice()], &[part.set_count()], |_, _, _| Ok(part.clone()), true)?;
    let sol = run.solution.ok_or_else(|| invalid("best-effort run produced no beamformer"))?;
    Ok((sol, run.outage))
}

/// `K`-user scheme. `set_counts` lists `m_2, …, m_K`; `choose(stage, mags, m)`
/// partitions the magnitudes of the vector handled at `stage` into `m` sets.
pub fn spzf_general<F>(channels: &[ChannelVector], set_counts: &[usize], choose: F) -> Result<SpzfOutcome>
where
    F: FnMut(usize, &[f64], usize) -> Result<Partition>,
{
    let n = channels.first().map_or(0, ChannelVector::len);
    validate_chain(n, channels.len(), set_counts)?;
    for h in channels {
        check_len(n, h.len())?;
    }
    let slices: Vec<&[Complex64]> = channels.iter().map(ChannelVector::as_slice).collect();
    Ok(run_stages(&slices, set_counts, choose, false)?.into_outcome())
}

struct StageRun {
    solution: Option<SpzfSolution>,
    outage: Option<OutageReport>,
}

impl StageRun {
    fn into_outcome(self) -> SpzfOutcome {
        match (self.outage, self.solution) {
            (Some(o), _) => SpzfOutcome::Outage(o),
            (None, Some(s)) => SpzfOutcome::Solved(s),
            (None, None) => unreachable!("stage run without outcome"),
        }
    }
}

fn run_stages<F>(channels: &[&[Complex64]], set_counts: &[usize], mut choose: F, best_effort: bool) -> Result<StageRun>
where
    F: FnMut(usize, &[f64], usize) -> Result<Partition>,
{
    let users = channels.len();
    let mut current: Vec<Vec<Complex64>> = channels.iter().map(|h| h.to_vec()).collect();
    let mut stage_partitions = Vec::with_capacity(users);
    let mut stage_phases = Vec::with_capacity(users);
    let mut outage = None;

    for stage in 0..users {
        let v = &current[stage];
        let mags: Vec<f64> = v.iter().map(|z| z.norm()).collect();
        let part = match set_counts.get(stage) {
            Some(&m) => {
                let p = choose(stage, &mags, m)?;
                check_len(v.len(), p.len())?;
                if p.set_count() != m {
                    return Err(invalid(format!(
                        "stage {stage} partition has {} sets, expected {m}",
                        p.set_count()
                    )));
                }
                p
            }
            None => Partition::trivial(v.len()),
        };

        let phases = match zero_force_sets(v, &part)? {
            Ok(phases) => phases,
            Err((set, distance)) => {
                let report = OutageReport {
                    stage,
                    set,
                    distance,
                    partition: part.clone(),
                };
                if !best_effort {
                    return Ok(StageRun {
                        solution: None,
                        outage: Some(report),
                    });
                }
                outage.get_or_insert(report);
                best_effort_sets(v, &part)?
            }
        };
        for later in current.iter_mut().skip(stage + 1) {
            *later = reduced_channel(later, &part, &phases)?;
        }
        stage_partitions.push(part);
        stage_phases.push(phases);
    }

    let w = compose_beamformer(&stage_partitions, &stage_phases)?;
    let residuals = verify_zero_forcing(&w, channels)?;
    Ok(StageRun {
        solution: Some(SpzfSolution {
            w,
            stage_phases,
            stage_partitions,
            residuals,
        }),
        outage,
    })
}

fn best_effort_sets(v: &[Complex64], part: &Partition) -> Result<Vec<f64>> {
    let mut phases = vec![0.0; v.len()];
    for members in part.sets() {
        if members.is_empty() {
            continue;
        }
        let sub: Vec<Complex64> = members.iter().map(|&i| v[i]).collect();
        for (&i, p) in members.iter().zip(best_effort_phases(&sub)?) {
            phases[i] = p;
        }
    }
    Ok(phases)
}

/// Phases that zero-force every set of `v` under `part`, or the lowest-index
/// set violating the polygon inequality together with its distance.
pub fn zero_force_sets(v: &[Complex64], part: &Partition) -> Result<std::result::Result<Vec<f64>, (usize, f64)>> {
    let mags: Vec<f64> = v.iter().map(|z| z.norm()).collect();
    let dists = set_distances(&mags, part)?;
    if let Some(set) = dists.iter().position(|&d| d > 0.0) {
        return Ok(Err((set, dists[set])));
    }
    solve_sets(v, part).map(Ok)
}

/// A feasible singleton is exactly zero and keeps phase 0.
fn solve_sets(v: &[Complex64], part: &Partition) -> Result<Vec<f64>> {
    let mut phases = vec![0.0; v.len()];
    for members in part.sets() {
        if members.len() < 2 {
            continue;
        }
        let sub: Vec<Complex64> = members.iter().map(|&i| v[i]).collect();
        for (&i, p) in members.iter().zip(polygon_solver(&sub)?) {
            phases[i] = p;
        }
    }
    Ok(phases)
}
