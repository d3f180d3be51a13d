//! Local repair of failing sets.
//!
//! Each epoch visits the sets whose polygon distance `d` is positive, easiest
//! first, and looks for a donor element with magnitude above `d` in some
//! other set. Among admissible donors the one leaving its source set with the
//! smallest distance is kept in a "pocket"; the scan stops early once the
//! pocket value turns negative. The fixed-cardinality variant swaps the donor
//! with the smallest element of the failing set instead of moving it.
//!
//! A donor is admissible only if both the source set and the failing set end
//! up with distance strictly below `d`, so the pseudo-loss never increases.

use rand::Rng;

use super::random::{random_partition, Cardinality};
use super::{distances_by_label, Partition};
use crate::error::{check_len, invalid, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct IterConfig {
    pub max_epochs: usize,
}

impl Default for IterConfig {
    fn default() -> Self {
        Self { max_epochs: 50 }
    }
}

/// Result of a refinement run. `trace[0]` is the starting pseudo-loss and
/// `trace[k]` the pseudo-loss after epoch `k`.
#[derive(Clone, Debug, PartialEq)]
pub struct IterOutcome {
    pub partition: Partition,
    pub trace: Vec<f64>,
    pub moves: usize,
}

impl IterOutcome {
    pub fn epochs(&self) -> usize {
        self.trace.len() - 1
    }

    pub fn pseudo_loss(&self) -> f64 {
        *self.trace.last().expect("trace is never empty")
    }
}

/// Random start followed by [`iterative_refine`].
pub fn iterative_partition<R: Rng + ?Sized>(
    mags: &[f64],
    m: usize,
    cfg: &IterConfig,
    rng: &mut R,
) -> Result<Partition> {
    let start = random_partition(mags.len(), m, Cardinality::Free, rng)?;
    Ok(iterative_refine(mags, start, cfg)?.partition)
}

/// Fixed-cardinality random start followed by [`iterative_refine_fc`].
pub fn iterative_partition_fc<R: Rng + ?Sized>(
    mags: &[f64],
    m: usize,
    cfg: &IterConfig,
    rng: &mut R,
) -> Result<Partition> {
    let start = random_partition(mags.len(), m, Cardinality::Fixed, rng)?;
    Ok(iterative_refine_fc(mags, start, cfg)?.partition)
}

/// Moves donors into failing sets starting from `start`.
pub fn iterative_refine(mags: &[f64], start: Partition, cfg: &IterConfig) -> Result<IterOutcome> {
    refine(mags, start, cfg, Move::Transfer)
}

/// Swap-only refinement; every set keeps the size it has in `start`.
pub fn iterative_refine_fc(mags: &[f64], start: Partition, cfg: &IterConfig) -> Result<IterOutcome> {
    refine(mags, start, cfg, Move::Swap)
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Move {
    Transfer,
    Swap,
}

fn refine(mags: &[f64], start: Partition, cfg: &IterConfig, mode: Move) -> Result<IterOutcome> {
    check_len(start.len(), mags.len())?;
    if cfg.max_epochs == 0 {
        return Err(invalid("max_epochs must be at least 1"));
    }
    let sets = start.set_count();
    let mut part = start;
    let mut trace = vec![max_distance(mags, part.labels(), sets)];
    let mut moves = 0;

    // Donor scan order: increasing magnitude, ties by index.
    let mut by_magnitude: Vec<usize> = (0..mags.len()).collect();
    by_magnitude.sort_by(|&a, &b| mags[a].total_cmp(&mags[b]).then(a.cmp(&b)));

    while trace.last().copied().unwrap_or(0.0) > 0.0 && trace.len() <= cfg.max_epochs {
        moves += epoch(mags, part.labels_mut(), sets, &by_magnitude, mode);
        let e = max_distance(mags, part.labels(), sets);
        let prev = *trace.last().expect("non-empty");
        trace.push(e);
        if e >= prev {
            break;
        }
    }
    Ok(IterOutcome {
        partition: part,
        trace,
        moves,
    })
}

fn max_distance(mags: &[f64], labels: &[usize], sets: usize) -> f64 {
    distances_by_label(mags, labels, sets)
        .into_iter()
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Polygon distance of set `l` after optionally removing `out` and adding `add`.
fn edited_distance(mags: &[f64], labels: &[usize], l: usize, out: Option<usize>, add: Option<usize>) -> f64 {
    let mut max = f64::NEG_INFINITY;
    let mut sum = 0.0;
    let mut visit = |m: f64| {
        sum += m;
        if m > max {
            max = m;
        }
    };
    for (i, &lab) in labels.iter().enumerate() {
        if lab == l && Some(i) != out {
            visit(mags[i]);
        }
    }
    if let Some(a) = add {
        visit(mags[a]);
    }
    if max == f64::NEG_INFINITY {
        f64::INFINITY
    } else {
        max - (sum - max)
    }
}

/// One pass over the failing sets. Returns the number of moves made.
fn epoch(mags: &[f64], labels: &mut [usize], sets: usize, by_magnitude: &[usize], mode: Move) -> usize {
    let dists = distances_by_label(mags, labels, sets);
    let mut failing: Vec<usize> = (0..sets).filter(|&l| dists[l] > 0.0).collect();
    failing.sort_by(|&a, &b| dists[a].total_cmp(&dists[b]).then(a.cmp(&b)));

    let mut sizes = vec![0usize; sets];
    for &l in labels.iter() {
        sizes[l] += 1;
    }

    let mut moves = 0;
    for l in failing {
        let d = edited_distance(mags, labels, l, None, None);
        if d <= 0.0 {
            continue;
        }
        let smallest = match mode {
            Move::Transfer => None,
            Move::Swap => by_magnitude.iter().copied().find(|&i| labels[i] == l),
        };
        let threshold = d + smallest.map_or(0.0, |i| mags[i]);

        let mut pocket_d = d;
        let mut pocket = None;
        for &i in by_magnitude.iter().filter(|&&i| mags[i] > threshold) {
            let s = labels[i];
            if s == l || (mode == Move::Transfer && sizes[s] == 1) {
                continue;
            }
            let source_after = edited_distance(mags, labels, s, Some(i), smallest);
            if source_after >= pocket_d {
                continue;
            }
            let target_after = edited_distance(mags, labels, l, smallest, Some(i));
            if target_after >= d {
                continue;
            }
            pocket_d = source_after;
            pocket = Some(i);
            if pocket_d < 0.0 {
                break;
            }
        }

        if let Some(i) = pocket {
            let s = labels[i];
            labels[i] = l;
            match smallest {
                Some(j) => labels[j] = s,
                None => {
                    sizes[s] -= 1;
                    sizes[l] += 1;
                }
            }
            moves += 1;
        }
    }
    moves
}
