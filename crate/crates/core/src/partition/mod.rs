//! Channel partitions and the optimizers that search over them.
//!
//! A [`Partition`] assigns each of `n` channel elements to one of `m` sets.
//! Every optimizer minimizes the pseudo-loss: the largest polygon distance
//! over the sets. Labels are zero-based throughout.

mod genetic;
mod iterative;
mod random;

use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::error::{invalid, Result};
use crate::polygon::subset_distance;

pub use genetic::{genetic_partition, genetic_partition_traced, GaConfig, GaOutcome};
pub use iterative::{
    iterative_partition, iterative_partition_fc, iterative_refine, iterative_refine_fc,
    IterConfig, IterOutcome,
};
pub use random::{random_partition, Cardinality};

/// Assignment of `n` elements to `m` non-empty, disjoint sets.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Partition {
    labels: Vec<usize>,
    sets: usize,
}

impl Partition {
    /// Validates that every label is below `sets` and no set is empty.
    pub fn new(labels: Vec<usize>, sets: usize) -> Result<Self> {
        if sets == 0 {
            return Err(invalid("a partition needs at least one set"));
        }
        if let Some(i) = labels.iter().position(|&l| l >= sets) {
            return Err(invalid(format!(
                "element {i} has label {} outside 0..{sets}",
                labels[i]
            )));
        }
        let p = Self { labels, sets };
        if let Some(l) = p.set_sizes().iter().position(|&s| s == 0) {
            return Err(invalid(format!("set {l} is empty")));
        }
        Ok(p)
    }

    pub(crate) fn from_labels_unchecked(labels: Vec<usize>, sets: usize) -> Self {
        debug_assert!(labels.iter().all(|&l| l < sets));
        Self { labels, sets }
    }

    /// All elements in one set.
    pub fn trivial(n: usize) -> Self {
        Self {
            labels: vec![0; n],
            sets: 1,
        }
    }

    /// Every element in its own set.
    pub fn singletons(n: usize) -> Self {
        Self {
            labels: (0..n).collect(),
            sets: n,
        }
    }

    /// Number of elements covered.
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn set_count(&self) -> usize {
        self.sets
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> usize {
        self.labels[i]
    }

    pub fn set_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.sets];
        for &l in &self.labels {
            sizes[l] += 1;
        }
        sizes
    }

    /// Member indices of set `l`, ascending.
    pub fn members(&self, l: usize) -> Vec<usize> {
        self.members_iter(l).collect()
    }

    pub(crate) fn members_iter(&self, l: usize) -> impl Iterator<Item = usize> + Clone + '_ {
        self.labels
            .iter()
            .enumerate()
            .filter(move |&(_, &x)| x == l)
            .map(|(i, _)| i)
    }

    /// All sets as member lists.
    pub fn sets(&self) -> Vec<Vec<usize>> {
        let mut sets = vec![Vec::new(); self.sets];
        for (i, &l) in self.labels.iter().enumerate() {
            sets[l].push(i);
        }
        sets
    }

    /// Whether every set has exactly `n / m` elements.
    pub fn is_fixed_cardinality(&self) -> bool {
        self.len().is_multiple_of(self.sets) && self.set_sizes().iter().all(|&s| s == self.len() / self.sets)
    }

    pub(crate) fn labels_mut(&mut self) -> &mut [usize] {
        &mut self.labels
    }
}

/// Binary `m × n` membership matrix: `b[l][i] = 1` iff element `i` is in set `l`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartitionMatrix {
    rows: Vec<Vec<u8>>,
}

impl PartitionMatrix {
    pub fn rows(&self) -> &[Vec<u8>] {
        &self.rows
    }

    pub fn column_sums(&self) -> Vec<u32> {
        let n = self.rows.first().map_or(0, Vec::len);
        (0..n)
            .map(|i| self.rows.iter().map(|r| u32::from(r[i])).sum())
            .collect()
    }

    /// `B Bᵀ`; diagonal holds set sizes, off-diagonals are zero for a partition.
    pub fn gram(&self) -> Vec<Vec<u32>> {
        self.rows
            .iter()
            .map(|a| {
                self.rows
                    .iter()
                    .map(|b| a.iter().zip(b).map(|(&x, &y)| u32::from(x * y)).sum())
                    .collect()
            })
            .collect()
    }
}

pub fn partition_matrix(part: &Partition) -> PartitionMatrix {
    let mut rows = vec![vec![0u8; part.len()]; part.set_count()];
    for (i, &l) in part.labels.iter().enumerate() {
        rows[l][i] = 1;
    }
    PartitionMatrix { rows }
}

fn check_cover(mags: &[f64], part: &Partition) -> Result<()> {
    crate::error::check_len(part.len(), mags.len())
}

/// Polygon distance of set `l`.
pub fn set_distance(mags: &[f64], part: &Partition, l: usize) -> Result<f64> {
    check_cover(mags, part)?;
    if l >= part.set_count() {
        return Err(invalid(format!(
            "set index {l} out of range for {} sets",
            part.set_count()
        )));
    }
    if part.members_iter(l).next().is_none() {
        return Err(invalid(format!("set {l} is empty")));
    }
    Ok(subset_distance(mags, part.members_iter(l)))
}

/// Per-set polygon distances. Empty sets report `+∞`.
pub fn set_distances(mags: &[f64], part: &Partition) -> Result<Vec<f64>> {
    check_cover(mags, part)?;
    Ok(distances_by_label(mags, part.labels(), part.set_count()))
}

/// One pass over the labels computing each set's polygon distance.
pub(crate) fn distances_by_label(mags: &[f64], labels: &[usize], sets: usize) -> Vec<f64> {
    let mut max = vec![f64::NEG_INFINITY; sets];
    let mut sum = vec![0.0; sets];
    for (&m, &l) in mags.iter().zip(labels) {
        sum[l] += m;
        if m > max[l] {
            max[l] = m;
        }
    }
    max.iter()
        .zip(&sum)
        .map(|(&mx, &s)| if mx == f64::NEG_INFINITY { f64::INFINITY } else { mx - (s - mx) })
        .collect()
}

/// Largest per-set polygon distance.
pub fn pseudo_loss(mags: &[f64], part: &Partition) -> Result<f64> {
    Ok(set_distances(mags, part)?
        .into_iter()
        .fold(f64::NEG_INFINITY, f64::max))
}

/// Heaviside image of the pseudo-loss: 1 iff it is strictly positive.
pub fn loss(mags: &[f64], part: &Partition) -> Result<u8> {
    Ok(heaviside(pseudo_loss(mags, part)?))
}

#[inline]
pub fn heaviside(x: f64) -> u8 {
    u8::from(x > 0.0)
}

/// The partition strategies exposed to experiments.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PartitionAlgo {
    /// Random permutation cut into equal blocks; the baseline random partition.
    Random,
    /// Each element uniform over the `m` sets (empty sets repaired).
    RandomFree,
    /// Local repair over unconstrained partitions.
    Iterative,
    /// Local repair by swaps, preserving set sizes.
    IterativeFc,
    Genetic,
}

impl PartitionAlgo {
    pub const ALL: [PartitionAlgo; 5] = [
        PartitionAlgo::Random,
        PartitionAlgo::RandomFree,
        PartitionAlgo::Iterative,
        PartitionAlgo::IterativeFc,
        PartitionAlgo::Genetic,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            PartitionAlgo::Random => "random",
            PartitionAlgo::RandomFree => "random-free",
            PartitionAlgo::Iterative => "iterative",
            PartitionAlgo::IterativeFc => "iterative-fc",
            PartitionAlgo::Genetic => "genetic",
        }
    }

    /// Whether the algorithm keeps set sizes (near-)equal.
    pub fn is_fixed_cardinality(&self) -> bool {
        matches!(self, PartitionAlgo::Random | PartitionAlgo::IterativeFc)
    }

    /// Partitions `mags` into `m` sets with default settings.
    ///
    /// The fixed-cardinality algorithms fall back to balanced set sizes
    /// (`⌊n/m⌋` or `⌈n/m⌉`) when `m` does not divide `n`.
    pub fn partition<R: Rng + ?Sized>(&self, mags: &[f64], m: usize, rng: &mut R) -> Result<Partition> {
        self.partition_with(mags, m, &AlgoSettings::default(), rng)
    }

    pub fn partition_with<R: Rng + ?Sized>(
        &self,
        mags: &[f64],
        m: usize,
        settings: &AlgoSettings,
        rng: &mut R,
    ) -> Result<Partition> {
        let n = mags.len();
        let equal_sizes = if n.is_multiple_of(m.max(1)) {
            Cardinality::Fixed
        } else {
            Cardinality::Balanced
        };
        match self {
            PartitionAlgo::Random => random_partition(n, m, equal_sizes, rng),
            PartitionAlgo::RandomFree => random_partition(n, m, Cardinality::Free, rng),
            PartitionAlgo::Iterative => {
                let start = random_partition(n, m, Cardinality::Free, rng)?;
                Ok(iterative_refine(mags, start, &settings.iter)?.partition)
            }
            PartitionAlgo::IterativeFc => {
                let start = random_partition(n, m, equal_sizes, rng)?;
                Ok(iterative_refine_fc(mags, start, &settings.iter)?.partition)
            }
            PartitionAlgo::Genetic => {
                let cfg = settings.ga.unwrap_or_else(|| GaConfig::for_length(n));
                genetic_partition(mags, m, &cfg, rng)
            }
        }
    }
}

impl fmt::Display for PartitionAlgo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PartitionAlgo {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let lower = s.to_ascii_lowercase();
        if lower == "random-fc" {
            return Ok(PartitionAlgo::Random);
        }
        PartitionAlgo::ALL
            .into_iter()
            .find(|a| a.name() == lower)
            .ok_or_else(|| {
                format!(
                    "unknown partition algorithm '{s}' (expected random|random-fc|random-free|iterative|iterative-fc|genetic)"
                )
            })
    }
}

/// Tunables for the iterative and genetic optimizers.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct AlgoSettings {
    pub iter: IterConfig,
    /// `None` uses [`GaConfig::for_length`] of the instance.
    pub ga: Option<GaConfig>,
}

#[cfg(test)]
/// Exhaustive search over labelings into exactly `m` non-empty sets.
pub(crate) fn best_loss_exhaustive(mags: &[f64], m: usize, sizes: Option<usize>) -> f64 {
    let n = mags.len();
    let mut labels = vec![0usize; n];
    let mut best = f64::INFINITY;
    loop {
        let mut counts = vec![0usize; m];
        for &l in &labels {
            counts[l] += 1;
        }
        let ok = counts.iter().all(|&c| c > 0) && sizes.is_none_or(|k| counts.iter().all(|&c| c == k));
        if ok {
            let p = Partition::new(labels.clone(), m).unwrap();
            best = best.min(pseudo_loss(mags, &p).unwrap());
        }
        let mut k = 0;
        loop {
            if k == n {
                return best;
            }
            labels[k] += 1;
            if labels[k] < m {
                break;
            }
            labels[k] = 0;
            k += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::trial_rng;

    fn two_sets() -> (Vec<f64>, Partition) {
        (
            vec![1.0, 1.0, 1.0, 5.0],
            Partition::new(vec![0, 0, 0, 1], 2).unwrap(),
        )
    }

    #[test]
    fn set_distance_examples() {
        let (mags, p) = two_sets();
        assert_eq!(set_distance(&mags, &p, 0).unwrap(), -1.0);
        assert_eq!(set_distance(&mags, &p, 1).unwrap(), 5.0);
        assert!(set_distance(&mags, &p, 2).is_err());
        assert!(set_distance(&mags[..3], &p, 0).is_err());
    }

    #[test]
    fn singleton_distance_is_its_magnitude() {
        let mags = [0.3, 2.5, 1.25];
        let p = Partition::singletons(3);
        for (l, &m) in mags.iter().enumerate() {
            assert_eq!(set_distance(&mags, &p, l).unwrap(), m);
        }
    }

    #[test]
    fn distances_match_direct_definition() {
        for t in 0..50 {
            let mut rng = trial_rng(5, t);
            let mags: Vec<f64> = (0..12).map(|_| rng.random_range(0.0..3.0)).collect();
            let p = random_partition(12, 4, Cardinality::Free, &mut rng).unwrap();
            let fast = set_distances(&mags, &p).unwrap();
            for (l, set) in p.sets().into_iter().enumerate() {
                let mut v: Vec<f64> = set.iter().map(|&i| mags[i]).collect();
                v.sort_by(|a, b| b.total_cmp(a));
                let direct = v[0] - v[1..].iter().sum::<f64>();
                assert!((fast[l] - direct).abs() < 1e-12);
                assert!((set_distance(&mags, &p, l).unwrap() - direct).abs() < 1e-12);
            }
            let pl = pseudo_loss(&mags, &p).unwrap();
            assert_eq!(pl, fast.iter().cloned().fold(f64::MIN, f64::max));
        }
    }

    #[test]
    fn pseudo_loss_and_loss() {
        let (mags, p) = two_sets();
        assert_eq!(pseudo_loss(&mags, &p).unwrap(), 5.0);
        assert_eq!(loss(&mags, &p).unwrap(), 1);
        let feasible = Partition::trivial(3);
        assert!(pseudo_loss(&[1.0, 1.0, 1.0], &feasible).unwrap() <= 0.0);
        assert_eq!(heaviside(-0.3), 0);
        assert_eq!(heaviside(5.0), 1);
        assert_eq!(heaviside(0.0), 0);
    }

    #[test]
    fn partition_validation() {
        assert!(Partition::new(vec![0, 1, 1], 2).is_ok());
        assert!(Partition::new(vec![0, 2, 1], 2).is_err());
        assert!(Partition::new(vec![0, 0, 0], 2).is_err());
        assert!(Partition::new(vec![], 0).is_err());
    }

    #[test]
    fn matrix_examples() {
        let p = Partition::new(vec![0, 1, 0], 2).unwrap();
        let b = partition_matrix(&p);
        assert_eq!(b.rows(), &[vec![1, 0, 1], vec![0, 1, 0]]);
        assert_eq!(b.column_sums(), vec![1, 1, 1]);

        let fc = random_partition(12, 4, Cardinality::Fixed, &mut trial_rng(1, 1)).unwrap();
        let gram = partition_matrix(&fc).gram();
        for (l, row) in gram.iter().enumerate() {
            for (k, &v) in row.iter().enumerate() {
                assert_eq!(v, if l == k { 3 } else { 0 });
            }
        }
    }

    #[test]
    fn algo_names_round_trip() {
        for a in PartitionAlgo::ALL {
            assert_eq!(a.name().parse::<PartitionAlgo>().unwrap(), a);
        }
        assert!("annealing".parse::<PartitionAlgo>().is_err());
        assert_eq!("random-fc".parse::<PartitionAlgo>().unwrap(), PartitionAlgo::Random);
    }

    #[test]
    fn fc_algorithms_balance_when_m_does_not_divide_n() {
        let mut rng = trial_rng(3, 3);
        let mags: Vec<f64> = (0..20).map(|_| rng.random_range(0.1..2.0)).collect();
        for algo in [PartitionAlgo::Random, PartitionAlgo::IterativeFc] {
            let p = algo.partition(&mags, 3, &mut rng).unwrap();
            let mut sizes = p.set_sizes();
            sizes.sort();
            assert_eq!(sizes, vec![6, 7, 7]);
        }
    }
}
