//! Genetic search over label vectors `x ∈ {0..m}^n`.
//!
//! Parents come from binary tournaments; offspring are produced by
//! single-point crossover (with probability `crossover_rate`) or copied, and
//! every offspring gene is then re-labelled with probability
//! `mutation_rate`. The `elites` best individuals pass through untouched.

use rand::Rng;

use super::{distances_by_label, Partition};
use crate::error::{check_len, invalid, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GaConfig {
    pub population: usize,
    pub elites: usize,
    pub crossover_rate: f64,
    pub mutation_rate: f64,
    pub max_generations: usize,
    pub stall_generations: usize,
}

impl GaConfig {
    /// Population `10 n`, 25 elites, 85% crossover, 10% per-gene mutation,
    /// at most 200 generations with a 30-generation stall limit.
    ///
    /// For very short channels the elite count is capped below the population.
    pub fn for_length(n: usize) -> Self {
        let population = (10 * n).max(2);
        Self {
            population,
            elites: 25.min(population - 1),
            crossover_rate: 0.85,
            mutation_rate: 0.10,
            max_generations: 200,
            stall_generations: 30,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.population < 2 {
            return Err(invalid("population must hold at least 2 individuals"));
        }
        if self.elites >= self.population {
            return Err(invalid(format!(
                "elite count {} must be below the population {}",
                self.elites, self.population
            )));
        }
        for (name, rate) in [("crossover", self.crossover_rate), ("mutation", self.mutation_rate)] {
            if !(0.0..=1.0).contains(&rate) {
                return Err(invalid(format!("{name} rate {rate} outside [0, 1]")));
            }
        }
        if self.max_generations == 0 || self.stall_generations == 0 {
            return Err(invalid("generation limits must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GaOutcome {
    pub partition: Partition,
    /// Best pseudo-loss in the population at each generation, starting with
    /// the initial population.
    pub best_trace: Vec<f64>,
}

impl GaOutcome {
    pub fn generations(&self) -> usize {
        self.best_trace.len() - 1
    }
}

pub fn genetic_partition<R: Rng + ?Sized>(
    mags: &[f64],
    m: usize,
    cfg: &GaConfig,
    rng: &mut R,
) -> Result<Partition> {
    Ok(genetic_partition_traced(mags, m, cfg, rng)?.partition)
}

struct Individual {
    genes: Vec<usize>,
    fitness: f64,
}

fn fitness(mags: &[f64], genes: &[usize], m: usize) -> f64 {
    // Empty sets evaluate to +inf and so never beat a proper partition.
    distances_by_label(mags, genes, m)
        .into_iter()
        .fold(f64::NEG_INFINITY, f64::max)
}

pub fn genetic_partition_traced<R: Rng + ?Sized>(
    mags: &[f64],
    m: usize,
    cfg: &GaConfig,
    rng: &mut R,
) -> Result<GaOutcome> {
    cfg.validate()?;
    let n = mags.len();
    if m == 0 || m > n {
        return Err(invalid(format!("cannot split {n} elements into {m} non-empty sets")));
    }
    let eval = |genes: Vec<usize>| Individual {
        fitness: fitness(mags, &genes, m),
        genes,
    };

    let mut population: Vec<Individual> = (0..cfg.population)
        .map(|_| eval((0..n).map(|_| rng.random_range(0..m)).collect()))
        .collect();
    sort_by_fitness(&mut population);
    let mut best_trace = vec![population[0].fitness];
    let mut stall = 0;

    while population[0].fitness > 0.0 && best_trace.len() <= cfg.max_generations && stall < cfg.stall_generations {
        let mut next: Vec<Individual> = Vec::with_capacity(cfg.population);
        for elite in &population[..cfg.elites] {
            next.push(Individual {
                genes: elite.genes.clone(),
                fitness: elite.fitness,
            });
        }
        while next.len() < cfg.population {
            if n >= 2 && rng.random::<f64>() < cfg.crossover_rate {
                let p1 = tournament(&population, rng);
                let p2 = tournament(&population, rng);
                let k = rng.random_range(1..n);
                let mut o1 = population[p1].genes.clone();
                let mut o2 = population[p2].genes.clone();
                o1[k..].copy_from_slice(&population[p2].genes[k..]);
                o2[k..].copy_from_slice(&population[p1].genes[k..]);
                mutate(&mut o1, m, cfg.mutation_rate, rng);
                next.push(eval(o1));
                if next.len() < cfg.population {
                    mutate(&mut o2, m, cfg.mutation_rate, rng);
                    next.push(eval(o2));
                }
            } else {
                let p = tournament(&population, rng);
                let mut child = population[p].genes.clone();
                mutate(&mut child, m, cfg.mutation_rate, rng);
                next.push(eval(child));
            }
        }
        sort_by_fitness(&mut next);
        population = next;

        let prev = *best_trace.last().expect("non-empty");
        let best = population[0].fitness;
        if best < prev {
            stall = 0;
        } else {
            stall += 1;
        }
        best_trace.push(best);
    }

    let best = population.swap_remove(0).genes;
    check_len(n, best.len())?;
    Ok(GaOutcome {
        partition: fill_empty_sets(mags, best, m),
        best_trace,
    })
}

/// Stable sort: equal fitness keeps the lower index first.
fn sort_by_fitness(population: &mut [Individual]) {
    population.sort_by(|a, b| a.fitness.total_cmp(&b.fitness));
}

/// Two uniform draws; the fitter wins, ties go to the lower index.
fn tournament<R: Rng + ?Sized>(population: &[Individual], rng: &mut R) -> usize {
    let a = rng.random_range(0..population.len());
    let b = rng.random_range(0..population.len());
    let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
    if population[hi].fitness < population[lo].fitness {
        hi
    } else {
        lo
    }
}

fn mutate<R: Rng + ?Sized>(genes: &mut [usize], m: usize, rate: f64, rng: &mut R) {
    if m < 2 || rate == 0.0 {
        return;
    }
    for g in genes.iter_mut() {
        if rng.random::<f64>() < rate {
            let other = rng.random_range(0..m - 1);
            *g = if other >= *g { other + 1 } else { other };
        }
    }
}

/// Moves the smallest-magnitude element of the largest set into each empty set.
fn fill_empty_sets(mags: &[f64], mut genes: Vec<usize>, m: usize) -> Partition {
    let mut sizes = vec![0usize; m];
    for &g in &genes {
        sizes[g] += 1;
    }
    for empty in 0..m {
        if sizes[empty] > 0 {
            continue;
        }
        let donor = (0..m)
            .max_by(|&a, &b| sizes[a].cmp(&sizes[b]).then(b.cmp(&a)))
            .expect("m >= 1");
        let i = (0..genes.len())
            .filter(|&i| genes[i] == donor)
            .min_by(|&a, &b| mags[a].total_cmp(&mags[b]).then(a.cmp(&b)))
            .expect("donor set is non-empty");
        genes[i] = empty;
        sizes[donor] -= 1;
        sizes[empty] += 1;
    }
    Partition::from_labels_unchecked(genes, m)
}
