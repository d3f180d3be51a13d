use rand::seq::SliceRandom;
use rand::Rng;

use super::Partition;
use crate::error::{invalid, Result};

/// Set-size constraint for [`random_partition`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Cardinality {
    /// Independent uniform labels; any set left empty receives one element
    /// from the currently largest set.
    Free,
    /// Every set has exactly `n / m` elements. Requires `m | n`.
    Fixed,
    /// Set sizes differ by at most one; the first `n mod m` sets are larger.
    Balanced,
}

/// Random partition of `n` elements into `m` non-empty sets.
pub fn random_partition<R: Rng + ?Sized>(
    n: usize,
    m: usize,
    cardinality: Cardinality,
    rng: &mut R,
) -> Result<Partition> {
    if m == 0 {
        return Err(invalid("set count must be at least 1"));
    }
    if m > n {
        return Err(invalid(format!("cannot split {n} elements into {m} non-empty sets")));
    }
    match cardinality {
        Cardinality::Free => Ok(multinomial(n, m, rng)),
        Cardinality::Fixed => {
            if !n.is_multiple_of(m) {
                return Err(invalid(format!(
                    "fixed cardinality needs m | n, got n = {n}, m = {m}"
                )));
            }
            Ok(permutation_blocks(n, m, rng))
        }
        Cardinality::Balanced => Ok(permutation_blocks(n, m, rng)),
    }
}

fn multinomial<R: Rng + ?Sized>(n: usize, m: usize, rng: &mut R) -> Partition {
    let mut labels: Vec<usize> = (0..n).map(|_| rng.random_range(0..m)).collect();
    let mut sizes = vec![0usize; m];
    for &l in &labels {
        sizes[l] += 1;
    }
    for empty in 0..m {
        if sizes[empty] > 0 {
            continue;
        }
        let donor = (0..m)
            .max_by(|&a, &b| sizes[a].cmp(&sizes[b]).then(b.cmp(&a)))
            .expect("m >= 1");
        let pick = rng.random_range(0..sizes[donor]);
        let i = labels
            .iter()
            .enumerate()
            .filter(|&(_, &l)| l == donor)
            .nth(pick)
            .map(|(i, _)| i)
            .expect("donor set is non-empty");
        labels[i] = empty;
        sizes[donor] -= 1;
        sizes[empty] += 1;
    }
    Partition::from_labels_unchecked(labels, m)
}

fn permutation_blocks<R: Rng + ?Sized>(n: usize, m: usize, rng: &mut R) -> Partition {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let (base, extra) = (n / m, n % m);
    let mut labels = vec![0usize; n];
    let mut pos = 0;
    for l in 0..m {
        let size = base + usize::from(l < extra);
        for &i in &order[pos..pos + size] {
            labels[i] = l;
        }
        pos += size;
    }
    Partition::from_labels_unchecked(labels, m)
}
