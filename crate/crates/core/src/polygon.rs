//! Phase-only zero-forcing of a single complex vector.
//!
//! A vector `h` can be rotated element-wise so that `Σ h_i e^{jφ_i} = 0`
//! exactly when its largest magnitude does not exceed the sum of the others
//! (the polygon inequality). [`polygon_solver`] builds such rotations by
//! grouping the elements into three bundles whose lengths form a triangle.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;

use crate::error::{invalid, Result, SpzfError};

/// Relative tolerance used to accept a length-2 set as balanced.
pub const PAIR_BALANCE_TOL: f64 = 1e-12;

/// Relative closure tolerance guaranteed by [`polygon_solver`].
pub const CLOSURE_TOL: f64 = 1e-9;

/// `max(mags) - Σ(other mags)`. Non-positive iff the polygon inequality holds.
pub fn polygon_distance(mags: &[f64]) -> Result<f64> {
    if mags.is_empty() {
        return Err(invalid("polygon distance of an empty set"));
    }
    Ok(polygon_distance_unchecked(mags))
}

#[inline]
pub(crate) fn polygon_distance_unchecked(mags: &[f64]) -> f64 {
    let (arg, max) = mags
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |(bi, bm), (i, m)| if m > bm { (i, m) } else { (bi, bm) });
    let rest: f64 = mags
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != arg)
        .map(|(_, m)| m)
        .sum();
    max - rest
}

/// Polygon distance of the subset `idx` of `mags`.
#[inline]
pub(crate) fn subset_distance(mags: &[f64], idx: impl Iterator<Item = usize> + Clone) -> f64 {
    let mut max = f64::NEG_INFINITY;
    let mut arg = usize::MAX;
    for i in idx.clone() {
        if mags[i] > max {
            max = mags[i];
            arg = i;
        }
    }
    let rest: f64 = idx.filter(|&i| i != arg).map(|i| mags[i]).sum();
    max - rest
}

/// True iff `polygon_distance(mags) <= 0`. The boundary counts as feasible.
pub fn satisfies_polygon_inequality(mags: &[f64]) -> Result<bool> {
    Ok(polygon_distance(mags)? <= 0.0)
}

/// Greedy balancing into three groups: magnitudes in descending order, each
/// placed into the group with the smallest running sum. Whenever the polygon
/// inequality holds the three group sums satisfy the triangle inequality.
///
/// Ties resolve to the lower element index and the lower group index.
pub fn greedy_three_partition(mags: &[f64]) -> Result<[Vec<usize>; 3]> {
    if mags.len() < 3 {
        return Err(invalid(format!(
            "three-way split needs at least 3 elements, got {}",
            mags.len()
        )));
    }
    let dist = polygon_distance_unchecked(mags);
    if dist > 0.0 {
        return Err(SpzfError::InfeasibleSet { distance: dist });
    }
    let mut order: Vec<usize> = (0..mags.len()).collect();
    order.sort_by(|&a, &b| mags[b].total_cmp(&mags[a]).then(a.cmp(&b)));

    let mut groups: [Vec<usize>; 3] = Default::default();
    let mut sums = [0.0f64; 3];
    for i in order {
        // Empty groups are filled first so that every group is non-empty even
        // when trailing magnitudes are zero.
        let g = (0..3)
            .min_by(|&a, &b| {
                groups[b]
                    .is_empty()
                    .cmp(&groups[a].is_empty())
                    .then(sums[a].total_cmp(&sums[b]))
                    .then(a.cmp(&b))
            })
            .expect("three groups");
        groups[g].push(i);
        sums[g] += mags[i];
    }
    Ok(groups)
}

/// Wraps an angle into `[0, 2π)`.
#[inline]
pub fn wrap_phase(theta: f64) -> f64 {
    let r = theta.rem_euclid(TAU);
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// Finds phases `φ` with `|Σ h_i e^{jφ_i}| <= 1e-9 · Σ|h_i|`.
///
/// Fails with [`SpzfError::InfeasibleSet`] when the polygon inequality does
/// not hold. Length-2 inputs are solvable only when both magnitudes agree to
/// [`PAIR_BALANCE_TOL`] relative; they are then placed in anti-phase.
pub fn polygon_solver(h: &[Complex64]) -> Result<Vec<f64>> {
    match h.len() {
        0 | 1 => Err(invalid(format!(
            "polygon solver needs at least 2 elements, got {}",
            h.len()
        ))),
        2 => solve_pair(h[0], h[1]),
        _ => solve_polygon(h),
    }
}

fn solve_pair(a: Complex64, b: Complex64) -> Result<Vec<f64>> {
    let (ma, mb) = (a.norm(), b.norm());
    let scale = ma.max(mb);
    if (ma - mb).abs() > PAIR_BALANCE_TOL * scale {
        return Err(SpzfError::InfeasibleSet {
            distance: (ma - mb).abs(),
        });
    }
    Ok(vec![wrap_phase(-a.arg()), wrap_phase(PI - b.arg())])
}

fn solve_polygon(h: &[Complex64]) -> Result<Vec<f64>> {
    let mags: Vec<f64> = h.iter().map(|z| z.norm()).collect();
    let groups = greedy_three_partition(&mags)?;
    let sums: Vec<f64> = groups
        .iter()
        .map(|g| g.iter().map(|&i| mags[i]).sum())
        .collect();
    let directions = close_triangle(sums[0], sums[1], sums[2]);

    let mut phases = vec![0.0; h.len()];
    for (group, theta) in groups.iter().zip(directions) {
        for &i in group {
            phases[i] = wrap_phase(theta - h[i].arg());
        }
    }
    Ok(phases)
}

/// Directions `[0, θ_b, θ_c]` with `a + b e^{jθ_b} + c e^{jθ_c} = 0`.
///
/// Requires `a, b, c` to satisfy the triangle inequality (up to rounding).
fn close_triangle(a: f64, b: f64, c: f64) -> [f64; 3] {
    let theta_b = if a > 0.0 && b > 0.0 {
        let cos = ((c * c - a * a - b * b) / (2.0 * a * b)).clamp(-1.0, 1.0);
        cos.acos()
    } else {
        PI
    };
    let partial = Complex64::new(a, 0.0) + Complex64::from_polar(b, theta_b);
    let theta_c = if partial.norm() > 0.0 { (-partial).arg() } else { 0.0 };
    [0.0, wrap_phase(theta_b), wrap_phase(theta_c)]
}

/// `Σ h_i e^{jφ_i}`.
pub fn rotated_sum(h: &[Complex64], phases: &[f64]) -> Complex64 {
    h.iter()
        .zip(phases)
        .map(|(z, &p)| z * Complex64::from_polar(1.0, p))
        .sum()
}

/// Phases minimising `|Σ h_i e^{jφ_i}|`. Feasible sets close exactly; an
/// infeasible set puts its largest element against all the others, which
/// leaves a residual equal to the polygon distance.
pub fn best_effort_phases(h: &[Complex64]) -> Result<Vec<f64>> {
    if h.is_empty() {
        return Err(invalid("best-effort phases of an empty set"));
    }
    if h.len() == 1 {
        return Ok(vec![0.0]);
    }
    let mags: Vec<f64> = h.iter().map(|z| z.norm()).collect();
    if polygon_distance_unchecked(&mags) <= 0.0 {
        if let Ok(p) = polygon_solver(h) {
            return Ok(p);
        }
    }
    let big = (0..h.len())
        .max_by(|&a, &b| mags[a].total_cmp(&mags[b]).then(b.cmp(&a)))
        .unwrap_or(0);
    Ok(h
        .iter()
        .enumerate()
        .map(|(i, z)| if i == big { wrap_phase(-z.arg()) } else { wrap_phase(PI - z.arg()) })
        .collect())
}
