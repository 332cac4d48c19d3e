//! Direct O(n^2) evaluation of the propagation rules. No index, no caching
//! between rounds: every round recomputes `d_exp` and the expansion set from
//! scratch.

use super::{GappError, GappParams, PropagationResult, RoundTrace};
use crate::types::{squared_distance, PointCloud, SingleSeedPolicy};

/// Smallest distance from point `i` to a point of `set` other than `i`.
pub fn min_dist_to_set(i: usize, set: &[usize], cloud: &PointCloud) -> Result<f64, GappError> {
    let mut best: Option<f64> = None;
    for &k in set {
        if k == i {
            continue;
        }
        let d = squared_distance(cloud.point(i), cloud.point(k)).sqrt();
        best = Some(best.map_or(d, |b| b.min(d)));
    }
    best.ok_or(GappError::EmptySet)
}

/// Largest nearest-other-seed distance. `None` for a single seed.
pub fn exploration_distance(seeds: &[usize], cloud: &PointCloud) -> Option<f64> {
    let mut d_exp: Option<f64> = None;
    for &i in seeds {
        let d = min_dist_to_set(i, seeds, cloud).ok()?;
        d_exp = Some(d_exp.map_or(d, |m| m.max(d)));
    }
    d_exp
}

/// Unlabeled points within `beta * d_exp` of the seed set (inclusive).
pub fn expansion_set(
    unlabeled: &[usize],
    seeds: &[usize],
    d_exp: f64,
    beta: f64,
    cloud: &PointCloud,
) -> Vec<usize> {
    let radius = beta * d_exp;
    unlabeled
        .iter()
        .copied()
        .filter(|&k| min_dist_to_set(k, seeds, cloud).is_ok_and(|d| d <= radius))
        .collect()
}

pub fn gapp_propagate_bruteforce(
    cloud: &PointCloud,
    seeds: &[usize],
    unlabeled: &[usize],
    params: &GappParams,
) -> PropagationResult {
    let mut result = PropagationResult::default();
    if seeds.is_empty() {
        return result;
    }
    let mut seeds = seeds.to_vec();
    let mut remaining = unlabeled.to_vec();
    let mut evaluations = 0;
    while !remaining.is_empty() {
        let batch = match exploration_distance(&seeds, cloud) {
            Some(d_exp) => {
                result.final_d_exp = Some(d_exp);
                let batch = expansion_set(&remaining, &seeds, d_exp, params.beta, cloud);
                (batch, Some(d_exp), params.beta * d_exp)
            }
            None => match params.single_seed_policy {
                SingleSeedPolicy::Skip => break,
                SingleSeedPolicy::FixedRadius(r) => {
                    result.final_d_exp = None;
                    (expansion_set(&remaining, &seeds, r, 1.0, cloud), None, r)
                }
            },
        };
        evaluations += 1;
        let (mut batch, d_exp, radius) = batch;
        if batch.is_empty() {
            break;
        }
        remaining.retain(|k| !batch.contains(k));
        seeds.extend_from_slice(&batch);
        batch.sort_unstable();
        result.newly_labeled.extend_from_slice(&batch);
        result.trace.push(RoundTrace {
            d_exp,
            radius,
            labeled: batch,
        });
    }
    result.finish(evaluations)
}
