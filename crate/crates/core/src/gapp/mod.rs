//! Label propagation inside an accepted mask.
//!
//! Direct propagation hands the mask label to every unlabeled mask point.
//! Geometry-aware progressive propagation grows the labeled set in rounds:
//! the exploration distance `d_exp` is the largest nearest-neighbour gap
//! inside the current seed set, and each round labels the unlabeled points
//! within `beta * d_exp` of a seed. Newly labeled points become seeds, so
//! the label walks along connected surfaces and stops at gaps, which is
//! where points that only project into the mask through parallax sit.
//!
//! [`gapp_propagate`] answers the distance queries with a [`SpatialIndex`];
//! [`gapp_propagate_bruteforce`] evaluates the same definitions with plain
//! nested loops and serves as the test oracle.

mod bruteforce;
mod kdtree;

use serde::Serialize;
use thiserror::Error;

pub use bruteforce::{
    expansion_set, exploration_distance, gapp_propagate_bruteforce, min_dist_to_set,
};
pub use kdtree::SpatialIndex;

use crate::types::{Label, PointCloud, SingleSeedPolicy};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GappError {
    #[error("no other point in the set")]
    EmptySet,
}

/// Parameters of one progressive propagation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GappParams {
    pub beta: f64,
    pub single_seed_policy: SingleSeedPolicy,
}

/// One round that labeled at least one point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RoundTrace {
    /// `None` when the radius came from [`SingleSeedPolicy::FixedRadius`].
    pub d_exp: Option<f64>,
    pub radius: f64,
    /// Points labeled in this round, ascending.
    pub labeled: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct PropagationResult {
    /// Ascending point indices that received the mask label.
    pub newly_labeled: Vec<usize>,
    /// Expansion sets evaluated, counting a final empty one when unlabeled
    /// points remained; zero when nothing was labeled.
    pub rounds: usize,
    pub final_d_exp: Option<f64>,
    pub trace: Vec<RoundTrace>,
}

impl PropagationResult {
    /// Writes `class` into `labels` for every newly labeled point.
    pub fn apply(&self, class: Label, labels: &mut [Label]) {
        for &k in &self.newly_labeled {
            labels[k] = class;
        }
    }

    pub(crate) fn finish(mut self, evaluations: usize) -> Self {
        self.newly_labeled.sort_unstable();
        self.rounds = if self.newly_labeled.is_empty() {
            0
        } else {
            evaluations
        };
        self
    }
}

/// Labels every unlabeled mask point in a single round.
pub fn direct_propagate(unlabeled: &[usize]) -> PropagationResult {
    let mut newly_labeled = unlabeled.to_vec();
    newly_labeled.sort_unstable();
    PropagationResult {
        trace: vec![RoundTrace {
            d_exp: None,
            radius: f64::INFINITY,
            labeled: newly_labeled.clone(),
        }],
        newly_labeled,
        rounds: 1,
        final_d_exp: None,
    }
}

/// Progressive propagation from `seeds` into `unlabeled`, backed by a k-d
/// tree. `seeds` and `unlabeled` must be disjoint.
pub fn gapp_propagate(
    cloud: &PointCloud,
    seeds: &[usize],
    unlabeled: &[usize],
    params: &GappParams,
) -> PropagationResult {
    let mut result = PropagationResult::default();
    if seeds.is_empty()
        || unlabeled.is_empty()
        || (seeds.len() == 1 && params.single_seed_policy == SingleSeedPolicy::Skip)
    {
        return result;
    }

    let point = |k: usize| cloud.point(k);
    let mut seeds = seeds.to_vec();
    let mut index = SpatialIndex::build(cloud, &seeds);
    // Squared nearest-other-seed distance of every seed.
    let mut seed_nn: Vec<f64> = seeds
        .iter()
        .map(|&s| {
            index
                .nearest(point(s), Some(s))
                .map_or(f64::INFINITY, |n| n.1)
        })
        .collect();
    let mut cand = unlabeled.to_vec();
    // Squared distance of every candidate to the seed set.
    let mut cand_nn: Vec<f64> = cand
        .iter()
        .map(|&k| index.nearest(point(k), None).map_or(f64::INFINITY, |n| n.1))
        .collect();

    let mut evaluations = 0;
    while !cand.is_empty() {
        let (d_exp, radius) = if seeds.len() == 1 {
            match params.single_seed_policy {
                SingleSeedPolicy::Skip => break,
                SingleSeedPolicy::FixedRadius(r) => (None, r),
            }
        } else {
            let d = seed_nn.iter().copied().fold(0.0, f64::max).sqrt();
            (Some(d), params.beta * d)
        };
        result.final_d_exp = d_exp;
        evaluations += 1;

        let mut batch = Vec::new();
        let mut keep = 0;
        for i in 0..cand.len() {
            if cand_nn[i].sqrt() <= radius {
                batch.push(cand[i]);
            } else {
                cand[keep] = cand[i];
                cand_nn[keep] = cand_nn[i];
                keep += 1;
            }
        }
        if batch.is_empty() {
            break;
        }
        cand.truncate(keep);
        cand_nn.truncate(keep);

        let batch_index = SpatialIndex::build(cloud, &batch);
        let to_batch = |k: usize| {
            batch_index
                .nearest(point(k), None)
                .map_or(f64::INFINITY, |n| n.1)
        };
        for (&s, nn) in seeds.iter().zip(seed_nn.iter_mut()) {
            *nn = nn.min(to_batch(s));
        }
        for (&k, nn) in cand.iter().zip(cand_nn.iter_mut()) {
            *nn = nn.min(to_batch(k));
        }
        for &b in &batch {
            index.insert(b);
        }
        for &b in &batch {
            seeds.push(b);
            seed_nn.push(
                index
                    .nearest(point(b), Some(b))
                    .map_or(f64::INFINITY, |n| n.1),
            );
        }

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
