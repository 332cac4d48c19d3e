//! Mask label assignment: majority vote over the labels inside a mask, gated
//! by the mask-size, purity and representativity filters.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::types::{EnhancementConfig, Label, Mask, TieBreak, IGNORE};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MlaError {
    #[error("purity is undefined: the mask holds no labeled points")]
    ZeroDenominator,
}

/// Mask points grouped by their current label.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ClassPartition {
    pub by_class: BTreeMap<Label, Vec<usize>>,
    pub ignore: Vec<usize>,
}

impl ClassPartition {
    /// Points with a valid label.
    pub fn labeled_count(&self) -> usize {
        self.by_class.values().map(Vec::len).sum()
    }

    pub fn total(&self) -> usize {
        self.labeled_count() + self.ignore.len()
    }

    pub fn count(&self, class: Label) -> usize {
        self.by_class.get(&class).map_or(0, Vec::len)
    }
}

pub fn partition_by_class(members: &[usize], labels: &[Label]) -> ClassPartition {
    let mut part = ClassPartition::default();
    for &k in members {
        match labels[k] {
            IGNORE => part.ignore.push(k),
            c => part.by_class.entry(c).or_default().push(k),
        }
    }
    part
}

/// Most frequent class; ties go to the lowest class id.
pub fn dominant_class(partition: &ClassPartition, tie_break: TieBreak) -> Option<Label> {
    match tie_break {
        TieBreak::LowestClassId => {
            let mut best: Option<(Label, usize)> = None;
            // BTreeMap iterates in ascending class order, so strict `>` keeps
            // the lowest id among equals.
            for (&c, pts) in &partition.by_class {
                if best.is_none_or(|(_, n)| pts.len() > n) {
                    best = Some((c, pts.len()));
                }
            }
            best.map(|(c, _)| c)
        }
    }
}

pub fn check_mask_size(mask: &Mask, height: u32, width: u32, lambda_s: f64) -> bool {
    let image = f64::from(height) * f64::from(width);
    (mask.area() as f64) / image <= lambda_s
}

pub fn check_purity(
    partition: &ClassPartition,
    class: Label,
    lambda_p: f64,
) -> Result<bool, MlaError> {
    let labeled = partition.labeled_count();
    if labeled == 0 {
        return Err(MlaError::ZeroDenominator);
    }
    Ok(partition.count(class) as f64 / labeled as f64 >= lambda_p)
}

pub fn check_representativity(partition: &ClassPartition, class: Label, lambda_r: f64) -> bool {
    let total = partition.total();
    total > 0 && partition.count(class) as f64 / total as f64 >= lambda_r
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Constraint {
    Size,
    Purity,
    Representativity,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IgnoreReason {
    /// No point projects into the mask.
    NoPoints,
    /// Points project into the mask but none carries a label.
    NoValidLabels,
    /// The listed filters rejected the dominant class.
    Filtered(Vec<Constraint>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MaskLabelDecision {
    Ignore(IgnoreReason),
    Assigned {
        class: Label,
        seeds: Vec<usize>,
        unlabeled: Vec<usize>,
    },
}

impl MaskLabelDecision {
    pub fn is_assigned(&self) -> bool {
        matches!(self, Self::Assigned { .. })
    }
}

/// Votes a label for `mask` from the current `labels` of its `members`.
///
/// With `config.mask_filtering` off, any mask with a dominant class is
/// accepted.
pub fn assign_mask_label(
    mask: &Mask,
    members: &[usize],
    labels: &[Label],
    image_height: u32,
    image_width: u32,
    config: &EnhancementConfig,
) -> MaskLabelDecision {
    if members.is_empty() {
        return MaskLabelDecision::Ignore(IgnoreReason::NoPoints);
    }
    let mut part = partition_by_class(members, labels);
    let Some(class) = dominant_class(&part, config.tie_break) else {
        return MaskLabelDecision::Ignore(IgnoreReason::NoValidLabels);
    };

    if config.mask_filtering {
        let mut failed = Vec::new();
        if !check_mask_size(mask, image_height, image_width, config.lambda_s) {
            failed.push(Constraint::Size);
        }
        // `class` exists, so the purity denominator is positive.
        if !check_purity(&part, class, config.lambda_p).unwrap_or(false) {
            failed.push(Constraint::Purity);
        }
        if !check_representativity(&part, class, config.lambda_r) {
            failed.push(Constraint::Representativity);
        }
        if !failed.is_empty() {
            return MaskLabelDecision::Ignore(IgnoreReason::Filtered(failed));
        }
    }

    let seeds = part.by_class.remove(&class).unwrap_or_default();
    MaskLabelDecision::Assigned {
        class,
        seeds,
        unlabeled: part.ignore,
    }
}
