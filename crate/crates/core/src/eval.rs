//! Pseudo-label quality against ground truth: per-class accuracy (precision
//! of each predicted class), its macro average, the number of correct
//! labels, coverage, and the relative growth of correct labels.
//!
//! Points whose ground truth is [`IGNORE`] are left out of every count.

use serde::Serialize;
use thiserror::Error;

use crate::types::{Label, LabelVector, IGNORE};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MetricsError {
    #[error("prediction has {pred} labels, ground truth has {gt}")]
    DimensionMismatch { pred: usize, gt: usize },
    #[error("increment is undefined: the baseline has no correct labels")]
    ZeroBaseline,
}

/// Raw counts; additive across scenes.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct LabelCounts {
    /// Points labeled `c` by the prediction.
    pub predicted: Vec<u64>,
    /// Points labeled `c` by both prediction and ground truth.
    pub correct: Vec<u64>,
    /// Points with a ground-truth class.
    pub evaluated: u64,
}

impl LabelCounts {
    pub fn from_labels(pred: &LabelVector, gt: &LabelVector) -> Result<Self, MetricsError> {
        if pred.len() != gt.len() {
            return Err(MetricsError::DimensionMismatch {
                pred: pred.len(),
                gt: gt.len(),
            });
        }
        let classes = pred.num_classes().max(gt.num_classes()) as usize;
        let mut counts = Self {
            predicted: vec![0; classes],
            correct: vec![0; classes],
            evaluated: 0,
        };
        for (&p, &g) in pred.as_slice().iter().zip(gt.as_slice()) {
            if g == IGNORE {
                continue;
            }
            counts.evaluated += 1;
            if p != IGNORE {
                counts.predicted[p as usize] += 1;
                if p == g {
                    counts.correct[p as usize] += 1;
                }
            }
        }
        Ok(counts)
    }

    pub fn merge(&mut self, other: &LabelCounts) {
        let n = self.predicted.len().max(other.predicted.len());
        self.predicted.resize(n, 0);
        self.correct.resize(n, 0);
        for (a, b) in self.predicted.iter_mut().zip(&other.predicted) {
            *a += b;
        }
        for (a, b) in self.correct.iter_mut().zip(&other.correct) {
            *a += b;
        }
        self.evaluated += other.evaluated;
    }

    pub fn stats(&self) -> LabelStats {
        let per_class: Vec<Option<f64>> = self
            .predicted
            .iter()
            .zip(&self.correct)
            .map(|(&p, &c)| (p > 0).then(|| c as f64 / p as f64))
            .collect();
        let defined: Vec<f64> = per_class.iter().flatten().copied().collect();
        let avg_defined = !defined.is_empty();
        let avg_accuracy = if avg_defined {
            defined.iter().sum::<f64>() / defined.len() as f64
        } else {
            0.0
        };
        let total_correct: u64 = self.correct.iter().sum();
        let total_labeled: u64 = self.predicted.iter().sum();
        LabelStats {
            per_class,
            avg_accuracy,
            avg_defined,
            total_correct,
            total_labeled,
            overall_accuracy: (total_labeled > 0)
                .then(|| total_correct as f64 / total_labeled as f64),
            coverage: if self.evaluated > 0 {
                total_labeled as f64 / self.evaluated as f64
            } else {
                0.0
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LabelStats {
    /// Accuracy of each class among points predicted as that class; `None`
    /// when the class was never predicted.
    pub per_class: Vec<Option<f64>>,
    /// Mean of the defined per-class accuracies; 0 when none is defined.
    pub avg_accuracy: f64,
    pub avg_defined: bool,
    pub total_correct: u64,
    pub total_labeled: u64,
    /// Correct among all predicted labels.
    pub overall_accuracy: Option<f64>,
    /// Labeled share of the points that have ground truth.
    pub coverage: f64,
}

pub fn compute_stats(pred: &LabelVector, gt: &LabelVector) -> Result<LabelStats, MetricsError> {
    Ok(LabelCounts::from_labels(pred, gt)?.stats())
}

/// Growth of the number of correct labels, in percent.
pub fn compute_increment(before: &LabelStats, after: &LabelStats) -> Result<f64, MetricsError> {
    if before.total_correct == 0 {
        return Err(MetricsError::ZeroBaseline);
    }
    Ok(
        100.0 * (after.total_correct as f64 - before.total_correct as f64)
            / before.total_correct as f64,
    )
}

/// `0.5` -> `"50.00"`.
pub fn format_percent(fraction: f64) -> String {
    format!("{:.2}", 100.0 * fraction)
}

/// `38.18` -> `"+38.18%"`.
pub fn format_increment(percent: f64) -> String {
    format!("{percent:+.2}%")
}

/// Class id for table headers.
pub fn class_name(class: Label, names: &[String]) -> String {
    names
        .get(class as usize)
        .cloned()
        .unwrap_or_else(|| format!("class{class}"))
}
