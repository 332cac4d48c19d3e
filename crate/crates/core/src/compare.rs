//! Ablation table: the seed labels against three enhancement variants
//! (direct propagation without mask filtering, direct propagation with mask
//! filtering, mask filtering with progressive propagation).

use rayon::prelude::*;
use serde::Serialize;

use crate::error::ValidationError;
use crate::eval::{compute_increment, LabelCounts, LabelStats, MetricsError};
use crate::pipeline::enhance_scene;
use crate::types::{EnhancementConfig, LabelVector, Method, Scene};

#[derive(Debug, Clone, PartialEq)]
pub struct Ablation {
    pub name: &'static str,
    pub config: EnhancementConfig,
}

/// The three variants derived from `base`; thresholds are shared.
pub fn ablations(base: &EnhancementConfig) -> Vec<Ablation> {
    let with = |method, mask_filtering| EnhancementConfig {
        method,
        mask_filtering,
        ..*base
    };
    vec![
        Ablation {
            name: "DP without MF",
            config: with(Method::Dp, false),
        },
        Ablation {
            name: "DP with MF",
            config: with(Method::Dp, true),
        },
        Ablation {
            name: "MF + GAPP",
            config: with(Method::Gapp, true),
        },
    ]
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompareRow {
    pub name: String,
    #[serde(flatten)]
    pub stats: LabelStats,
    /// Percent growth of correct labels over the seed labels; `None` when
    /// the seeds hold no correct label, or for the seed row itself.
    pub total_increment: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SceneRow {
    pub scene_id: String,
    /// Correct share of labeled points, baseline first, then per variant.
    pub accuracy: Vec<Option<f64>>,
    pub labeled: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Comparison {
    /// Seed labels first, then one row per variant.
    pub rows: Vec<CompareRow>,
    /// Sorted by scene id.
    pub scenes: Vec<SceneRow>,
}

#[derive(Debug, thiserror::Error)]
pub enum CompareError {
    #[error("scene {scene_id}: {source}")]
    Validation {
        scene_id: String,
        source: ValidationError,
    },
    #[error("scene {scene_id}: {source}")]
    Metrics {
        scene_id: String,
        source: MetricsError,
    },
}

/// A scene with ground truth for evaluation.
#[derive(Debug, Clone)]
pub struct EvalScene {
    pub scene_id: String,
    pub scene: Scene,
    pub gt: LabelVector,
}

fn scene_counts(s: &EvalScene, variants: &[Ablation]) -> Result<Vec<LabelCounts>, CompareError> {
    let metrics = |source| CompareError::Metrics {
        scene_id: s.scene_id.clone(),
        source,
    };
    let mut counts = vec![LabelCounts::from_labels(s.scene.labels(), &s.gt).map_err(metrics)?];
    for v in variants {
        let (labels, _) =
            enhance_scene(&s.scene, &v.config).map_err(|source| CompareError::Validation {
                scene_id: s.scene_id.clone(),
                source,
            })?;
        counts.push(LabelCounts::from_labels(&labels, &s.gt).map_err(metrics)?);
    }
    Ok(counts)
}

/// Runs every variant on every scene (scenes in parallel) and pools the
/// counts over the batch.
pub fn compare(scenes: &[EvalScene], base: &EnhancementConfig) -> Result<Comparison, CompareError> {
    let variants = ablations(base);
    let per_scene: Vec<Vec<LabelCounts>> = scenes
        .par_iter()
        .map(|s| scene_counts(s, &variants))
        .collect::<Result<_, _>>()?;

    let mut pooled = vec![LabelCounts::default(); variants.len() + 1];
    for counts in &per_scene {
        for (p, c) in pooled.iter_mut().zip(counts) {
            p.merge(c);
        }
    }
    let baseline = pooled[0].stats();
    let names = std::iter::once("Seed labels").chain(variants.iter().map(|v| v.name));
    let rows = names
        .zip(&pooled)
        .enumerate()
        .map(|(i, (name, counts))| {
            let stats = counts.stats();
            CompareRow {
                name: name.to_string(),
                total_increment: (i > 0)
                    .then(|| compute_increment(&baseline, &stats).ok())
                    .flatten(),
                stats,
            }
        })
        .collect();

    let mut scene_rows: Vec<SceneRow> = scenes
        .iter()
        .zip(&per_scene)
        .map(|(s, counts)| {
            let stats: Vec<LabelStats> = counts.iter().map(LabelCounts::stats).collect();
            SceneRow {
                scene_id: s.scene_id.clone(),
                accuracy: stats.iter().map(|st| st.overall_accuracy).collect(),
                labeled: stats.iter().map(|st| st.total_labeled).collect(),
            }
        })
        .collect();
    scene_rows.sort_by(|a, b| a.scene_id.cmp(&b.scene_id));
    Ok(Comparison {
        rows,
        scenes: scene_rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::{generate_scene, SceneSpec};

    #[test]
    fn variants_share_thresholds() {
        let base = EnhancementConfig {
            beta: 3.0,
            ..EnhancementConfig::default()
        };
        let v = ablations(&base);
        assert_eq!(v.len(), 3);
        assert!(v.iter().all(|a| a.config.beta == 3.0));
        assert!(!v[0].config.mask_filtering && v[1].config.mask_filtering);
        assert_eq!(v[2].config.method, Method::Gapp);
    }

    #[test]
    fn empty_batch() {
        let c = compare(&[], &EnhancementConfig::default()).unwrap();
        assert_eq!(c.rows.len(), 4);
        assert!(c.scenes.is_empty());
        assert!(c.rows.iter().all(|r| r.stats.total_correct == 0));
    }

    #[test]
    fn single_scene_rows() {
        let g = generate_scene(&SceneSpec::default()).unwrap();
        let scene = Scene::new(g.cloud, g.seed_labels, g.masks, g.camera).unwrap();
        let c = compare(
            &[EvalScene {
                scene_id: "a".into(),
                scene,
                gt: g.gt_labels,
            }],
            &EnhancementConfig::default(),
        )
        .unwrap();
        assert_eq!(c.rows[0].total_increment, None);
        // Every variant only adds labels.
        for r in &c.rows[1..] {
            assert!(r.stats.total_labeled >= c.rows[0].stats.total_labeled);
        }
        assert_eq!(c.scenes[0].accuracy.len(), 4);
    }
}
