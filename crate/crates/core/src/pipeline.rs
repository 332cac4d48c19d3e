//! End-to-end enhancement of one scene, and of batches of scenes.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::ValidationError;
use crate::gapp::{direct_propagate, gapp_propagate, GappParams, PropagationResult};
use crate::mla::{assign_mask_label, IgnoreReason, MaskLabelDecision};
use crate::projection::{points_in_mask, project_points};
use crate::types::{
    CameraModel, EnhancementConfig, Label, LabelVector, MaskOrder, MaskSet, Method, PointCloud,
    Scene,
};

/// Positions into `masks` in processing order. Ties on area keep ascending
/// mask id, then input position.
pub fn order_masks(masks: &MaskSet, order: MaskOrder) -> Vec<usize> {
    let mut seq: Vec<usize> = (0..masks.len()).collect();
    let m = masks.masks();
    match order {
        MaskOrder::AreaAscending => seq.sort_by_key(|&i| (m[i].area(), m[i].id())),
        MaskOrder::AreaDescending => {
            seq.sort_by_key(|&i| (std::cmp::Reverse(m[i].area()), m[i].id()))
        }
    }
    seq
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MaskRecord {
    pub mask_id: u32,
    pub area: u64,
    /// Points projecting into the mask.
    pub points: usize,
    pub assigned: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub class: Option<Label>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ignore_reason: Option<IgnoreReason>,
    pub seeds: usize,
    pub newly_labeled: usize,
    pub rounds: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnhancementReport {
    pub masks: Vec<MaskRecord>,
    pub labels_before: usize,
    pub labels_after: usize,
    pub masks_assigned: usize,
    pub masks_ignored: usize,
    pub config: EnhancementConfig,
}

/// Propagation outcome of one accepted mask.
#[derive(Debug, Clone, PartialEq)]
pub struct MaskStep {
    pub mask_id: u32,
    pub class: Label,
    pub seeds: Vec<usize>,
    pub unlabeled: Vec<usize>,
    pub result: PropagationResult,
}

/// Everything [`enhance_scene_detailed`] observed.
#[derive(Debug, Clone)]
pub struct Enhancement {
    pub labels: LabelVector,
    pub report: EnhancementReport,
    pub steps: Vec<MaskStep>,
}

pub fn enhance_scene(
    scene: &Scene,
    config: &EnhancementConfig,
) -> Result<(LabelVector, EnhancementReport), ValidationError> {
    let e = enhance_scene_detailed(scene, config)?;
    Ok((e.labels, e.report))
}

/// Runs the enhancement and keeps the per-mask propagation results.
pub fn enhance_scene_detailed(
    scene: &Scene,
    config: &EnhancementConfig,
) -> Result<Enhancement, ValidationError> {
    config.validate()?;
    let projection = project_points(&scene.cloud, &scene.camera);
    let mut labels: Vec<Label> = scene.labels.as_slice().to_vec();
    let labels_before = scene.labels.labeled_count();
    let params = GappParams {
        beta: config.beta,
        single_seed_policy: config.single_seed_policy,
    };

    let mut records = Vec::with_capacity(scene.masks.len());
    let mut steps = Vec::new();
    for i in order_masks(&scene.masks, config.mask_order) {
        let mask = &scene.masks.masks()[i];
        let members = points_in_mask(&projection, mask);
        let decision = assign_mask_label(
            mask,
            &members,
            &labels,
            scene.camera.height(),
            scene.camera.width(),
            config,
        );
        let mut record = MaskRecord {
            mask_id: mask.id(),
            area: mask.area(),
            points: members.len(),
            assigned: false,
            class: None,
            ignore_reason: None,
            seeds: 0,
            newly_labeled: 0,
            rounds: 0,
        };
        match decision {
            MaskLabelDecision::Ignore(reason) => record.ignore_reason = Some(reason),
            MaskLabelDecision::Assigned {
                class,
                seeds,
                unlabeled,
            } => {
                let result = match config.method {
                    Method::Gapp => gapp_propagate(&scene.cloud, &seeds, &unlabeled, &params),
                    Method::Dp => direct_propagate(&unlabeled),
                };
                result.apply(class, &mut labels);
                record.assigned = true;
                record.class = Some(class);
                record.seeds = seeds.len();
                record.newly_labeled = result.newly_labeled.len();
                record.rounds = result.rounds;
                steps.push(MaskStep {
                    mask_id: mask.id(),
                    class,
                    seeds,
                    unlabeled,
                    result,
                });
            }
        }
        records.push(record);
    }

    let labels = LabelVector::new(labels, scene.labels.num_classes())?;
    let masks_assigned = records.iter().filter(|r| r.assigned).count();
    let report = EnhancementReport {
        masks_ignored: records.len() - masks_assigned,
        masks_assigned,
        masks: records,
        labels_before,
        labels_after: labels.labeled_count(),
        config: *config,
    };
    Ok(Enhancement {
        labels,
        report,
        steps,
    })
}

/// Scene parts that have not been cross-validated yet.
#[derive(Debug, Clone)]
pub struct RawScene {
    pub cloud: PointCloud,
    pub labels: LabelVector,
    pub masks: MaskSet,
    pub camera: CameraModel,
}

impl TryFrom<RawScene> for Scene {
    type Error = ValidationError;

    fn try_from(raw: RawScene) -> Result<Self, Self::Error> {
        Scene::new(raw.cloud, raw.labels, raw.masks, raw.camera)
    }
}

pub type SceneOutcome = Result<(LabelVector, EnhancementReport), ValidationError>;

/// Enhances scenes independently (in parallel on the current rayon pool).
/// Output `i` belongs to input `i`; a bad scene yields an error in its slot.
pub fn enhance_batch(scenes: Vec<RawScene>, config: &EnhancementConfig) -> Vec<SceneOutcome> {
    scenes
        .into_par_iter()
        .map(|raw| enhance_scene(&Scene::try_from(raw)?, config))
        .collect()
}
