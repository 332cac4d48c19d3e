//! Shared domain types. Every type validates its own invariants on
//! construction and is immutable afterwards.

use bitvec::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::ValidationError;

/// Per-point class id. Non-negative values are classes, [`IGNORE`] marks an
/// unlabeled point.
pub type Label = i32;

/// Sentinel for "no valid pseudo-label".
pub const IGNORE: Label = -1;

/// `N` lidar points in meters. Index `k` identifies point `k` for the lifetime
/// of the scene.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    points: Vec<[f32; 3]>,
}

impl PointCloud {
    pub fn new(points: Vec<[f32; 3]>) -> Result<Self, ValidationError> {
        if let Some(k) = points.iter().position(|p| !p.iter().all(|c| c.is_finite())) {
            return Err(ValidationError::NonFinite(format!("point {k}")));
        }
        Ok(Self { points })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[[f32; 3]] {
        &self.points
    }

    #[inline]
    pub fn point(&self, k: usize) -> [f32; 3] {
        self.points[k]
    }

    pub fn into_points(self) -> Vec<[f32; 3]> {
        self.points
    }
}

/// Squared Euclidean distance between two stored points, evaluated in `f64`.
///
/// Every distance in the crate goes through this function so that the
/// indexed and brute-force propagation paths see bit-identical values.
#[inline]
pub fn squared_distance(a: [f32; 3], b: [f32; 3]) -> f64 {
    let dx = f64::from(a[0]) - f64::from(b[0]);
    let dy = f64::from(a[1]) - f64::from(b[1]);
    let dz = f64::from(a[2]) - f64::from(b[2]);
    dx * dx + dy * dy + dz * dz
}

/// Per-point labels together with the class count `C`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LabelVector {
    labels: Vec<Label>,
    num_classes: u32,
}

impl LabelVector {
    pub fn new(labels: Vec<Label>, num_classes: u32) -> Result<Self, ValidationError> {
        for (index, &value) in labels.iter().enumerate() {
            if value < IGNORE || (value >= 0 && value as u32 >= num_classes) {
                return Err(ValidationError::BadLabel {
                    index,
                    value,
                    num_classes,
                });
            }
        }
        Ok(Self {
            labels,
            num_classes,
        })
    }

    /// All-[`IGNORE`] vector of length `n`.
    pub fn unlabeled(n: usize, num_classes: u32) -> Self {
        Self {
            labels: vec![IGNORE; n],
            num_classes,
        }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn num_classes(&self) -> u32 {
        self.num_classes
    }

    pub fn as_slice(&self) -> &[Label] {
        &self.labels
    }

    #[inline]
    pub fn get(&self, k: usize) -> Label {
        self.labels[k]
    }

    /// Number of points holding a class (not [`IGNORE`]).
    pub fn labeled_count(&self) -> usize {
        self.labels.iter().filter(|&&l| l != IGNORE).count()
    }

    pub fn into_vec(self) -> Vec<Label> {
        self.labels
    }
}

/// A binary image mask, row-major, `bitmap[v * width + u]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mask {
    id: u32,
    height: u32,
    width: u32,
    bits: BitVec<u64, Lsb0>,
    area: u64,
}

impl Mask {
    /// Builds a mask from its bitmap; the area is recomputed.
    pub fn from_bits(
        id: u32,
        height: u32,
        width: u32,
        bits: BitVec<u64, Lsb0>,
    ) -> Result<Self, ValidationError> {
        let expected = height as usize * width as usize;
        if bits.len() != expected {
            return Err(ValidationError::DimensionMismatch(format!(
                "mask {id}: bitmap has {} pixels, expected {height}x{width}",
                bits.len()
            )));
        }
        let area = bits.count_ones() as u64;
        Ok(Self {
            id,
            height,
            width,
            bits,
            area,
        })
    }

    pub fn from_bools(
        id: u32,
        height: u32,
        width: u32,
        pixels: &[bool],
    ) -> Result<Self, ValidationError> {
        let bits: BitVec<u64, Lsb0> = pixels.iter().copied().collect();
        Self::from_bits(id, height, width, bits)
    }

    /// Builds a mask whose stored area must agree with the bitmap.
    pub fn with_area(
        id: u32,
        height: u32,
        width: u32,
        bits: BitVec<u64, Lsb0>,
        area: u64,
    ) -> Result<Self, ValidationError> {
        let mask = Self::from_bits(id, height, width, bits)?;
        if mask.area != area {
            return Err(ValidationError::AreaMismatch {
                id,
                stored: area,
                actual: mask.area,
            });
        }
        Ok(mask)
    }

    pub fn id(&self) -> u32 {
        self.id
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn area(&self) -> u64 {
        self.area
    }

    pub fn bits(&self) -> &BitSlice<u64, Lsb0> {
        &self.bits
    }

    /// Pixel at column `u`, row `v`.
    #[inline]
    pub fn contains(&self, u: u32, v: u32) -> bool {
        self.bits[v as usize * self.width as usize + u as usize]
    }
}

/// Ordered collection of possibly overlapping masks sharing one image size.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MaskSet {
    masks: Vec<Mask>,
    height: u32,
    width: u32,
}

impl MaskSet {
    pub fn new(height: u32, width: u32, masks: Vec<Mask>) -> Result<Self, ValidationError> {
        if let Some(m) = masks
            .iter()
            .find(|m| m.height != height || m.width != width)
        {
            return Err(ValidationError::DimensionMismatch(format!(
                "mask {} is {}x{}, mask set is {height}x{width}",
                m.id, m.height, m.width
            )));
        }
        Ok(Self {
            masks,
            height,
            width,
        })
    }

    pub fn empty(height: u32, width: u32) -> Self {
        Self {
            masks: Vec::new(),
            height,
            width,
        }
    }

    pub fn masks(&self) -> &[Mask] {
        &self.masks
    }

    pub fn len(&self) -> usize {
        self.masks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masks.is_empty()
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn width(&self) -> u32 {
        self.width
    }
}

/// Pinhole lidar-to-pixel projection `P` (3x4, row-major) plus image size.
#[derive(Debug, Clone, PartialEq)]
pub struct CameraModel {
    p: [f64; 12],
    height: u32,
    width: u32,
}

impl CameraModel {
    pub fn new(p: [f64; 12], height: u32, width: u32) -> Result<Self, ValidationError> {
        if let Some(i) = p.iter().position(|v| !v.is_finite()) {
            return Err(ValidationError::NonFinite(format!(
                "projection matrix entry {i}"
            )));
        }
        Ok(Self { p, height, width })
    }

    pub fn matrix(&self) -> &[f64; 12] {
        &self.p
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn width(&self) -> u32 {
        self.width
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MaskOrder {
    #[default]
    AreaAscending,
    AreaDescending,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TieBreak {
    #[default]
    LowestClassId,
}

/// What to do when a mask has exactly one seed, so no exploration distance
/// can be measured.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SingleSeedPolicy {
    #[default]
    Skip,
    /// Use this radius (meters) for the first round instead of `beta * d_exp`.
    FixedRadius(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    #[default]
    Gapp,
    Dp,
}

/// Thresholds and policies for one enhancement run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EnhancementConfig {
    /// Largest accepted mask area as a fraction of the image.
    pub lambda_s: f64,
    /// Lowest accepted share of the dominant class among labeled points.
    pub lambda_p: f64,
    /// Lowest accepted share of the dominant class among all mask points.
    pub lambda_r: f64,
    /// Scale applied to the exploration distance.
    pub beta: f64,
    pub mask_order: MaskOrder,
    pub tie_break: TieBreak,
    pub single_seed_policy: SingleSeedPolicy,
    pub method: Method,
    /// When false every mask with a dominant class is accepted (ablation).
    pub mask_filtering: bool,
}

impl Default for EnhancementConfig {
    fn default() -> Self {
        Self {
            lambda_s: 0.2,
            lambda_p: 0.8,
            lambda_r: 0.1,
            beta: 2.0,
            mask_order: MaskOrder::AreaAscending,
            tie_break: TieBreak::LowestClassId,
            single_seed_policy: SingleSeedPolicy::Skip,
            method: Method::Gapp,
            mask_filtering: true,
        }
    }
}

impl EnhancementConfig {
    pub fn validate(&self) -> Result<(), ValidationError> {
        let unit = |name: &str, v: f64| {
            if v > 0.0 && v <= 1.0 {
                Ok(())
            } else {
                Err(ValidationError::OutOfRange(format!(
                    "{name} = {v} is outside (0, 1]"
                )))
            }
        };
        unit("lambda_s", self.lambda_s)?;
        unit("lambda_p", self.lambda_p)?;
        unit("lambda_r", self.lambda_r)?;
        if !(self.beta.is_finite() && self.beta > 0.0) {
            return Err(ValidationError::OutOfRange(format!(
                "beta = {} must be positive and finite",
                self.beta
            )));
        }
        if let SingleSeedPolicy::FixedRadius(r) = self.single_seed_policy {
            if !(r.is_finite() && r > 0.0) {
                return Err(ValidationError::OutOfRange(format!(
                    "fixed_radius = {r} must be positive and finite"
                )));
            }
        }
        Ok(())
    }
}

/// A cross-validated scene: every point has a label and the masks live in
/// the camera's image.
#[derive(Debug, Clone)]
pub struct Scene {
    pub(crate) cloud: PointCloud,
    pub(crate) labels: LabelVector,
    pub(crate) masks: MaskSet,
    pub(crate) camera: CameraModel,
}

impl Scene {
    pub fn new(
        cloud: PointCloud,
        labels: LabelVector,
        masks: MaskSet,
        camera: CameraModel,
    ) -> Result<Self, ValidationError> {
        if labels.len() != cloud.len() {
            return Err(ValidationError::DimensionMismatch(format!(
                "{} labels for {} points",
                labels.len(),
                cloud.len()
            )));
        }
        if masks.height() != camera.height() || masks.width() != camera.width() {
            return Err(ValidationError::DimensionMismatch(format!(
                "masks are {}x{}, camera image is {}x{}",
                masks.height(),
                masks.width(),
                camera.height(),
                camera.width()
            )));
        }
        Ok(Self {
            cloud,
            labels,
            masks,
            camera,
        })
    }

    pub fn cloud(&self) -> &PointCloud {
        &self.cloud
    }

    pub fn labels(&self) -> &LabelVector {
        &self.labels
    }

    pub fn masks(&self) -> &MaskSet {
        &self.masks
    }

    pub fn camera(&self) -> &CameraModel {
        &self.camera
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pinhole() -> CameraModel {
        CameraModel::new(
            [
                100.0, 0.0, 50.0, 0.0, 0.0, 100.0, 50.0, 0.0, 0.0, 0.0, 1.0, 0.0,
            ],
            100,
            100,
        )
        .unwrap()
    }

    fn cloud3() -> PointCloud {
        PointCloud::new(vec![[0.0, 0.0, 1.0], [1.0, 0.0, 1.0], [0.0, 1.0, 1.0]]).unwrap()
    }

    #[test]
    fn consistent_scene_validates() {
        let labels = LabelVector::new(vec![0, IGNORE, 1], 5).unwrap();
        let mask = Mask::from_bools(0, 100, 100, &vec![true; 100 * 100]).unwrap();
        let masks = MaskSet::new(100, 100, vec![mask]).unwrap();
        assert!(Scene::new(cloud3(), labels, masks, pinhole()).is_ok());
    }

    #[test]
    fn short_label_vector_is_dimension_mismatch() {
        let labels = LabelVector::new(vec![0, 1], 5).unwrap();
        let err = Scene::new(cloud3(), labels, MaskSet::empty(100, 100), pinhole()).unwrap_err();
        assert!(matches!(err, ValidationError::DimensionMismatch(_)));
    }

    #[test]
    fn mask_image_size_must_match_camera() {
        let labels = LabelVector::new(vec![0, 1, 2], 5).unwrap();
        let err = Scene::new(cloud3(), labels, MaskSet::empty(50, 100), pinhole()).unwrap_err();
        assert!(matches!(err, ValidationError::DimensionMismatch(_)));
    }

    #[test]
    fn out_of_range_label_is_rejected() {
        let err = LabelVector::new(vec![0, 7, 1], 5).unwrap_err();
        assert_eq!(
            err,
            ValidationError::BadLabel {
                index: 1,
                value: 7,
                num_classes: 5
            }
        );
        assert!(LabelVector::new(vec![-2], 5).is_err());
    }

    #[test]
    fn non_finite_inputs_are_rejected() {
        assert!(matches!(
            PointCloud::new(vec![[0.0, f32::NAN, 1.0]]),
            Err(ValidationError::NonFinite(_))
        ));
        let mut p = [0.0; 12];
        p[5] = f64::INFINITY;
        assert!(matches!(
            CameraModel::new(p, 10, 10),
            Err(ValidationError::NonFinite(_))
        ));
    }

    #[test]
    fn mask_area_is_popcount() {
        let m = Mask::from_bools(3, 2, 2, &[false, true, true, false]).unwrap();
        assert_eq!(m.area(), 2);
        assert!(m.contains(1, 0));
        assert!(m.contains(0, 1));
        assert!(!m.contains(0, 0));
        let bits: BitVec<u64, Lsb0> = [true, true, false, false].iter().copied().collect();
        assert!(matches!(
            Mask::with_area(3, 2, 2, bits, 3),
            Err(ValidationError::AreaMismatch { .. })
        ));
    }

    #[test]
    fn mask_set_rejects_mixed_sizes() {
        let a = Mask::from_bools(0, 2, 2, &[true; 4]).unwrap();
        let b = Mask::from_bools(1, 1, 4, &[true; 4]).unwrap();
        assert!(MaskSet::new(2, 2, vec![a, b]).is_err());
    }

    #[test]
    fn default_config_matches_published_settings() {
        let c = EnhancementConfig::default();
        assert_eq!(
            (c.lambda_s, c.lambda_p, c.lambda_r, c.beta),
            (0.2, 0.8, 0.1, 2.0)
        );
        assert_eq!(c.mask_order, MaskOrder::AreaAscending);
        assert_eq!(c.single_seed_policy, SingleSeedPolicy::Skip);
        assert_eq!(c.method, Method::Gapp);
        assert!(c.validate().is_ok());
    }

    #[test]
    fn config_ranges_are_checked() {
        let mut c = EnhancementConfig {
            lambda_p: 1.5,
            ..Default::default()
        };
        assert!(c.validate().is_err());
        c.lambda_p = 1.0;
        assert!(c.validate().is_ok());
        c.beta = 0.0;
        assert!(c.validate().is_err());
    }
}
