//! Synthetic lidar + camera scenes with exact ground truth.
//!
//! Objects (boxes and upright cylinders) stand on a ground plane in front of
//! a wall. Points are sampled on every surface and kept when the segment from
//! the lidar origin to the point is unobstructed. The camera sits at
//! `camera_offset` from the lidar, so some kept points are hidden from the
//! camera behind an object and project inside that object's mask. Those
//! points are known analytically (see [`count_misaligned`]).
//!
//! Masks are rendered by casting one camera ray through every pixel center:
//! one mask per object footprint, ground bands, wall segments, plus two kinds
//! of segmentation mistakes drawn at random: neighbouring objects of
//! different classes merged into one mask, and large region masks that
//! swallow a ground band together with the objects standing on it.
//!
//! World frame: x forward, y left, z up, lidar at the origin.

mod geometry;

use std::collections::BTreeSet;
use std::path::Path;

use bitvec::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use geometry::{Shape, Vec3};

use crate::io::{
    write_calibration, write_labels, write_manifest, write_masks, write_points, FormatError,
    Manifest, SceneManifest,
};
use crate::projection::project_point;
use crate::types::{CameraModel, Label, LabelVector, Mask, MaskSet, PointCloud, IGNORE};

pub const ROAD: Label = 0;
pub const BACKGROUND: Label = 1;
pub const CAR: Label = 2;
pub const TRUCK: Label = 3;
pub const PERSON: Label = 4;
pub const CLASS_NAMES: [&str; 5] = ["road", "background", "car", "truck", "person"];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SynthError {
    #[error("infeasible scene spec: {0}")]
    InfeasibleSpec(String),
}

fn infeasible(msg: impl Into<String>) -> SynthError {
    SynthError::InfeasibleSpec(msg.into())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShapeKind {
    Box,
    Cylinder,
}

/// A family of objects. Sizes are `[length along x, width along y, height]`
/// in meters; a cylinder uses the length as its diameter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObjectKind {
    pub class: Label,
    pub shape: ShapeKind,
    pub size_min: [f64; 3],
    pub size_max: [f64; 3],
    /// Relative frequency.
    pub weight: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Wall {
    /// Distance of the wall plane along x.
    pub x: f64,
    pub half_width: f64,
    pub height: f64,
    /// Number of masks the visible wall is cut into along y.
    pub segments: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SceneSpec {
    pub rng_seed: u64,
    pub n_objects: usize,
    pub object_kinds: Vec<ObjectKind>,
    /// Where object centers are placed: `[x_min, y_min, x_max, y_max]`.
    pub object_region: [f64; 4],
    /// Minimum free space between object footprints.
    pub min_gap: f64,
    pub ground_z: f64,
    /// `[x_min, y_min, x_max, y_max]`.
    pub ground_extent: [f64; 4],
    /// x positions where the ground is cut into separate masks.
    pub ground_bands: Vec<f64>,
    pub wall: Option<Wall>,
    pub points_per_object: usize,
    pub ground_points: usize,
    pub wall_points: usize,
    /// Camera center relative to the lidar origin.
    pub camera_offset: [f64; 3],
    pub image_width: u32,
    pub image_height: u32,
    pub focal: f64,
    /// Chance that two touching footprints of different classes share one mask.
    pub merge_probability: f64,
    pub region_masks: usize,
    /// Seed-label fraction per class; its length is the number of classes.
    pub seed_fraction: Vec<f64>,
    /// Share of seed labels flipped to a uniformly drawn wrong class.
    pub noise_rate: f64,
}

impl Default for SceneSpec {
    fn default() -> Self {
        Self {
            rng_seed: 0,
            n_objects: 10,
            object_kinds: vec![
                ObjectKind {
                    class: CAR,
                    shape: ShapeKind::Box,
                    size_min: [3.8, 1.6, 1.4],
                    size_max: [4.6, 1.9, 1.7],
                    weight: 0.55,
                },
                ObjectKind {
                    class: TRUCK,
                    shape: ShapeKind::Box,
                    size_min: [6.0, 2.3, 2.8],
                    size_max: [8.0, 2.6, 3.5],
                    weight: 0.15,
                },
                ObjectKind {
                    class: PERSON,
                    shape: ShapeKind::Cylinder,
                    size_min: [0.5, 0.5, 1.6],
                    size_max: [0.7, 0.7, 1.9],
                    weight: 0.3,
                },
            ],
            object_region: [7.0, -9.0, 28.0, 9.0],
            min_gap: 0.5,
            ground_z: -1.73,
            ground_extent: [3.0, -15.0, 36.0, 15.0],
            ground_bands: vec![9.0, 16.0, 25.0],
            wall: Some(Wall {
                x: 36.0,
                half_width: 20.0,
                height: 7.0,
                segments: 3,
            }),
            points_per_object: 500,
            ground_points: 8000,
            wall_points: 4000,
            camera_offset: [0.0, 0.8, -0.6],
            image_width: 480,
            image_height: 160,
            focal: 250.0,
            merge_probability: 0.5,
            region_masks: 1,
            seed_fraction: vec![0.2, 0.2, 0.3, 0.3, 0.3],
            noise_rate: 0.05,
        }
    }
}

fn unit_interval(name: &str, v: f64) -> Result<(), SynthError> {
    if (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(infeasible(format!("{name} = {v} is outside [0, 1]")))
    }
}

fn valid_rect(name: &str, r: [f64; 4]) -> Result<(), SynthError> {
    if r.iter().all(|v| v.is_finite()) && r[0] < r[2] && r[1] < r[3] {
        Ok(())
    } else {
        Err(infeasible(format!("{name} {r:?} is empty")))
    }
}

impl SceneSpec {
    pub fn num_classes(&self) -> u32 {
        self.seed_fraction.len() as u32
    }

    pub fn validate(&self) -> Result<(), SynthError> {
        if self.seed_fraction.len() < 2 {
            return Err(infeasible(
                "seed_fraction needs road and background entries",
            ));
        }
        for (c, &f) in self.seed_fraction.iter().enumerate() {
            unit_interval(&format!("seed_fraction[{c}]"), f)?;
        }
        unit_interval("noise_rate", self.noise_rate)?;
        unit_interval("merge_probability", self.merge_probability)?;
        valid_rect("object_region", self.object_region)?;
        valid_rect("ground_extent", self.ground_extent)?;
        if self.n_objects > 0 {
            if self.object_kinds.is_empty() {
                return Err(infeasible("objects requested but no object kinds given"));
            }
            let total_weight: f64 = self.object_kinds.iter().map(|k| k.weight).sum();
            if total_weight.is_nan() || total_weight <= 0.0 {
                return Err(infeasible("object kind weights sum to zero"));
            }
        }
        for k in &self.object_kinds {
            if k.class < 0 || k.class as u32 >= self.num_classes() {
                return Err(infeasible(format!(
                    "object class {} has no seed fraction",
                    k.class
                )));
            }
            if !(k.weight >= 0.0 && k.weight.is_finite()) {
                return Err(infeasible(format!(
                    "object weight {} is negative",
                    k.weight
                )));
            }
            for i in 0..3 {
                if !(k.size_min[i] > 0.0
                    && k.size_max[i] >= k.size_min[i]
                    && k.size_max[i].is_finite())
                {
                    return Err(infeasible(format!(
                        "object size range {:?}..{:?} is not positive",
                        k.size_min, k.size_max
                    )));
                }
            }
        }
        if let Some(w) = &self.wall {
            if !(w.half_width > 0.0 && w.height > 0.0 && w.x.is_finite() && w.segments > 0) {
                return Err(infeasible("wall extents must be positive"));
            }
        }
        if self.min_gap.is_nan() || self.min_gap < 0.0 || !self.ground_z.is_finite() {
            return Err(infeasible("min_gap and ground_z must be finite"));
        }
        if self.camera_offset.iter().any(|v| !v.is_finite()) {
            return Err(infeasible("camera_offset must be finite"));
        }
        if self.image_width == 0
            || self.image_height == 0
            || self.focal.is_nan()
            || self.focal <= 0.0
        {
            return Err(infeasible("image size and focal length must be positive"));
        }
        let wall_points = if self.wall.is_some() {
            self.wall_points
        } else {
            0
        };
        if self.n_objects * self.points_per_object + self.ground_points + wall_points == 0 {
            return Err(infeasible("zero points requested"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SceneObject {
    pub class: Label,
    pub shape: Shape,
}

/// Static geometry of a scene.
#[derive(Debug, Clone, PartialEq)]
pub struct World {
    pub objects: Vec<SceneObject>,
    pub ground_z: f64,
    pub ground_extent: [f64; 4],
    pub ground_bands: Vec<f64>,
    pub wall: Option<Wall>,
}

impl World {
    /// Whether any object blocks the segment between `eye` and `p`.
    pub fn occluded(&self, eye: Vec3, p: Vec3) -> bool {
        self.objects.iter().any(|o| o.shape.blocks(eye, p))
    }

    fn ground_band(&self, x: f64) -> usize {
        self.ground_bands.iter().filter(|&&b| x >= b).count()
    }

    fn wall_segment(&self, wall: &Wall, y: f64) -> u32 {
        let s = ((y + wall.half_width) / (2.0 * wall.half_width) * f64::from(wall.segments)) as u32;
        s.min(wall.segments - 1)
    }

    fn first_hit(&self, o: Vec3, d: Vec3) -> Surface {
        let mut best = (f64::INFINITY, Surface::Sky);
        for (i, obj) in self.objects.iter().enumerate() {
            if let Some(t) = obj.shape.first_hit(o, d) {
                if t < best.0 {
                    best = (t, Surface::Object(i as u32));
                }
            }
        }
        if d[2] < 0.0 {
            let t = (self.ground_z - o[2]) / d[2];
            let p = geometry::along(o, d, t);
            let [x0, y0, x1, y1] = self.ground_extent;
            if t > 0.0 && t < best.0 && (x0..=x1).contains(&p[0]) && (y0..=y1).contains(&p[1]) {
                best = (
                    t,
                    Surface::Ground([self.ground_band(p[0]), usize::from(p[1] >= 0.0)]),
                );
            }
        }
        if let Some(w) = &self.wall {
            if d[0] > 0.0 {
                let t = (w.x - o[0]) / d[0];
                let p = geometry::along(o, d, t);
                if t > 0.0
                    && t < best.0
                    && p[1].abs() <= w.half_width
                    && (self.ground_z..=self.ground_z + w.height).contains(&p[2])
                {
                    best = (t, Surface::Wall(self.wall_segment(w, p[1])));
                }
            }
        }
        best.1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Surface {
    Sky,
    Object(u32),
    /// Band index and side (0 right, 1 left).
    Ground([usize; 2]),
    Wall(u32),
}

/// Camera placement and image.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rig {
    pub camera_offset: Vec3,
    pub image_width: u32,
    pub image_height: u32,
    pub focal: f64,
}

impl Rig {
    fn principal_point(&self) -> (f64, f64) {
        (
            f64::from(self.image_width) / 2.0,
            f64::from(self.image_height) / 2.0,
        )
    }

    /// Pinhole camera looking along +x: `P = K [R | -R C]`.
    pub fn camera(&self) -> CameraModel {
        let f = self.focal;
        let (cx, cy) = self.principal_point();
        let c = self.camera_offset;
        let p = [
            cx,
            -f,
            0.0,
            f * c[1] - cx * c[0],
            cy,
            0.0,
            -f,
            f * c[2] - cy * c[0],
            1.0,
            0.0,
            0.0,
            -c[0],
        ];
        CameraModel::new(p, self.image_height, self.image_width).expect("finite rig")
    }

    /// World direction of the ray through the center of pixel `(u, v)`.
    fn pixel_ray(&self, u: u32, v: u32) -> Vec3 {
        let (cx, cy) = self.principal_point();
        [
            1.0,
            -(f64::from(u) + 0.5 - cx) / self.focal,
            -(f64::from(v) + 0.5 - cy) / self.focal,
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MaskKind {
    Object(u32),
    Merged(u32, u32),
    Ground,
    Wall,
    Region,
}

#[derive(Debug, Clone)]
pub struct GeneratedScene {
    pub cloud: PointCloud,
    pub gt_labels: LabelVector,
    pub seed_labels: LabelVector,
    pub masks: MaskSet,
    pub camera: CameraModel,
    pub objects: Vec<SceneObject>,
    /// What produced each mask, parallel to `masks`.
    pub mask_kinds: Vec<MaskKind>,
    /// Per point: an object blocks the camera's line of sight.
    pub occluded_in_camera: Vec<bool>,
    /// Per pixel, row-major: the object hit first by the pixel's camera ray.
    pub pixel_objects: Vec<Option<u32>>,
}

struct Draft {
    kinds: Vec<MaskKind>,
    bitmaps: Vec<BitVec<u64, Lsb0>>,
}

/// Builds a scene from explicit geometry and surface samples. Samples hidden
/// from the lidar are dropped. Seed labels are all unlabeled and the masks
/// are the clean footprints (objects, ground bands, wall segments).
pub fn compose(
    world: &World,
    rig: &Rig,
    samples: &[(Vec3, Label)],
    num_classes: u32,
) -> Result<GeneratedScene, SynthError> {
    let (scene, _, _) = compose_draft(world, rig, samples, num_classes)?;
    Ok(scene)
}

fn compose_draft(
    world: &World,
    rig: &Rig,
    samples: &[(Vec3, Label)],
    num_classes: u32,
) -> Result<(GeneratedScene, Draft, Vec<Surface>), SynthError> {
    let eye = rig.camera_offset;
    let kept: Vec<&(Vec3, Label)> = samples
        .iter()
        .filter(|(p, _)| !world.occluded([0.0; 3], *p))
        .collect();
    let points: Vec<[f32; 3]> = kept.iter().map(|(p, _)| p.map(|c| c as f32)).collect();
    let cloud = PointCloud::new(points).map_err(|e| infeasible(e.to_string()))?;
    let gt: Vec<Label> = kept.iter().map(|s| s.1).collect();
    let gt_labels = LabelVector::new(gt, num_classes).map_err(|e| infeasible(e.to_string()))?;
    let occluded_in_camera = kept.iter().map(|(p, _)| world.occluded(eye, *p)).collect();

    let (w, h) = (rig.image_width, rig.image_height);
    let surfaces: Vec<Surface> = (0..h)
        .into_par_iter()
        .flat_map_iter(|v| (0..w).map(move |u| (u, v)))
        .map(|(u, v)| world.first_hit(eye, rig.pixel_ray(u, v)))
        .collect();
    let pixel_objects = surfaces
        .iter()
        .map(|s| match s {
            Surface::Object(i) => Some(*i),
            _ => None,
        })
        .collect();

    let keys: Vec<Surface> = surfaces
        .iter()
        .copied()
        .filter(|s| *s != Surface::Sky)
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let mut draft = Draft {
        kinds: Vec::new(),
        bitmaps: Vec::new(),
    };
    for key in keys {
        draft.kinds.push(match key {
            Surface::Object(i) => MaskKind::Object(i),
            Surface::Ground(_) => MaskKind::Ground,
            _ => MaskKind::Wall,
        });
        draft
            .bitmaps
            .push(surfaces.iter().map(|s| *s == key).collect());
    }

    let camera = rig.camera();
    let scene = GeneratedScene {
        seed_labels: LabelVector::unlabeled(cloud.len(), num_classes),
        masks: draft.finish(h, w),
        cloud,
        gt_labels,
        camera,
        objects: world.objects.clone(),
        mask_kinds: draft.kinds.clone(),
        occluded_in_camera,
        pixel_objects,
    };
    Ok((scene, draft, surfaces))
}

impl PartialOrd for Surface {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Surface {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        let key = |s: &Surface| match s {
            Surface::Sky => (0, 0, 0),
            Surface::Object(i) => (1, *i as usize, 0),
            Surface::Ground([b, side]) => (2, *b, *side),
            Surface::Wall(s) => (3, *s as usize, 0),
        };
        key(self).cmp(&key(other))
    }
}

impl Draft {
    fn finish(&self, h: u32, w: u32) -> MaskSet {
        let masks = self
            .bitmaps
            .iter()
            .enumerate()
            .map(|(id, bits)| Mask::from_bits(id as u32, h, w, bits.clone()).expect("image-sized"))
            .collect();
        MaskSet::new(h, w, masks).expect("image-sized")
    }
}

fn place_objects(spec: &SceneSpec, rng: &mut ChaCha8Rng) -> Result<Vec<SceneObject>, SynthError> {
    let total: f64 = spec.object_kinds.iter().map(|k| k.weight).sum();
    let [rx0, ry0, rx1, ry1] = spec.object_region;
    let mut objects: Vec<SceneObject> = Vec::with_capacity(spec.n_objects);
    for i in 0..spec.n_objects {
        let mut pick = rng.gen::<f64>() * total;
        let kind = spec
            .object_kinds
            .iter()
            .find(|k| {
                let hit = pick < k.weight;
                pick -= k.weight;
                hit
            })
            .unwrap_or_else(|| spec.object_kinds.last().unwrap());
        let size: [f64; 3] =
            std::array::from_fn(|d| rng.gen_range(kind.size_min[d]..=kind.size_max[d]));
        let z0 = spec.ground_z;
        let mut placed = None;
        for _ in 0..1000 {
            let cx = rng.gen_range(rx0..rx1);
            let cy = rng.gen_range(ry0..ry1);
            let shape = match kind.shape {
                ShapeKind::Box => Shape::Box {
                    min: [cx - size[0] / 2.0, cy - size[1] / 2.0, z0],
                    max: [cx + size[0] / 2.0, cy + size[1] / 2.0, z0 + size[2]],
                },
                ShapeKind::Cylinder => Shape::Cylinder {
                    center: [cx, cy],
                    radius: size[0] / 2.0,
                    z_min: z0,
                    z_max: z0 + size[2],
                },
            };
            let [a0, b0, a1, b1] = shape.footprint();
            let g = spec.min_gap;
            let free = objects.iter().all(|o| {
                let [c0, d0, c1, d1] = o.shape.footprint();
                a1 + g <= c0 || c1 + g <= a0 || b1 + g <= d0 || d1 + g <= b0
            });
            if free {
                placed = Some(shape);
                break;
            }
        }
        let shape = placed.ok_or_else(|| {
            infeasible(format!(
                "no free spot for object {i} in {:?}",
                spec.object_region
            ))
        })?;
        objects.push(SceneObject {
            class: kind.class,
            shape,
        });
    }
    Ok(objects)
}

fn sample_surfaces(spec: &SceneSpec, world: &World, rng: &mut ChaCha8Rng) -> Vec<(Vec3, Label)> {
    let mut samples = Vec::new();
    for o in &world.objects {
        for _ in 0..spec.points_per_object {
            samples.push((o.shape.sample_surface(rng), o.class));
        }
    }
    let [x0, y0, x1, y1] = spec.ground_extent;
    for _ in 0..spec.ground_points {
        let p = [rng.gen_range(x0..x1), rng.gen_range(y0..y1), spec.ground_z];
        samples.push((p, ROAD));
    }
    if let Some(w) = &spec.wall {
        for _ in 0..spec.wall_points {
            let p = [
                w.x,
                rng.gen_range(-w.half_width..w.half_width),
                spec.ground_z + rng.gen::<f64>() * w.height,
            ];
            samples.push((p, BACKGROUND));
        }
    }
    samples
}

/// Pairs of objects whose footprints touch in the image.
fn touching_objects(surfaces: &[Surface], w: u32) -> BTreeSet<(u32, u32)> {
    let w = w as usize;
    let mut pairs = BTreeSet::new();
    for (i, s) in surfaces.iter().enumerate() {
        let Surface::Object(a) = *s else { continue };
        let right = (i % w + 1 < w).then(|| i + 1);
        let down = Some(i + w).filter(|&j| j < surfaces.len());
        for j in [right, down].into_iter().flatten() {
            if let Surface::Object(b) = surfaces[j] {
                if a != b {
                    pairs.insert((a.min(b), a.max(b)));
                }
            }
        }
    }
    pairs
}

fn add_mistakes(
    spec: &SceneSpec,
    scene: &GeneratedScene,
    draft: &mut Draft,
    surfaces: &[Surface],
    rng: &mut ChaCha8Rng,
) {
    let w = spec.image_width as usize;
    let object_mask =
        |draft: &Draft, i: u32| draft.kinds.iter().position(|k| *k == MaskKind::Object(i));

    for (a, b) in touching_objects(surfaces, spec.image_width) {
        if scene.objects[a as usize].class == scene.objects[b as usize].class {
            continue;
        }
        if rng.gen::<f64>() >= spec.merge_probability {
            continue;
        }
        let (Some(ia), Some(ib)) = (object_mask(draft, a), object_mask(draft, b)) else {
            continue;
        };
        let merged = draft.bitmaps[ia].clone() | draft.bitmaps[ib].clone();
        draft.bitmaps[ia] = merged;
        draft.kinds[ia] = MaskKind::Merged(a, b);
        draft.bitmaps.remove(ib);
        draft.kinds.remove(ib);
    }

    let bands: Vec<usize> = surfaces
        .iter()
        .filter_map(|s| match s {
            Surface::Ground([b, _]) => Some(*b),
            _ => None,
        })
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    if bands.is_empty() {
        return;
    }
    for _ in 0..spec.region_masks {
        let band = bands[rng.gen_range(0..bands.len())];
        let in_band = |s: &Surface| matches!(s, Surface::Ground([b, _]) if *b == band);
        let mut bits: BitVec<u64, Lsb0> = surfaces.iter().map(in_band).collect();
        let mut members = BTreeSet::new();
        for (i, s) in surfaces.iter().enumerate() {
            let Surface::Object(o) = *s else { continue };
            let neighbours = [
                (i % w > 0).then(|| i - 1),
                (i % w + 1 < w).then(|| i + 1),
                i.checked_sub(w),
                Some(i + w).filter(|&j| j < surfaces.len()),
            ];
            if neighbours
                .into_iter()
                .flatten()
                .any(|j| in_band(&surfaces[j]))
            {
                members.insert(o);
            }
        }
        for (i, s) in surfaces.iter().enumerate() {
            if let Surface::Object(o) = s {
                if members.contains(o) {
                    bits.set(i, true);
                }
            }
        }
        draft.kinds.push(MaskKind::Region);
        draft.bitmaps.push(bits);
    }
}

fn draw_seeds(spec: &SceneSpec, gt: &LabelVector, rng: &mut ChaCha8Rng) -> LabelVector {
    let n_classes = spec.num_classes() as i32;
    let seeds = gt
        .as_slice()
        .iter()
        .map(|&c| {
            if rng.gen::<f64>() >= spec.seed_fraction[c as usize] {
                return IGNORE;
            }
            if n_classes > 1 && rng.gen::<f64>() < spec.noise_rate {
                let wrong = rng.gen_range(0..n_classes - 1);
                if wrong >= c {
                    wrong + 1
                } else {
                    wrong
                }
            } else {
                c
            }
        })
        .collect();
    LabelVector::new(seeds, spec.num_classes()).expect("classes in range")
}

/// Generates one scene; identical specs give identical scenes.
pub fn generate_scene(spec: &SceneSpec) -> Result<GeneratedScene, SynthError> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.rng_seed);
    let world = World {
        objects: place_objects(spec, &mut rng)?,
        ground_z: spec.ground_z,
        ground_extent: spec.ground_extent,
        ground_bands: spec.ground_bands.clone(),
        wall: spec.wall,
    };
    let rig = Rig {
        camera_offset: spec.camera_offset,
        image_width: spec.image_width,
        image_height: spec.image_height,
        focal: spec.focal,
    };
    let samples = sample_surfaces(spec, &world, &mut rng);
    let (mut scene, mut draft, surfaces) =
        compose_draft(&world, &rig, &samples, spec.num_classes())?;
    if scene.cloud.is_empty() {
        return Err(infeasible("no sampled point is visible to the lidar"));
    }
    add_mistakes(spec, &scene, &mut draft, &surfaces, &mut rng);
    scene.masks = draft.finish(spec.image_height, spec.image_width);
    scene.mask_kinds = draft.kinds;
    scene.seed_labels = draw_seeds(spec, &scene.gt_labels, &mut rng);
    Ok(scene)
}

/// Points hidden from the camera by an object whose footprint they project
/// into, while belonging to a different class.
pub fn misaligned_points(scene: &GeneratedScene) -> Vec<usize> {
    let w = scene.camera.width() as usize;
    (0..scene.cloud.len())
        .filter(|&k| {
            if !scene.occluded_in_camera[k] {
                return false;
            }
            let Some([u, v]) = project_point(&scene.camera, scene.cloud.point(k)) else {
                return false;
            };
            match scene.pixel_objects[v as usize * w + u as usize] {
                Some(o) => scene.objects[o as usize].class != scene.gt_labels.get(k),
                None => false,
            }
        })
        .collect()
}

pub fn count_misaligned(scene: &GeneratedScene) -> usize {
    misaligned_points(scene).len()
}

/// Scene identifier used for generated batches.
pub fn scene_id(seed: u64) -> String {
    format!("scene_{seed:06}")
}

/// Scenes for seeds `first_seed..first_seed + n`, in seed order.
pub fn generate_batch(
    spec: &SceneSpec,
    n: usize,
    first_seed: u64,
) -> Result<Vec<(String, GeneratedScene)>, SynthError> {
    (0..n as u64)
        .into_par_iter()
        .map(|i| {
            let seed = first_seed + i;
            let spec = SceneSpec {
                rng_seed: seed,
                ..spec.clone()
            };
            generate_scene(&spec).map(|s| (scene_id(seed), s))
        })
        .collect()
}

/// Writes `dir/<id>/{points.plpc, seed.pllb, gt.pllb, masks.json, calib.json}`
/// and returns the manifest entry, with paths relative to `dir`.
pub fn write_scene(
    dir: &Path,
    id: &str,
    scene: &GeneratedScene,
) -> Result<SceneManifest, FormatError> {
    let entry = SceneManifest {
        scene_id: id.to_string(),
        points: Path::new(id).join("points.plpc"),
        labels: Path::new(id).join("seed.pllb"),
        masks: Path::new(id).join("masks.json"),
        calib: Path::new(id).join("calib.json"),
        gt: Some(Path::new(id).join("gt.pllb")),
    };
    std::fs::create_dir_all(dir.join(id)).map_err(|source| FormatError::Io {
        path: dir.join(id),
        source,
    })?;
    write_points(&dir.join(&entry.points), &scene.cloud)?;
    write_labels(&dir.join(&entry.labels), &scene.seed_labels)?;
    write_labels(&dir.join(entry.gt.as_ref().unwrap()), &scene.gt_labels)?;
    write_masks(&dir.join(&entry.masks), &scene.masks)?;
    write_calibration(&dir.join(&entry.calib), &scene.camera)?;
    Ok(entry)
}

/// Writes every scene and `dir/manifest.json`.
pub fn write_batch(
    dir: &Path,
    scenes: &[(String, GeneratedScene)],
) -> Result<Manifest, FormatError> {
    std::fs::create_dir_all(dir).map_err(|source| FormatError::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let manifest = Manifest {
        scenes: scenes
            .iter()
            .map(|(id, s)| write_scene(dir, id, s))
            .collect::<Result<_, _>>()?,
    };
    write_manifest(&dir.join("manifest.json"), &manifest)?;
    Ok(manifest)
}
