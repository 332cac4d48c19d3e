//! Mask-guided densification of sparse 3D pseudo-labels.
//!
//! Given a lidar point cloud, a sparse per-point pseudo-label vector, a set of
//! class-agnostic 2D segmentation masks from the paired camera image and the
//! lidar-to-pixel projection, the engine:
//!
//! 1. projects every point into the image once,
//! 2. visits the masks smallest-first and votes a mask label from the labels
//!    that already fall inside the mask, rejecting masks that are too large,
//!    impure or under-represented,
//! 3. propagates the mask label to unlabeled points of the mask, either all
//!    at once or progressively through 3D space so that points that only
//!    appear inside the mask because of camera/lidar parallax are left out.
//!
//! ```
//! use maskprop::{enhance_scene, EnhancementConfig, Scene};
//! use maskprop::synth::{generate_scene, SceneSpec};
//!
//! let generated = generate_scene(&SceneSpec::default()).unwrap();
//! let scene = Scene::new(
//!     generated.cloud.clone(),
//!     generated.seed_labels.clone(),
//!     generated.masks.clone(),
//!     generated.camera.clone(),
//! )
//! .unwrap();
//! let (labels, report) = enhance_scene(&scene, &EnhancementConfig::default()).unwrap();
//! assert!(labels.labeled_count() >= generated.seed_labels.labeled_count());
//! assert_eq!(report.labels_after, labels.labeled_count());
//! ```

pub mod compare;
pub mod error;
pub mod eval;
pub mod gapp;
pub mod io;
pub mod mla;
pub mod pipeline;
pub mod projection;
pub mod synth;
pub mod types;

pub use error::{Error, ValidationError};
pub use eval::{compute_increment, compute_stats, LabelCounts, LabelStats};
pub use gapp::{
    direct_propagate, gapp_propagate, gapp_propagate_bruteforce, PropagationResult, SpatialIndex,
};
pub use mla::{assign_mask_label, Constraint, IgnoreReason, MaskLabelDecision};
pub use pipeline::{enhance_batch, enhance_scene, order_masks, EnhancementReport, MaskRecord};
pub use projection::{points_in_mask, project_points, PixelProjection};
pub use types::{
    CameraModel, EnhancementConfig, Label, LabelVector, Mask, MaskOrder, MaskSet, Method,
    PointCloud, Scene, SingleSeedPolicy, TieBreak, IGNORE,
};

/// Engine version, shared by the CLI and any foreign bindings.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
