use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{
    read_calibration, read_file, read_labels, read_masks, read_points, to_json_pretty, write_file,
    FormatError,
};
use crate::error::ValidationError;
use crate::types::{LabelVector, Scene};

/// File set of one scene. Relative paths resolve against the manifest's
/// directory.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneManifest {
    pub scene_id: String,
    pub points: PathBuf,
    pub labels: PathBuf,
    pub masks: PathBuf,
    pub calib: PathBuf,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gt: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub scenes: Vec<SceneManifest>,
}

#[derive(Debug, Clone)]
pub struct LoadedScene {
    pub scene_id: String,
    pub scene: Scene,
    pub gt: Option<LabelVector>,
}

impl SceneManifest {
    /// Reads and cross-validates every file of the scene.
    pub fn load(&self, base: &Path) -> Result<LoadedScene, FormatError> {
        let at = |p: &Path| base.join(p);
        let cloud = read_points(&at(&self.points))?;
        let labels = read_labels(&at(&self.labels))?;
        let masks = read_masks(&at(&self.masks))?;
        let camera = read_calibration(&at(&self.calib))?;
        let scene = Scene::new(cloud, labels, masks, camera)
            .map_err(|e| FormatError::from(e).in_file(&at(&self.labels)))?;
        let gt = match &self.gt {
            None => None,
            Some(p) => {
                let gt = read_labels(&at(p))?;
                if gt.len() != scene.cloud().len() {
                    return Err(
                        FormatError::from(ValidationError::DimensionMismatch(format!(
                            "{} ground-truth labels for {} points",
                            gt.len(),
                            scene.cloud().len()
                        )))
                        .in_file(&at(p)),
                    );
                }
                Some(gt)
            }
        };
        Ok(LoadedScene {
            scene_id: self.scene_id.clone(),
            scene,
            gt,
        })
    }
}

pub fn read_manifest(path: &Path) -> Result<Manifest, FormatError> {
    let bytes = read_file(path)?;
    serde_json::from_slice(&bytes).map_err(|e| FormatError::from(e).in_file(path))
}

pub fn write_manifest(path: &Path, manifest: &Manifest) -> Result<(), FormatError> {
    write_file(path, &to_json_pretty(manifest))
}
