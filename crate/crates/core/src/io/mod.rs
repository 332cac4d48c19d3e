//! On-disk formats.
//!
//! | artifact    | encoding                                                        |
//! |-------------|-----------------------------------------------------------------|
//! | points      | `PLPC`, u32 version 1, u64 count, count x 3 f32 (x, y, z)       |
//! | labels      | `PLLB`, u32 version 1, u32 classes, u64 count, count x i32      |
//! | masks       | JSON `{image_height, image_width, masks: [{id, area, rle}]}`     |
//! | calibration | JSON `{P: [12 reals, row-major 3x4], image_height, image_width}` |
//! | config      | JSON object, every field optional, unknown fields rejected      |
//! | manifest    | JSON `{scenes: [{scene_id, points, labels, masks, calib, gt?}]}` |
//!
//! All binary integers and floats are little-endian. Mask runs alternate
//! false/true over the row-major bitmap, starting with a (possibly empty)
//! false run.

mod binary;
mod calib;
mod config;
mod manifest;
mod masks;

use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::error::ValidationError;

pub use binary::{
    decode_labels, decode_points, encode_labels, encode_points, read_labels, read_points,
    write_labels, write_points, LABELS_MAGIC, POINTS_MAGIC, VERSION,
};
pub use calib::{decode_calibration, encode_calibration, read_calibration, write_calibration};
pub use config::{parse_config, read_config, write_config};
pub use manifest::{read_manifest, write_manifest, LoadedScene, Manifest, SceneManifest};
pub use masks::{decode_masks, decode_rle, encode_masks, encode_rle, read_masks, write_masks};

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("bad magic bytes {0:?}")]
    BadMagic([u8; 4]),
    #[error("unsupported version {0}")]
    BadVersion(u32),
    #[error("file is truncated: need {needed} bytes, have {actual}")]
    TruncatedFile { needed: u64, actual: u64 },
    #[error("{0} unexpected trailing bytes")]
    TrailingData(u64),
    #[error("label {value} at index {index} is out of range for {num_classes} classes")]
    BadLabel {
        index: usize,
        value: i32,
        num_classes: u32,
    },
    #[error("mask {id}: runs sum to {sum}, image has {expected} pixels")]
    RleSumMismatch { id: u32, sum: u64, expected: u64 },
    #[error("mask {id}: stored area {stored} but runs decode to {actual} pixels")]
    AreaMismatch { id: u32, stored: u64, actual: u64 },
    #[error("duplicate mask id {0}")]
    DuplicateId(u32),
    #[error("projection matrix has {0} entries, expected 12")]
    BadShape(usize),
    #[error("non-finite value: {0}")]
    NonFinite(String),
    #[error("unknown field `{0}`")]
    UnknownField(String),
    #[error("out of range: {0}")]
    OutOfRange(String),
    #[error("malformed document: {0}")]
    Syntax(String),
    #[error(transparent)]
    Invalid(#[from] ValidationError),
    #[error("{}: {source}", path.display())]
    InFile {
        path: PathBuf,
        #[source]
        source: Box<FormatError>,
    },
}

impl FormatError {
    /// Attaches the file the error came from, unless it already names one.
    pub fn in_file(self, path: &Path) -> Self {
        match self {
            FormatError::Io { .. } | FormatError::InFile { .. } => self,
            other => FormatError::InFile {
                path: path.to_path_buf(),
                source: Box::new(other),
            },
        }
    }

    /// The underlying error, without file context.
    pub fn cause(&self) -> &FormatError {
        match self {
            FormatError::InFile { source, .. } => source.cause(),
            other => other,
        }
    }
}

impl From<serde_json::Error> for FormatError {
    fn from(e: serde_json::Error) -> Self {
        FormatError::Syntax(e.to_string())
    }
}

fn read_file(path: &Path) -> Result<Vec<u8>, FormatError> {
    std::fs::read(path).map_err(|source| FormatError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), FormatError> {
    std::fs::write(path, bytes).map_err(|source| FormatError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Pretty JSON with a trailing newline.
fn to_json_pretty<T: serde::Serialize>(value: &T) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(value).expect("in-memory value serializes");
    out.push(b'\n');
    out
}
