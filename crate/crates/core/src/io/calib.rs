use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{read_file, to_json_pretty, write_file, FormatError};
use crate::types::CameraModel;

/// JSON has no NaN/Infinity literals; accept them as strings so they can be
/// reported as non-finite instead of as a syntax error.
#[derive(Deserialize)]
#[serde(untagged)]
enum Entry {
    Number(f64),
    Text(String),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CalibIn {
    #[serde(rename = "P")]
    p: Vec<Entry>,
    image_height: u32,
    image_width: u32,
}

#[derive(Serialize)]
struct CalibOut<'a> {
    #[serde(rename = "P")]
    p: &'a [f64; 12],
    image_height: u32,
    image_width: u32,
}

pub fn encode_calibration(camera: &CameraModel) -> Vec<u8> {
    to_json_pretty(&CalibOut {
        p: camera.matrix(),
        image_height: camera.height(),
        image_width: camera.width(),
    })
}

pub fn decode_calibration(bytes: &[u8]) -> Result<CameraModel, FormatError> {
    let doc: CalibIn = serde_json::from_slice(bytes)?;
    if doc.p.len() != 12 {
        return Err(FormatError::BadShape(doc.p.len()));
    }
    let mut p = [0.0; 12];
    for (i, (slot, entry)) in p.iter_mut().zip(&doc.p).enumerate() {
        let v = match entry {
            Entry::Number(v) => *v,
            Entry::Text(s) => s
                .trim()
                .parse::<f64>()
                .map_err(|_| FormatError::Syntax(format!("P[{i}] = {s:?} is not a number")))?,
        };
        if !v.is_finite() {
            return Err(FormatError::NonFinite(format!("P[{i}]")));
        }
        *slot = v;
    }
    Ok(CameraModel::new(p, doc.image_height, doc.image_width)?)
}

pub fn read_calibration(path: &Path) -> Result<CameraModel, FormatError> {
    decode_calibration(&read_file(path)?).map_err(|e| e.in_file(path))
}

pub fn write_calibration(path: &Path, camera: &CameraModel) -> Result<(), FormatError> {
    write_file(path, &encode_calibration(camera))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn pinhole_round_trip() {
        let cam = CameraModel::new(
            [
                721.5377,
                0.0,
                609.5593,
                44.85728,
                0.0,
                721.5377,
                172.854,
                0.2163791,
                0.0,
                0.0,
                1.0,
                0.002745884,
            ],
            375,
            1242,
        )
        .unwrap();
        let bytes = encode_calibration(&cam);
        assert_eq!(decode_calibration(&bytes).unwrap(), cam);
    }

    #[test]
    fn wrong_shape() {
        let doc = br#"{"P":[1,2,3,4,5,6,7,8,9,10,11],"image_height":2,"image_width":2}"#;
        assert!(matches!(
            decode_calibration(doc),
            Err(FormatError::BadShape(11))
        ));
    }

    #[test]
    fn non_finite_entries() {
        let doc = br#"{"P":[1,0,0,0,0,"NaN",0,0,0,0,1,0],"image_height":2,"image_width":2}"#;
        assert!(matches!(
            decode_calibration(doc),
            Err(FormatError::NonFinite(_))
        ));
        let doc = br#"{"P":[1,0,0,0,0,"inf",0,0,0,0,1,0],"image_height":2,"image_width":2}"#;
        assert!(matches!(
            decode_calibration(doc),
            Err(FormatError::NonFinite(_))
        ));
        let doc = br#"{"P":[1,0,0,0,0,"x",0,0,0,0,1,0],"image_height":2,"image_width":2}"#;
        assert!(matches!(
            decode_calibration(doc),
            Err(FormatError::Syntax(_))
        ));
    }

    proptest! {
        #[test]
        fn any_finite_matrix_round_trips_exactly(p in prop::array::uniform12(any::<f64>().prop_filter("finite", |v| v.is_finite()))) {
            let cam = CameraModel::new(p, 480, 640).unwrap();
            let back = decode_calibration(&encode_calibration(&cam)).unwrap();
            for (a, b) in back.matrix().iter().zip(cam.matrix()) {
                prop_assert_eq!(a.to_bits(), b.to_bits());
            }
        }
    }
}
