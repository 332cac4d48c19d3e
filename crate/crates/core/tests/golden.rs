use std::path::{Path, PathBuf};

use maskprop::io::{
    decode_calibration, decode_labels, decode_masks, decode_points, encode_calibration,
    encode_labels, encode_masks, encode_points, read_calibration, read_labels, read_masks,
    read_points, write_calibration, write_labels, write_masks, write_points,
};
use maskprop::IGNORE;
use sha2::{Digest, Sha256};

fn golden(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/golden")
        .join(name)
}

fn sha(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[test]
fn points_file() {
    let bytes = std::fs::read(golden("points.plpc")).unwrap();
    assert_eq!(
        sha(&bytes),
        "c84c3a72a08d75d90f18885800b7c0b7306cc87183949d8329b8a405b8ee6b43"
    );
    let cloud = decode_points(&bytes).unwrap();
    assert_eq!(
        cloud.points(),
        [[0.0, 0.0, 0.0], [1.5, -2.25, 3.0], [10.0, 0.5, -1.75]]
    );
    assert_eq!(encode_points(&cloud), bytes);
}

#[test]
fn labels_file() {
    let bytes = std::fs::read(golden("labels.pllb")).unwrap();
    assert_eq!(
        sha(&bytes),
        "579ac5cfbddda62d047faa87b8f0d8f584b71dc5135ab0b825fd88b716f6f2dd"
    );
    let labels = decode_labels(&bytes).unwrap();
    assert_eq!(labels.as_slice(), [0, IGNORE, 2]);
    assert_eq!(labels.num_classes(), 3);
    assert_eq!(encode_labels(&labels), bytes);
}

#[test]
fn masks_file() {
    let bytes = std::fs::read(golden("masks.json")).unwrap();
    assert_eq!(
        sha(&bytes),
        "197ba3b18161f56008c9dba12c40417d272209adebe4aa381fba97fa6806b08e"
    );
    let set = decode_masks(&bytes).unwrap();
    assert_eq!((set.height(), set.width()), (3, 4));
    let ids: Vec<u32> = set.masks().iter().map(|m| m.id()).collect();
    assert_eq!(ids, [7, 2]);
    let m = &set.masks()[0];
    assert!(m.contains(1, 0) && m.contains(2, 1) && !m.contains(0, 0));
    assert_eq!(m.area(), 4);
    let m = &set.masks()[1];
    assert!(m.contains(0, 0) && m.contains(3, 2));
    assert_eq!(m.area(), 2);
    assert_eq!(encode_masks(&set), bytes);
}

#[test]
fn calibration_file() {
    let bytes = std::fs::read(golden("calib.json")).unwrap();
    assert_eq!(
        sha(&bytes),
        "459fe4fde0370672cbba064dd0bfffe7d253e82eda8cd920ae02c77694dd44df"
    );
    let cam = decode_calibration(&bytes).unwrap();
    assert_eq!(
        *cam.matrix(),
        [2.0, 0.0, 2.0, 0.5, 0.0, 2.0, 1.5, -0.25, 0.0, 0.0, 1.0, 0.0]
    );
    assert_eq!((cam.height(), cam.width()), (3, 4));
    assert_eq!(encode_calibration(&cam), bytes);
}

#[test]
fn files_round_trip_on_disk() {
    let dir = tempfile::tempdir().unwrap();
    let at = |n: &str| dir.path().join(n);

    write_points(&at("p"), &read_points(&golden("points.plpc")).unwrap()).unwrap();
    write_labels(&at("l"), &read_labels(&golden("labels.pllb")).unwrap()).unwrap();
    write_masks(&at("m"), &read_masks(&golden("masks.json")).unwrap()).unwrap();
    write_calibration(&at("c"), &read_calibration(&golden("calib.json")).unwrap()).unwrap();
    for (ours, theirs) in [
        ("p", "points.plpc"),
        ("l", "labels.pllb"),
        ("m", "masks.json"),
        ("c", "calib.json"),
    ] {
        assert_eq!(
            std::fs::read(at(ours)).unwrap(),
            std::fs::read(golden(theirs)).unwrap(),
            "{theirs}"
        );
    }
}
