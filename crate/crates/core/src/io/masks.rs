use std::collections::BTreeSet;
use std::path::Path;

use bitvec::prelude::*;
use serde::{Deserialize, Serialize};

use super::{read_file, write_file, FormatError};
use crate::types::{Mask, MaskSet};

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MaskDoc {
    image_height: u32,
    image_width: u32,
    masks: Vec<MaskEntry>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MaskEntry {
    id: u32,
    area: u64,
    rle: Vec<u64>,
}

/// Run lengths of a row-major bitmap: false, true, false, ... The first run
/// is zero when the first pixel is set; no other run is zero.
pub fn encode_rle(bits: &BitSlice<u64, Lsb0>) -> Vec<u64> {
    let mut runs = Vec::new();
    let mut current = false;
    let mut len = 0u64;
    for b in bits.iter().by_vals() {
        if b == current {
            len += 1;
        } else {
            runs.push(len);
            current = b;
            len = 1;
        }
    }
    if len > 0 || runs.is_empty() {
        runs.push(len);
    }
    runs
}

pub fn decode_rle(id: u32, runs: &[u64], pixels: u64) -> Result<BitVec<u64, Lsb0>, FormatError> {
    let sum = runs
        .iter()
        .try_fold(0u64, |acc, &r| acc.checked_add(r))
        .unwrap_or(u64::MAX);
    if sum != pixels {
        return Err(FormatError::RleSumMismatch {
            id,
            sum,
            expected: pixels,
        });
    }
    let mut bits = BitVec::with_capacity(pixels as usize);
    for (i, &r) in runs.iter().enumerate() {
        bits.resize(bits.len() + r as usize, i % 2 == 1);
    }
    Ok(bits)
}

pub fn encode_masks(set: &MaskSet) -> Vec<u8> {
    let doc = MaskDoc {
        image_height: set.height(),
        image_width: set.width(),
        masks: set
            .masks()
            .iter()
            .map(|m| MaskEntry {
                id: m.id(),
                area: m.area(),
                rle: encode_rle(m.bits()),
            })
            .collect(),
    };
    let mut out = serde_json::to_vec(&doc).expect("mask document serializes");
    out.push(b'\n');
    out
}

pub fn decode_masks(bytes: &[u8]) -> Result<MaskSet, FormatError> {
    let doc: MaskDoc = serde_json::from_slice(bytes)?;
    let pixels = u64::from(doc.image_height) * u64::from(doc.image_width);
    let mut seen = BTreeSet::new();
    let mut masks = Vec::with_capacity(doc.masks.len());
    for entry in doc.masks {
        if !seen.insert(entry.id) {
            return Err(FormatError::DuplicateId(entry.id));
        }
        let bits = decode_rle(entry.id, &entry.rle, pixels)?;
        let actual = bits.count_ones() as u64;
        if actual != entry.area {
            return Err(FormatError::AreaMismatch {
                id: entry.id,
                stored: entry.area,
                actual,
            });
        }
        masks.push(Mask::from_bits(
            entry.id,
            doc.image_height,
            doc.image_width,
            bits,
        )?);
    }
    Ok(MaskSet::new(doc.image_height, doc.image_width, masks)?)
}

pub fn read_masks(path: &Path) -> Result<MaskSet, FormatError> {
    decode_masks(&read_file(path)?).map_err(|e| e.in_file(path))
}

pub fn write_masks(path: &Path, set: &MaskSet) -> Result<(), FormatError> {
    write_file(path, &encode_masks(set))
}
