use std::path::Path;

use super::{read_file, write_file, FormatError};
use crate::types::{LabelVector, PointCloud};

pub const POINTS_MAGIC: [u8; 4] = *b"PLPC";
pub const LABELS_MAGIC: [u8; 4] = *b"PLLB";
pub const VERSION: u32 = 1;

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn new(buf: &'a [u8]) -> Self {
        Self { buf, pos: 0 }
    }

    fn need(&self, n: u64) -> Result<(), FormatError> {
        let needed = (self.pos as u64).saturating_add(n);
        if needed > self.buf.len() as u64 {
            return Err(FormatError::TruncatedFile {
                needed,
                actual: self.buf.len() as u64,
            });
        }
        Ok(())
    }

    fn take<const N: usize>(&mut self) -> Result<[u8; N], FormatError> {
        self.need(N as u64)?;
        let out = self.buf[self.pos..self.pos + N].try_into().unwrap();
        self.pos += N;
        Ok(out)
    }

    fn u32(&mut self) -> Result<u32, FormatError> {
        self.take().map(u32::from_le_bytes)
    }

    fn u64(&mut self) -> Result<u64, FormatError> {
        self.take().map(u64::from_le_bytes)
    }

    fn header(&mut self, magic: [u8; 4]) -> Result<(), FormatError> {
        let found: [u8; 4] = self.take()?;
        if found != magic {
            return Err(FormatError::BadMagic(found));
        }
        match self.u32()? {
            VERSION => Ok(()),
            v => Err(FormatError::BadVersion(v)),
        }
    }

    fn finish(&self) -> Result<(), FormatError> {
        match self.buf.len() - self.pos {
            0 => Ok(()),
            extra => Err(FormatError::TrailingData(extra as u64)),
        }
    }
}

pub fn encode_points(cloud: &PointCloud) -> Vec<u8> {
    let mut out = Vec::with_capacity(16 + cloud.len() * 12);
    out.extend_from_slice(&POINTS_MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&(cloud.len() as u64).to_le_bytes());
    for p in cloud.points() {
        for c in p {
            out.extend_from_slice(&c.to_le_bytes());
        }
    }
    out
}

pub fn decode_points(bytes: &[u8]) -> Result<PointCloud, FormatError> {
    let mut r = Reader::new(bytes);
    r.header(POINTS_MAGIC)?;
    let count = r.u64()?;
    r.need(count.saturating_mul(12))?;
    let mut points = Vec::with_capacity(count as usize);
    for _ in 0..count {
        let x = f32::from_le_bytes(r.take()?);
        let y = f32::from_le_bytes(r.take()?);
        let z = f32::from_le_bytes(r.take()?);
        points.push([x, y, z]);
    }
    r.finish()?;
    Ok(PointCloud::new(points)?)
}

pub fn encode_labels(labels: &LabelVector) -> Vec<u8> {
    let mut out = Vec::with_capacity(20 + labels.len() * 4);
    out.extend_from_slice(&LABELS_MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&labels.num_classes().to_le_bytes());
    out.extend_from_slice(&(labels.len() as u64).to_le_bytes());
    for l in labels.as_slice() {
        out.extend_from_slice(&l.to_le_bytes());
    }
    out
}

pub fn decode_labels(bytes: &[u8]) -> Result<LabelVector, FormatError> {
    let mut r = Reader::new(bytes);
    r.header(LABELS_MAGIC)?;
    let num_classes = r.u32()?;
    let count = r.u64()?;
    r.need(count.saturating_mul(4))?;
    let mut labels = Vec::with_capacity(count as usize);
    for index in 0..count as usize {
        let value = i32::from_le_bytes(r.take()?);
        if value < -1 || (value >= 0 && value as u32 >= num_classes) {
            return Err(FormatError::BadLabel {
                index,
                value,
                num_classes,
            });
        }
        labels.push(value);
    }
    r.finish()?;
    Ok(LabelVector::new(labels, num_classes)?)
}

pub fn read_points(path: &Path) -> Result<PointCloud, FormatError> {
    decode_points(&read_file(path)?).map_err(|e| e.in_file(path))
}

pub fn write_points(path: &Path, cloud: &PointCloud) -> Result<(), FormatError> {
    write_file(path, &encode_points(cloud))
}

pub fn read_labels(path: &Path) -> Result<LabelVector, FormatError> {
    decode_labels(&read_file(path)?).map_err(|e| e.in_file(path))
}

pub fn write_labels(path: &Path, labels: &LabelVector) -> Result<(), FormatError> {
    write_file(path, &encode_labels(labels))
}
