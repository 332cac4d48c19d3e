//! Lidar-to-pixel projection and per-mask point membership.

use crate::types::{CameraModel, Mask, PointCloud};

/// Pixel (column `u`, row `v`) of every point, or `None` when the point is
/// behind the camera or lands outside the image.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PixelProjection {
    pixels: Vec<Option<[u32; 2]>>,
    height: u32,
    width: u32,
}

impl PixelProjection {
    pub fn len(&self) -> usize {
        self.pixels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pixels.is_empty()
    }

    #[inline]
    pub fn get(&self, k: usize) -> Option<[u32; 2]> {
        self.pixels[k]
    }

    pub fn pixels(&self) -> &[Option<[u32; 2]>] {
        &self.pixels
    }

    pub fn valid_count(&self) -> usize {
        self.pixels.iter().filter(|p| p.is_some()).count()
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn width(&self) -> u32 {
        self.width
    }
}

/// Projects a single point. `(a, b, d) = P * (x, y, z, 1)`, then
/// `u = floor(a / d)`, `v = floor(b / d)`.
#[inline]
pub fn project_point(camera: &CameraModel, point: [f32; 3]) -> Option<[u32; 2]> {
    let p = camera.matrix();
    let [x, y, z] = point.map(f64::from);
    let a = p[0] * x + p[1] * y + p[2] * z + p[3];
    let b = p[4] * x + p[5] * y + p[6] * z + p[7];
    let d = p[8] * x + p[9] * y + p[10] * z + p[11];
    if d <= 0.0 {
        return None;
    }
    let u = (a / d).floor();
    let v = (b / d).floor();
    // NaN fails both comparisons.
    if !(u >= 0.0 && u < f64::from(camera.width())) || !(v >= 0.0 && v < f64::from(camera.height()))
    {
        return None;
    }
    Some([u as u32, v as u32])
}

pub fn project_points(cloud: &PointCloud, camera: &CameraModel) -> PixelProjection {
    PixelProjection {
        pixels: cloud
            .points()
            .iter()
            .map(|&p| project_point(camera, p))
            .collect(),
        height: camera.height(),
        width: camera.width(),
    }
}

/// Indices of points whose pixel is set in `mask`, ascending.
pub fn points_in_mask(projection: &PixelProjection, mask: &Mask) -> Vec<usize> {
    debug_assert_eq!(
        (projection.height, projection.width),
        (mask.height(), mask.width())
    );
    projection
        .pixels
        .iter()
        .enumerate()
        .filter_map(|(k, px)| match px {
            Some([u, v]) if mask.contains(*u, *v) => Some(k),
            _ => None,
        })
        .collect()
}
