//! Solids and rays in the world frame (x forward, y left, z up).

use rand::Rng;

/// Tolerance on the segment parameter so that a point lying on a surface
/// is not reported as hidden by that same surface.
const SURFACE_EPS: f64 = 1e-9;

pub type Vec3 = [f64; 3];

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Shape {
    /// Axis-aligned box.
    Box { min: Vec3, max: Vec3 },
    /// Upright cylinder.
    Cylinder {
        center: [f64; 2],
        radius: f64,
        z_min: f64,
        z_max: f64,
    },
}

fn sub(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub fn along(o: Vec3, d: Vec3, t: f64) -> Vec3 {
    [o[0] + t * d[0], o[1] + t * d[1], o[2] + t * d[2]]
}

/// Parameter range where `o + t*d` lies along one slab `[lo, hi]`. A ray
/// running inside the boundary plane counts as outside.
fn slab(o: f64, d: f64, lo: f64, hi: f64) -> Option<(f64, f64)> {
    if d == 0.0 {
        return (lo < o && o < hi).then_some((f64::NEG_INFINITY, f64::INFINITY));
    }
    let (a, b) = ((lo - o) / d, (hi - o) / d);
    Some((a.min(b), a.max(b)))
}

impl Shape {
    /// Parameter interval of the ray `o + t*d` inside the solid.
    pub fn ray_interval(&self, o: Vec3, d: Vec3) -> Option<(f64, f64)> {
        let (mut t0, mut t1) = (f64::NEG_INFINITY, f64::INFINITY);
        let mut clip = |r: Option<(f64, f64)>| -> bool {
            match r {
                Some((a, b)) => {
                    t0 = t0.max(a);
                    t1 = t1.min(b);
                    t0 <= t1
                }
                None => false,
            }
        };
        match *self {
            Shape::Box { min, max } => {
                for i in 0..3 {
                    if !clip(slab(o[i], d[i], min[i], max[i])) {
                        return None;
                    }
                }
            }
            Shape::Cylinder {
                center,
                radius,
                z_min,
                z_max,
            } => {
                if !clip(slab(o[2], d[2], z_min, z_max)) {
                    return None;
                }
                let (px, py) = (o[0] - center[0], o[1] - center[1]);
                let a = d[0] * d[0] + d[1] * d[1];
                let c = px * px + py * py - radius * radius;
                let disc = if a == 0.0 {
                    (c <= 0.0).then_some((f64::NEG_INFINITY, f64::INFINITY))
                } else {
                    let b = px * d[0] + py * d[1];
                    let q = b * b - a * c;
                    (q >= 0.0).then(|| ((-b - q.sqrt()) / a, (-b + q.sqrt()) / a))
                };
                if !clip(disc) {
                    return None;
                }
            }
        }
        Some((t0, t1))
    }

    /// Whether the open segment from `from` to `to` passes through the solid.
    pub fn blocks(&self, from: Vec3, to: Vec3) -> bool {
        match self.ray_interval(from, sub(to, from)) {
            Some((t0, t1)) => t0 < 1.0 - SURFACE_EPS && t1 > SURFACE_EPS && t0 < t1,
            None => false,
        }
    }

    /// Ray parameter of the first entry in front of the origin.
    pub fn first_hit(&self, o: Vec3, d: Vec3) -> Option<f64> {
        let (t0, t1) = self.ray_interval(o, d)?;
        (t0 > 0.0 && t0 < t1).then_some(t0)
    }

    /// Footprint on the ground as `[x_min, y_min, x_max, y_max]`.
    pub fn footprint(&self) -> [f64; 4] {
        match *self {
            Shape::Box { min, max } => [min[0], min[1], max[0], max[1]],
            Shape::Cylinder { center, radius, .. } => [
                center[0] - radius,
                center[1] - radius,
                center[0] + radius,
                center[1] + radius,
            ],
        }
    }

    /// Uniform sample over the surface, bottom face excluded.
    pub fn sample_surface<R: Rng>(&self, rng: &mut R) -> Vec3 {
        match *self {
            Shape::Box { min, max } => {
                let [lx, ly, lz] = sub(max, min);
                let areas = [lx * ly, ly * lz, ly * lz, lx * lz, lx * lz];
                let total: f64 = areas.iter().sum();
                let mut pick = rng.gen::<f64>() * total;
                let mut face = areas.len() - 1;
                for (i, a) in areas.iter().enumerate() {
                    if pick < *a {
                        face = i;
                        break;
                    }
                    pick -= a;
                }
                let (s, t) = (rng.gen::<f64>(), rng.gen::<f64>());
                let x = min[0] + s * lx;
                let y = min[1] + t * ly;
                match face {
                    0 => [x, y, max[2]],
                    1 => [min[0], min[1] + s * ly, min[2] + t * lz],
                    2 => [max[0], min[1] + s * ly, min[2] + t * lz],
                    3 => [x, min[1], min[2] + t * lz],
                    _ => [x, max[1], min[2] + t * lz],
                }
            }
            Shape::Cylinder {
                center,
                radius,
                z_min,
                z_max,
            } => {
                let side = 2.0 * std::f64::consts::PI * radius * (z_max - z_min);
                let top = std::f64::consts::PI * radius * radius;
                let phi = rng.gen::<f64>() * std::f64::consts::TAU;
                if rng.gen::<f64>() * (side + top) < side {
                    let z = z_min + rng.gen::<f64>() * (z_max - z_min);
                    [
                        center[0] + radius * phi.cos(),
                        center[1] + radius * phi.sin(),
                        z,
                    ]
                } else {
                    let r = radius * rng.gen::<f64>().sqrt();
                    [center[0] + r * phi.cos(), center[1] + r * phi.sin(), z_max]
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const UNIT: Shape = Shape::Box {
        min: [0.0, 0.0, 0.0],
        max: [1.0, 1.0, 1.0],
    };

    #[test]
    fn box_interval() {
        assert_eq!(
            UNIT.ray_interval([-1.0, 0.5, 0.5], [1.0, 0.0, 0.0]),
            Some((1.0, 2.0))
        );
        assert_eq!(UNIT.ray_interval([-1.0, 2.0, 0.5], [1.0, 0.0, 0.0]), None);
        assert_eq!(UNIT.first_hit([-1.0, 0.5, 0.5], [1.0, 0.0, 0.0]), Some(1.0));
        assert_eq!(UNIT.first_hit([2.0, 0.5, 0.5], [1.0, 0.0, 0.0]), None);
    }

    #[test]
    fn near_face_is_visible_far_face_is_not() {
        let eye = [-3.0, 0.5, 0.5];
        assert!(!UNIT.blocks(eye, [0.0, 0.5, 0.5]));
        assert!(UNIT.blocks(eye, [1.0, 0.5, 0.5]));
        assert!(UNIT.blocks(eye, [5.0, 0.5, 0.5]));
        assert!(!UNIT.blocks(eye, [5.0, 3.0, 0.5]));
        // Grazing along a face does not count as passing through.
        assert!(!UNIT.blocks([-3.0, 1.0, 0.5], [5.0, 1.0, 0.5]));
    }

    #[test]
    fn cylinder_interval() {
        let c = Shape::Cylinder {
            center: [5.0, 0.0],
            radius: 1.0,
            z_min: 0.0,
            z_max: 2.0,
        };
        let (t0, t1) = c.ray_interval([0.0, 0.0, 1.0], [1.0, 0.0, 0.0]).unwrap();
        assert!((t0 - 4.0).abs() < 1e-12 && (t1 - 6.0).abs() < 1e-12);
        assert!(c.ray_interval([0.0, 0.0, 3.0], [1.0, 0.0, 0.0]).is_none());
        // Straight down through the cap.
        let (t0, _) = c.ray_interval([5.0, 0.0, 4.0], [0.0, 0.0, -1.0]).unwrap();
        assert!((t0 - 2.0).abs() < 1e-12);
        assert!(c.blocks([0.0, 0.0, 1.0], [10.0, 0.0, 1.0]));
        assert!(!c.blocks([0.0, 0.0, 1.0], [4.0, 0.0, 1.0]));
    }

    #[test]
    fn samples_lie_on_the_surface() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let shapes = [
            UNIT,
            Shape::Cylinder {
                center: [1.0, 2.0],
                radius: 0.5,
                z_min: -1.0,
                z_max: 1.0,
            },
        ];
        for shape in shapes {
            for _ in 0..200 {
                let p = shape.sample_surface(&mut rng);
                let on_surface = match shape {
                    Shape::Box { min, max } => {
                        (0..3).all(|i| p[i] >= min[i] && p[i] <= max[i])
                            && (0..3).any(|i| p[i] == min[i] || p[i] == max[i])
                    }
                    Shape::Cylinder {
                        center,
                        radius,
                        z_min,
                        z_max,
                    } => {
                        let r = (p[0] - center[0]).hypot(p[1] - center[1]);
                        p[2] >= z_min
                            && p[2] <= z_max
                            && ((r - radius).abs() < 1e-9 || (p[2] == z_max && r <= radius))
                    }
                };
                assert!(on_surface, "{p:?}");
            }
        }
    }
}
