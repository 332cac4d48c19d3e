//! Incremental bucketed k-d tree over a subset of a point cloud.
//!
//! Only the nearest-neighbour distance is ever needed, and it must equal the
//! linear-scan value bit for bit: candidates are scored with
//! [`squared_distance`] and subtrees are pruned only when the axis gap alone
//! already reaches the best distance found, which cannot discard a strictly
//! closer point.

use crate::types::{squared_distance, PointCloud};

const BUCKET: usize = 12;

#[derive(Debug, Clone)]
enum Node {
    Leaf(Vec<u32>),
    /// Points with `coord[axis] < value` live left, the rest right.
    Split {
        axis: u8,
        value: f64,
        left: u32,
        right: u32,
    },
}

/// Nearest-neighbour index over point indices of a [`PointCloud`].
#[derive(Debug, Clone)]
pub struct SpatialIndex<'a> {
    cloud: &'a PointCloud,
    nodes: Vec<Node>,
    len: usize,
}

#[inline]
fn coord(p: [f32; 3], axis: u8) -> f64 {
    f64::from(p[axis as usize])
}

impl<'a> SpatialIndex<'a> {
    pub fn new(cloud: &'a PointCloud) -> Self {
        Self {
            cloud,
            nodes: vec![Node::Leaf(Vec::new())],
            len: 0,
        }
    }

    pub fn build(cloud: &'a PointCloud, subset: &[usize]) -> Self {
        let mut index = Self {
            cloud,
            nodes: Vec::with_capacity(2 * subset.len() / BUCKET + 1),
            len: subset.len(),
        };
        let items: Vec<u32> = subset.iter().map(|&k| k as u32).collect();
        index.nodes.push(Node::Leaf(Vec::new()));
        index.build_into(0, items);
        index
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Builds the subtree for `items` in slot `slot`.
    fn build_into(&mut self, slot: usize, mut items: Vec<u32>) {
        if items.len() <= BUCKET {
            self.nodes[slot] = Node::Leaf(items);
            return;
        }
        let Some((axis, value)) = self.choose_split(&mut items) else {
            // All points coincide; nothing to split on.
            self.nodes[slot] = Node::Leaf(items);
            return;
        };
        let (left_items, right_items): (Vec<u32>, Vec<u32>) = items
            .into_iter()
            .partition(|&k| coord(self.cloud.point(k as usize), axis) < value);
        let left = self.nodes.len();
        self.nodes.push(Node::Leaf(Vec::new()));
        let right = self.nodes.len();
        self.nodes.push(Node::Leaf(Vec::new()));
        self.nodes[slot] = Node::Split {
            axis,
            value,
            left: left as u32,
            right: right as u32,
        };
        self.build_into(left, left_items);
        self.build_into(right, right_items);
    }

    /// Splits on the widest axis at (roughly) the median, choosing a value
    /// that leaves both sides non-empty.
    fn choose_split(&self, items: &mut [u32]) -> Option<(u8, f64)> {
        let mut lo = [f64::INFINITY; 3];
        let mut hi = [f64::NEG_INFINITY; 3];
        for &k in items.iter() {
            let p = self.cloud.point(k as usize);
            for a in 0..3 {
                lo[a] = lo[a].min(f64::from(p[a]));
                hi[a] = hi[a].max(f64::from(p[a]));
            }
        }
        let axis = (0..3u8)
            .max_by(|&a, &b| {
                (hi[a as usize] - lo[a as usize]).total_cmp(&(hi[b as usize] - lo[b as usize]))
            })
            .unwrap();
        let min = lo[axis as usize];
        if hi[axis as usize] <= min {
            return None;
        }
        let mid = items.len() / 2;
        let key = |k: &u32| coord(self.cloud.point(*k as usize), axis);
        items.select_nth_unstable_by(mid, |a, b| key(a).total_cmp(&key(b)));
        let mut value = key(&items[mid]);
        if value <= min {
            // The lower half is all at `min`; split just above it.
            value = items
                .iter()
                .map(key)
                .filter(|&c| c > min)
                .fold(f64::INFINITY, f64::min);
        }
        Some((axis, value))
    }

    pub fn insert(&mut self, k: usize) {
        let p = self.cloud.point(k);
        let mut slot = 0;
        loop {
            match &mut self.nodes[slot] {
                Node::Split {
                    axis,
                    value,
                    left,
                    right,
                } => {
                    slot = if coord(p, *axis) < *value {
                        *left as usize
                    } else {
                        *right as usize
                    };
                }
                Node::Leaf(items) => {
                    items.push(k as u32);
                    if items.len() > 2 * BUCKET {
                        let items = std::mem::take(items);
                        self.build_into(slot, items);
                    }
                    break;
                }
            }
        }
        self.len += 1;
    }

    /// Nearest indexed point to `query` other than index `exclude`, as
    /// `(index, squared distance)`.
    pub fn nearest(&self, query: [f32; 3], exclude: Option<usize>) -> Option<(usize, f64)> {
        let mut best = (usize::MAX, f64::INFINITY);
        self.search(0, query, exclude.map(|e| e as u32), &mut best);
        (best.0 != usize::MAX).then_some(best)
    }

    /// Distance (not squared) from point `k` to its nearest other indexed point.
    pub fn nearest_distance_to(&self, k: usize) -> Option<f64> {
        self.nearest(self.cloud.point(k), Some(k))
            .map(|(_, d2)| d2.sqrt())
    }

    fn search(&self, slot: usize, q: [f32; 3], exclude: Option<u32>, best: &mut (usize, f64)) {
        match &self.nodes[slot] {
            Node::Leaf(items) => {
                for &k in items {
                    if Some(k) == exclude {
                        continue;
                    }
                    let d2 = squared_distance(q, self.cloud.point(k as usize));
                    if d2 < best.1 {
                        *best = (k as usize, d2);
                    }
                }
            }
            &Node::Split {
                axis,
                value,
                left,
                right,
            } => {
                let gap = coord(q, axis) - value;
                let (near, far) = if gap < 0.0 {
                    (left, right)
                } else {
                    (right, left)
                };
                self.search(near as usize, q, exclude, best);
                if gap * gap < best.1 {
                    self.search(far as usize, q, exclude, best);
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn linear_scan(
        cloud: &PointCloud,
        subset: &[usize],
        q: [f32; 3],
        exclude: Option<usize>,
    ) -> f64 {
        subset
            .iter()
            .filter(|&&k| Some(k) != exclude)
            .map(|&k| squared_distance(q, cloud.point(k)))
            .fold(f64::INFINITY, f64::min)
    }

    fn random_cloud(rng: &mut ChaCha8Rng, n: usize) -> PointCloud {
        PointCloud::new(
            (0..n)
                .map(|_| {
                    [
                        rng.gen_range(-5.0..5.0),
                        rng.gen_range(-5.0..5.0),
                        rng.gen_range(-1.0..1.0),
                    ]
                })
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn single_point_index() {
        let cloud = PointCloud::new(vec![[0.0, 0.0, 0.0], [3.0, 4.0, 0.0]]).unwrap();
        let idx = SpatialIndex::build(&cloud, &[1]);
        assert_eq!(idx.nearest([0.0, 0.0, 0.0], None), Some((1, 25.0)));
        assert_eq!(idx.nearest([3.0, 4.0, 0.0], Some(1)), None);
    }

    #[test]
    fn matches_linear_scan_on_random_queries() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let cloud = random_cloud(&mut rng, 1500);
        let subset: Vec<usize> = (0..500).collect();
        let idx = SpatialIndex::build(&cloud, &subset);
        for q in 500..1500 {
            let got = idx.nearest(cloud.point(q), None).unwrap().1;
            assert_eq!(
                got.to_bits(),
                linear_scan(&cloud, &subset, cloud.point(q), None).to_bits()
            );
        }
        for &q in &subset {
            let got = idx.nearest(cloud.point(q), Some(q)).unwrap().1;
            assert_eq!(
                got.to_bits(),
                linear_scan(&cloud, &subset, cloud.point(q), Some(q)).to_bits()
            );
        }
    }

    #[test]
    fn insertion_keeps_answers_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let cloud = random_cloud(&mut rng, 800);
        let mut idx = SpatialIndex::build(&cloud, &[0, 1, 2]);
        let mut members = vec![0, 1, 2];
        for k in 3..400 {
            idx.insert(k);
            members.push(k);
            let q = cloud.point(799 - (k % 300));
            let got = idx.nearest(q, None).unwrap().1;
            assert_eq!(
                got.to_bits(),
                linear_scan(&cloud, &members, q, None).to_bits()
            );
        }
        assert_eq!(idx.len(), 400);
    }

    #[test]
    fn inserted_point_is_found_when_nearest() {
        let cloud =
            PointCloud::new(vec![[0.0, 0.0, 0.0], [10.0, 0.0, 0.0], [9.0, 0.0, 0.0]]).unwrap();
        let mut idx = SpatialIndex::build(&cloud, &[0, 1]);
        idx.insert(2);
        assert_eq!(idx.nearest([8.5, 0.0, 0.0], None), Some((2, 0.25)));
    }

    #[test]
    fn duplicate_points_do_not_break_splitting() {
        let mut pts = vec![[1.0, 1.0, 1.0]; 100];
        pts.extend((0..50).map(|i| [i as f32, 0.0, 0.0]));
        let cloud = PointCloud::new(pts).unwrap();
        let all: Vec<usize> = (0..150).collect();
        let idx = SpatialIndex::build(&cloud, &all);
        assert_eq!(idx.nearest([1.0, 1.0, 1.0], Some(0)).unwrap().1, 0.0);
        assert_eq!(idx.nearest([20.2, 0.0, 0.0], None).unwrap().0, 120);
    }
}
