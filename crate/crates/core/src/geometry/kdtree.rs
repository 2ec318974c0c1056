//! Implicit kd-tree for k-nearest-neighbour and radius queries.

use super::{GeometryError, PointCloud, Point3};
use std::cmp::Ordering;
use std::collections::BinaryHeap;

/// Balanced kd-tree over a fixed point set. Results are ordered by distance
/// with ties resolved to the lowest point index, matching an exhaustive scan.
#[derive(Debug, Clone)]
pub struct PointIndex {
    points: Vec<Point3>,
    // perm[mid] is the splitting point of the subtree occupying [lo, hi).
    perm: Vec<u32>,
    axis: Vec<u8>,
}

#[derive(PartialEq)]
struct Candidate {
    d2: f64,
    idx: u32,
}

impl Eq for Candidate {}

impl Ord for Candidate {
    fn cmp(&self, other: &Self) -> Ordering {
        self.d2.total_cmp(&other.d2).then(self.idx.cmp(&other.idx))
    }
}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl PointIndex {
    pub fn new(points: &[Point3]) -> Result<Self, GeometryError> {
        if points.is_empty() {
            return Err(GeometryError::EmptyCloud);
        }
        let mut perm: Vec<u32> = (0..points.len() as u32).collect();
        let mut axis = vec![0u8; points.len()];
        build(points, &mut perm, &mut axis);
        Ok(PointIndex {
            points: points.to_vec(),
            perm,
            axis,
        })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Point3] {
        &self.points
    }

    /// The `k` nearest points as `(index, distance)`, ascending.
    pub fn knn(&self, query: &Point3, k: usize) -> Vec<(usize, f64)> {
        let k = k.min(self.points.len());
        if k == 0 {
            return Vec::new();
        }
        let mut heap = BinaryHeap::with_capacity(k + 1);
        self.knn_rec(query, k, 0, self.points.len(), &mut heap);
        heap.into_sorted_vec()
            .into_iter()
            .map(|c| (c.idx as usize, c.d2.sqrt()))
            .collect()
    }

    pub fn nearest(&self, query: &Point3) -> (usize, f64) {
        self.nearest_within(query, f64::INFINITY)
            .expect("index is non-empty")
    }

    /// Closest point no farther than `max_distance`, or `None`.
    pub fn nearest_within(&self, query: &Point3, max_distance: f64) -> Option<(usize, f64)> {
        let mut best = (max_distance * max_distance, u32::MAX);
        self.nearest_rec(query, 0, self.points.len(), &mut best);
        (best.1 != u32::MAX).then(|| (best.1 as usize, best.0.sqrt()))
    }

    fn nearest_rec(&self, q: &Point3, lo: usize, hi: usize, best: &mut (f64, u32)) {
        if lo >= hi {
            return;
        }
        let mid = (lo + hi) / 2;
        let pi = self.perm[mid];
        let p = &self.points[pi as usize];
        let d2 = (p - q).norm_squared();
        if d2 < best.0 || (d2 == best.0 && pi < best.1) {
            *best = (d2, pi);
        }
        let ax = self.axis[mid] as usize;
        let diff = q[ax] - p[ax];
        let (near, far) = if diff < 0.0 {
            ((lo, mid), (mid + 1, hi))
        } else {
            ((mid + 1, hi), (lo, mid))
        };
        self.nearest_rec(q, near.0, near.1, best);
        if diff * diff <= best.0 {
            self.nearest_rec(q, far.0, far.1, best);
        }
    }

    fn knn_rec(
        &self,
        q: &Point3,
        k: usize,
        lo: usize,
        hi: usize,
        heap: &mut BinaryHeap<Candidate>,
    ) {
        if lo >= hi {
            return;
        }
        let mid = (lo + hi) / 2;
        let pi = self.perm[mid];
        let p = &self.points[pi as usize];
        let cand = Candidate {
            d2: (p - q).norm_squared(),
            idx: pi,
        };
        if heap.len() < k {
            heap.push(cand);
        } else if cand < *heap.peek().unwrap() {
            heap.pop();
            heap.push(cand);
        }
        let ax = self.axis[mid] as usize;
        let diff = q[ax] - p[ax];
        let (near, far) = if diff < 0.0 {
            ((lo, mid), (mid + 1, hi))
        } else {
            ((mid + 1, hi), (lo, mid))
        };
        self.knn_rec(q, k, near.0, near.1, heap);
        // Equal plane distance still descends so index ties resolve correctly.
        if heap.len() < k || diff * diff <= heap.peek().unwrap().d2 {
            self.knn_rec(q, k, far.0, far.1, heap);
        }
    }

    /// Number of points within `radius` (inclusive) of `query`.
    pub fn count_within(&self, query: &Point3, radius: f64) -> usize {
        let mut n = 0;
        self.radius_rec(query, radius * radius, 0, self.points.len(), &mut |_| n += 1);
        n
    }

    /// Indices of points within `radius` (inclusive), ascending.
    pub fn within(&self, query: &Point3, radius: f64) -> Vec<usize> {
        let mut out = Vec::new();
        self.radius_rec(query, radius * radius, 0, self.points.len(), &mut |i| {
            out.push(i)
        });
        out.sort_unstable();
        out
    }

    fn radius_rec(&self, q: &Point3, r2: f64, lo: usize, hi: usize, f: &mut impl FnMut(usize)) {
        if lo >= hi {
            return;
        }
        let mid = (lo + hi) / 2;
        let pi = self.perm[mid] as usize;
        let p = &self.points[pi];
        if (p - q).norm_squared() <= r2 {
            f(pi);
        }
        let ax = self.axis[mid] as usize;
        let diff = q[ax] - p[ax];
        if diff <= 0.0 || diff * diff <= r2 {
            self.radius_rec(q, r2, lo, mid, f);
        }
        if diff >= 0.0 || diff * diff <= r2 {
            self.radius_rec(q, r2, mid + 1, hi, f);
        }
    }
}

fn build(points: &[Point3], perm: &mut [u32], axis: &mut [u8]) {
    if perm.len() <= 1 {
        if let Some(a) = axis.first_mut() {
            *a = 0;
        }
        return;
    }
    // Split on the axis of largest spread.
    let mut lo = [f64::INFINITY; 3];
    let mut hi = [f64::NEG_INFINITY; 3];
    for &i in perm.iter() {
        let p = &points[i as usize];
        for a in 0..3 {
            lo[a] = lo[a].min(p[a]);
            hi[a] = hi[a].max(p[a]);
        }
    }
    let ax = (0..3)
        .max_by(|&a, &b| (hi[a] - lo[a]).total_cmp(&(hi[b] - lo[b])).then(b.cmp(&a)))
        .unwrap();
    let mid = perm.len() / 2;
    perm.select_nth_unstable_by(mid, |&a, &b| {
        points[a as usize][ax]
            .total_cmp(&points[b as usize][ax])
            .then(a.cmp(&b))
    });
    axis[mid] = ax as u8;
    let (pl, pr) = perm.split_at_mut(mid);
    let (al, ar) = axis.split_at_mut(mid);
    build(points, pl, al);
    build(points, &mut pr[1..], &mut ar[1..]);
}

/// One-off k-nearest query against a cloud. Build a [`PointIndex`] instead
/// when issuing many queries.
pub fn nearest_points(
    cloud: &PointCloud,
    query: &Point3,
    k: usize,
) -> Result<Vec<(usize, f64)>, GeometryError> {
    Ok(PointIndex::new(cloud.points())?.knn(query, k))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_point() {
        let c = PointCloud::new(vec![Point3::origin()]).unwrap();
        assert_eq!(
            nearest_points(&c, &Point3::new(1.0, 0.0, 0.0), 1).unwrap(),
            vec![(0, 1.0)]
        );
    }

    #[test]
    fn two_points_sorted() {
        let c = PointCloud::new(vec![Point3::origin(), Point3::new(2.0, 0.0, 0.0)]).unwrap();
        let r = nearest_points(&c, &Point3::new(0.9, 0.0, 0.0), 2).unwrap();
        assert_eq!(r[0].0, 0);
        assert!((r[0].1 - 0.9).abs() < 1e-12);
        assert_eq!(r[1].0, 1);
        assert!((r[1].1 - 1.1).abs() < 1e-12);
    }

    #[test]
    fn ties_prefer_low_index() {
        let pts = vec![
            Point3::new(1.0, 0.0, 0.0),
            Point3::new(-1.0, 0.0, 0.0),
            Point3::new(0.0, 1.0, 0.0),
            Point3::new(0.0, -1.0, 0.0),
        ];
        let idx = PointIndex::new(&pts).unwrap();
        let r = idx.knn(&Point3::origin(), 2);
        assert_eq!(r.iter().map(|x| x.0).collect::<Vec<_>>(), vec![0, 1]);
    }

    #[test]
    fn empty_rejected() {
        assert_eq!(
            PointIndex::new(&[]).unwrap_err(),
            GeometryError::EmptyCloud
        );
    }

    #[test]
    fn radius_count() {
        let pts: Vec<Point3> = (0..10).map(|i| Point3::new(i as f64, 0.0, 0.0)).collect();
        let idx = PointIndex::new(&pts).unwrap();
        assert_eq!(idx.count_within(&Point3::new(4.0, 0.0, 0.0), 2.0), 5);
        assert_eq!(idx.within(&Point3::new(0.0, 0.0, 0.0), 1.0), vec![0, 1]);
    }
}
