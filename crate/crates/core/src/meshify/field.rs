use super::MeshifyError;
use crate::geometry::{Aabb, PointCloud, PointIndex, Point3, Vec3};
use rayon::prelude::*;

pub const DEFAULT_MAX_NODES: u64 = 64_000_000;

/// Scalar field sampled at the nodes of a regular grid. Negative is inside,
/// positive outside; `known` marks nodes within the truncation band of data.
#[derive(Debug, Clone, PartialEq)]
pub struct VoxelGrid {
    pub origin: Point3,
    pub voxel_size: f64,
    /// Cell counts per axis; node counts are one larger.
    pub dims: [usize; 3],
    pub truncation: f64,
    pub values: Vec<f64>,
    pub known: Vec<bool>,
}

impl VoxelGrid {
    /// A grid with every node unknown at `+truncation`.
    pub fn new(origin: Point3, voxel_size: f64, dims: [usize; 3], truncation: f64) -> Self {
        let n = (dims[0] + 1) * (dims[1] + 1) * (dims[2] + 1);
        VoxelGrid {
            origin,
            voxel_size,
            dims,
            truncation,
            values: vec![truncation; n],
            known: vec![false; n],
        }
    }

    /// Fills every node from `f` and marks it known.
    pub fn from_fn(
        origin: Point3,
        voxel_size: f64,
        dims: [usize; 3],
        truncation: f64,
        f: impl Fn(&Point3) -> f64,
    ) -> Self {
        let mut g = VoxelGrid::new(origin, voxel_size, dims, truncation);
        for idx in 0..g.values.len() {
            let p = g.node_position_linear(idx);
            g.values[idx] = f(&p).clamp(-truncation, truncation);
            g.known[idx] = true;
        }
        g
    }

    pub fn node_dims(&self) -> [usize; 3] {
        [self.dims[0] + 1, self.dims[1] + 1, self.dims[2] + 1]
    }

    pub fn node_count(&self) -> usize {
        self.values.len()
    }

    #[inline]
    pub fn node_index(&self, i: usize, j: usize, k: usize) -> usize {
        let [nx, ny, _] = self.node_dims();
        i + nx * (j + ny * k)
    }

    pub fn node_position(&self, i: usize, j: usize, k: usize) -> Point3 {
        self.origin + Vec3::new(i as f64, j as f64, k as f64) * self.voxel_size
    }

    pub fn node_position_linear(&self, idx: usize) -> Point3 {
        let [nx, ny, _] = self.node_dims();
        self.node_position(idx % nx, (idx / nx) % ny, idx / (nx * ny))
    }

    pub fn bounds(&self) -> Aabb {
        Aabb {
            min: self.origin,
            max: self.node_position(self.dims[0], self.dims[1], self.dims[2]),
        }
    }

    /// Trilinear interpolation of the field at `p` (clamped to the grid).
    pub fn sample(&self, p: &Point3) -> f64 {
        let g = (p - self.origin) / self.voxel_size;
        let mut base = [0usize; 3];
        let mut frac = [0.0; 3];
        for a in 0..3 {
            let c = g[a].clamp(0.0, self.dims[a] as f64);
            let b = (c.floor() as usize).min(self.dims[a] - 1);
            base[a] = b;
            frac[a] = c - b as f64;
        }
        let mut acc = 0.0;
        for corner in 0..8 {
            let (di, dj, dk) = (corner & 1, (corner >> 1) & 1, (corner >> 2) & 1);
            let w = (if di == 1 { frac[0] } else { 1.0 - frac[0] })
                * (if dj == 1 { frac[1] } else { 1.0 - frac[1] })
                * (if dk == 1 { frac[2] } else { 1.0 - frac[2] });
            acc += w * self.values[self.node_index(base[0] + di, base[1] + dj, base[2] + dk)];
        }
        acc
    }
}

/// Point-to-tangent-plane truncated signed distance field.
///
/// Every node within `truncation` of its nearest cloud point `p` stores
/// `clamp(dot(node - p, n_p), -truncation, truncation)`; all other nodes are
/// unknown at `+truncation`. The grid is aligned to multiples of
/// `voxel_size` and padded so the outermost node layer is always unknown.
pub fn build_signed_field(
    cloud: &PointCloud,
    voxel_size: f64,
    truncation: f64,
    max_nodes: u64,
) -> Result<VoxelGrid, MeshifyError> {
    if cloud.is_empty() {
        return Err(MeshifyError::EmptyCloud);
    }
    let normals = cloud.normals().ok_or(MeshifyError::MissingNormals)?;
    if !(voxel_size > 0.0) {
        return Err(MeshifyError::InvalidParameter(format!(
            "voxel_size must be positive, got {voxel_size}"
        )));
    }
    if !(truncation >= 2.0 * voxel_size) {
        return Err(MeshifyError::InvalidParameter(format!(
            "truncation {truncation} must be at least twice voxel_size {voxel_size}"
        )));
    }
    let bounds = Aabb::from_points(cloud.points());
    let pad = (truncation / voxel_size).ceil() as i64 + 2;
    let lo: Vec<i64> = (0..3)
        .map(|a| (bounds.min[a] / voxel_size).floor() as i64 - pad)
        .collect();
    let hi: Vec<i64> = (0..3)
        .map(|a| (bounds.max[a] / voxel_size).ceil() as i64 + pad)
        .collect();
    let dims = [
        (hi[0] - lo[0]) as usize,
        (hi[1] - lo[1]) as usize,
        (hi[2] - lo[2]) as usize,
    ];
    let nodes = (dims[0] as u64 + 1) * (dims[1] as u64 + 1) * (dims[2] as u64 + 1);
    if nodes > max_nodes {
        return Err(MeshifyError::GridTooLarge {
            nodes,
            cap: max_nodes,
        });
    }
    let origin = Point3::new(
        lo[0] as f64 * voxel_size,
        lo[1] as f64 * voxel_size,
        lo[2] as f64 * voxel_size,
    );
    let mut grid = VoxelGrid::new(origin, voxel_size, dims, truncation);
    let index = PointIndex::new(cloud.points()).map_err(|_| MeshifyError::EmptyCloud)?;
    let points = cloud.points();
    let [nx, ny, _] = grid.node_dims();
    let slab = nx * ny;

    let g = &grid;
    let filled: Vec<(f64, bool)> = (0..grid.node_count())
        .into_par_iter()
        .with_min_len(slab)
        .map(|idx| {
            let node = g.node_position_linear(idx);
            match index.nearest_within(&node, truncation) {
                Some((pi, _)) => {
                    let v = normals[pi].dot(&(node - points[pi]));
                    (v.clamp(-truncation, truncation), true)
                }
                None => (truncation, false),
            }
        })
        .collect();
    for (idx, (v, k)) in filled.into_iter().enumerate() {
        grid.values[idx] = v;
        grid.known[idx] = k;
    }
    Ok(grid)
}
