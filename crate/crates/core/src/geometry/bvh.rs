//! Bounding-volume hierarchy over mesh triangles for nearest-hit ray queries.

use super::{Aabb, Dir3, GeometryError, Point3, TriangleMesh, Vec3};

/// Hits closer than this are ignored so rays launched from a surface do not
/// report their own triangle.
pub const MIN_HIT_DISTANCE: f64 = 1e-6;

/// Relative distance under which two hits along a ray are treated as equal.
pub const TIE_DISTANCE: f64 = 1e-9;

/// Leaves hold at most this many triangles.
pub const MAX_LEAF_SIZE: usize = 4;

const DET_EPSILON: f64 = 1e-9;
// Boxes are padded so that floating-point slab tests never cull a triangle
// that the exact per-triangle test would hit.
const BOX_PAD: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RayHit {
    pub t: f64,
    pub triangle_id: usize,
    pub point: Point3,
}

#[derive(Debug, Clone)]
enum NodeKind {
    Leaf { start: u32, count: u32 },
    Inner { left: u32, right: u32 },
}

#[derive(Debug, Clone)]
struct Node {
    bounds: Aabb,
    kind: NodeKind,
}

/// Immutable BVH built by median split on the longest centroid axis.
#[derive(Debug, Clone)]
pub struct SpatialIndex {
    nodes: Vec<Node>,
    order: Vec<u32>,
    tris: Vec<[Point3; 3]>,
    normals: Vec<Vec3>,
    bounds: Aabb,
}

/// Möller–Trumbore ray/triangle test. Returns the ray parameter of the
/// intersection with the triangle's plane when it falls inside the triangle
/// (edges inclusive). Near-parallel rays (|det| < 1e-9) never hit.
pub fn intersect_triangle(origin: &Point3, dir: &Vec3, tri: &[Point3; 3]) -> Option<f64> {
    let e1 = tri[1] - tri[0];
    let e2 = tri[2] - tri[0];
    let p = dir.cross(&e2);
    let det = e1.dot(&p);
    if det.abs() < DET_EPSILON {
        return None;
    }
    let inv = 1.0 / det;
    let s = origin - tri[0];
    let u = s.dot(&p) * inv;
    if !(0.0..=1.0).contains(&u) {
        return None;
    }
    let q = s.cross(&e1);
    let v = dir.dot(&q) * inv;
    if v < 0.0 || u + v > 1.0 {
        return None;
    }
    Some(e2.dot(&q) * inv)
}

fn ray_box(origin: &Point3, inv_dir: &Vec3, b: &Aabb, t_max: f64) -> Option<f64> {
    let mut t0 = 0.0f64;
    let mut t1 = t_max;
    for i in 0..3 {
        let lo = b.min[i] - BOX_PAD;
        let hi = b.max[i] + BOX_PAD;
        if inv_dir[i].is_infinite() {
            if origin[i] < lo || origin[i] > hi {
                return None;
            }
            continue;
        }
        let mut ta = (lo - origin[i]) * inv_dir[i];
        let mut tb = (hi - origin[i]) * inv_dir[i];
        if ta > tb {
            std::mem::swap(&mut ta, &mut tb);
        }
        t0 = t0.max(ta);
        t1 = t1.min(tb);
        if t0 > t1 {
            return None;
        }
    }
    Some(t0)
}

fn closest_point_on_triangle(p: &Point3, tri: &[Point3; 3]) -> Point3 {
    // Region classification after Ericson, "Real-Time Collision Detection".
    let [a, b, c] = *tri;
    let ab = b - a;
    let ac = c - a;
    let ap = p - a;
    let d1 = ab.dot(&ap);
    let d2 = ac.dot(&ap);
    if d1 <= 0.0 && d2 <= 0.0 {
        return a;
    }
    let bp = p - b;
    let d3 = ab.dot(&bp);
    let d4 = ac.dot(&bp);
    if d3 >= 0.0 && d4 <= d3 {
        return b;
    }
    let vc = d1 * d4 - d3 * d2;
    if vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0 {
        let v = d1 / (d1 - d3);
        return a + ab * v;
    }
    let cp = p - c;
    let d5 = ab.dot(&cp);
    let d6 = ac.dot(&cp);
    if d6 >= 0.0 && d5 <= d6 {
        return c;
    }
    let vb = d5 * d2 - d1 * d6;
    if vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0 {
        let w = d2 / (d2 - d6);
        return a + ac * w;
    }
    let va = d3 * d6 - d5 * d4;
    if va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0 {
        let w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
        return b + (c - b) * w;
    }
    let denom = 1.0 / (va + vb + vc);
    let v = vb * denom;
    let w = vc * denom;
    a + ab * v + ac * w
}

impl SpatialIndex {
    pub fn build(mesh: &TriangleMesh) -> Result<Self, GeometryError> {
        if mesh.is_empty() {
            return Err(GeometryError::EmptyMesh);
        }
        let tris: Vec<[Point3; 3]> = (0..mesh.triangle_count())
            .map(|t| mesh.triangle_points(t))
            .collect();
        let centroids: Vec<Point3> = tris
            .iter()
            .map(|t| Point3::from((t[0].coords + t[1].coords + t[2].coords) / 3.0))
            .collect();
        let mut order: Vec<u32> = (0..tris.len() as u32).collect();
        let mut nodes = Vec::with_capacity(2 * tris.len() / MAX_LEAF_SIZE + 1);
        build_node(&tris, &centroids, &mut order, 0, &mut nodes);
        let bounds = nodes[0].bounds;
        Ok(SpatialIndex {
            nodes,
            order,
            tris,
            normals: mesh.normals().to_vec(),
            bounds,
        })
    }

    pub fn bounds(&self) -> Aabb {
        self.bounds
    }

    pub fn triangle_count(&self) -> usize {
        self.tris.len()
    }

    pub fn triangle(&self, id: usize) -> &[Point3; 3] {
        &self.tris[id]
    }

    pub fn normal(&self, id: usize) -> Vec3 {
        self.normals[id]
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// Triangle id lists of every leaf, in depth-first order.
    pub fn leaves(&self) -> Vec<Vec<usize>> {
        self.nodes
            .iter()
            .filter_map(|n| match n.kind {
                NodeKind::Leaf { start, count } => Some(
                    self.order[start as usize..(start + count) as usize]
                        .iter()
                        .map(|&i| i as usize)
                        .collect(),
                ),
                NodeKind::Inner { .. } => None,
            })
            .collect()
    }

    /// Checks that every node box contains its descendants' triangles.
    pub fn check_bounds(&self) -> bool {
        fn walk(idx: &SpatialIndex, node: usize) -> Option<Vec<usize>> {
            let n = &idx.nodes[node];
            let tris: Vec<usize> = match n.kind {
                NodeKind::Leaf { start, count } => idx.order
                    [start as usize..(start + count) as usize]
                    .iter()
                    .map(|&i| i as usize)
                    .collect(),
                NodeKind::Inner { left, right } => {
                    let mut l = walk(idx, left as usize)?;
                    l.extend(walk(idx, right as usize)?);
                    l
                }
            };
            tris.iter()
                .all(|&t| idx.tris[t].iter().all(|p| n.bounds.contains(p)))
                .then_some(tris)
        }
        walk(self, 0).is_some()
    }

    /// Nearest intersection with `t` in `(MIN_HIT_DISTANCE, t_max]`.
    ///
    /// Hits closer together than [`TIE_DISTANCE`] (relative) count as one
    /// distance. Among those a face turned toward the origin wins over one
    /// turned away, so coincident opposite faces of thin double-sided walls
    /// read as the side the ray arrives from. Remaining ties go to the lowest
    /// triangle id.
    pub fn ray_cast(&self, origin: &Point3, dir: &Dir3, t_max: f64) -> Option<RayHit> {
        let d = dir.into_inner();
        let inv = Vec3::new(1.0 / d.x, 1.0 / d.y, 1.0 / d.z);
        let mut best: Option<(f64, usize)> = None;
        let facing = |tri: usize| self.normals[tri].dot(&d) < 0.0;
        let mut stack: Vec<(u32, f64)> = Vec::with_capacity(64);
        if let Some(t) = ray_box(origin, &inv, &self.nodes[0].bounds, t_max) {
            stack.push((0, t));
        }
        while let Some((ni, t_enter)) = stack.pop() {
            let limit = best.map_or(t_max, |(bt, _)| (bt + TIE_DISTANCE * bt.max(1.0)).min(t_max));
            if t_enter > limit {
                continue;
            }
            match self.nodes[ni as usize].kind {
                NodeKind::Leaf { start, count } => {
                    for &tri in &self.order[start as usize..(start + count) as usize] {
                        let tri = tri as usize;
                        if let Some(t) = intersect_triangle(origin, &d, &self.tris[tri]) {
                            if t > MIN_HIT_DISTANCE && t <= limit {
                                let better = match best {
                                    None => true,
                                    Some((bt, bid)) => {
                                        if (t - bt).abs() <= TIE_DISTANCE * bt.max(1.0) {
                                            (facing(tri), std::cmp::Reverse(tri)) > (facing(bid), std::cmp::Reverse(bid))
                                        } else {
                                            t < bt
                                        }
                                    }
                                };
                                if better {
                                    best = Some((t, tri));
                                }
                            }
                        }
                    }
                }
                NodeKind::Inner { left, right } => {
                    let tl = ray_box(origin, &inv, &self.nodes[left as usize].bounds, limit);
                    let tr = ray_box(origin, &inv, &self.nodes[right as usize].bounds, limit);
                    match (tl, tr) {
                        (Some(a), Some(b)) => {
                            // Nearer child popped first.
                            if a <= b {
                                stack.push((right, b));
                                stack.push((left, a));
                            } else {
                                stack.push((left, a));
                                stack.push((right, b));
                            }
                        }
                        (Some(a), None) => stack.push((left, a)),
                        (None, Some(b)) => stack.push((right, b)),
                        (None, None) => {}
                    }
                }
            }
        }
        best.map(|(t, triangle_id)| RayHit {
            t,
            triangle_id,
            point: origin + d * t,
        })
    }

    /// Distance from `p` to the closest point on any triangle, or `None` if
    /// nothing lies within `max_distance`.
    pub fn distance_to_surface(&self, p: &Point3, max_distance: f64) -> Option<f64> {
        let mut best2 = max_distance * max_distance;
        let mut found = false;
        let mut stack = vec![0u32];
        while let Some(ni) = stack.pop() {
            let node = &self.nodes[ni as usize];
            if node.bounds.distance_squared(p) > best2 {
                continue;
            }
            match node.kind {
                NodeKind::Leaf { start, count } => {
                    for &tri in &self.order[start as usize..(start + count) as usize] {
                        let q = closest_point_on_triangle(p, &self.tris[tri as usize]);
                        let d2 = (q - p).norm_squared();
                        if d2 <= best2 {
                            best2 = d2;
                            found = true;
                        }
                    }
                }
                NodeKind::Inner { left, right } => {
                    stack.push(right);
                    stack.push(left);
                }
            }
        }
        found.then(|| best2.sqrt())
    }
}

fn build_node(
    tris: &[[Point3; 3]],
    centroids: &[Point3],
    order: &mut [u32],
    offset: usize,
    nodes: &mut Vec<Node>,
) -> u32 {
    let bounds = order.iter().fold(Aabb::empty(), |b, &t| {
        let tb = Aabb::from_points(&tris[t as usize]);
        b.merge(&tb)
    });
    let me = nodes.len() as u32;
    if order.len() <= MAX_LEAF_SIZE {
        nodes.push(Node {
            bounds,
            kind: NodeKind::Leaf {
                start: offset as u32,
                count: order.len() as u32,
            },
        });
        return me;
    }
    let cb = Aabb::from_points(order.iter().map(|&t| &centroids[t as usize]));
    let axis = cb.longest_axis();
    order.sort_unstable_by(|&a, &b| {
        centroids[a as usize][axis]
            .total_cmp(&centroids[b as usize][axis])
            .then(a.cmp(&b))
    });
    let mid = order.len() / 2;
    nodes.push(Node {
        bounds,
        kind: NodeKind::Inner { left: 0, right: 0 },
    });
    let (lo, hi) = order.split_at_mut(mid);
    let left = build_node(tris, centroids, lo, offset, nodes);
    let right = build_node(tris, centroids, hi, offset + mid, nodes);
    nodes[me as usize].kind = NodeKind::Inner { left, right };
    me
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::direction;

    fn unit_triangle(z: f64) -> TriangleMesh {
        TriangleMesh::new(
            vec![
                Point3::new(-1.0, -1.0, z),
                Point3::new(2.0, -1.0, z),
                Point3::new(-1.0, 2.0, z),
            ],
            vec![[0, 1, 2]],
        )
        .unwrap()
    }

    #[test]
    fn single_triangle_is_one_leaf() {
        let idx = SpatialIndex::build(&unit_triangle(0.0)).unwrap();
        assert_eq!(idx.leaves(), vec![vec![0]]);
    }

    #[test]
    fn empty_mesh_rejected() {
        assert_eq!(
            SpatialIndex::build(&TriangleMesh::empty()).unwrap_err(),
            GeometryError::EmptyMesh
        );
    }

    #[test]
    fn root_spans_disjoint_triangles() {
        let tri = |x: f64| {
            vec![
                Point3::new(x, 0.0, 0.0),
                Point3::new(x, 1.0, 0.0),
                Point3::new(x, 0.0, 1.0),
            ]
        };
        let mut v = tri(0.0);
        v.extend(tri(100.0));
        let m = TriangleMesh::new(v, vec![[0, 1, 2], [3, 4, 5]]).unwrap();
        let idx = SpatialIndex::build(&m).unwrap();
        assert_eq!(idx.bounds().min.x, 0.0);
        assert_eq!(idx.bounds().max.x, 100.0);
    }

    #[test]
    fn axis_aligned_hit() {
        let idx = SpatialIndex::build(&unit_triangle(0.0)).unwrap();
        let down = direction(-Vec3::z()).unwrap();
        let hit = idx.ray_cast(&Point3::new(0.0, 0.0, 1.0), &down, 10.0).unwrap();
        assert!((hit.t - 1.0).abs() < 1e-9);
        assert_eq!(hit.triangle_id, 0);
        assert!((hit.point - Point3::origin()).norm() < 1e-9);
    }

    #[test]
    fn parallel_ray_misses() {
        let idx = SpatialIndex::build(&unit_triangle(0.0)).unwrap();
        let along = direction(Vec3::x()).unwrap();
        assert!(idx.ray_cast(&Point3::new(-5.0, 0.0, 0.5), &along, 100.0).is_none());
    }

    #[test]
    fn stacked_triangles_nearest_wins() {
        let mut m = unit_triangle(-1.0);
        m.append(&unit_triangle(0.0));
        let idx = SpatialIndex::build(&m).unwrap();
        let down = direction(-Vec3::z()).unwrap();
        let hit = idx.ray_cast(&Point3::new(0.0, 0.0, 1.0), &down, 10.0).unwrap();
        assert_eq!(hit.triangle_id, 1);
        assert!((hit.t - 1.0).abs() < 1e-9);
    }

    #[test]
    fn t_max_is_inclusive_and_self_hits_ignored() {
        let idx = SpatialIndex::build(&unit_triangle(0.0)).unwrap();
        let down = direction(-Vec3::z()).unwrap();
        assert!(idx.ray_cast(&Point3::new(0.0, 0.0, 1.0), &down, 1.0).is_some());
        assert!(idx.ray_cast(&Point3::new(0.0, 0.0, 1.0), &down, 0.999).is_none());
        assert!(idx.ray_cast(&Point3::origin(), &down, 1.0).is_none());
    }

    #[test]
    fn duplicate_triangles_tie_to_lowest_id() {
        let mut m = unit_triangle(0.0);
        m.append(&unit_triangle(0.0));
        let idx = SpatialIndex::build(&m).unwrap();
        let down = direction(-Vec3::z()).unwrap();
        let hit = idx.ray_cast(&Point3::new(0.0, 0.0, 1.0), &down, 10.0).unwrap();
        assert_eq!(hit.triangle_id, 0);
    }

    #[test]
    fn coincident_opposite_faces_resolve_toward_the_ray() {
        let mut m = unit_triangle(0.0);
        m.append(&unit_triangle(0.0).flipped());
        let idx = SpatialIndex::build(&m).unwrap();
        let down = direction(-Vec3::z()).unwrap();
        let up = direction(Vec3::z()).unwrap();
        let from_above = idx.ray_cast(&Point3::new(0.0, 0.0, 1.0), &down, 10.0).unwrap();
        let from_below = idx.ray_cast(&Point3::new(0.0, 0.0, -1.0), &up, 10.0).unwrap();
        assert_eq!(from_above.triangle_id, 0);
        assert_eq!(from_below.triangle_id, 1);
    }

    #[test]
    fn surface_distance() {
        let idx = SpatialIndex::build(&unit_triangle(0.0)).unwrap();
        let d = idx.distance_to_surface(&Point3::new(0.0, 0.0, 2.5), 10.0).unwrap();
        assert!((d - 2.5).abs() < 1e-12);
        assert!(idx.distance_to_surface(&Point3::new(0.0, 0.0, 2.5), 1.0).is_none());
        // beyond vertex (-1,-1,0)
        let d = idx.distance_to_surface(&Point3::new(-4.0, -5.0, 0.0), 10.0).unwrap();
        assert!((d - 5.0).abs() < 1e-12);
    }
}
