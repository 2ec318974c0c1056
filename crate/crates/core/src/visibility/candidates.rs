use super::{AgentClass, VisibilityError, Viewpoint};
use crate::geometry::{direction, Point3, SpatialIndex, Vec3};
use serde::{Deserialize, Serialize};
use std::collections::VecDeque;

/// Triangles whose normal is within 30° of +z count as ground.
pub const GROUND_COS: f64 = 0.866_025_403_784_438_6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroundParams {
    pub grid_spacing: f64,
    pub mount_height: f64,
    pub clearance_radius: f64,
    /// Largest height change between neighbouring grid cells that still
    /// counts as the same walkable surface.
    pub max_step: f64,
}

impl Default for GroundParams {
    fn default() -> Self {
        GroundParams {
            grid_spacing: 2.0,
            mount_height: 1.5,
            clearance_radius: 0.4,
            max_step: 0.5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AerialParams {
    pub lattice_spacing: f64,
    pub standoff: f64,
    pub min_altitude: f64,
    pub max_altitude: f64,
}

impl Default for AerialParams {
    fn default() -> Self {
        AerialParams {
            lattice_spacing: 4.0,
            standoff: 2.0,
            min_altitude: 2.0,
            max_altitude: 30.0,
        }
    }
}

const AXES: [[f64; 3]; 6] = [
    [1.0, 0.0, 0.0],
    [-1.0, 0.0, 0.0],
    [0.0, 1.0, 0.0],
    [0.0, -1.0, 0.0],
    [0.0, 0.0, 1.0],
    [0.0, 0.0, -1.0],
];

/// Evenly spaced coordinates covering `[lo, hi]`, centred in the interval.
pub(crate) fn grid_axis(lo: f64, hi: f64, spacing: f64) -> Vec<f64> {
    let extent = (hi - lo).max(0.0);
    let n = (extent / spacing + 1e-9).floor() as usize + 1;
    let start = lo + (extent - (n - 1) as f64 * spacing) / 2.0;
    (0..n).map(|i| start + i as f64 * spacing).collect()
}

/// Probes the six axis directions from `p`. Fails if any probe meets geometry
/// within `clearance`, or if the first surface met is seen from behind
/// (the point is enclosed by a solid).
pub(crate) fn has_clearance(index: &SpatialIndex, p: &Point3, clearance: f64) -> bool {
    let far = index.bounds().extent().norm() * 2.0 + clearance + 1.0;
    AXES.iter().all(|a| {
        let d = direction(Vec3::new(a[0], a[1], a[2])).unwrap();
        match index.ray_cast(p, &d, far) {
            None => true,
            Some(hit) => hit.t > clearance && index.normal(hit.triangle_id).dot(&d) <= 0.0,
        }
    })
}

/// Ground scanner positions on a horizontal grid.
///
/// For each grid node a ray walks down from above the scene; the first
/// up-facing surface whose mounted position passes the clearance probes
/// becomes that cell's ground. Cells are then flood-filled from the lowest
/// ground cell, keeping only those connected through neighbour steps of at
/// most `max_step`, which discards roofs and tabletops. Ids follow row-major
/// grid order (x fastest).
pub fn generate_ground_candidates(
    index: &SpatialIndex,
    params: &GroundParams,
) -> Result<Vec<Viewpoint>, VisibilityError> {
    if !(params.grid_spacing > 0.0) || !(params.mount_height > 0.0) || !(params.clearance_radius >= 0.0) {
        return Err(VisibilityError::InvalidParameter(format!("{params:?}")));
    }
    let b = index.bounds();
    let xs = grid_axis(b.min.x, b.max.x, params.grid_spacing);
    let ys = grid_axis(b.min.y, b.max.y, params.grid_spacing);
    let top = b.max.z + 1.0;
    let depth = b.extent().z + 2.0;
    let down = direction(-Vec3::z()).unwrap();

    let mut any_ground = false;
    // Per cell: ground height of the accepted candidate.
    let mut cells: Vec<Option<f64>> = Vec::with_capacity(xs.len() * ys.len());
    for &y in &ys {
        for &x in &xs {
            let mut origin = Point3::new(x, y, top);
            let mut remaining = depth;
            let mut found = None;
            while let Some(hit) = index.ray_cast(&origin, &down, remaining) {
                if index.normal(hit.triangle_id).z > GROUND_COS {
                    any_ground = true;
                    let pos = hit.point + Vec3::z() * params.mount_height;
                    if has_clearance(index, &pos, params.clearance_radius) {
                        found = Some(hit.point.z);
                        break;
                    }
                }
                remaining -= hit.t;
                origin = hit.point;
            }
            cells.push(found);
        }
    }
    if !any_ground {
        return Err(VisibilityError::NoGroundFound);
    }

    let nx = xs.len();
    let mut keep = vec![false; cells.len()];
    let seed = cells
        .iter()
        .enumerate()
        .filter_map(|(i, c)| c.map(|z| (i, z)))
        .min_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
    if let Some((s, _)) = seed {
        let mut queue = VecDeque::from([s]);
        keep[s] = true;
        while let Some(c) = queue.pop_front() {
            let (i, j) = (c % nx, c / nx);
            let z = cells[c].unwrap();
            let mut nbrs = Vec::with_capacity(4);
            if i > 0 {
                nbrs.push(c - 1);
            }
            if i + 1 < nx {
                nbrs.push(c + 1);
            }
            if j > 0 {
                nbrs.push(c - nx);
            }
            if j + 1 < ys.len() {
                nbrs.push(c + nx);
            }
            for n in nbrs {
                if let Some(zn) = cells[n] {
                    if !keep[n] && (zn - z).abs() <= params.max_step {
                        keep[n] = true;
                        queue.push_back(n);
                    }
                }
            }
        }
    }

    Ok(cells
        .iter()
        .enumerate()
        .filter(|(c, _)| keep[*c])
        .enumerate()
        .map(|(id, (c, z))| {
            let pos = Point3::new(xs[c % nx], ys[c / nx], z.unwrap() + params.mount_height);
            Viewpoint::new(id, pos, AgentClass::Ground)
        })
        .collect())
}

/// Height of `p` above the first surface straight below it, or above the
/// scene floor when nothing is below.
fn altitude(index: &SpatialIndex, p: &Point3) -> f64 {
    let down = direction(-Vec3::z()).unwrap();
    let depth = p.z - index.bounds().min.z + 1.0;
    if depth <= 0.0 {
        return p.z - index.bounds().min.z;
    }
    match index.ray_cast(p, &down, depth) {
        Some(hit) => hit.t,
        None => p.z - index.bounds().min.z,
    }
}

/// Aerial positions on a 3D lattice over the scene bounds inflated by the
/// standoff distance. A node survives when no surface lies within `standoff`,
/// its probes find free space, and its altitude is inside the band. Ids
/// follow lattice order (x fastest, then y, then z).
pub fn generate_aerial_candidates(
    index: &SpatialIndex,
    params: &AerialParams,
) -> Result<Vec<Viewpoint>, VisibilityError> {
    if !(params.lattice_spacing > 0.0)
        || !(params.standoff > 0.0)
        || !(params.min_altitude < params.max_altitude)
    {
        return Err(VisibilityError::InvalidParameter(format!("{params:?}")));
    }
    let b = index.bounds().inflated(params.standoff);
    let xs = grid_axis(b.min.x, b.max.x, params.lattice_spacing);
    let ys = grid_axis(b.min.y, b.max.y, params.lattice_spacing);
    let zs = grid_axis(b.min.z, b.max.z, params.lattice_spacing);
    let mut out = Vec::new();
    for &z in &zs {
        for &y in &ys {
            for &x in &xs {
                let p = Point3::new(x, y, z);
                let alt = altitude(index, &p);
                if alt < params.min_altitude || alt > params.max_altitude {
                    continue;
                }
                if index.distance_to_surface(&p, params.standoff).is_some() {
                    continue;
                }
                if !has_clearance(index, &p, params.standoff) {
                    continue;
                }
                out.push(Viewpoint::new(out.len(), p, AgentClass::Aerial));
            }
        }
    }
    Ok(out)
}
