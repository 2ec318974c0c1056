use super::VisibilityError;
use crate::geometry::{Point3, TriangleMesh, Vec3};
use serde::{Deserialize, Serialize};

/// An area-weighted point on the mesh surface; the unit of coverage.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SurfaceSample {
    pub id: usize,
    pub point: Point3,
    /// Face normal of the owning triangle (zero for degenerate faces).
    pub normal: Vec3,
    pub triangle_id: usize,
    pub weight_area: f64,
}

// Additive recurrence on the plastic number (Roberts' R2 sequence).
const PLASTIC: f64 = 1.324_717_957_244_746;
const R2_A: f64 = 1.0 / PLASTIC;
const R2_B: f64 = 1.0 / (PLASTIC * PLASTIC);

/// Barycentric coordinates `(u, v)` of the `i`-th low-discrepancy sample.
/// The sequence starts at the centroid.
pub fn barycentric_sample(i: usize) -> (f64, f64) {
    let u = (1.0 / 3.0 + i as f64 * R2_A).fract();
    let v = (1.0 / 3.0 + i as f64 * R2_B).fract();
    if u + v > 1.0 {
        (1.0 - u, 1.0 - v)
    } else {
        (u, v)
    }
}

/// Places `max(1, round(area / spacing²))` samples on every triangle.
pub fn sample_surface(mesh: &TriangleMesh, spacing: f64) -> Result<Vec<SurfaceSample>, VisibilityError> {
    if mesh.is_empty() {
        return Err(VisibilityError::EmptyMesh);
    }
    if !(spacing > 0.0) {
        return Err(VisibilityError::InvalidParameter(format!(
            "sample spacing must be positive, got {spacing}"
        )));
    }
    let cell = spacing * spacing;
    let mut out = Vec::new();
    for t in 0..mesh.triangle_count() {
        let area = mesh.area(t);
        let n = ((area / cell).round() as usize).max(1);
        let w = area / n as f64;
        let [a, b, c] = mesh.triangle_points(t);
        for i in 0..n {
            let (u, v) = barycentric_sample(i);
            out.push(SurfaceSample {
                id: out.len(),
                point: a + (b - a) * u + (c - a) * v,
                normal: mesh.normal(t),
                triangle_id: t,
                weight_area: w,
            });
        }
    }
    Ok(out)
}
