use super::{SensorModel, SensorSet, SurfaceSample, Viewpoint, VisibilityError};
use crate::geometry::{direction, SpatialIndex};
use fixedbitset::FixedBitSet;
use rayon::prelude::*;

/// Distance slack allowed between the first ray hit and the sample itself.
pub fn occlusion_tolerance(distance: f64) -> f64 {
    (1e-4 * distance).max(1e-4)
}

/// Whether `sample` is observable from `vp` under `sensor`.
///
/// Checks run cheapest first: range, field of view, incidence, and finally a
/// ray cast. The ray counts as reaching the sample when its first hit lies
/// within [`occlusion_tolerance`] of the sample distance, so coplanar
/// neighbours of the owning triangle never occlude it.
pub fn visibility_test(
    vp: &Viewpoint,
    sample: &SurfaceSample,
    sensor: &SensorModel,
    index: &SpatialIndex,
) -> bool {
    let offset = sample.point - vp.position;
    let d = offset.norm();
    if !(d >= sensor.min_range && d <= sensor.max_range) {
        return false;
    }
    let Some(dir) = direction(offset) else {
        return false;
    };

    let elevation = dir.z.clamp(-1.0, 1.0).asin().to_degrees();
    if elevation < sensor.min_elevation || elevation > sensor.max_elevation {
        return false;
    }
    if sensor.horizontal_fov < 360.0 {
        let heading = vp.heading.unwrap_or(0.0);
        let azimuth = dir.y.atan2(dir.x).to_degrees();
        let off = (azimuth - heading + 180.0).rem_euclid(360.0) - 180.0;
        if off.abs() > sensor.horizontal_fov / 2.0 {
            return false;
        }
    }

    // cos of the angle between the normal and the direction back to the sensor
    let cos_incidence = -sample.normal.dot(&dir);
    if !(cos_incidence > 0.0) || cos_incidence < sensor.max_incidence.to_radians().cos() {
        return false;
    }

    let tol = occlusion_tolerance(d);
    match index.ray_cast(&vp.position, &dir, d + tol) {
        Some(hit) => (hit.t - d).abs() <= tol,
        None => false,
    }
}

/// Candidate × sample visibility bits.
///
/// Only the sample count is kept; callers own the sample list the rows index.
#[derive(Debug, Clone, PartialEq)]
pub struct CoverageMatrix {
    pub candidates: Vec<Viewpoint>,
    pub sample_count: usize,
    pub rows: Vec<FixedBitSet>,
}

impl CoverageMatrix {
    /// Builds a matrix from explicit rows of sample ids. Candidates are
    /// placeholders positioned at the origin with ids `0..rows.len()`.
    pub fn from_sets(sample_count: usize, sets: &[&[usize]]) -> Self {
        use crate::geometry::Point3;
        let rows = sets
            .iter()
            .map(|s| {
                let mut b = FixedBitSet::with_capacity(sample_count);
                s.iter().for_each(|&i| b.insert(i));
                b
            })
            .collect();
        let candidates = (0..sets.len())
            .map(|i| Viewpoint::new(i, Point3::origin(), super::AgentClass::Ground))
            .collect();
        CoverageMatrix {
            candidates,
            sample_count,
            rows,
        }
    }

    /// A matrix with no candidates.
    pub fn empty(sample_count: usize) -> Self {
        CoverageMatrix {
            candidates: Vec::new(),
            sample_count,
            rows: Vec::new(),
        }
    }

    pub fn candidate_count(&self) -> usize {
        self.rows.len()
    }

    pub fn row(&self, c: usize) -> &FixedBitSet {
        &self.rows[c]
    }

    /// Union of every row.
    pub fn reachable(&self) -> FixedBitSet {
        let mut all = FixedBitSet::with_capacity(self.sample_count);
        self.rows.iter().for_each(|r| all.union_with(r));
        all
    }
}

pub fn build_coverage(
    candidates: &[Viewpoint],
    samples: &[SurfaceSample],
    sensors: &SensorSet,
    index: &SpatialIndex,
) -> Result<CoverageMatrix, VisibilityError> {
    if candidates.is_empty() || samples.is_empty() {
        return Err(VisibilityError::EmptyInput);
    }
    sensors.ground.validate()?;
    sensors.aerial.validate()?;
    let rows = candidates
        .par_iter()
        .map(|vp| {
            let sensor = sensors.for_class(vp.agent_class);
            let mut row = FixedBitSet::with_capacity(samples.len());
            for (i, s) in samples.iter().enumerate() {
                if visibility_test(vp, s, sensor, index) {
                    row.insert(i);
                }
            }
            row
        })
        .collect();
    Ok(CoverageMatrix {
        candidates: candidates.to_vec(),
        sample_count: samples.len(),
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Point3, TriangleMesh, Vec3};
    use crate::visibility::AgentClass;

    fn floor_sample(x: f64) -> SurfaceSample {
        SurfaceSample {
            id: 0,
            point: Point3::new(x, 0.0, 0.0),
            normal: Vec3::z(),
            triangle_id: 0,
            weight_area: 1.0,
        }
    }

    fn floor_index() -> SpatialIndex {
        let m = TriangleMesh::new(
            vec![
                Point3::new(-20.0, -20.0, 0.0),
                Point3::new(20.0, -20.0, 0.0),
                Point3::new(20.0, 20.0, 0.0),
                Point3::new(-20.0, 20.0, 0.0),
            ],
            vec![[0, 1, 2], [0, 2, 3]],
        )
        .unwrap();
        SpatialIndex::build(&m).unwrap()
    }

    fn sensor(min_r: f64, max_r: f64, inc: f64) -> SensorModel {
        SensorModel {
            min_range: min_r,
            max_range: max_r,
            max_incidence: inc,
            min_elevation: -90.0,
            max_elevation: 90.0,
            ..SensorModel::terrestrial()
        }
    }

    #[test]
    fn straight_down_is_visible() {
        let vp = Viewpoint::new(0, Point3::new(0.0, 0.0, 1.0), AgentClass::Ground);
        assert!(visibility_test(&vp, &floor_sample(0.0), &sensor(0.5, 20.0, 80.0), &floor_index()));
    }

    #[test]
    fn grazing_floor_rejected() {
        let vp = Viewpoint::new(0, Point3::new(0.0, 0.0, 1.5), AgentClass::Ground);
        let s = floor_sample(10.0);
        assert!(!visibility_test(&vp, &s, &sensor(0.5, 20.0, 80.0), &floor_index()));
        assert!(visibility_test(&vp, &s, &sensor(0.5, 20.0, 82.0), &floor_index()));
    }

    #[test]
    fn back_face_rejected() {
        let vp = Viewpoint::new(0, Point3::new(0.0, 0.0, -1.0), AgentClass::Ground);
        assert!(!visibility_test(&vp, &floor_sample(0.0), &sensor(0.5, 20.0, 90.0), &floor_index()));
    }

    #[test]
    fn limited_fov_uses_heading() {
        let mut s = sensor(0.5, 20.0, 89.0);
        s.horizontal_fov = 90.0;
        let mut vp = Viewpoint::new(0, Point3::new(0.0, 0.0, 1.5), AgentClass::Ground);
        let sample = floor_sample(3.0);
        assert!(visibility_test(&vp, &sample, &s, &floor_index()));
        vp.heading = Some(180.0);
        assert!(!visibility_test(&vp, &sample, &s, &floor_index()));
    }
}
