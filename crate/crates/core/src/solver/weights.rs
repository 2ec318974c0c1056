use super::SolverError;
use crate::geometry::{PointCloud, PointIndex};
use crate::visibility::SurfaceSample;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::ops::Deref;

pub const DEFAULT_DENSITY_RADIUS: f64 = 0.25;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightMode {
    /// Each sample weighs its surface area.
    Uniform,
    /// Area discounted by how densely a prior cloud already covers the sample.
    DensityDeficit,
}

/// Per-sample importance. Finite, non-negative and not all zero.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector(Vec<f64>);

impl WeightVector {
    pub fn new(weights: Vec<f64>) -> Result<Self, SolverError> {
        if let Some(i) = weights.iter().position(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(SolverError::InvalidWeights(format!(
                "weight {i} is {}",
                weights[i]
            )));
        }
        if !weights.iter().any(|w| *w > 0.0) {
            return Err(SolverError::InvalidWeights("all weights are zero".into()));
        }
        Ok(WeightVector(weights))
    }

    pub fn from_samples(samples: &[SurfaceSample]) -> Result<Self, SolverError> {
        Self::new(samples.iter().map(|s| s.weight_area).collect())
    }

    /// Sum in index order; every coverage fraction uses this same order.
    pub fn total(&self) -> f64 {
        self.0.iter().sum()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl Deref for WeightVector {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

/// Builds sample weights.
///
/// In density mode the local prior density is the number of prior points
/// within `radius` of the sample divided by the disc area, and the sample's
/// area is scaled by `1 / (1 + density / rho_ref)`.
pub fn compute_weights(
    samples: &[SurfaceSample],
    prior: Option<&PointCloud>,
    mode: WeightMode,
    rho_ref: f64,
    radius: f64,
) -> Result<WeightVector, SolverError> {
    match mode {
        WeightMode::Uniform => WeightVector::from_samples(samples),
        WeightMode::DensityDeficit => {
            let cloud = prior.ok_or(SolverError::MissingPrior)?;
            if !(rho_ref > 0.0) || !(radius > 0.0) {
                return Err(SolverError::InvalidParameter(format!(
                    "rho_ref {rho_ref} and radius {radius} must be positive"
                )));
            }
            if cloud.is_empty() {
                return WeightVector::from_samples(samples);
            }
            let index = PointIndex::new(cloud.points())
                .map_err(|e| SolverError::InvalidParameter(e.to_string()))?;
            let disc = PI * radius * radius;
            WeightVector::new(
                samples
                    .iter()
                    .map(|s| {
                        let density = index.count_within(&s.point, radius) as f64 / disc;
                        s.weight_area / (1.0 + density / rho_ref)
                    })
                    .collect(),
            )
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Point3, Vec3};

    fn sample(id: usize, x: f64, area: f64) -> SurfaceSample {
        SurfaceSample {
            id,
            point: Point3::new(x, 0.0, 0.0),
            normal: Vec3::z(),
            triangle_id: 0,
            weight_area: area,
        }
    }

    #[test]
    fn uniform_is_area() {
        let s = [sample(0, 0.0, 1.0), sample(1, 1.0, 2.0), sample(2, 2.0, 1.0)];
        let w = compute_weights(&s, None, WeightMode::Uniform, 100.0, 0.25).unwrap();
        assert_eq!(&*w, &[1.0, 2.0, 1.0]);
    }

    #[test]
    fn reference_density_halves_weight() {
        let r: f64 = 0.25;
        let n = 20;
        let rho_ref = n as f64 / (PI * r * r);
        let pts = (0..n)
            .map(|i| Point3::new(0.01 * i as f64, 0.0, 0.0))
            .collect();
        let cloud = PointCloud::new(pts).unwrap();
        let w = compute_weights(&[sample(0, 0.0, 1.0)], Some(&cloud), WeightMode::DensityDeficit, rho_ref, r)
            .unwrap();
        assert!((w[0] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn density_needs_prior() {
        assert_eq!(
            compute_weights(&[sample(0, 0.0, 1.0)], None, WeightMode::DensityDeficit, 1.0, 0.25)
                .unwrap_err(),
            SolverError::MissingPrior
        );
    }

    #[test]
    fn rejects_bad_vectors() {
        assert!(WeightVector::new(vec![0.0, 0.0]).is_err());
        assert!(WeightVector::new(vec![1.0, -1.0]).is_err());
        assert!(WeightVector::new(vec![1.0, f64::NAN]).is_err());
    }
}
