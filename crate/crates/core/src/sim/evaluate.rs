use super::SimError;
use crate::geometry::SpatialIndex;
use crate::plan::ScanPlan;
use crate::visibility::{build_coverage, AgentClass, SensorSet, SurfaceSample, Viewpoint};
use fixedbitset::FixedBitSet;
use serde::Serialize;

/// Coverage actually achieved by a set of viewpoints on reference samples.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoverageReport {
    /// Covered area over total area.
    pub achieved_fraction: f64,
    /// How many viewpoints see each sample.
    pub hit_counts: Vec<u32>,
    pub residual: Vec<usize>,
    /// Mean over covered samples of the finest expected point spacing on
    /// that sample, in meters.
    pub mean_spacing: f64,
    #[serde(skip)]
    pub ground_covered: FixedBitSet,
    #[serde(skip)]
    pub aerial_covered: FixedBitSet,
}

/// Point spacing a scanner with angular step `step_deg` leaves on a surface
/// at distance `d` seen at an incidence with cosine `cos_inc`.
fn footprint_spacing(d: f64, step_deg: f64, cos_inc: f64) -> f64 {
    d * step_deg.to_radians() / cos_inc
}

pub fn evaluate_viewpoints(
    samples: &[SurfaceSample],
    viewpoints: &[Viewpoint],
    index: &SpatialIndex,
    sensors: &SensorSet,
) -> Result<CoverageReport, SimError> {
    if viewpoints.is_empty() {
        return Err(SimError::EmptyPlan);
    }
    let matrix = build_coverage(viewpoints, samples, sensors, index)?;
    let n = samples.len();
    let mut hit_counts = vec![0u32; n];
    let mut ground_covered = FixedBitSet::with_capacity(n);
    let mut aerial_covered = FixedBitSet::with_capacity(n);
    let mut spacing = vec![f64::INFINITY; n];
    for (vp, row) in viewpoints.iter().zip(&matrix.rows) {
        let step = sensors.for_class(vp.agent_class).angular_resolution;
        match vp.agent_class {
            AgentClass::Ground => ground_covered.union_with(row),
            AgentClass::Aerial => aerial_covered.union_with(row),
        }
        for i in row.ones() {
            hit_counts[i] += 1;
            let offset = vp.position - samples[i].point;
            let d = offset.norm();
            let cos_inc = samples[i].normal.dot(&offset) / d;
            spacing[i] = spacing[i].min(footprint_spacing(d, step, cos_inc));
        }
    }
    let total: f64 = samples.iter().map(|s| s.weight_area).sum();
    let covered: f64 = (0..n).filter(|&i| hit_counts[i] > 0).map(|i| samples[i].weight_area).sum();
    let seen: Vec<f64> = spacing.iter().copied().filter(|s| s.is_finite()).collect();
    let mean_spacing = if seen.is_empty() {
        0.0
    } else {
        seen.iter().sum::<f64>() / seen.len() as f64
    };
    Ok(CoverageReport {
        achieved_fraction: if total > 0.0 { covered / total } else { 0.0 },
        residual: (0..n).filter(|&i| hit_counts[i] == 0).collect(),
        hit_counts,
        mean_spacing,
        ground_covered,
        aerial_covered,
    })
}

/// Re-checks a plan's viewpoints against reference samples.
pub fn evaluate_plan(
    samples: &[SurfaceSample],
    plan: &ScanPlan,
    index: &SpatialIndex,
    sensors: &SensorSet,
) -> Result<CoverageReport, SimError> {
    evaluate_viewpoints(samples, &plan.viewpoints(), index, sensors)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spacing_grows_with_obliquity() {
        let head_on = footprint_spacing(10.0, 0.5, 1.0);
        assert!((head_on - 10.0 * 0.5f64.to_radians()).abs() < 1e-15);
        assert!(footprint_spacing(10.0, 0.5, 0.5) > head_on);
    }
}
