use super::{write_cloud_ply, IoError, PlyEncoding};
use crate::geometry::PointCloud;
use crate::visibility::{AgentClass, SurfaceSample, Viewpoint};
use fixedbitset::FixedBitSet;
use std::path::{Path, PathBuf};

pub const GROUND_COLOR: [u8; 3] = [0, 0, 255];
pub const AERIAL_COLOR: [u8; 3] = [0, 200, 0];
pub const UNCOVERED_COLOR: [u8; 3] = [255, 0, 0];

/// How many samples received each color.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct VizSummary {
    pub ground: usize,
    pub aerial_only: usize,
    pub uncovered: usize,
}

/// Companion file holding the viewpoints of a visualisation at `path`.
pub fn viewpoints_path(path: &Path) -> PathBuf {
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("viz");
    path.with_file_name(format!("{stem}_viewpoints.ply"))
}

/// Writes samples as colored points: blue when a ground viewpoint sees them,
/// green when only aerial ones do, red otherwise. Viewpoints go to
/// [`viewpoints_path`] colored by class.
pub fn export_coverage_viz(
    samples: &[SurfaceSample],
    ground: &FixedBitSet,
    aerial: &FixedBitSet,
    viewpoints: &[Viewpoint],
    path: &Path,
) -> Result<VizSummary, IoError> {
    let mut summary = VizSummary::default();
    let colors: Vec<[u8; 3]> = (0..samples.len())
        .map(|i| {
            if ground.contains(i) {
                summary.ground += 1;
                GROUND_COLOR
            } else if aerial.contains(i) {
                summary.aerial_only += 1;
                AERIAL_COLOR
            } else {
                summary.uncovered += 1;
                UNCOVERED_COLOR
            }
        })
        .collect();
    let cloud = PointCloud::new(samples.iter().map(|s| s.point).collect())?;
    write_cloud_ply(path, &cloud, Some(&colors), PlyEncoding::BinaryLittleEndian)?;

    let vp_cloud = PointCloud::new(viewpoints.iter().map(|v| v.position).collect())?;
    let vp_colors: Vec<[u8; 3]> = viewpoints
        .iter()
        .map(|v| match v.agent_class {
            AgentClass::Ground => GROUND_COLOR,
            AgentClass::Aerial => AERIAL_COLOR,
        })
        .collect();
    write_cloud_ply(&viewpoints_path(path), &vp_cloud, Some(&vp_colors), PlyEncoding::BinaryLittleEndian)?;
    Ok(summary)
}
