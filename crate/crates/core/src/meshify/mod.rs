//! Point cloud to triangle mesh: normal estimation, a truncated signed
//! distance field, marching cubes and component cleanup.

mod clean;
mod field;
mod marching_cubes;
mod normals;
mod tables;

pub use clean::clean_mesh;
pub use field::{build_signed_field, VoxelGrid, DEFAULT_MAX_NODES};
pub use marching_cubes::marching_cubes;
pub use normals::estimate_normals;

use crate::geometry::{PointCloud, TriangleMesh};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MeshifyError {
    #[error("need at least {needed} points, got {got}")]
    TooFewPoints { needed: usize, got: usize },
    #[error("point cloud is empty")]
    EmptyCloud,
    #[error("point cloud has no normals")]
    MissingNormals,
    #[error("grid of {nodes} nodes exceeds the cap of {cap}")]
    GridTooLarge { nodes: u64, cap: u64 },
    #[error("nothing survived mesh cleanup")]
    AllRemoved,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

/// Reconstruction settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeshifyParams {
    pub voxel_size: f64,
    pub truncation: f64,
    pub normal_k: usize,
    pub min_component_area: f64,
    pub max_grid_nodes: u64,
}

impl Default for MeshifyParams {
    fn default() -> Self {
        MeshifyParams {
            voxel_size: 0.10,
            truncation: 0.30,
            normal_k: 12,
            min_component_area: 0.25,
            max_grid_nodes: DEFAULT_MAX_NODES,
        }
    }
}

/// Full reconstruction. Normals are estimated only when the cloud lacks them.
pub fn reconstruct(cloud: &PointCloud, params: &MeshifyParams) -> Result<TriangleMesh, MeshifyError> {
    let with_normals;
    let cloud = if cloud.normals().is_some() {
        cloud
    } else {
        with_normals = estimate_normals(cloud, params.normal_k)?;
        &with_normals
    };
    let grid = build_signed_field(cloud, params.voxel_size, params.truncation, params.max_grid_nodes)?;
    let mesh = marching_cubes(&grid, 0.0);
    clean_mesh(&mesh, params.min_component_area)
}
