//! Geometric primitives shared by every planning stage.
//!
//! Coordinates are right-handed, z-up, in meters.

mod bvh;
mod cloud;
mod kdtree;
mod mesh;
pub(crate) mod topology;

pub use bvh::{intersect_triangle, RayHit, SpatialIndex, MAX_LEAF_SIZE, MIN_HIT_DISTANCE, TIE_DISTANCE};
pub use cloud::PointCloud;
pub use kdtree::{nearest_points, PointIndex};
pub use mesh::{Aabb, TriangleMesh, DEGENERATE_AREA};
pub use topology::{mesh_topology_report, TopologyReport, UnionFind};

use thiserror::Error;

pub type Point3 = nalgebra::Point3<f64>;
pub type Vec3 = nalgebra::Vector3<f64>;
pub type Dir3 = nalgebra::Unit<Vec3>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("mesh has no triangles")]
    EmptyMesh,
    #[error("point cloud is empty")]
    EmptyCloud,
    #[error("triangle {triangle} references vertex {index} but only {count} vertices exist")]
    IndexOutOfRange {
        triangle: usize,
        index: u32,
        count: usize,
    },
    #[error("non-finite coordinate at element {0}")]
    NonFinite(usize),
    #[error("{what} has length {got}, expected {expected}")]
    LengthMismatch {
        what: &'static str,
        got: usize,
        expected: usize,
    },
}

/// Builds a unit direction, returning `None` for zero or non-finite input.
pub fn direction(v: Vec3) -> Option<Dir3> {
    let n = v.norm();
    if n.is_finite() && n > 0.0 {
        Some(Dir3::new_unchecked(v / n))
    } else {
        None
    }
}

pub(crate) fn is_finite(p: &Point3) -> bool {
    p.x.is_finite() && p.y.is_finite() && p.z.is_finite()
}
