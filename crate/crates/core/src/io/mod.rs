//! File formats: PLY and OBJ geometry, plan JSON, coverage visualisation.
//! Every write goes to a temporary file in the target directory and is then
//! renamed into place.

mod obj;
mod plan_file;
mod ply;
mod viz;

pub use obj::parse_obj;
pub use plan_file::{load_plan, load_plan_verified, plan_to_string, save_plan};
pub use ply::{cloud_ply_bytes, mesh_ply_bytes, parse_ply, write_cloud_ply, write_mesh_ply, PlyEncoding};
pub use viz::{export_coverage_viz, viewpoints_path, VizSummary, AERIAL_COLOR, GROUND_COLOR, UNCOVERED_COLOR};

use crate::geometry::{GeometryError, PointCloud, TriangleMesh};
use std::io::Write;
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },
    #[error("unsupported: {0}")]
    UnsupportedFeature(String),
    #[error("schema error at `{key}`: {message}")]
    Schema { key: String, message: String },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

impl IoError {
    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        IoError::Io {
            path: path.display().to_string(),
            source,
        }
    }

    pub(crate) fn parse(location: impl Into<String>, message: impl Into<String>) -> Self {
        IoError::Parse {
            location: location.into(),
            message: message.into(),
        }
    }
}

/// Content of a geometry file: faces make it a mesh, otherwise a cloud.
#[derive(Debug, Clone, PartialEq)]
pub enum Geometry {
    Cloud(PointCloud),
    Mesh(TriangleMesh),
}

impl Geometry {
    /// The mesh, if the file had faces.
    pub fn into_mesh(self) -> Option<TriangleMesh> {
        match self {
            Geometry::Mesh(m) => Some(m),
            Geometry::Cloud(_) => None,
        }
    }

    /// The points; a mesh contributes its vertices.
    pub fn into_cloud(self) -> PointCloud {
        match self {
            Geometry::Cloud(c) => c,
            Geometry::Mesh(m) => {
                let (v, _) = m.into_parts();
                PointCloud::new(v).unwrap_or_default()
            }
        }
    }
}

/// Reads a `.ply` or `.obj` file, chosen by extension.
pub fn load_geometry(path: &Path) -> Result<Geometry, IoError> {
    let bytes = std::fs::read(path).map_err(|e| IoError::io(path, e))?;
    match path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase).as_deref() {
        Some("ply") => parse_ply(&bytes),
        Some("obj") => {
            let text = std::str::from_utf8(&bytes)
                .map_err(|e| IoError::parse(format!("byte {}", e.valid_up_to()), "invalid UTF-8"))?;
            parse_obj(text).map(Geometry::Mesh)
        }
        _ => Err(IoError::UnsupportedFeature(format!(
            "unknown geometry extension: {}",
            path.display()
        ))),
    }
}

/// Loads a file that must contain faces.
pub fn load_mesh(path: &Path) -> Result<TriangleMesh, IoError> {
    load_geometry(path)?
        .into_mesh()
        .ok_or_else(|| IoError::UnsupportedFeature(format!("{} has no faces", path.display())))
}

/// Replaces `path` with `bytes` in one rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), IoError> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| IoError::io(path, e))?;
    tmp.write_all(bytes).map_err(|e| IoError::io(path, e))?;
    tmp.persist(path).map_err(|e| IoError::io(path, e.error))?;
    Ok(())
}
