//! Candidate viewpoints, surface sampling and the occlusion-aware
//! visibility matrix between them.

mod candidates;
mod coverage;
mod sampling;
mod sensor;

pub use candidates::{
    generate_aerial_candidates, generate_ground_candidates, AerialParams, GroundParams, GROUND_COS,
};
pub use coverage::{build_coverage, occlusion_tolerance, visibility_test, CoverageMatrix};
pub use sampling::{barycentric_sample, sample_surface, SurfaceSample};
pub use sensor::{AgentClass, SensorModel, SensorSet, Viewpoint};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum VisibilityError {
    #[error("mesh has no triangles")]
    EmptyMesh,
    #[error("no up-facing ground surface found")]
    NoGroundFound,
    #[error("coverage needs at least one candidate and one sample")]
    EmptyInput,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("invalid sensor model: {0}")]
    InvalidSensor(String),
}
