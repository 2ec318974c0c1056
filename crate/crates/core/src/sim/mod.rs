//! Ray-cast scanner simulation against a reference mesh, and evaluation of
//! plans on that reference.

mod evaluate;
mod scan;

pub use evaluate::{evaluate_plan, evaluate_viewpoints, CoverageReport};
pub use scan::{
    elevation_steps, ray_directions, simulate_coarse_survey, simulate_scan, stream_seed, ScanConfig,
};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("plan selects no viewpoints")]
    EmptyPlan,
    #[error("coarse survey needs at least one waypoint")]
    NoWaypoints,
    #[error("invalid scan config: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Visibility(#[from] crate::visibility::VisibilityError),
}
