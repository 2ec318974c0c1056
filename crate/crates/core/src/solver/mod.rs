//! Viewpoint selection as weighted set cover over a coverage matrix.

mod greedy;
mod weights;

pub use greedy::{brute_force_cover, greedy_select, two_phase_plan, PhasePlan, Selection, MAX_BRUTE_FORCE};
pub use weights::{compute_weights, WeightMode, WeightVector, DEFAULT_DENSITY_RADIUS};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolverError {
    #[error("no candidate observes any weighted sample")]
    NoProgress,
    #[error("target coverage {target} is unreachable; all candidates together cover {reachable}")]
    Infeasible { target: f64, reachable: f64 },
    #[error("exhaustive search is limited to {max} candidates, got {got}")]
    TooLarge { got: usize, max: usize },
    #[error("density weighting needs a prior point cloud")]
    MissingPrior,
    #[error("invalid weights: {0}")]
    InvalidWeights(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("weight vector has {weights} entries but the matrix has {samples} samples")]
    SizeMismatch { weights: usize, samples: usize },
}

/// Stopping rules shared by both selection phases.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverParams {
    pub target_coverage: f64,
    /// Smallest marginal gain (in weight units, m² for area weights) worth a
    /// new viewpoint.
    pub min_gain: f64,
    pub max_views: usize,
}

impl Default for SolverParams {
    fn default() -> Self {
        SolverParams {
            target_coverage: 0.98,
            min_gain: 0.05,
            max_views: 64,
        }
    }
}

impl SolverParams {
    pub fn validate(&self) -> Result<(), SolverError> {
        if !(self.target_coverage > 0.0 && self.target_coverage <= 1.0) {
            return Err(SolverError::InvalidParameter(format!(
                "target_coverage {} must be in (0, 1]",
                self.target_coverage
            )));
        }
        if !(self.min_gain >= 0.0) {
            return Err(SolverError::InvalidParameter(format!(
                "min_gain {} must be non-negative",
                self.min_gain
            )));
        }
        Ok(())
    }
}
