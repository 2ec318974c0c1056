//! The persistent scan plan: which viewpoints to occupy, in what order, and
//! what coverage the planner expects from them.

use crate::geometry::Point3;
use crate::solver::PhasePlan;
use crate::tour::Tour;
use crate::visibility::{AgentClass, Viewpoint};
use serde::{Deserialize, Serialize};

/// Rounds to 9 significant digits so the JSON text of a plan is stable.
pub fn quantize(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.8e}").parse().expect("formatted float parses")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlanMeta {
    pub tool: String,
    pub version: String,
}

impl Default for PlanMeta {
    fn default() -> Self {
        PlanMeta {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlannedViewpoint {
    pub id: usize,
    pub position: [f64; 3],
    pub class: AgentClass,
    pub heading: Option<f64>,
    pub marginal_gain: f64,
}

impl PlannedViewpoint {
    pub fn viewpoint(&self) -> Viewpoint {
        Viewpoint {
            id: self.id,
            position: Point3::from(self.position),
            agent_class: self.class,
            heading: self.heading,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Selections {
    pub ground: Vec<PlannedViewpoint>,
    pub aerial: Vec<PlannedViewpoint>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlanCoverage {
    /// Combined weighted coverage on the planning model.
    pub planned_fraction: f64,
    pub ground_fraction: f64,
    pub residual_uncovered: Vec<usize>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanPlan {
    pub meta: PlanMeta,
    pub config_hash: String,
    pub seed: u64,
    pub selections: Selections,
    pub tours: Vec<Tour>,
    pub coverage: PlanCoverage,
}

fn planned(ids: &[(usize, f64)], pool: &[Viewpoint]) -> Vec<PlannedViewpoint> {
    ids.iter()
        .map(|&(id, gain)| {
            let vp = pool.iter().find(|v| v.id == id).expect("selected id is a candidate");
            PlannedViewpoint {
                id,
                position: [quantize(vp.position.x), quantize(vp.position.y), quantize(vp.position.z)],
                class: vp.agent_class,
                heading: vp.heading.map(quantize),
                marginal_gain: quantize(gain),
            }
        })
        .collect()
}

impl ScanPlan {
    /// Assembles a plan from solver output. Every float is quantized.
    pub fn new(
        config_hash: String,
        seed: u64,
        ground_candidates: &[Viewpoint],
        aerial_candidates: &[Viewpoint],
        phases: &PhasePlan,
        tours: Vec<Tour>,
    ) -> Self {
        let tours = tours
            .into_iter()
            .map(|t| Tour {
                length: quantize(t.length),
                ..t
            })
            .collect();
        ScanPlan {
            meta: PlanMeta::default(),
            config_hash,
            seed,
            selections: Selections {
                ground: planned(&phases.ground.picks, ground_candidates),
                aerial: planned(&phases.aerial.picks, aerial_candidates),
            },
            tours,
            coverage: PlanCoverage {
                planned_fraction: quantize(phases.combined_fraction),
                ground_fraction: quantize(phases.ground.coverage_fraction),
                residual_uncovered: phases.residual.clone(),
                warnings: phases.aerial_warning.iter().cloned().collect(),
            },
        }
    }

    /// Selected viewpoints, ground first, each in pick order.
    pub fn viewpoints(&self) -> Vec<Viewpoint> {
        self.selections
            .ground
            .iter()
            .chain(&self.selections.aerial)
            .map(PlannedViewpoint::viewpoint)
            .collect()
    }

    pub fn is_empty(&self) -> bool {
        self.selections.ground.is_empty() && self.selections.aerial.is_empty()
    }
}
