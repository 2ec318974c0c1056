//! Planning on a model mesh and the iterative survey loop: coarse survey,
//! reconstruction, planning, fine scans and evaluation against the
//! reference, repeated until coverage stops improving.

use crate::config::RunConfig;
use crate::geometry::{GeometryError, Point3, PointCloud, SpatialIndex, TriangleMesh};
use crate::io::{self, IoError, PlyEncoding};
use crate::meshify::{reconstruct, MeshifyError};
use crate::plan::ScanPlan;
use crate::sim::{
    evaluate_viewpoints, simulate_coarse_survey, simulate_scan, stream_seed, CoverageReport, ScanConfig, SimError,
};
use crate::solver::{compute_weights, two_phase_plan, PhasePlan, SolverError, WeightMode};
use crate::tour::{plan_tours, Depots, TourError};
use crate::visibility::{
    build_coverage, generate_aerial_candidates, generate_ground_candidates, sample_surface, CoverageMatrix,
    SurfaceSample, Viewpoint, VisibilityError,
};
use serde::Serialize;
use std::path::{Path, PathBuf};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum StageError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Meshify(#[from] MeshifyError),
    #[error(transparent)]
    Visibility(#[from] VisibilityError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Tour(#[from] TourError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Io(#[from] IoError),
}

#[derive(Debug, Error)]
#[error("iteration {iteration}, stage `{stage}`: {source}")]
pub struct PipelineError {
    pub iteration: usize,
    pub stage: &'static str,
    #[source]
    pub source: StageError,
}

/// Everything produced while planning on one model.
#[derive(Debug, Clone)]
pub struct PlanOutcome {
    pub plan: ScanPlan,
    pub samples: Vec<SurfaceSample>,
    pub ground_candidates: Vec<Viewpoint>,
    pub aerial_candidates: Vec<Viewpoint>,
    pub phases: PhasePlan,
}

fn matrix_or_empty(
    candidates: &[Viewpoint],
    samples: &[SurfaceSample],
    config: &RunConfig,
    index: &SpatialIndex,
) -> Result<CoverageMatrix, VisibilityError> {
    if candidates.is_empty() {
        Ok(CoverageMatrix::empty(samples.len()))
    } else {
        build_coverage(candidates, samples, &config.sensors, index)
    }
}

/// Samples the model, generates both candidate sets, selects viewpoints in
/// two phases and orders them into tours. Aerial ids continue after the
/// ground ids so every viewpoint in a plan has a distinct id.
pub fn plan_on_mesh(
    model: &TriangleMesh,
    config: &RunConfig,
    prior: Option<&PointCloud>,
    weight_mode: WeightMode,
) -> Result<PlanOutcome, StageError> {
    let index = SpatialIndex::build(model)?;
    let samples = sample_surface(model, config.candidates.sample_spacing)?;
    let ground_candidates = match generate_ground_candidates(&index, &config.candidates.ground()) {
        Ok(c) => c,
        Err(VisibilityError::NoGroundFound) => Vec::new(),
        Err(e) => return Err(e.into()),
    };
    let mut aerial_candidates = generate_aerial_candidates(&index, &config.candidates.aerial())?;
    let offset = ground_candidates.len();
    aerial_candidates.iter_mut().for_each(|v| v.id += offset);

    let ground = matrix_or_empty(&ground_candidates, &samples, config, &index)?;
    let aerial = matrix_or_empty(&aerial_candidates, &samples, config, &index)?;
    let weights = compute_weights(
        &samples,
        prior,
        weight_mode,
        config.solver.rho_ref,
        config.solver.density_radius,
    )?;
    let phases = two_phase_plan(&ground, &aerial, &weights, &config.solver.params())?;

    let selected: Vec<Viewpoint> = phases
        .ground
        .ids()
        .iter()
        .filter_map(|id| ground_candidates.iter().find(|v| v.id == *id))
        .chain(
            phases
                .aerial
                .ids()
                .iter()
                .filter_map(|id| aerial_candidates.iter().find(|v| v.id == *id)),
        )
        .copied()
        .collect();
    let tours = plan_tours(&selected, &model.bounds(), &Depots::default())?;
    let plan = ScanPlan::new(
        config.hash(),
        config.seed,
        &ground_candidates,
        &aerial_candidates,
        &phases,
        tours,
    );
    Ok(PlanOutcome {
        plan,
        samples,
        ground_candidates,
        aerial_candidates,
        phases,
    })
}

/// Walk-through positions for the coarse survey: the ground grid of the
/// reference scene at a coarser spacing.
pub fn coarse_waypoints(index: &SpatialIndex, config: &RunConfig) -> Result<Vec<Point3>, VisibilityError> {
    let mut params = config.candidates.ground();
    params.grid_spacing *= config.sim.coarse_decimation as f64;
    Ok(generate_ground_candidates(index, &params)?
        .into_iter()
        .map(|v| v.position)
        .collect())
}

/// Fine scans of every viewpoint of a plan, in plan order.
pub fn execute_plan(
    truth: &SpatialIndex,
    plan: &ScanPlan,
    config: &RunConfig,
    seed: u64,
) -> Result<Vec<(Viewpoint, PointCloud)>, SimError> {
    plan.viewpoints()
        .into_iter()
        .map(|vp| {
            let cfg = ScanConfig::new(*config.sensors.for_class(vp.agent_class), seed);
            simulate_scan(truth, &vp, &cfg).map(|c| (vp, c))
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    TargetReached,
    Converged,
    MaxIterations,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IterationSummary {
    pub iteration: usize,
    pub model_triangles: usize,
    pub planned_fraction: f64,
    /// Coverage of the reference by this iteration's viewpoints alone.
    pub iteration_fraction: f64,
    /// Coverage of the reference by every viewpoint scanned so far.
    pub cumulative_fraction: f64,
    pub mean_spacing: f64,
    pub ground_views: usize,
    pub aerial_views: usize,
    pub scan_points: usize,
}

#[derive(Debug, Clone)]
pub struct IterationRecord {
    pub summary: IterationSummary,
    pub plan: ScanPlan,
    pub report: CoverageReport,
}

#[derive(Debug, Clone)]
pub struct PipelineResult {
    pub iterations: Vec<IterationRecord>,
    pub stop_reason: StopReason,
}

impl PipelineResult {
    pub fn final_coverage(&self) -> f64 {
        self.iterations.last().map_or(0.0, |r| r.summary.cumulative_fraction)
    }
}

#[derive(Debug, Clone, Default)]
pub struct PipelineOptions {
    /// Existing model to plan the first iteration on, skipping the coarse
    /// survey and its reconstruction.
    pub prior_mesh: Option<TriangleMesh>,
    /// Where per-iteration artifacts are written; nothing is written if unset.
    pub run_dir: Option<PathBuf>,
}

struct Stage {
    iteration: usize,
}

impl Stage {
    fn tag<T, E: Into<StageError>>(&self, stage: &'static str, r: Result<T, E>) -> Result<T, PipelineError> {
        r.map_err(|e| PipelineError {
            iteration: self.iteration,
            stage,
            source: e.into(),
        })
    }
}

fn create_dir(path: &Path) -> Result<(), IoError> {
    std::fs::create_dir_all(path).map_err(|e| IoError::Io {
        path: path.display().to_string(),
        source: e,
    })
}

/// Runs the survey loop on a reference mesh.
///
/// Iteration 0 plans on a reconstruction of a noisy coarse survey (or on the
/// prior mesh). Later iterations rebuild the model from every fine scan so
/// far and weight surface by how thinly those scans cover it. The loop stops
/// once cumulative coverage reaches the target, the gain of an iteration
/// falls below `pipeline.epsilon_stop`, or `pipeline.max_iterations` have
/// run. With a run directory, iteration `k` writes `iter_<k>/` containing
/// `coarse.ply`, `coarse_mesh.ply`, `plan.json`, `scans/vp_<id>.ply`,
/// `report.json` and `viz.ply`.
pub fn run_pipeline(
    truth: &TriangleMesh,
    config: &RunConfig,
    options: &PipelineOptions,
) -> Result<PipelineResult, PipelineError> {
    let setup = Stage { iteration: 0 };
    let truth_index = setup.tag("reference", SpatialIndex::build(truth))?;
    let truth_samples = setup.tag("reference", sample_surface(truth, config.candidates.sample_spacing))?;

    let mut executed: Vec<Viewpoint> = Vec::new();
    let mut fine_clouds: Vec<PointCloud> = Vec::new();
    let mut iterations: Vec<IterationRecord> = Vec::new();
    let mut stop_reason = StopReason::MaxIterations;

    for k in 0..config.pipeline.max_iterations {
        let st = Stage { iteration: k };
        let dir = options.run_dir.as_ref().map(|d| d.join(format!("iter_{k}")));
        if let Some(d) = &dir {
            st.tag("persist", create_dir(&d.join("scans")))?;
        }

        // Model to plan on, and the cloud that informs density weights.
        let (model, prior_cloud, mode) = match (k, &options.prior_mesh) {
            (0, Some(prior)) => (prior.clone(), None, config.solver.weight_mode),
            (0, None) => {
                let waypoints = st.tag("coarse_survey", coarse_waypoints(&truth_index, config))?;
                let mut sensor = config.sensors.ground;
                sensor.range_noise_sigma = config.sim.coarse_range_noise_sigma;
                let scan_cfg = ScanConfig {
                    sensor,
                    angular_resolution: config.sim.coarse_angular_resolution,
                    seed: stream_seed(config.seed, &[0xC0A5E]),
                    pose_jitter_sigma: config.sim.pose_jitter_sigma,
                };
                let cloud = st.tag("coarse_survey", simulate_coarse_survey(&truth_index, &waypoints, &scan_cfg))?;
                let mesh = st.tag("meshify", reconstruct(&cloud, &config.meshify))?;
                if let Some(d) = &dir {
                    st.tag("persist", io::write_cloud_ply(&d.join("coarse.ply"), &cloud, None, PlyEncoding::BinaryLittleEndian))?;
                    st.tag("persist", io::write_mesh_ply(&d.join("coarse_mesh.ply"), &mesh, PlyEncoding::BinaryLittleEndian))?;
                }
                (mesh, Some(cloud), config.solver.weight_mode)
            }
            _ => {
                let merged = PointCloud::concat(&fine_clouds).voxel_downsample(config.meshify.voxel_size / 2.0);
                let mesh = st.tag("meshify", reconstruct(&merged, &config.meshify))?;
                if let Some(d) = &dir {
                    st.tag("persist", io::write_cloud_ply(&d.join("coarse.ply"), &merged, None, PlyEncoding::BinaryLittleEndian))?;
                    st.tag("persist", io::write_mesh_ply(&d.join("coarse_mesh.ply"), &mesh, PlyEncoding::BinaryLittleEndian))?;
                }
                (mesh, Some(merged), WeightMode::DensityDeficit)
            }
        };

        let outcome = st.tag("plan", plan_on_mesh(&model, config, prior_cloud.as_ref(), mode))?;
        let plan = outcome.plan;
        if let Some(d) = &dir {
            st.tag("persist", io::save_plan(&plan, &d.join("plan.json")))?;
        }

        let scans = st.tag(
            "scan",
            execute_plan(&truth_index, &plan, config, stream_seed(config.seed, &[k as u64])),
        )?;
        let mut scan_points = 0;
        for (vp, cloud) in scans {
            if let Some(d) = &dir {
                let path = d.join("scans").join(format!("vp_{}.ply", vp.id));
                st.tag("persist", io::write_cloud_ply(&path, &cloud, None, PlyEncoding::BinaryLittleEndian))?;
            }
            scan_points += cloud.len();
            fine_clouds.push(cloud);
        }

        let this_iter = plan.viewpoints();
        let iteration_fraction = if this_iter.is_empty() {
            0.0
        } else {
            st.tag("evaluate", evaluate_viewpoints(&truth_samples, &this_iter, &truth_index, &config.sensors))?
                .achieved_fraction
        };
        executed.extend(this_iter);
        let report = st.tag(
            "evaluate",
            evaluate_viewpoints(&truth_samples, &executed, &truth_index, &config.sensors),
        )?;

        let summary = IterationSummary {
            iteration: k,
            model_triangles: model.triangle_count(),
            planned_fraction: plan.coverage.planned_fraction,
            iteration_fraction,
            cumulative_fraction: report.achieved_fraction,
            mean_spacing: report.mean_spacing,
            ground_views: plan.selections.ground.len(),
            aerial_views: plan.selections.aerial.len(),
            scan_points,
        };
        if let Some(d) = &dir {
            let json = serde_json::json!({ "summary": &summary, "coverage": &report });
            let mut text = serde_json::to_string_pretty(&json).expect("report serializes");
            text.push('\n');
            st.tag("persist", io::write_atomic(&d.join("report.json"), text.as_bytes()))?;
            st.tag(
                "persist",
                io::export_coverage_viz(
                    &truth_samples,
                    &report.ground_covered,
                    &report.aerial_covered,
                    &executed,
                    &d.join("viz.ply"),
                ),
            )?;
        }

        let gain = summary.cumulative_fraction - iterations.last().map_or(0.0, |r| r.summary.cumulative_fraction);
        iterations.push(IterationRecord { summary, plan, report });
        let achieved = iterations.last().unwrap().summary.cumulative_fraction;
        if achieved >= config.solver.target_coverage {
            stop_reason = StopReason::TargetReached;
            break;
        }
        if k > 0 && gain < config.pipeline.epsilon_stop {
            stop_reason = StopReason::Converged;
            break;
        }
    }
    Ok(PipelineResult { iterations, stop_reason })
}
