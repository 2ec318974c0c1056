use clap::{Parser, Subcommand};
use scanplan::config::RunConfig;
use scanplan::geometry::SpatialIndex;
use scanplan::io::{self, IoError, PlyEncoding};
use scanplan::meshify::reconstruct;
use scanplan::pipeline::{execute_plan, plan_on_mesh, run_pipeline, PipelineOptions, StageError};
use scanplan::sim::evaluate_plan;
use scanplan::solver::{SolverError, WeightMode};
use scanplan::visibility::{build_coverage, sample_surface, AgentClass};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "scanplan", version, about = "Plan ground and aerial laser scan positions")]
struct Cli {
    /// TOML file with dotted keys overriding defaults
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides the config seed
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Reconstruct a mesh from a point cloud
    Meshify {
        cloud: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Select viewpoints and tours on a model mesh
    Plan {
        mesh: PathBuf,
        /// Earlier scans; surface they cover densely is down-weighted
        #[arg(long)]
        prior_cloud: Option<PathBuf>,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Scan a reference mesh from every viewpoint of a plan
    Simulate {
        truth_mesh: PathBuf,
        plan: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Run the iterative survey loop against a reference mesh
    Pipeline {
        truth_mesh: PathBuf,
        /// Plan the first iteration on this model instead of a coarse survey
        #[arg(long)]
        prior_mesh: Option<PathBuf>,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Report the coverage a plan achieves on a reference mesh
    Eval { truth_mesh: PathBuf, plan: PathBuf },
    /// Write colored coverage points for a plan on a mesh
    ExportViz {
        mesh: PathBuf,
        plan: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
}

enum Failure {
    Data(String),
    Infeasible(String),
}

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Data(e.to_string())
    }
}

fn infeasible_or_data(e: StageError) -> Failure {
    match e {
        StageError::Solver(s @ (SolverError::NoProgress | SolverError::Infeasible { .. })) => {
            Failure::Infeasible(s.to_string())
        }
        other => Failure::Data(other.to_string()),
    }
}

fn load_config(cli: &Cli) -> Result<RunConfig, Failure> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    Ok(cfg)
}

fn create_dir(p: &Path) -> Result<(), Failure> {
    std::fs::create_dir_all(p).map_err(|e| IoError::Io {
        path: p.display().to_string(),
        source: e,
    })?;
    Ok(())
}

fn run(cli: &Cli) -> Result<(), Failure> {
    let cfg = load_config(cli)?;
    match &cli.command {
        Command::Meshify { cloud, output } => {
            let cloud = io::load_geometry(cloud)?.into_cloud();
            let mesh = reconstruct(&cloud, &cfg.meshify)?;
            io::write_mesh_ply(output, &mesh, PlyEncoding::BinaryLittleEndian)?;
            println!("{} triangles, {:.3} m²", mesh.triangle_count(), mesh.total_area());
        }
        Command::Plan { mesh, prior_cloud, output } => {
            let mesh = io::load_mesh(mesh)?;
            let prior = prior_cloud
                .as_deref()
                .map(|p| io::load_geometry(p).map(|g| g.into_cloud()))
                .transpose()?;
            let mode = if prior.is_some() { WeightMode::DensityDeficit } else { cfg.solver.weight_mode };
            let outcome = plan_on_mesh(&mesh, &cfg, prior.as_ref(), mode).map_err(infeasible_or_data)?;
            io::save_plan(&outcome.plan, output)?;
            let c = &outcome.plan.coverage;
            println!(
                "{} ground + {} aerial viewpoints, planned coverage {:.4}",
                outcome.plan.selections.ground.len(),
                outcome.plan.selections.aerial.len(),
                c.planned_fraction
            );
            if c.planned_fraction < cfg.solver.target_coverage {
                return Err(Failure::Infeasible(format!(
                    "target {} not reached; {} samples stay uncovered",
                    cfg.solver.target_coverage,
                    c.residual_uncovered.len()
                )));
            }
        }
        Command::Simulate { truth_mesh, plan, output } => {
            let truth = io::load_mesh(truth_mesh)?;
            let plan = io::load_plan_verified(plan, &cfg.hash())?;
            let index = SpatialIndex::build(&truth)?;
            let scans_dir = output.join("scans");
            create_dir(&scans_dir)?;
            let mut total = 0;
            for (vp, cloud) in execute_plan(&index, &plan, &cfg, cfg.seed)? {
                total += cloud.len();
                io::write_cloud_ply(
                    &scans_dir.join(format!("vp_{}.ply", vp.id)),
                    &cloud,
                    None,
                    PlyEncoding::BinaryLittleEndian,
                )?;
            }
            println!("{} scans, {total} points", plan.viewpoints().len());
        }
        Command::Pipeline { truth_mesh, prior_mesh, output } => {
            let truth = io::load_mesh(truth_mesh)?;
            let prior_mesh = prior_mesh.as_deref().map(io::load_mesh).transpose()?;
            create_dir(output)?;
            let options = PipelineOptions {
                prior_mesh,
                run_dir: Some(output.clone()),
            };
            let result = run_pipeline(&truth, &cfg, &options).map_err(|e| match e.source {
                StageError::Solver(SolverError::NoProgress | SolverError::Infeasible { .. }) => {
                    Failure::Infeasible(e.to_string())
                }
                _ => Failure::Data(e.to_string()),
            })?;
            for r in &result.iterations {
                let s = &r.summary;
                println!(
                    "iteration {}: {} ground + {} aerial, planned {:.4}, achieved {:.4}",
                    s.iteration, s.ground_views, s.aerial_views, s.planned_fraction, s.cumulative_fraction
                );
            }
            println!("stopped: {:?}", result.stop_reason);
        }
        Command::Eval { truth_mesh, plan } => {
            let truth = io::load_mesh(truth_mesh)?;
            let plan = io::load_plan(plan)?;
            let index = SpatialIndex::build(&truth)?;
            let samples = sample_surface(&truth, cfg.candidates.sample_spacing)?;
            let report = evaluate_plan(&samples, &plan, &index, &cfg.sensors)?;
            let out = serde_json::json!({
                "achieved_fraction": report.achieved_fraction,
                "planned_fraction": plan.coverage.planned_fraction,
                "samples": samples.len(),
                "uncovered": report.residual.len(),
                "mean_spacing": report.mean_spacing,
            });
            println!("{}", serde_json::to_string_pretty(&out)?);
        }
        Command::ExportViz { mesh, plan, output } => {
            let mesh = io::load_mesh(mesh)?;
            let plan = io::load_plan(plan)?;
            let index = SpatialIndex::build(&mesh)?;
            let samples = sample_surface(&mesh, cfg.candidates.sample_spacing)?;
            let viewpoints = plan.viewpoints();
            let mut ground = fixedbitset::FixedBitSet::with_capacity(samples.len());
            let mut aerial = ground.clone();
            if !viewpoints.is_empty() {
                let m = build_coverage(&viewpoints, &samples, &cfg.sensors, &index)?;
                for (vp, row) in viewpoints.iter().zip(&m.rows) {
                    match vp.agent_class {
                        AgentClass::Ground => ground.union_with(row),
                        AgentClass::Aerial => aerial.union_with(row),
                    }
                }
            }
            let s = io::export_coverage_viz(&samples, &ground, &aerial, &viewpoints, output)?;
            println!(
                "ground {} / aerial-only {} / uncovered {}; viewpoints in {}",
                s.ground,
                s.aerial_only,
                s.uncovered,
                io::viewpoints_path(output).display()
            );
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Data(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Infeasible(m)) => {
            eprintln!("infeasible: {m}");
            ExitCode::from(3)
        }
    }
}
