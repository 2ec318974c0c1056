//! End-to-end acceptance gate. Runs every criterion, prints one PASS/FAIL
//! line each and exits non-zero when any criterion fails.
//!
//! The parallel speedup part of the performance criterion needs at least
//! four hardware threads. On smaller machines it is still measured and
//! reported as FAIL, tagged `hardware`, and does not change the exit code.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use scanplan::config::RunConfig;
use scanplan::geometry::{mesh_topology_report, Point3, PointCloud, SpatialIndex, Vec3};
use scanplan::io::{export_coverage_viz, write_mesh_ply, PlyEncoding};
use scanplan::meshify::{reconstruct, MeshifyParams};
use scanplan::pipeline::{plan_on_mesh, run_pipeline, PipelineOptions};
use scanplan::scenes;
use scanplan::solver::{brute_force_cover, greedy_select, SolverParams, WeightMode, WeightVector};
use scanplan::tour::{has_improving_move, nn_tour, path_length, two_opt};
use scanplan::visibility::{
    build_coverage, generate_aerial_candidates, generate_ground_candidates, sample_surface, AerialParams,
    AgentClass, CoverageMatrix, GroundParams, SensorModel, SensorSet, SurfaceSample, Viewpoint,
};
use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::Instant;

enum Verdict {
    Pass,
    Fail,
    /// Failed only because the machine lacks the resources to show it.
    HardwareFail,
}

struct Outcome {
    verdict: Verdict,
    detail: String,
}

impl Outcome {
    fn check(ok: bool, detail: String) -> Self {
        Outcome {
            verdict: if ok { Verdict::Pass } else { Verdict::Fail },
            detail,
        }
    }
}

/// Panoramic sensor that sees the full sphere of directions.
fn full_sphere_sensor(max_range: f64) -> SensorModel {
    SensorModel {
        min_range: 0.6,
        max_range,
        max_incidence: 90.0,
        min_elevation: -90.0,
        max_elevation: 90.0,
        horizontal_fov: 360.0,
        angular_resolution: 0.5,
        range_noise_sigma: 0.0,
    }
}

fn uniform_weights(samples: &[SurfaceSample]) -> WeightVector {
    WeightVector::new(vec![1.0; samples.len()]).unwrap()
}

fn convex_room_sufficiency() -> Outcome {
    let start = Instant::now();
    let mesh = scenes::room_shell(10.0, 8.0, 3.0, 1.0);
    let index = SpatialIndex::build(&mesh).unwrap();
    let params = GroundParams {
        grid_spacing: 20.0,
        ..GroundParams::default()
    };
    let candidates = generate_ground_candidates(&index, &params).unwrap();
    let samples = sample_surface(&mesh, 0.25).unwrap();
    let sensor = full_sphere_sensor(60.0);
    let sensors = SensorSet {
        ground: sensor,
        aerial: sensor,
    };
    let matrix = build_coverage(&candidates, &samples, &sensors, &index).unwrap();
    let solver = SolverParams {
        target_coverage: 1.0,
        min_gain: 0.0,
        max_views: 64,
    };
    let sel = greedy_select(&matrix, &uniform_weights(&samples), &solver).unwrap();
    let secs = start.elapsed().as_secs_f64();
    Outcome::check(
        candidates.len() == 1 && sel.len() == 1 && sel.coverage_fraction == 1.0 && secs < 5.0,
        format!(
            "candidates={} selected={} coverage={} samples={} time={secs:.2}s (limit 5s)",
            candidates.len(),
            sel.len(),
            sel.coverage_fraction,
            samples.len()
        ),
    )
}

fn occlusion_minimality() -> Outcome {
    let start = Instant::now();
    let mesh = scenes::partitioned_room(1.0);
    let index = SpatialIndex::build(&mesh).unwrap();
    let params = GroundParams {
        grid_spacing: 2.0,
        ..GroundParams::default()
    };
    let candidates = generate_ground_candidates(&index, &params).unwrap();
    let samples = sample_surface(&mesh, 0.25).unwrap();
    let sensor = full_sphere_sensor(60.0);
    let sensors = SensorSet {
        ground: sensor,
        aerial: sensor,
    };
    let matrix = build_coverage(&candidates, &samples, &sensors, &index).unwrap();
    let weights = uniform_weights(&samples);
    let optimum = brute_force_cover(&matrix, &weights, 0.99).unwrap();
    let solver = SolverParams {
        target_coverage: 0.99,
        min_gain: 0.0,
        max_views: 64,
    };
    let greedy = greedy_select(&matrix, &weights, &solver).unwrap();
    let secs = start.elapsed().as_secs_f64();
    Outcome::check(
        optimum.len() == 2 && greedy.len() == 2 && greedy.coverage_fraction >= 0.99 && secs < 30.0,
        format!(
            "candidates={} optimum={} greedy={} greedy_coverage={:.4} time={secs:.2}s (limit 30s)",
            candidates.len(),
            optimum.len(),
            greedy.len(),
            greedy.coverage_fraction
        ),
    )
}

fn greedy_bound() -> Outcome {
    let instances = 200;
    let mut violations = 0;
    let mut ratio_sum = 0.0;
    let mut worst: f64 = 0.0;
    for seed in 0..instances {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.random_range(2..=15usize);
        let m = rng.random_range(5..=80usize);
        let p = rng.random_range(0.05..0.4);
        let mut sets: Vec<Vec<usize>> = vec![Vec::new(); n];
        for s in 0..m {
            let mut hit = false;
            for set in sets.iter_mut() {
                if rng.random_bool(p) {
                    set.push(s);
                    hit = true;
                }
            }
            if !hit {
                sets[rng.random_range(0..n)].push(s);
            }
        }
        let refs: Vec<&[usize]> = sets.iter().map(|s| s.as_slice()).collect();
        let matrix = CoverageMatrix::from_sets(m, &refs);
        let weights = WeightVector::new(vec![1.0; m]).unwrap();
        let solver = SolverParams {
            target_coverage: 1.0,
            min_gain: 0.0,
            max_views: 64,
        };
        let g = greedy_select(&matrix, &weights, &solver).unwrap().len() as f64;
        let opt = brute_force_cover(&matrix, &weights, 1.0).unwrap().len() as f64;
        let ratio = g / opt;
        ratio_sum += ratio;
        worst = worst.max(ratio);
        if g > (1.0 + (m as f64).ln()) * opt {
            violations += 1;
        }
    }
    Outcome::check(
        violations == 0,
        format!(
            "instances={instances} violations={violations} mean_ratio={:.4} worst_ratio={worst:.4}",
            ratio_sum / instances as f64
        ),
    )
}

fn meshify_fidelity() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut points = Vec::with_capacity(20_000);
    while points.len() < 20_000 {
        let v = Vec3::new(
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
        );
        let n = v.norm();
        if n > 1e-3 && n <= 1.0 {
            points.push(Point3::from(v / n));
        }
    }
    let origins = points.iter().map(|p| Point3::from(p.coords * 3.0)).collect();
    let cloud = PointCloud::new(points).unwrap().with_origins(origins).unwrap();
    let params = MeshifyParams {
        voxel_size: 0.05,
        truncation: 0.15,
        ..MeshifyParams::default()
    };
    let mesh = reconstruct(&cloud, &params).unwrap();
    let secs = start.elapsed().as_secs_f64();
    let topo = mesh_topology_report(&mesh);
    let area = mesh.total_area();
    let sphere = 4.0 * std::f64::consts::PI;
    let area_err = (area - sphere).abs() / sphere;
    let mean_dist =
        mesh.vertices().iter().map(|v| (v.coords.norm() - 1.0).abs()).sum::<f64>() / mesh.vertices().len() as f64;
    Outcome::check(
        topo.is_watertight() && area_err <= 0.10 && mean_dist <= 0.05 && secs < 20.0,
        format!(
            "boundary={} non_manifold={} area={area:.4} rel_err={area_err:.4} mean_dist={mean_dist:.5} time={secs:.2}s (limit 20s)",
            topo.boundary_edges, topo.non_manifold_edges
        ),
    )
}

fn ground_aerial_split() -> Outcome {
    let mesh = scenes::box_building_in_yard(20.0, 6.0, 6.0, 4.0, 1.0);
    let config = RunConfig::default();
    let out = plan_on_mesh(&mesh, &config, None, WeightMode::Uniform).unwrap();
    let roof: Vec<usize> = out
        .samples
        .iter()
        .filter(|s| s.normal.z > 0.9 && s.point.z > 3.9)
        .map(|s| s.id)
        .collect();
    let facades: Vec<usize> = out.samples.iter().filter(|s| s.normal.z.abs() < 0.1).map(|s| s.id).collect();
    let ground_on_roof = roof.iter().filter(|&&i| out.phases.ground.covered.contains(i)).count();
    let aerial_on_roof = roof.iter().filter(|&&i| out.phases.aerial.covered.contains(i)).count();
    let blue_facades = facades.iter().filter(|&&i| out.phases.ground.covered.contains(i)).count();
    let dir = tempfile::tempdir().unwrap();
    let viewpoints = out.plan.viewpoints();
    let viz = export_coverage_viz(
        &out.samples,
        &out.phases.ground.covered,
        &out.phases.aerial.covered,
        &viewpoints,
        &dir.path().join("viz.ply"),
    )
    .unwrap();
    let green_roof = roof
        .iter()
        .filter(|&&i| !out.phases.ground.covered.contains(i) && out.phases.aerial.covered.contains(i))
        .count();
    Outcome::check(
        !roof.is_empty()
            && ground_on_roof == 0
            && aerial_on_roof == roof.len()
            && green_roof == roof.len()
            && blue_facades == facades.len()
            && viz.uncovered == 0
            && out.phases.combined_fraction >= 0.98,
        format!(
            "roof={} ground_on_roof={ground_on_roof} aerial_on_roof={aerial_on_roof} facades_blue={blue_facades}/{} \
             red={} combined={:.4} views={}+{}",
            roof.len(),
            facades.len(),
            viz.uncovered,
            out.phases.combined_fraction,
            out.phases.ground.len(),
            out.phases.aerial.len()
        ),
    )
}

fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let head = rest.remove(i);
        for mut tail in permutations(&rest) {
            tail.insert(0, head);
            out.push(tail);
        }
    }
    out
}

fn tour_quality() -> Outcome {
    let instances = 200;
    let mut failures = Vec::new();
    let mut gaps = Vec::with_capacity(instances);
    for seed in 0..instances as u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.random_range(2..=8usize);
        let points: Vec<(usize, Point3)> = (0..n)
            .map(|i| {
                (
                    i,
                    Point3::new(
                        rng.random_range(0.0..20.0),
                        rng.random_range(0.0..20.0),
                        rng.random_range(0.0..5.0),
                    ),
                )
            })
            .collect();
        let nn = nn_tour(&points, 0, AgentClass::Ground).unwrap();
        let opt2 = two_opt(&nn, &points);
        let mut sorted = opt2.order.clone();
        sorted.sort_unstable();
        let valid = opt2.order[0] == 0 && sorted == (0..n).collect::<Vec<_>>();
        let rest: Vec<usize> = (1..n).collect();
        let best = permutations(&rest)
            .into_iter()
            .map(|mut p| {
                p.insert(0, 0);
                path_length(&p, &points)
            })
            .fold(f64::INFINITY, f64::min);
        let gap = if best > 0.0 { (opt2.length - best) / best } else { 0.0 };
        gaps.push(gap);
        if !valid || opt2.length > nn.length + 1e-9 || has_improving_move(&opt2, &points) || gap < -1e-9 {
            failures.push(seed);
        }
    }
    gaps.sort_by(f64::total_cmp);
    let optimal = gaps.iter().filter(|g| **g <= 1e-9).count();
    let mean = gaps.iter().sum::<f64>() / gaps.len() as f64;
    Outcome::check(
        failures.is_empty(),
        format!(
            "instances={instances} failing_seeds={failures:?} optimal={optimal} gap_mean={mean:.4} \
             gap_median={:.4} gap_p90={:.4} gap_max={:.4}",
            gaps[gaps.len() / 2],
            gaps[gaps.len() * 9 / 10],
            gaps[gaps.len() - 1]
        ),
    )
}

fn coarse_to_fine() -> Outcome {
    let start = Instant::now();
    let truth = scenes::courtyard(1);
    let config = RunConfig::default();
    let result = run_pipeline(&truth, &config, &PipelineOptions::default()).unwrap();
    let secs = start.elapsed().as_secs_f64();
    let fractions: Vec<f64> = result.iterations.iter().map(|r| r.summary.cumulative_fraction).collect();
    let first = result.iterations[0].summary.iteration_fraction;
    let planned = result.iterations[0].summary.planned_fraction;
    let ok = config.solver.target_coverage == 0.98
        && config.sim.coarse_range_noise_sigma == 0.03
        && config.sim.pose_jitter_sigma == 0.05
        && first >= 0.93
        && fractions.len() >= 2
        && fractions[1] >= fractions[0]
        && secs < 300.0;
    Outcome::check(
        ok,
        format!(
            "planned_on_coarse={planned:.4} true_iter1={first:.4} cumulative={fractions:.4?} stop={:?} time={secs:.1}s (limit 300s)",
            result.stop_reason
        ),
    )
}

fn collect_files(root: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut out = BTreeMap::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(d) = stack.pop() {
        for entry in std::fs::read_dir(&d).unwrap() {
            let p = entry.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                let rel = p.strip_prefix(root).unwrap().display().to_string();
                out.insert(rel, std::fs::read(&p).unwrap());
            }
        }
    }
    out
}

fn determinism() -> Outcome {
    let work = tempfile::tempdir().unwrap();
    let truth = work.path().join("truth.ply");
    let mesh = scenes::box_building_in_yard(16.0, 6.0, 6.0, 4.0, 1.0);
    write_mesh_ply(&truth, &mesh, PlyEncoding::BinaryLittleEndian).unwrap();
    let config = work.path().join("run.toml");
    std::fs::write(&config, "seed = 11\npipeline.max_iterations = 2\n").unwrap();
    let runs: Vec<_> = ["a", "b"]
        .iter()
        .map(|name| {
            let out = work.path().join(name);
            let status = Command::new(env!("CARGO_BIN_EXE_scanplan"))
                .arg("--config")
                .arg(&config)
                .arg("pipeline")
                .arg(&truth)
                .arg("-o")
                .arg(&out)
                .output()
                .unwrap();
            (status.status.code(), collect_files(&out))
        })
        .collect();
    let (a, b) = (&runs[0].1, &runs[1].1);
    let plans = a.keys().filter(|k| k.ends_with("plan.json")).count();
    let scans = a.keys().filter(|k| k.contains("scans") && k.ends_with(".ply")).count();
    let differing: Vec<&String> = a.keys().filter(|k| b.get(*k) != a.get(*k)).collect();
    Outcome::check(
        runs[0].0 == Some(0) && runs[1].0 == Some(0) && plans > 0 && scans > 0 && a.len() == b.len() && differing.is_empty(),
        format!(
            "exit={:?}/{:?} files={} plan_files={plans} scan_clouds={scans} differing={differing:?}",
            runs[0].0,
            runs[1].0,
            a.len()
        ),
    )
}

fn evenly<T: Copy>(items: &[T], n: usize) -> Vec<T> {
    (0..n).map(|i| items[i * items.len() / n]).collect()
}

fn performance_envelope() -> Outcome {
    let mesh = scenes::courtyard(2);
    let index = SpatialIndex::build(&mesh).unwrap();
    let all_samples = sample_surface(&mesh, 0.2).unwrap();
    let samples: Vec<SurfaceSample> = evenly(&all_samples, 20_000)
        .into_iter()
        .enumerate()
        .map(|(i, mut s)| {
            s.id = i;
            s
        })
        .collect();
    let ground = generate_ground_candidates(
        &index,
        &GroundParams {
            grid_spacing: 1.5,
            ..GroundParams::default()
        },
    )
    .unwrap();
    let aerial = generate_aerial_candidates(&index, &AerialParams::default()).unwrap();
    let mut candidates: Vec<Viewpoint> = evenly(&ground, 150);
    candidates.extend(evenly(&aerial, 50));
    for (i, c) in candidates.iter_mut().enumerate() {
        c.id = i;
    }
    let sensors = SensorSet::default();
    let timed = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        let start = Instant::now();
        let m = pool.install(|| build_coverage(&candidates, &samples, &sensors, &index).unwrap());
        (m, start.elapsed().as_secs_f64())
    };
    let (serial, t1) = timed(1);
    let (parallel, t4) = timed(4);
    let identical = serial.rows == parallel.rows;
    let speedup = t1 / t4;
    let cores = std::thread::available_parallelism().map_or(1, |n| n.get());
    let detail = format!(
        "triangles={} candidates={} samples={} single={t1:.2}s (limit 60s) four={t4:.2}s speedup={speedup:.2}x \
         (need 2x) identical={identical} hardware_threads={cores}",
        mesh.triangle_count(),
        candidates.len(),
        samples.len()
    );
    let base_ok = t1 < 60.0 && identical && candidates.len() == 200 && samples.len() == 20_000;
    let verdict = match (base_ok, speedup >= 2.0) {
        (true, true) => Verdict::Pass,
        (true, false) if cores < 4 => Verdict::HardwareFail,
        _ => Verdict::Fail,
    };
    Outcome { verdict, detail }
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("convex room sufficiency", convex_room_sufficiency),
        ("occlusion and minimality", occlusion_minimality),
        ("greedy bound", greedy_bound),
        ("meshify fidelity", meshify_fidelity),
        ("ground/aerial split", ground_aerial_split),
        ("tour quality", tour_quality),
        ("coarse-to-fine honesty", coarse_to_fine),
        ("determinism", determinism),
        ("performance envelope", performance_envelope),
    ];
    let filter: Option<String> = std::env::args().skip(1).find(|a| !a.starts_with('-'));
    let mut hard_failures = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let label = format!("criterion {} {name}", i + 1);
        if filter.as_ref().is_some_and(|f| !label.contains(f.as_str())) {
            continue;
        }
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|e| Outcome {
            verdict: Verdict::Fail,
            detail: format!(
                "panicked: {}",
                e.downcast_ref::<String>()
                    .cloned()
                    .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_default()
            ),
        });
        let tag = match outcome.verdict {
            Verdict::Pass => "PASS",
            Verdict::Fail => {
                hard_failures += 1;
                "FAIL"
            }
            Verdict::HardwareFail => "FAIL [hardware]",
        };
        println!("{label}: {tag} | {}", outcome.detail);
    }
    if hard_failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
