//! Ground-then-aerial planning around a box building. Roof surfaces are
//! invisible from tripods, so they fall to the aerial phase. Writes a colored
//! coverage cloud (blue ground, green aerial-only, red missed).
//!
//! cargo run --release --example box_building [viz.ply]

use scanplan::config::RunConfig;
use scanplan::io::export_coverage_viz;
use scanplan::pipeline::plan_on_mesh;
use scanplan::scenes;
use scanplan::solver::WeightMode;
use std::error::Error;

fn main() -> Result<(), Box<dyn Error>> {
    let mesh = scenes::box_building_in_yard(20.0, 6.0, 6.0, 4.0, 1.0);
    let config = RunConfig::default();
    let out = plan_on_mesh(&mesh, &config, None, WeightMode::Uniform)?;
    let phases = &out.phases;

    println!(
        "candidates: {} ground, {} aerial; samples: {}",
        out.ground_candidates.len(),
        out.aerial_candidates.len(),
        out.samples.len()
    );
    println!("ground phase:  {} views, coverage {:.4}", phases.ground.len(), phases.ground.coverage_fraction);
    println!("aerial phase:  {} views, picks {:?}", phases.aerial.len(), phases.aerial.picks);
    println!("combined:      {:.4}, {} samples unseen", phases.combined_fraction, phases.residual.len());
    if let Some(w) = &phases.aerial_warning {
        println!("warning: {w}");
    }

    let roof: Vec<usize> = out.samples.iter().filter(|s| s.normal.z > 0.9 && s.point.z > 3.9).map(|s| s.id).collect();
    let by_ground = roof.iter().filter(|&&i| phases.ground.covered.contains(i)).count();
    let by_aerial = roof.iter().filter(|&&i| phases.aerial.covered.contains(i)).count();
    println!("roof samples: {}, seen by ground {by_ground}, by aerial {by_aerial}", roof.len());

    let path = std::env::args().nth(1).unwrap_or_else(|| "box_building_viz.ply".into());
    let summary = export_coverage_viz(
        &out.samples,
        &phases.ground.covered,
        &phases.aerial.covered,
        &out.plan.viewpoints(),
        path.as_ref(),
    )?;
    println!("{path}: {summary:?}");
    Ok(())
}
