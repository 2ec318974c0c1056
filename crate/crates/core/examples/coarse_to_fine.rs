//! The full survey loop on the walled courtyard: noisy coarse walk-through,
//! reconstruction, planning on the rough model, simulated fine scans and
//! re-planning where density is thin.
//!
//! cargo run --release --example coarse_to_fine [run_dir]
//!
//! With a run directory every iteration's clouds, meshes, plan and report are
//! written there (several hundred MB).

use scanplan::config::RunConfig;
use scanplan::pipeline::{run_pipeline, PipelineOptions};
use scanplan::scenes;
use std::error::Error;
use std::time::Instant;

fn main() -> Result<(), Box<dyn Error>> {
    let truth = scenes::courtyard(1);
    let config = RunConfig::default();
    let options = PipelineOptions {
        prior_mesh: None,
        run_dir: std::env::args().nth(1).map(Into::into),
    };
    println!("reference: {} triangles, config {}", truth.triangle_count(), &config.hash()[..12]);

    let start = Instant::now();
    let result = run_pipeline(&truth, &config, &options)?;
    for r in &result.iterations {
        let s = &r.summary;
        println!(
            "iter {}: model {:>6} tris | {:>2} ground + {:>2} aerial | planned {:.4} | true {:.4} | cumulative {:.4} | spacing {:.3} m",
            s.iteration,
            s.model_triangles,
            s.ground_views,
            s.aerial_views,
            s.planned_fraction,
            s.iteration_fraction,
            s.cumulative_fraction,
            s.mean_spacing
        );
    }
    println!(
        "stopped: {:?} after {:.1} s, final coverage {:.4}",
        result.stop_reason,
        start.elapsed().as_secs_f64(),
        result.final_coverage()
    );
    Ok(())
}
