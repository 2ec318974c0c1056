//! Planning straight from an existing building model: the coarse survey is
//! skipped and the first plan is made on the supplied mesh. The example model
//! is deliberately simplified (no bench, no pier) to show how the loop copes
//! with a model that differs from the site.
//!
//! cargo run --release --example bim_bypass

use scanplan::config::RunConfig;
use scanplan::geometry::Point3;
use scanplan::pipeline::{run_pipeline, PipelineOptions};
use scanplan::scenes::{self, BoxFaces, MeshBuilder};
use scanplan::geometry::Aabb;
use std::error::Error;

fn simplified_model() -> scanplan::geometry::TriangleMesh {
    let mut b = MeshBuilder::new();
    b.ground_cells((-12.0, -12.0), (12.0, 12.0), 1.0, &[]);
    for (lo, hi) in [
        ((-8.0, -8.0), (8.0, -7.6)),
        ((-8.0, 7.6), (8.0, 8.0)),
        ((-8.0, -7.6), (-7.6, 7.6)),
        ((7.6, -7.6), (8.0, 7.6)),
    ] {
        let wall = Aabb {
            min: Point3::new(lo.0, lo.1, 0.0),
            max: Point3::new(hi.0, hi.1, 3.0),
        };
        b.axis_box(&wall, BoxFaces::NO_BOTTOM, true, 1.0);
    }
    b.build()
}

fn main() -> Result<(), Box<dyn Error>> {
    let truth = scenes::courtyard(1);
    let model = simplified_model();
    let mut config = RunConfig::default();
    config.pipeline.max_iterations = 2;
    let options = PipelineOptions {
        prior_mesh: Some(model),
        run_dir: None,
    };
    let result = run_pipeline(&truth, &config, &options)?;
    for r in &result.iterations {
        let s = &r.summary;
        println!(
            "iter {}: {} ground + {} aerial views, planned {:.4}, achieved {:.4}",
            s.iteration, s.ground_views, s.aerial_views, s.planned_fraction, s.cumulative_fraction
        );
    }
    println!("stopped: {:?}", result.stop_reason);
    Ok(())
}
