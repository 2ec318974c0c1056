//! Occlusion in a room split by a partition wall: the exhaustive optimum and
//! the greedy choice on the same coverage matrix.
//!
//! cargo run --release --example partition_room

use scanplan::geometry::SpatialIndex;
use scanplan::scenes;
use scanplan::solver::{brute_force_cover, greedy_select, SolverParams, WeightVector};
use scanplan::visibility::{build_coverage, generate_ground_candidates, sample_surface, GroundParams, SensorModel, SensorSet};
use std::error::Error;

fn main() -> Result<(), Box<dyn Error>> {
    let mesh = scenes::partitioned_room(1.0);
    let index = SpatialIndex::build(&mesh)?;
    let candidates = generate_ground_candidates(&index, &GroundParams::default())?;
    let samples = sample_surface(&mesh, 0.25)?;

    let sensor = SensorModel {
        max_incidence: 90.0,
        min_elevation: -90.0,
        ..SensorModel::terrestrial()
    };
    let sensors = SensorSet { ground: sensor, aerial: sensor };
    let matrix = build_coverage(&candidates, &samples, &sensors, &index)?;
    let weights = WeightVector::from_samples(&samples)?;

    println!("{} candidates, {} samples", candidates.len(), samples.len());
    for (c, row) in candidates.iter().zip(&matrix.rows) {
        println!("  #{:<2} at ({:4.1}, {:3.1})  sees {:5} samples", c.id, c.position.x, c.position.y, row.count_ones(..));
    }

    let best = brute_force_cover(&matrix, &weights, 0.99)?;
    let params = SolverParams { target_coverage: 0.99, min_gain: 0.0, max_views: 64 };
    let greedy = greedy_select(&matrix, &weights, &params)?;
    println!("exhaustive optimum: {:?} -> {:.4}", best.ids(), best.coverage_fraction);
    println!("greedy:             {:?} -> {:.4}", greedy.ids(), greedy.coverage_fraction);
    Ok(())
}
