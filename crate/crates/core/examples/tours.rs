//! Orders scattered viewpoints into an open path: nearest-neighbour
//! construction, then 2-opt.
//!
//! cargo run --release --example tours [count] [seed]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use scanplan::geometry::{Aabb, Point3};
use scanplan::tour::{nn_tour, plan_tours, two_opt, Depots};
use scanplan::visibility::{AgentClass, Viewpoint};

fn main() {
    let mut args = std::env::args().skip(1);
    let count: usize = args.next().and_then(|a| a.parse().ok()).unwrap_or(40);
    let seed: u64 = args.next().and_then(|a| a.parse().ok()).unwrap_or(3);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let points: Vec<(usize, Point3)> = (0..count)
        .map(|i| (i, Point3::new(rng.random_range(0.0..50.0), rng.random_range(0.0..50.0), 1.5)))
        .collect();
    let nn = nn_tour(&points, 0, AgentClass::Ground).expect("non-empty");
    let improved = two_opt(&nn, &points);
    println!("nearest neighbour: {:8.2} m", nn.length);
    println!("after 2-opt:       {:8.2} m", improved.length);
    println!("order: {:?}", improved.order);

    // Mixed classes get one tour each, starting near their depot.
    let vps: Vec<Viewpoint> = points
        .iter()
        .map(|&(id, p)| {
            if id % 4 == 0 {
                Viewpoint::new(id, Point3::new(p.x, p.y, 20.0), AgentClass::Aerial)
            } else {
                Viewpoint::new(id, p, AgentClass::Ground)
            }
        })
        .collect();
    let bounds = Aabb::from_points(vps.iter().map(|v| &v.position));
    for t in plan_tours(&vps, &bounds, &Depots::default()).expect("unique ids") {
        println!("{:?}: {} stops, {:.2} m", t.agent_class, t.order.len(), t.length);
    }
}
