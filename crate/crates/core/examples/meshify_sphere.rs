//! Reconstructs a sphere from a synthetic scan and reports how closely the
//! mesh follows it.
//!
//! cargo run --release --example meshify_sphere [out.ply]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use scanplan::geometry::{mesh_topology_report, Point3, PointCloud, Vec3};
use scanplan::io::{write_mesh_ply, PlyEncoding};
use scanplan::meshify::{reconstruct, MeshifyParams};
use std::error::Error;

fn main() -> Result<(), Box<dyn Error>> {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut points = Vec::new();
    while points.len() < 20_000 {
        let v = Vec3::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        if v.norm() > 1e-3 && v.norm() <= 1.0 {
            points.push(Point3::from(v.normalize()));
        }
    }
    // Every point remembers where it was scanned from, which orients normals.
    let origins = points.iter().map(|p| Point3::from(p.coords * 3.0)).collect();
    let cloud = PointCloud::new(points)?.with_origins(origins)?;

    let params = MeshifyParams { voxel_size: 0.05, truncation: 0.15, ..MeshifyParams::default() };
    let mesh = reconstruct(&cloud, &params)?;
    let topo = mesh_topology_report(&mesh);
    let mean_err = mesh.vertices().iter().map(|v| (v.coords.norm() - 1.0).abs()).sum::<f64>()
        / mesh.vertices().len() as f64;

    println!("{} triangles, {} components", mesh.triangle_count(), topo.components);
    println!("watertight: {}", topo.is_watertight());
    println!("area {:.4} (sphere {:.4})", mesh.total_area(), 4.0 * std::f64::consts::PI);
    println!("mean vertex error {mean_err:.5} m");

    if let Some(out) = std::env::args().nth(1) {
        write_mesh_ply(out.as_ref(), &mesh, PlyEncoding::BinaryLittleEndian)?;
        println!("wrote {out}");
    }
    Ok(())
}
