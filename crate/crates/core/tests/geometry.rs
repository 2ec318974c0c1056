use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use scanplan::geometry::{
    direction, intersect_triangle, mesh_topology_report, Aabb, Point3, PointCloud, PointIndex, SpatialIndex, Vec3,
    MIN_HIT_DISTANCE,
};
use scanplan::scenes;

fn exhaustive_hit(index: &SpatialIndex, origin: &Point3, dir: &Vec3, t_max: f64) -> Option<f64> {
    (0..index.triangle_count())
        .filter_map(|t| intersect_triangle(origin, dir, index.triangle(t)))
        .filter(|&t| t > MIN_HIT_DISTANCE && t <= t_max)
        .min_by(f64::total_cmp)
}

#[test]
fn ray_cast_matches_exhaustive_search() {
    let mesh = scenes::uv_sphere(Point3::origin(), 1.0, 50, 100);
    assert!(mesh.triangle_count() >= 9_000);
    let index = SpatialIndex::build(&mesh).unwrap();
    assert!(index.check_bounds());
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut hits = 0;
    for _ in 0..1000 {
        let origin = Point3::new(
            rng.random_range(-2.0..2.0),
            rng.random_range(-2.0..2.0),
            rng.random_range(-2.0..2.0),
        );
        let Some(dir) = direction(Vec3::new(
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
        )) else {
            continue;
        };
        let fast = index.ray_cast(&origin, &dir, 10.0);
        let slow = exhaustive_hit(&index, &origin, &dir, 10.0);
        match (fast, slow) {
            (None, None) => {}
            (Some(h), Some(t)) => {
                hits += 1;
                assert!((h.t - t).abs() <= 1e-9 * t.max(1.0), "bvh {} vs exhaustive {t}", h.t);
                assert!((h.point - (origin + dir.into_inner() * h.t)).norm() < 1e-9);
            }
            other => panic!("disagreement: {other:?}"),
        }
    }
    assert!(hits > 100, "only {hits} rays hit");
}

#[test]
fn knn_matches_exhaustive_search() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let points: Vec<Point3> = (0..5000)
        .map(|_| {
            Point3::new(
                rng.random_range(0.0..10.0),
                rng.random_range(0.0..10.0),
                rng.random_range(0.0..3.0),
            )
        })
        .collect();
    let index = PointIndex::new(&points).unwrap();
    for _ in 0..200 {
        let q = Point3::new(
            rng.random_range(-1.0..11.0),
            rng.random_range(-1.0..11.0),
            rng.random_range(-1.0..4.0),
        );
        let mut brute: Vec<f64> = points.iter().map(|p| (p - q).norm()).collect();
        brute.sort_by(f64::total_cmp);
        let got = index.knn(&q, 8);
        assert_eq!(got.len(), 8);
        for (k, (i, d)) in got.iter().enumerate() {
            assert!((d - brute[k]).abs() < 1e-12);
            assert!(((points[*i] - q).norm() - d).abs() < 1e-12);
        }
        let r = (brute[20] + brute[21]) / 2.0;
        assert_eq!(index.count_within(&q, r), 21);
        assert_eq!(index.within(&q, r).len(), 21);
        let (_, nd) = index.nearest(&q);
        assert_eq!(nd, brute[0]);
    }
}

#[test]
fn sphere_scene_is_closed() {
    let mesh = scenes::uv_sphere(Point3::origin(), 2.0, 12, 24);
    let report = mesh_topology_report(&mesh);
    assert!(report.is_watertight(), "{report:?}");
    assert_eq!(report.components, 1);
}

#[test]
fn voxel_downsample_keeps_one_point_per_cell() {
    let points: Vec<Point3> = (0..1000)
        .map(|i| Point3::new((i % 10) as f64 * 0.01, (i / 10 % 10) as f64 * 0.01, (i / 100) as f64 * 0.01))
        .collect();
    let cloud = PointCloud::new(points).unwrap();
    let down = cloud.voxel_downsample(1.0);
    assert_eq!(down.len(), 1);
}

proptest! {
    #[test]
    fn nearest_hit_is_no_farther_than_any_hit(
        ox in -3.0f64..3.0, oy in -3.0f64..3.0, oz in -3.0f64..3.0,
        dx in -1.0f64..1.0, dy in -1.0f64..1.0, dz in -1.0f64..1.0,
    ) {
        let mesh = scenes::uv_sphere(Point3::new(0.3, -0.2, 0.1), 1.5, 8, 16);
        let index = SpatialIndex::build(&mesh).unwrap();
        let origin = Point3::new(ox, oy, oz);
        if let Some(dir) = direction(Vec3::new(dx, dy, dz)) {
            let fast = index.ray_cast(&origin, &dir, 20.0).map(|h| h.t);
            let slow = exhaustive_hit(&index, &origin, &dir, 20.0);
            prop_assert_eq!(fast.is_some(), slow.is_some());
            if let (Some(a), Some(b)) = (fast, slow) {
                prop_assert!((a - b).abs() <= 1e-9 * b.max(1.0));
            }
        }
    }

    #[test]
    fn aabb_from_points_contains_them(pts in prop::collection::vec((-50.0f64..50.0, -50.0f64..50.0, -50.0f64..50.0), 1..40)) {
        let points: Vec<Point3> = pts.iter().map(|&(x, y, z)| Point3::new(x, y, z)).collect();
        let b = Aabb::from_points(&points);
        prop_assert!(points.iter().all(|p| b.contains(p)));
        prop_assert!(points.iter().all(|p| b.distance_squared(p) == 0.0));
    }

    #[test]
    fn surface_distance_agrees_with_sphere(x in -4.0f64..4.0, y in -4.0f64..4.0, z in -4.0f64..4.0) {
        let mesh = scenes::uv_sphere(Point3::origin(), 1.0, 40, 80);
        let index = SpatialIndex::build(&mesh).unwrap();
        let p = Point3::new(x, y, z);
        let analytic = (p.coords.norm() - 1.0).abs();
        let got = index.distance_to_surface(&p, 10.0).unwrap();
        // The polyhedron lies inside the sphere, within its chord sagitta.
        prop_assert!((got - analytic).abs() < 0.01, "{} vs {}", got, analytic);
    }
}
