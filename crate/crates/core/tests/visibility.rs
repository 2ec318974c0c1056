use proptest::prelude::*;
use scanplan::geometry::{intersect_triangle, Point3, SpatialIndex, MIN_HIT_DISTANCE};
use scanplan::scenes;
use scanplan::visibility::{
    build_coverage, generate_aerial_candidates, generate_ground_candidates, occlusion_tolerance, sample_surface,
    visibility_test, AerialParams, AgentClass, GroundParams, SensorModel, SensorSet, SurfaceSample, Viewpoint,
    VisibilityError,
};

fn yard_scene() -> (scanplan::geometry::TriangleMesh, SpatialIndex) {
    let mesh = scenes::box_building_in_yard(16.0, 6.0, 6.0, 4.0, 1.0);
    let index = SpatialIndex::build(&mesh).unwrap();
    (mesh, index)
}

#[test]
fn sample_weights_sum_to_mesh_area() {
    for mesh in [
        scenes::partitioned_room(0.7),
        scenes::courtyard(1),
        scenes::uv_sphere(Point3::origin(), 3.0, 16, 32),
    ] {
        for spacing in [0.1, 0.25, 1.0] {
            let samples = sample_surface(&mesh, spacing).unwrap();
            let total: f64 = samples.iter().map(|s| s.weight_area).sum();
            assert!((total - mesh.total_area()).abs() < 1e-9 * mesh.total_area());
            assert!(samples.len() >= mesh.triangle_count());
            assert!(samples.iter().enumerate().all(|(i, s)| s.id == i));
        }
    }
}

/// Length of the shortest axis-aligned probe from `(x, y)` that reaches a
/// vertical cylinder, or infinity when no axis ray meets it.
fn axis_probe_to_cylinder(x: f64, y: f64, cx: f64, cy: f64, r: f64) -> f64 {
    let along = |u: f64, v: f64| {
        if v.abs() < r {
            (u.abs() - (r * r - v * v).sqrt()).max(0.0)
        } else {
            f64::INFINITY
        }
    };
    along(x - cx, y - cy).min(along(y - cy, x - cx))
}

#[test]
fn ground_candidates_keep_clear_of_a_column() {
    let (cx, cy, radius, clearance) = (5.0, 5.0, 1.0, 0.5);
    let mesh = scenes::floor_with_column(10.0, (cx, cy), radius, 3.0, 96);
    let index = SpatialIndex::build(&mesh).unwrap();
    let params = GroundParams {
        grid_spacing: 0.25,
        clearance_radius: clearance,
        ..GroundParams::default()
    };
    let cands = generate_ground_candidates(&index, &params).unwrap();
    assert!(cands.iter().all(|c| (c.position.z - params.mount_height).abs() < 1e-12));
    let kept = |x: f64, y: f64| {
        cands
            .iter()
            .any(|c| (c.position.x - x).abs() < 1e-9 && (c.position.y - y).abs() < 1e-9)
    };
    let mut checked = 0;
    for i in 1..40 {
        for j in 1..40 {
            let (x, y) = (i as f64 * 0.25, j as f64 * 0.25);
            let probe = axis_probe_to_cylinder(x, y, cx, cy, radius);
            // The polygonal column differs from the cylinder by under 1 mm.
            if (probe - clearance).abs() < 0.01 {
                continue;
            }
            let inside = ((x - cx).powi(2) + (y - cy).powi(2)).sqrt() < radius;
            assert_eq!(kept(x, y), probe > clearance && !inside, "node ({x}, {y}) probe {probe}");
            checked += 1;
        }
    }
    assert!(checked > 1400);
}

fn distance_to_box(p: &Point3, lo: [f64; 3], hi: [f64; 3]) -> f64 {
    let d: f64 = (0..3)
        .map(|a| (lo[a] - p[a]).max(0.0).max(p[a] - hi[a]).powi(2))
        .sum();
    d.sqrt()
}

#[test]
fn aerial_candidates_respect_standoff_and_band() {
    let (_, index) = yard_scene();
    let params = AerialParams {
        lattice_spacing: 2.0,
        ..AerialParams::default()
    };
    let cands = generate_aerial_candidates(&index, &params).unwrap();
    assert!(!cands.is_empty());
    for c in &cands {
        let p = c.position;
        assert_eq!(c.agent_class, AgentClass::Aerial);
        let to_building = distance_to_box(&p, [-3.0, -3.0, 0.0], [3.0, 3.0, 4.0]);
        let to_yard = p.z;
        assert!(to_building.min(to_yard) > params.standoff - 1e-9, "{p:?}");
        let over_roof = p.x.abs() < 3.0 && p.y.abs() < 3.0;
        let altitude = if over_roof { p.z - 4.0 } else { p.z };
        assert!(altitude >= params.min_altitude && altitude <= params.max_altitude);
    }
    assert!(cands.iter().enumerate().all(|(i, c)| c.id == i));
}

#[test]
fn missing_ground_is_reported() {
    let mesh = scenes::uv_sphere(Point3::new(0.0, 0.0, 10.0), 1.0, 4, 4).flipped();
    let index = SpatialIndex::build(&mesh).unwrap();
    assert_eq!(
        generate_ground_candidates(&index, &GroundParams::default()).unwrap_err(),
        VisibilityError::NoGroundFound
    );
}

#[test]
fn parallel_coverage_matches_single_thread() {
    let (mesh, index) = yard_scene();
    let samples = sample_surface(&mesh, 0.5).unwrap();
    let mut cands = generate_ground_candidates(&index, &GroundParams::default()).unwrap();
    let n = cands.len();
    cands.extend(
        generate_aerial_candidates(&index, &AerialParams::default())
            .unwrap()
            .into_iter()
            .map(|mut v| {
                v.id += n;
                v
            }),
    );
    let sensors = SensorSet::default();
    let single = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap()
        .install(|| build_coverage(&cands, &samples, &sensors, &index).unwrap());
    let many = rayon::ThreadPoolBuilder::new()
        .num_threads(4)
        .build()
        .unwrap()
        .install(|| build_coverage(&cands, &samples, &sensors, &index).unwrap());
    assert_eq!(single.rows, many.rows);
    for (c, row) in cands.iter().zip(&single.rows) {
        let sensor = sensors.for_class(c.agent_class);
        for s in samples.iter().step_by(7) {
            assert_eq!(row.contains(s.id), visibility_test(c, s, sensor, &index));
        }
    }
}

#[test]
fn coverage_rejects_empty_input() {
    let (mesh, index) = yard_scene();
    let samples = sample_surface(&mesh, 1.0).unwrap();
    let vp = Viewpoint::new(0, Point3::new(7.0, 7.0, 1.5), AgentClass::Ground);
    assert_eq!(
        build_coverage(&[], &samples, &SensorSet::default(), &index).unwrap_err(),
        VisibilityError::EmptyInput
    );
    assert_eq!(
        build_coverage(&[vp], &[], &SensorSet::default(), &index).unwrap_err(),
        VisibilityError::EmptyInput
    );
    let mut bad = SensorSet::default();
    bad.ground.max_range = 0.1;
    assert!(matches!(
        build_coverage(&[vp], &samples, &bad, &index),
        Err(VisibilityError::InvalidSensor(_))
    ));
}

/// No triangle crosses the open segment between a viewpoint and a sample it
/// reportedly sees, short of the occlusion tolerance.
fn segment_is_clear(vp: &Viewpoint, s: &SurfaceSample, index: &SpatialIndex) -> bool {
    let offset = s.point - vp.position;
    let d = offset.norm();
    let dir = offset / d;
    let tol = occlusion_tolerance(d);
    (0..index.triangle_count())
        .filter_map(|t| intersect_triangle(&vp.position, &dir, index.triangle(t)))
        .all(|t| t <= MIN_HIT_DISTANCE || t >= d - tol)
}

#[test]
fn visible_samples_have_a_clear_line_of_sight() {
    let mesh = scenes::partitioned_room(1.0);
    let index = SpatialIndex::build(&mesh).unwrap();
    let samples = sample_surface(&mesh, 0.5).unwrap();
    let sensor = SensorModel::terrestrial();
    let mut seen = 0;
    for pos in [Point3::new(2.0, 2.0, 1.5), Point3::new(8.0, 1.0, 1.5)] {
        let vp = Viewpoint::new(0, pos, AgentClass::Ground);
        for s in &samples {
            if visibility_test(&vp, s, &sensor, &index) {
                seen += 1;
                assert!(segment_is_clear(&vp, s, &index), "{pos:?} -> {:?}", s.point);
            }
        }
    }
    assert!(seen > 100);
}

#[test]
fn limited_field_of_view_follows_heading() {
    let mesh = scenes::room_shell(10.0, 10.0, 3.0, 1.0);
    let index = SpatialIndex::build(&mesh).unwrap();
    let samples = sample_surface(&mesh, 0.5).unwrap();
    let mut sensor = SensorModel::terrestrial();
    sensor.horizontal_fov = 90.0;
    let mut vp = Viewpoint::new(0, Point3::new(5.0, 5.0, 1.5), AgentClass::Ground);
    vp.heading = Some(90.0);
    for s in &samples {
        if visibility_test(&vp, s, &sensor, &index) {
            let off = s.point - vp.position;
            let az = off.y.atan2(off.x).to_degrees();
            assert!((az - 90.0).abs() <= 45.0 + 1e-9, "azimuth {az}");
        }
    }
}

fn sensors_with(range: f64, incidence: f64) -> SensorModel {
    SensorModel {
        max_range: range,
        max_incidence: incidence,
        ..SensorModel::terrestrial()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn relaxing_range_or_incidence_never_loses_coverage(
        r1 in 2.0f64..20.0, dr in 0.0f64..10.0,
        i1 in 20.0f64..85.0, di in 0.0f64..5.0,
        x in 1.0f64..10.0, y in 0.8f64..4.2,
    ) {
        let mesh = scenes::partitioned_room(1.0);
        let index = SpatialIndex::build(&mesh).unwrap();
        let samples = sample_surface(&mesh, 0.5).unwrap();
        let vp = Viewpoint::new(0, Point3::new(x, y, 1.5), AgentClass::Ground);
        let tight = sensors_with(r1, i1);
        let loose = sensors_with(r1 + dr, (i1 + di).min(90.0));
        for s in &samples {
            if visibility_test(&vp, s, &tight, &index) {
                prop_assert!(visibility_test(&vp, s, &loose, &index));
            }
        }
    }

    #[test]
    fn back_faces_are_never_visible(x in 0.5f64..9.5, y in 0.5f64..7.5, z in 0.5f64..2.5) {
        let mesh = scenes::room_shell(10.0, 8.0, 3.0, 1.0).flipped();
        let index = SpatialIndex::build(&mesh).unwrap();
        let samples = sample_surface(&mesh, 1.0).unwrap();
        let vp = Viewpoint::new(0, Point3::new(x, y, z), AgentClass::Ground);
        let sensor = sensors_with(60.0, 90.0);
        prop_assert!(samples.iter().all(|s| !visibility_test(&vp, s, &sensor, &index)));
    }
}
