use scanplan::io::{load_geometry, load_plan, write_mesh_ply, PlyEncoding};
use scanplan::scenes;
use std::path::Path;
use std::process::{Command, Output};

fn scanplan(args: &[&dyn AsRef<std::ffi::OsStr>]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_scanplan"));
    for a in args {
        cmd.arg(a);
    }
    cmd.output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn setup(dir: &Path) {
    let mesh = scenes::box_building_in_yard(14.0, 6.0, 6.0, 4.0, 1.0);
    write_mesh_ply(&dir.join("truth.ply"), &mesh, PlyEncoding::BinaryLittleEndian).unwrap();
    std::fs::write(
        dir.join("run.toml"),
        "seed = 5\ncandidates.sample_spacing = 0.5\nsensors.ground.angular_resolution = 2\n\
         sensors.aerial.angular_resolution = 2\nmeshify.voxel_size = 0.2\nmeshify.truncation = 0.6\n",
    )
    .unwrap();
}

#[test]
fn subcommands_chain_end_to_end() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    setup(d);
    let cfg = d.join("run.toml");
    let truth = d.join("truth.ply");
    let plan = d.join("plan.json");

    let o = scanplan(&[&"--config", &cfg, &"plan", &truth, &"-o", &plan]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let parsed = load_plan(&plan).unwrap();
    assert!(!parsed.is_empty());
    assert_eq!(parsed.seed, 5);

    let o = scanplan(&[&"--config", &cfg, &"eval", &truth, &plan]);
    assert_eq!(o.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(report["achieved_fraction"].as_f64().unwrap() >= 0.98);

    let scans = d.join("scans_out");
    let o = scanplan(&[&"--config", &cfg, &"simulate", &truth, &plan, &"-o", &scans]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let files: Vec<_> = std::fs::read_dir(scans.join("scans")).unwrap().collect();
    assert_eq!(files.len(), parsed.viewpoints().len());

    // A plan made under one config is refused under another.
    let o = scanplan(&[&"--config", &cfg, &"--seed", &"6", &"simulate", &truth, &plan, &"-o", &scans]);
    assert_eq!(o.status.code(), Some(2));

    let first_scan = files[0].as_ref().unwrap().path();
    let mesh_out = d.join("scan_mesh.ply");
    let o = scanplan(&[&"--config", &cfg, &"meshify", &first_scan, &"-o", &mesh_out]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(load_geometry(&mesh_out).unwrap().into_mesh().is_some());

    let viz = d.join("viz.ply");
    let o = scanplan(&[&"--config", &cfg, &"export-viz", &truth, &plan, &"-o", &viz]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("uncovered 0"));
    assert!(d.join("viz_viewpoints.ply").exists());
}

#[test]
fn exit_codes_separate_usage_data_and_infeasibility() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    setup(d);
    let truth = d.join("truth.ply");

    assert_eq!(scanplan(&[&"plan"]).status.code(), Some(1));
    assert_eq!(scanplan(&[&"frobnicate"]).status.code(), Some(1));
    assert_eq!(scanplan(&[&"--help"]).status.code(), Some(0));

    let missing = d.join("missing.ply");
    let o = scanplan(&[&"plan", &missing, &"-o", &d.join("p.json")]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("missing.ply"));

    let bad_cfg = d.join("bad.toml");
    std::fs::write(&bad_cfg, "solver.target_coverage = 2.0\n").unwrap();
    let o = scanplan(&[&"--config", &bad_cfg, &"plan", &truth, &"-o", &d.join("p.json")]);
    assert_eq!(o.status.code(), Some(2));

    let unknown_key = d.join("typo.toml");
    std::fs::write(&unknown_key, "solver.target_coverag = 0.9\n").unwrap();
    let o = scanplan(&[&"--config", &unknown_key, &"plan", &truth, &"-o", &d.join("p.json")]);
    assert_eq!(o.status.code(), Some(2));

    // No aerial candidate survives the raised altitude band and ground
    // scanners cannot see the roof.
    let blind = d.join("blind.toml");
    std::fs::write(
        &blind,
        "candidates.sample_spacing = 0.5\ncandidates.aerial_alt_min = 200\ncandidates.aerial_alt_max = 201\n",
    )
    .unwrap();
    let o = scanplan(&[&"--config", &blind, &"plan", &truth, &"-o", &d.join("p.json")]);
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
}
