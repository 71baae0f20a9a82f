use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn armforge() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_armforge"));
    cmd.env_remove("ARMFORGE_CONFIG_DIR");
    cmd
}

fn run(args: &[&str]) -> Output {
    armforge().args(args).output().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json(out: &Output) -> serde_json::Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn config(name: &str) -> String {
    configs().join(name).to_str().unwrap().to_owned()
}

#[test]
fn dof_of_the_paper_linkage() {
    let out = run(&["dof", "--links", "5", "--full-joints", "4", "--half-joints", "0"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).trim(), "4");
}

#[test]
fn unreachable_target_is_a_domain_error() {
    let out = run(&["ik", "--target", "99,0,0"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(out.stdout.is_empty());
    let err: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"]["kind"], "Unreachable");
    assert!(err["error"]["message"].as_str().unwrap().contains("reach"));
}

#[test]
fn usage_errors_exit_2() {
    let out = run(&[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&["fk"]).status.code(), Some(2));
    assert_eq!(run(&["simulate", "--sweep", "3"]).status.code(), Some(2));
}

#[test]
fn version_and_help_on_every_subcommand() {
    for sub in ["dof", "fk", "ik", "statics", "gripper", "sense", "simulate", "score", "matrix", "bom", "workspace"] {
        let v = run(&[sub, "--version"]);
        assert!(v.status.success(), "{sub} --version");
        assert!(stdout(&v).contains(env!("CARGO_PKG_VERSION")));
        let h = run(&[sub, "--help"]);
        assert!(h.status.success(), "{sub} --help");
        assert!(stdout(&h).contains("Usage"));
    }
}

#[test]
fn fk_and_ik_round_trip() {
    let ik = json(&run(&["ik", "--config", &config("arm.json"), "--target", "0,0.3,0"]));
    assert!(ik["residual"].as_f64().unwrap() < 1e-4);
    for key in ["position", "orientation", "iters"] {
        assert!(!ik[key].is_null(), "{key}");
    }
    let angles: Vec<String> = ik["angles"].as_array().unwrap().iter().map(|a| a.to_string()).collect();
    let fk = json(&run(&["fk", "--angles", &angles.join(",")]));
    let p = fk["position"].as_array().unwrap();
    assert!((p[1].as_f64().unwrap() - 0.3).abs() < 1e-4);
}

#[test]
fn statics_csv_lists_every_joint() {
    let out = run(&["statics", "--angles", "1.5,0,0,0", "--payload", "0.011", "--format", "csv"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[0].starts_with("joint,"));
    assert_eq!(lines.len(), 5);
    assert!(json(&run(&["statics", "--angles", "1.5,0,0,0"])).is_object());
}

#[test]
fn angle_count_mismatch_is_rejected() {
    let out = run(&["fk", "--angles", "0,0"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn gripper_outputs() {
    let v = json(&run(&["gripper", "vacuum", "--cup-d", "0.030", "--syringe-d", "0.020", "--travel", "0.0476"]));
    assert!((v["vf"].as_f64().unwrap() - 2.2023e-5).abs() < 1e-8);
    let phys = json(&run(&["gripper", "vacuum", "--physical"]));
    assert!(phys["force"].as_f64().unwrap() > v["force"].as_f64().unwrap());
    let g = json(&run(&["gripper", "gears", "--n1", "18", "--p1", "0.005", "--n2", "18", "--p2", "0.005"]));
    assert_eq!(g["pd1"], g["center_distance"]);
    assert_eq!(run(&["gripper", "gears", "--n1", "2", "--p1", "0.005", "--n2", "18", "--p2", "0.005"]).status.code(), Some(1));
}

#[test]
fn sense_sweep_is_csv_and_seeded() {
    let args = ["sense", "sweep", "--from", "0.1", "--to", "1.0", "--step", "0.05", "--material", "wood", "--seed", "7"];
    let a = run(&args);
    assert!(a.status.success());
    let text = stdout(&a);
    assert_eq!(text.lines().next().unwrap(), "actual,measured,detected");
    assert_eq!(text.lines().count(), 1 + 19);
    assert_eq!(a.stdout, run(&args).stdout);
    let sensor = ["--sensor", &config("sensor.json")];
    assert_eq!(a.stdout, run(&[&args[..], &sensor[..]].concat()).stdout);
}

#[test]
fn simulate_is_byte_identical_per_seed() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for d in [&a, &b] {
        let out = run(&[
            "simulate",
            "--config",
            &config("arm.json"),
            "--scene",
            &config("scene.json"),
            "--seed",
            "7",
            "--dt",
            "0.001",
            "--out",
            d.to_str().unwrap(),
        ]);
        let summary = json(&out);
        assert_eq!(summary["succeeded"], true);
        assert!(summary["cycle_time"].as_f64().unwrap() <= 10.0);
        assert!(summary["placement_error"].as_f64().unwrap() <= 0.01);
    }
    for name in ["trace-block-1-seed7.csv", "summary-block-1-seed7.json"] {
        assert_eq!(fs::read(a.join(name)).unwrap(), fs::read(b.join(name)).unwrap(), "{name}");
    }
    let csv = fs::read_to_string(a.join("trace-block-1-seed7.csv")).unwrap();
    assert_eq!(csv.lines().next().unwrap(), "t,state,q0,q1,q2,q3,x,y,z");
}

#[test]
fn sweep_then_score() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let sweep = json(&run(&["simulate", "--sweep", "3", "--seed", "10", "--out", d]));
    assert_eq!(sweep.as_array().unwrap().len(), 3);
    let names: Vec<_> = fs::read_dir(dir.path()).unwrap().map(|e| e.unwrap().file_name()).collect();
    assert_eq!(names.len(), 6);
    assert!(!names.iter().any(|n| n.to_string_lossy().ends_with(".tmp")));

    let card = json(&run(&["score", "--traces", d, "--rubric", &config("rubric.json")]));
    assert_eq!(card["cycles"], 3);
    assert_eq!(card["successes"], 3);
    assert_eq!(card["total"].as_f64().unwrap(), 40.0);
}

#[test]
fn estop_is_reported_in_the_summary() {
    let s = json(&run(&["simulate", "--estop-at", "1.7"]));
    assert_eq!(s["succeeded"], false);
    assert_eq!(s["fault"], "EmergencyStop");
}

#[test]
fn score_of_an_empty_directory_fails() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run(&["score", "--traces", dir.path().to_str().unwrap()]).status.code(), Some(1));
}

#[test]
fn config_dir_is_searched() {
    let out = armforge()
        .env("ARMFORGE_CONFIG_DIR", configs())
        .args(["fk", "--config", "arm.json", "--angles", "1.5,0,0,0"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let missing = run(&["fk", "--config", "arm.json", "--angles", "1.5,0,0,0"]);
    assert_eq!(missing.status.code(), Some(1));
    let err: serde_json::Value = serde_json::from_slice(&missing.stderr).unwrap();
    assert_eq!(err["error"]["kind"], "Configuration");
}

#[test]
fn decision_matrices() {
    let r = json(&run(&["matrix", "eval", "--file", &config("table2.json")]));
    assert_eq!(r, json(&run(&["matrix", "eval", "--file", "table2"])));
    let csv = stdout(&run(&["matrix", "eval", "--file", "table2", "--format", "csv"]));
    assert!(csv.contains("2-Finger,0.750,1.125,1.125,2.800,1.650,7.450,1"));
    let s = json(&run(&["matrix", "sensitivity", "--file", "table2", "--criterion", "Cost"]));
    assert!(s.is_object());
    let q = json(&run(&["matrix", "qfd", "--file", &config("qfd.json")]));
    assert_eq!(q[0]["requirement"], "Camera resolution");
    assert_eq!(run(&["matrix", "sensitivity", "--file", "table2", "--criterion", "Color"]).status.code(), Some(1));
}

#[test]
fn bom_totals() {
    let b = json(&run(&["bom", "--file", &config("bom.json"), "--budget", "250"]));
    assert_eq!(b["total"].as_f64().unwrap(), 199.25);
    assert_eq!(b["headroom"].as_f64().unwrap(), 50.75);
    assert_eq!(b["unit_price"].as_f64().unwrap(), 259.03);
    assert_eq!(b["passes"], true);
    let tight = json(&run(&["bom", "--budget", "150"]));
    assert_eq!(tight["passes"], false);
    let csv = stdout(&run(&["bom", "--format", "csv"]));
    assert!(csv.starts_with("total,budget,passes,headroom,unit_price\n199.25,"));
}

#[test]
fn workspace_membership() {
    let w = json(&run(&["workspace", "--config", &config("workspace.json"), "--point", "0,0.33,0"]));
    assert_eq!(w["serviceable"], true);
    let behind = json(&run(&["workspace", "--point", "0,-0.33,0"]));
    assert_eq!(behind["in_workspace"], false);
    let params = json(&run(&["workspace"]));
    assert!((params["reach_radius"].as_f64().unwrap() - 0.4310).abs() < 1e-4);
}
