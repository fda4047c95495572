use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn cslab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cslab")).args(args).output().expect("binary runs")
}

fn scratch(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name);
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn passing_check_exits_zero() {
    let out = cslab(&["cs-check", "--scenario", "circle", "--trials", "40"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["pass"], true);
}

#[test]
fn negative_controls_exit_two() {
    for map in ["shift", "inconsistent-shuffle"] {
        let out = cslab(&["cs-check", "--map", map, "--trials", "20"]);
        assert_eq!(out.status.code(), Some(2), "{map}");
    }
}

#[test]
fn configuration_errors_exit_three() {
    for args in [
        &["cs-check", "--map", "nonsense"][..],
        &["report", "--scenario", "torus"],
        &["report", "--scenario", "custom"],
        &["delta-probe", "--center", "1;2"],
        &["frobnicate"],
        &["evert", "--n", "1"],
    ] {
        assert_eq!(cslab(args).status.code(), Some(3), "{args:?}");
    }
}

#[test]
fn help_exits_zero() {
    assert_eq!(cslab(&["--help"]).status.code(), Some(0));
}

#[test]
fn json_output_is_deterministic_across_exec_strategies() {
    let a = cslab(&["cs-check", "--scenario", "disk", "--trials", "30", "--seed", "9"]);
    let b = cslab(&["cs-check", "--scenario", "disk", "--trials", "30", "--seed", "9", "--sequential"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn csv_format() {
    let out = cslab(&["collision-probe", "--family", "jordan3-disk", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("angle,t_re,t_im,norm\n"));
}

#[test]
fn out_flag_writes_file() {
    let dir = scratch("out_flag");
    let path = dir.join("report.json");
    let out = cslab(&["report", "--scenario", "circle", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap();
    assert_eq!(report["regularity"], "C");
    assert_eq!(report["components"], 2);
}

#[test]
fn scenario_writes_bundle() {
    let dir = scratch("scenario_bundle");
    let out = cslab(&["scenario", "--scenario", "interval", "--trials", "20", "--out", dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    for f in ["scenario.json", "probes.csv", "collisions.csv"] {
        assert!(dir.join(f).is_file(), "{f}");
    }
}

#[test]
fn single_point_cloud_fails() {
    let dir = scratch("single_point");
    let cloud = dir.join("cloud.json");
    fs::write(&cloud, r#"{"points":[[0.0,0.0]],"epsilon":0.1,"delta":0.1}"#).unwrap();
    let out = cslab(&["scenario", "--scenario", "custom", "--cloud", cloud.to_str().unwrap(), "--trials", "5"]);
    assert_ne!(out.status.code(), Some(0));
}

#[test]
fn evert_reads_a_frame_file() {
    let dir = scratch("evert_input");
    let frame = dir.join("frame.json");
    fs::write(&frame, r#"{"n":2,"lines":[[[1.0,0.0],[0.0,0.0]],[[1.0,0.0],[1.0,0.0]]]}"#).unwrap();
    let out = cslab(&["evert", "--input", frame.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(json(&out).is_object());
}
