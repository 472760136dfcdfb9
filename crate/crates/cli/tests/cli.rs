use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> String {
    let mut p = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    p.push("../core/fixtures");
    p.push(format!("{name}.json"));
    p.to_string_lossy().into_owned()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_orbit-designs"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "bad JSON ({e}): {}\nstderr: {}",
            String::from_utf8_lossy(&out.stdout),
            String::from_utf8_lossy(&out.stderr)
        )
    })
}

#[test]
fn analyze_reports_components() {
    let out = run(&["analyze", &fixture("c4")]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["trivial_multiplicity"], 0);
    assert_eq!(v["components"][0]["D"], "C");
    assert_eq!(v["components"][0]["n"], 1);
    assert_eq!(v["components"][0]["m"], 1);
    assert_eq!(v["components"][0]["dim"], 2);

    let v = json_of(&run(&["analyze", &fixture("s3_permutation")]));
    assert_eq!(v["trivial_multiplicity"], 1);
    assert_eq!(v["components"].as_array().unwrap().len(), 1);
    assert_eq!(v["components"][0]["D"], "R");
    assert_eq!(v["components"][0]["n"], 2);
}

#[test]
fn analyze_regular_representation() {
    let v = json_of(&run(&["analyze", &fixture("q8"), "--regular"]));
    assert_eq!(v["dim"], 8);
    assert_eq!(v["trivial_multiplicity"], 1);
    let kinds: Vec<(String, u64, u64)> = v["components"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| {
            (
                c["D"].as_str().unwrap().to_string(),
                c["n"].as_u64().unwrap(),
                c["m"].as_u64().unwrap(),
            )
        })
        .collect();
    // three sign characters and the quaternionic irreducible
    assert_eq!(kinds.iter().filter(|k| k.0 == "R").count(), 3);
    assert!(kinds.contains(&("H".into(), 1, 1)));
}

#[test]
fn malformed_input_exits_with_usage_code() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{ \"dim\": 2, ").unwrap();
    let out = run(&["analyze", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
    assert_eq!(run(&["analyze"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate", &fixture("c4")]).status.code(), Some(2));
}

#[test]
fn verify_examples() {
    let out = run(&["verify", &fixture("c4"), "[1, 0]"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["is_2_design"], true);
    assert_eq!(v["classification_pass"], true);

    let out = run(&["verify", &fixture("c2_antipodal"), "[1, 0]"]);
    assert_eq!(out.status.code(), Some(1));
    let v = json_of(&out);
    assert_eq!(v["is_2_design"], false);
    assert_eq!(v["design"]["is_1_design"], true);
    assert_eq!(v["design"]["second_moment_deviation"], 0.5);

    let out = run(&["verify", &fixture("c4"), "[0, 0]"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["verify", &fixture("c4"), "[3, 4]"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["verify", &fixture("c4"), "[3, 4]", "--normalize"]);
    assert_eq!(out.status.code(), Some(0));
    let out = run(&["verify", &fixture("c4"), "[1, 0, 0]"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_flags_trivial_overlap() {
    let out = run(&["verify", &fixture("s3_permutation"), "[1, 0, 0]"]);
    assert_eq!(out.status.code(), Some(1));
    let v = json_of(&out);
    assert_eq!(v["design"]["trivial_overlap_warning"], true);
    assert_eq!(v["design"]["is_1_design"], false);
}

#[test]
fn construct_quaternion_orbit() {
    let out = run(&["construct", &fixture("q8"), "--seed", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["orbit_size"], 8);
    assert_eq!(v["verification"]["stamp"], "2-design: pass");
}

#[test]
fn construct_regular_s3_standard_component() {
    let a = json_of(&run(&["analyze", &fixture("s3_regular")]));
    let idx = a["components"]
        .as_array()
        .unwrap()
        .iter()
        .position(|c| c["n"] == 2)
        .unwrap()
        .to_string();
    let out = run(&["construct", &fixture("s3_regular"), "--components", &idx]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["orbit_size"], 6);
    assert_eq!(v["orbit"][0].as_array().unwrap().len(), 6);
    assert_eq!(v["verification"]["is_2_design"], true);
}

#[test]
fn construct_errors() {
    let out = run(&["construct", &fixture("s3_regular"), "--components", "9"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains('9'));
    let out = run(&["construct", &fixture("c4_double")]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("component 0"));
}

#[test]
fn construct_then_verify_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    for (name, comps) in [
        ("dic3", None),
        ("s3_regular", Some("0,1")),
        ("s3_permutation", Some("0")),
        ("q8", None),
    ] {
        let out_path = dir.path().join(format!("{name}.json"));
        let out_str = out_path.to_str().unwrap();
        let mut args = vec!["construct", fixture_ref(name), "--seed", "11", "--output", out_str];
        if let Some(c) = comps {
            args.extend(["--components", c]);
        }
        assert_eq!(run(&args).status.code(), Some(0), "{name}");
        let mut args = vec!["verify", fixture_ref(name), out_str];
        if let Some(c) = comps {
            args.extend(["--components", c]);
        }
        let out = run(&args);
        assert_eq!(
            out.status.code(),
            Some(0),
            "{name}: {}",
            String::from_utf8_lossy(&out.stdout)
        );
        let v = json_of(&out);
        assert_eq!(v["is_2_design"], true);
        assert_eq!(v["classification_pass"], true);
        assert!(v["polynomial_discrepancy"].as_f64().unwrap() <= 1e-8);
    }
}

fn fixture_ref(name: &str) -> &'static str {
    Box::leak(fixture(name).into_boxed_str())
}

#[test]
fn output_is_deterministic() {
    for args in [
        vec!["construct", fixture_ref("dic3"), "--seed", "5"],
        vec!["analyze", fixture_ref("icosahedral"), "--seed", "2"],
        vec!["schur-check", fixture_ref("s3_regular")],
        vec!["verify", fixture_ref("q8"), "[0.5, 0.5, 0.5, 0.5]"],
    ] {
        let a = run(&args);
        let b = run(&args);
        assert_eq!(a.stdout, b.stdout, "{args:?}");
        assert!(!a.stdout.is_empty());
    }
}

#[test]
fn csv_points_round_trip_exactly() {
    let json = json_of(&run(&["construct", &fixture("dic3"), "--seed", "4"]));
    let out = run(&["construct", &fixture("dic3"), "--seed", "4", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stderr).contains("2-design: pass"));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x1,x2,x3,x4,x5,x6"));
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect();
    let orbit = json["orbit"].as_array().unwrap();
    assert_eq!(rows.len(), orbit.len());
    for (r, o) in rows.iter().zip(orbit) {
        let o: Vec<f64> = o.as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
        assert_eq!(r, &o);
    }
    assert!(!text.contains('e'));
}

#[test]
fn export_orbit_points() {
    let out = run(&["export", &fixture("c4"), "[1, 0]", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 5);
    let v = json_of(&run(&["export", &fixture("c2_antipodal"), "[0.6, 0.8]"]));
    assert_eq!(v["orbit_size"], 2);
    // the trivial vector has a one-point orbit under S3 on R^3
    let s = 1.0 / 3f64.sqrt();
    let arg = format!("[{s}, {s}, {s}]");
    let v = json_of(&run(&["export", &fixture("s3_permutation"), &arg]));
    assert_eq!(v["orbit_size"], 1);
}

#[test]
fn schur_check_passes_on_fixtures() {
    for name in ["c4", "s3_standard", "q8", "dic3", "icosahedral"] {
        let out = run(&["schur-check", &fixture(name)]);
        assert_eq!(out.status.code(), Some(0), "{name}");
        let v = json_of(&out);
        for c in v["components"].as_array().unwrap() {
            assert!(c["schur_real"]["max_residual"].as_f64().unwrap() <= 1e-12, "{name}");
            assert!(c["schur_d"]["max_residual"].as_f64().unwrap() <= 1e-12, "{name}");
        }
    }
}

#[test]
fn order_cap_is_a_numerical_failure() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("rot.json");
    let (c, s) = (1f64.cos(), 1f64.sin());
    std::fs::write(
        &path,
        format!("{{\"dim\": 2, \"generators\": [[[{c}, {}], [{s}, {c}]]]}}", -s),
    )
    .unwrap();
    let out = run(&["analyze", path.to_str().unwrap(), "--max-order", "50"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn output_file_and_log_variable() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let out = Command::new(env!("CARGO_BIN_EXE_orbit-designs"))
        .args(["analyze", &fixture("q8"), "--output", path.to_str().unwrap()])
        .env("ORBIT_DESIGNS_LOG", "debug")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["components"][0]["D"], "H");
}
