use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn upslope(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_upslope")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("{e}: {}\n{}", String::from_utf8_lossy(&out.stdout), String::from_utf8_lossy(&out.stderr))
    })
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("upslope-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn example_scenario_passes() {
    let out = upslope(&["run", "example-5"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert_eq!(r["status"], "pass");
    assert_eq!(r["checks"][0]["detail"]["slopes"][5], "11/2");
}

#[test]
fn reports_are_byte_identical() {
    let a = upslope(&["--seed", "7", "run", "fixtures-6x"]);
    let b = upslope(&["--seed", "7", "--jobs", "3", "run", "fixtures-6x"]);
    assert_eq!(a.stdout, b.stdout);
    assert!(!String::from_utf8_lossy(&a.stdout).contains("elapsed_ms"));
    let timed = json(&upslope(&["--timings", "run", "empty"]));
    assert_eq!(timed["checks"], Value::Array(vec![]));
}

#[test]
fn exit_codes() {
    assert_eq!(upslope(&["run", "no-such-scenario"]).status.code(), Some(2));
    assert_eq!(upslope(&["spectral", "newton", "--matrix", "/nonexistent.json"]).status.code(), Some(2));

    let failing = scratch("failing.json");
    std::fs::write(
        &failing,
        r#"{"name":"f","checks":[{"name":"a","kind":"polygons","matrix":{"builtin":"m3"},"hodge":["0","0","0"]}]}"#,
    )
    .unwrap();
    assert_eq!(upslope(&["run", failing.to_str().unwrap()]).status.code(), Some(1));

    // Two blocks cannot certify six slopes.
    let short = scratch("short.json");
    std::fs::write(
        &short,
        r#"{"name":"s","checks":[{"name":"a","kind":"slopes","recipe":{"builtin":"example-5"},
            "weight":{"kind":"disk","w0":0,"psi":{"cond":2,"tame":0,"wild":1}},"blocks":2,"count":6}]}"#,
    )
    .unwrap();
    let path = short.to_str().unwrap();
    assert_eq!(upslope(&["run", path]).status.code(), Some(0));
    let strict = upslope(&["--strict", "run", path]);
    assert_eq!(strict.status.code(), Some(3));
    assert_eq!(json(&strict)["status"], "uncertified");
}

#[test]
fn quaternion_commands() {
    let units = json(&upslope(&["quat", "units"]));
    assert_eq!(units.as_array().unwrap().len(), 24);
    let norm3 = json(&upslope(&["quat", "norm-elements", "--n", "3"]));
    assert_eq!(norm3["count"], 96);
    let deltas = json(&upslope(&["--prec", "10", "quat", "deltas"]));
    assert_eq!(deltas["deltas"].as_array().unwrap().len(), 3);
}

#[test]
fn assemble_then_spectral() {
    let out = upslope(&[
        "upmat", "assemble", "--recipe", "example-5", "--weight", "disk:0", "--psi", "2:0:1", "--N", "12",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let file = scratch("u12.json");
    std::fs::write(&file, &out.stdout).unwrap();
    let path = file.to_str().unwrap();

    let csv = upslope(&["--format", "csv", "spectral", "newton", "--matrix", path, "--t", "1"]);
    let text = String::from_utf8(csv.stdout).unwrap();
    assert!(text.starts_with("index,slope\n1,1/2\n2,3/2\n"), "{text}");

    let a = upslope(&["spectral", "verify-A", "--matrix", path, "--t", "1"]);
    assert_eq!(json(&a)["holds"], true);
    assert_eq!(a.status.code(), Some(0));

    let slopes = json(&upslope(&[
        "upmat", "slopes", "--recipe", "example-5", "--weight", "disk:3", "--psi", "2:0:1", "--count", "6",
    ]));
    assert_eq!(slopes["slopes"][0], "1/2");
}

#[test]
fn fixture_commands() {
    let hodge = json(&upslope(&["spectral", "hodge", "--matrix", "m4"]));
    assert_eq!(hodge["vertices"][1], serde_json::json!([3, "0"]));
    let prog = json(&upslope(&["spectral", "progression", "--matrix", "m4"]));
    assert_eq!(prog["s0"], 5);
    let pairing = upslope(&["duality", "verify-pairing", "--matrix", "m3"]);
    assert_eq!(json(&pairing)["adjunction"], true);
    let cp = json(&upslope(&["spectral", "charpoly", "--matrix", "m3"]));
    assert_eq!(cp["valuations"].as_array().unwrap().len(), 4);
}

#[test]
fn act_emits_matrix() {
    let out = json(&upslope(&[
        "--prec", "10", "act", "--gamma", "1,1,0,1", "--weight", "classical:4", "--N", "5",
    ]));
    // Translation z ↦ z + 1 on polynomials of degree ≤ 2: binomial columns.
    let rows = &out["standard"]["rows"];
    assert_eq!(rows[0][2], 1);
    assert_eq!(rows[1][2], 2);
    assert_eq!(rows[2][2], 1);
    let scaled = json(&upslope(&[
        "--prec", "10", "act", "--gamma", "3,0,0,1", "--weight", "classical:2", "--N", "3", "--rescale", "up",
    ]));
    assert!(scaled["rescaled"]["known_digits"].is_array());
}

#[test]
fn duality_project_splits() {
    let m = scratch("m.json");
    let h = scratch("h.json");
    let spec = scratch("eigen.json");
    let ctx = r#"{"p":3,"m":1,"prec":10}"#;
    std::fs::write(&m, format!(r#"{{"context":{ctx},"rows":[[3,1,0],[9,2,0],[0,0,5]]}}"#)).unwrap();
    std::fs::write(&h, format!(r#"{{"context":{ctx},"rows":[[1,0,0],[0,1,0],[0,0,2]]}}"#)).unwrap();
    std::fs::write(
        &spec,
        r#"[{"label":"a","data":[{"hecke":0,"keep":1,"reject":[2]}]},
            {"label":"b","data":[{"hecke":0,"keep":2,"reject":[1]}]}]"#,
    )
    .unwrap();
    let out = upslope(&[
        "duality", "project", "--matrix", m.to_str().unwrap(), "--hecke", h.to_str().unwrap(), "--eigen",
        spec.to_str().unwrap(),
    ]);
    let v = json(&out);
    assert_eq!(v["blocks"][0]["rank"], 2);
    assert_eq!(v["blocks"][1]["rank"], 1);
}
