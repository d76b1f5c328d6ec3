use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name).display().to_string()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_posmaps")).args(args).output().expect("binary runs")
}

fn code(args: &[&str]) -> i32 {
    let out = run(args);
    out.status.code().expect("exited normally")
}

fn json(args: &[&str]) -> serde_json::Value {
    let out = run(args);
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

#[test]
fn exit_code_corpus() {
    let transpose = fixture("transpose.json");
    let trace = fixture("trace_map.json");
    let identity = fixture("identity.json");
    let choi = fixture("choi_map.json");
    let cases: Vec<(Vec<&str>, i32)> = vec![
        (vec!["analyze", &transpose, "--tests", "cp"], 0),
        (vec!["analyze", &trace, "--tests", "sp", "--expect", "member"], 0),
        (vec!["analyze", &transpose, "--tests", "cp", "--expect", "member"], 1),
        (vec!["analyze", &identity, "--tests", "cp,ppt", "--expect", "member,non_member"], 0),
        (vec!["analyze", &choi, "--tests", "dec", "--strict"], 2),
        (vec!["analyze", "garbage-that-does-not-exist.json"], 3),
        (vec!["verify", "lemma12", "--n", "3", "--samples", "100", "--seed", "42"], 0),
        (vec!["verify", "ppt2x2", "--samples", "500", "--seed", "7"], 0),
        (vec!["verify", "prop13", "--n", "3", "--samples", "50", "--seed", "1"], 0),
        (vec!["verify", "prop13", "--map", &identity], 3),
        (vec!["verify", "cor7", "--n", "3", "--samples", "30", "--strict"], 2),
        (vec!["verify", "thm2", "--tol", "0"], 3),
    ];
    assert_eq!(cases.len(), 12);
    for (args, want) in &cases {
        assert_eq!(code(args), *want, "posmaps {}", args.join(" "));
    }
}

#[test]
fn malformed_file_reports_position() {
    let out = run(&["analyze", &fixture("garbage.json")]);
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 2 column"), "{err}");
}

#[test]
fn analyze_reports_transpose_witness() {
    let v = json(&["analyze", &fixture("transpose.json"), "--tests", "cp"]);
    let cp = &v["result"]["verdicts"]["cp"];
    assert_eq!(cp["status"], "non_member");
    // Oracle: SWAP has smallest eigenvalue −1.
    assert!((cp["witness"]["value"].as_f64().unwrap() + 1.0).abs() < 1e-9);
    assert_eq!(v["exit_code"], 0);
}

#[test]
fn output_is_byte_identical_without_timing() {
    let args = ["verify", "thm2", "--n", "2", "--count", "5", "--samples", "4", "--seed", "3", "--no-timing"];
    let (a, b) = (run(&args), run(&args));
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert!(v["manifest"].get("wall_time_seconds").is_none());
    assert_eq!(v["manifest"]["seed"], 3);

    let timed = json(&["verify", "ppt2x2", "--samples", "3"]);
    assert!(timed["manifest"]["wall_time_seconds"].as_f64().is_some());
}

#[test]
fn samples_reload_and_pass_sound_tests() {
    for (cone, n, tests) in [("sp", "3", "cp,ppt"), ("d2", "3", "dec"), ("cp", "2", "cp")] {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().to_str().unwrap();
        assert_eq!(code(&["sample", "--cone", cone, "--n", n, "--count", "4", "--seed", "5", "-o", out]), 0);
        let manifest: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(dir.path().join("manifest.json")).unwrap()).unwrap();
        assert_eq!(manifest["tasks"].as_array().unwrap().len(), 4);
        for k in 0..4 {
            let file = dir.path().join(format!("{cone}_{k:04}.json"));
            let f = file.to_str().unwrap();
            assert_eq!(code(&["analyze", f, "--tests", tests, "--expect", "member", "--strict"]), 0, "{f}");
        }
    }
    assert_eq!(code(&["sample", "--cone", "cp", "--n", "2"]), 3);
}

#[test]
fn distances_of_reference_states() {
    let d = |name: &str| json(&["distance", &fixture(name)])["result"]["distance"].as_f64().unwrap();
    // Oracle: the nearest separable state to a Bell state is isotropic with
    // fidelity 1/2, at Frobenius distance sqrt(1/4 + 3/36) = 1/sqrt(3).
    assert!((d("bell.json") - 1.0 / 3f64.sqrt()).abs() < 1e-3);
    assert!(d("product.json") <= 1e-12);
    assert!(d("tiles.json") > 1e-2);
}

#[test]
fn output_directory_receives_report_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    assert_eq!(code(&["verify", "cor4", "--n", "2", "--samples", "4", "--no-timing", "-o", out]), 0);
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("report.json")).unwrap()).unwrap();
    assert_eq!(report["result"]["theorem"], "cor4");
    assert_eq!(report["result"]["agreement"], true);
    assert!(dir.path().join("manifest.json").exists());
}

#[test]
fn text_format_lists_clauses() {
    let out = run(&["verify", "prop10", "--n", "2", "--samples", "3", "--format", "text"]);
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.starts_with("prop10: "), "{text}");
    assert!(text.contains("  i: ") && text.contains("table digest"), "{text}");
}
