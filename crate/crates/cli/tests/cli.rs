use std::path::Path;
use std::process::{Command, Output};

fn steerlp(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_steerlp"))
        .arg("--workdir")
        .arg(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let out = steerlp(dir, args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

/// Data rows of a CSV written by the CLI, keyed by header name.
fn rows(path: &Path) -> Vec<std::collections::HashMap<String, String>> {
    let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).from_path(path).unwrap();
    let headers = rdr.headers().unwrap().clone();
    rdr.records()
        .map(|r| headers.iter().zip(r.unwrap().iter()).map(|(h, v)| (h.to_string(), v.to_string())).collect())
        .collect()
}

fn num(row: &std::collections::HashMap<String, String>, key: &str) -> f64 {
    row[key].parse().unwrap()
}

#[test]
fn fibonacci_qubit_bracket_contains_oracle_value() {
    let dir = tempfile::tempdir().unwrap();
    ok(
        dir.path(),
        &["robustness", "--family", "fibonacci-qubit", "--m", "10", "--polytope", "ico:2", "--oracle", "--csv", "runs.csv", "--out", "r.json"],
    );
    let rs = rows(&dir.path().join("runs.csv"));
    assert_eq!(rs.len(), 1);
    let (lo, up, ex) = (num(&rs[0], "lower"), num(&rs[0], "upper"), num(&rs[0], "exact"));
    assert!(lo <= 0.5193 && 0.5193 <= up && up - lo <= 0.02, "[{lo}, {up}]");
    assert!((ex - 0.5193).abs() < 5e-4);

    let doc: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("r.json")).unwrap()).unwrap();
    assert_eq!(doc["meta"]["version"], steerlp_version());
    assert_eq!(doc["meta"]["config_hash"].as_str().unwrap().len(), 64);
    assert_eq!(doc["meta"]["tolerances"]["tol_feas"], 1e-9);
    assert_eq!(doc["result"]["certificate"]["validated"], true);
}

fn steerlp_version() -> &'static str {
    env!("CARGO_PKG_VERSION")
}

#[test]
fn qutrit_bracket_with_refined_mub_polytope() {
    let dir = tempfile::tempdir().unwrap();
    ok(
        dir.path(),
        &["robustness", "--family", "fibonacci-qutrit", "--m", "9", "--polytope", "mub-refined:3:2", "--csv", "q.csv"],
    );
    let r = &rows(&dir.path().join("q.csv"))[0];
    assert!(num(r, "lower") <= 0.5166 && 0.5166 <= num(r, "upper"), "{r:?}");
    assert!((num(r, "r") - 0.6543).abs() < 1e-3);
}

#[test]
fn planar_angles_file_reports_closed_form_next_to_bracket() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("angles.txt"), "0.0 0.4\n1.1, 2.5\n").unwrap();
    ok(
        dir.path(),
        &["robustness", "--family", "planar", "--angles-file", "angles.txt", "--polytope", "polygon:400", "--out", "p.json"],
    );
    let doc: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("p.json")).unwrap()).unwrap();
    let b = doc["result"]["planar_bound"].as_f64().unwrap();
    let (lo, up) = (doc["result"]["lower"].as_f64().unwrap(), doc["result"]["upper"].as_f64().unwrap());
    assert!(lo - 1e-7 <= b && b <= up + 1e-7, "{b} vs [{lo}, {up}]");
}

#[test]
fn identical_configs_give_identical_csv() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for dir in [&a, &b] {
        ok(dir.path(), &["--no-timing", "table", "table2", "table5", "fig4", "fig5", "--quick", "--out-dir", "out"]);
    }
    for f in ["table2.csv", "table5.csv", "fig4.csv", "fig5.csv"] {
        let x = std::fs::read(a.path().join("out").join(f)).unwrap();
        let y = std::fs::read(b.path().join("out").join(f)).unwrap();
        assert!(x == y, "{f} differs");
    }
    let t2 = rows(&a.path().join("out/table2.csv"));
    let counts: Vec<String> = t2.iter().filter(|r| r["d"] == "2").map(|r| r["m"].clone()).collect();
    assert_eq!(counts, ["6", "14", "14", "22", "38"]);
    let t5 = rows(&a.path().join("out/table5.csv"));
    assert_eq!(t5[1]["m"], "21");
}

#[test]
fn table3_quick_fills_exact_column() {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["--no-timing", "table", "table3", "--quick", "--oracle-max-m", "4", "--out-dir", "."]);
    let rs = rows(&dir.path().join("table3.csv"));
    for r in rs.iter().filter(|r| r["method"] == "lp-polytope") {
        let m: usize = r["m"].parse().unwrap();
        assert_eq!(r["exact"].is_empty(), m > 4, "{r:?}");
        if m <= 4 {
            assert!(num(r, "lower") <= num(r, "exact") + 1e-6 && num(r, "exact") <= num(r, "upper") + 1e-6);
        }
    }
}

#[test]
fn state_bounds_for_maximally_entangled_state() {
    let dir = tempfile::tempdir().unwrap();
    let common = ["--state", "phi:2", "--family", "fibonacci-qubit", "--m", "10", "--polytope", "ico:2", "--csv", "s.csv"];
    ok(dir.path(), &[&["state-upper"], &common[..]].concat());
    ok(dir.path(), &[&["state-lower"], &common[..]].concat());
    let rs = rows(&dir.path().join("s.csv"));
    let up = num(&rs[0], "upper");
    let lo = num(&rs[1], "lower");
    assert!(lo < 0.5 && 0.5 < up && up <= 0.62, "[{lo}, {up}]");
}

#[test]
fn polytope_files_round_trip_through_the_cli() {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["polytope", "generate", "--polytope", "rational:2:3", "--out", "p.json", "--no-facets"]);
    let text = ok(dir.path(), &["polytope", "import", "--input", "p.json", "--out", "q.json", "--recompute"]);
    assert!(text.contains("r=0.7071067812"), "{text}");
    ok(dir.path(), &["validate", "q.json"]);
    let shrink = ok(dir.path(), &["polytope", "shrink", "--polytope", "q.json"]);
    assert!(shrink.contains("facets=16"), "{shrink}");
}

#[test]
fn exit_codes_follow_failure_classes() {
    let dir = tempfile::tempdir().unwrap();
    let code = |args: &[&str]| steerlp(dir.path(), args).status.code().unwrap();
    assert_eq!(code(&["robustness", "--measurements", "missing.json", "--polytope", "ico:1"]), 2);
    assert_eq!(code(&["robustness", "--family", "fibonacci-qubit", "--polytope", "ico:1"]), 3);
    assert_eq!(code(&["robustness", "--family", "fibonacci-qubit", "--m", "4", "--polytope", "bogus:1"]), 2);
    assert_eq!(code(&["sdp", "--family", "fibonacci-qubit", "--m", "25"]), 5);
    assert_eq!(code(&["polytope", "generate", "--polytope", "rational:3:6", "--out", "x.json"]), 5);

    ok(dir.path(), &["measure", "--family", "random-projective", "--m", "2", "--seed", "1", "--out", "m.json"]);
    let path = dir.path().join("m.json");
    let mut doc: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    doc["elements"][0][0]["re"][0][0] = serde_json::json!(0.9);
    std::fs::write(&path, doc.to_string()).unwrap();
    assert_eq!(code(&["validate", "m.json"]), 3);
}
