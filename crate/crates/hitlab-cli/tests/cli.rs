use serde_json::Value;
use std::process::{Command, Output};

fn hitlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hitlab")).args(args).output().expect("binary runs")
}

fn json_out(args: &[&str]) -> Value {
    let o = hitlab(args);
    assert!(o.status.success(), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).expect("stdout is JSON")
}

#[test]
fn tiling_writes_json_and_svg() {
    let dir = tempfile::tempdir().unwrap();
    let t = dir.path().join("t.json");
    let s = dir.path().join("t.svg");
    let o = hitlab(&["tiling", "-p", "7", "-q", "3", "-l", "2", "-o", t.to_str().unwrap(), "--svg", s.to_str().unwrap()]);
    assert!(o.status.success());
    let g: Value = serde_json::from_str(&std::fs::read_to_string(&t).unwrap()).unwrap();
    assert_eq!(g["p"], 7);
    assert_eq!(g["boundary"].as_array().unwrap().len(), 33);
    assert!(std::fs::read_to_string(&s).unwrap().starts_with("<svg"));
}

#[test]
fn invalid_input_exits_2_with_json_and_no_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let t = dir.path().join("t.json");
    let s = dir.path().join("t.svg");
    let o = hitlab(&["tiling", "-p", "4", "-q", "4", "-o", t.to_str().unwrap(), "--svg", s.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let e: Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(e["kind"], "validation");
    assert!(!t.exists() && !s.exists());

    let o = hitlab(&["frobnicate"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(serde_json::from_slice::<Value>(&o.stderr).is_ok());

    let o = hitlab(&["verify", "--preset", "star:3:1"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn headline_constants_table() {
    let o = hitlab(&["report", "--suite", "paper-constants"]);
    assert!(o.status.success());
    let table = String::from_utf8(o.stdout).unwrap();
    for sym in ["9√2/16", "63/128", "√2", "√30", "π/3", "9π"] {
        assert!(table.contains(sym), "{sym} missing");
    }
    assert!(!table.contains('✗'));
    let rows = json_out(&["report", "--suite", "paper-constants", "--format", "json"]);
    assert!(rows.as_array().unwrap().iter().all(|r| r["pass"] == true));
}

#[test]
fn two_uniform_certificate_is_reproducible() {
    let args = ["nogo", "--case", "two-uniform", "--n", "4", "--seed", "7"];
    let a = hitlab(&args);
    let b = hitlab(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let c: Value = serde_json::from_slice(&a.stdout).unwrap();
    assert!(c["min_deviation"].as_f64().unwrap() > 0.01);
    assert_eq!(c["witnessed"], true);
    assert_eq!(c["seed"], 7);
}

#[test]
fn other_nogo_cases() {
    let e = json_out(&["nogo", "--case", "evenbly", "--n", "4", "--samples", "20"]);
    assert_eq!(e["both"], 0);
    assert_eq!(e["su2_invariant"], 20);
    assert_eq!(e["perfect_tensor_control"]["isometry_condition"], true);
    assert_eq!(e["perfect_tensor_control"]["su2_invariant"], false);

    let b = json_out(&["nogo", "--case", "bipartitions", "--n", "3", "--samples", "20"]);
    assert_eq!(b["bell_pairs"]["count"], 4);
    assert_eq!(b["bound"], 4);
    assert_eq!(b["violations"], 0);
    assert_eq!(b["ghz_count"], 0);

    let g = json_out(&["nogo", "--case", "geomeasure", "--m", "2", "--d", "2", "--starts", "8"]);
    assert!((g["geometric_measure"].as_f64().unwrap() - 0.75).abs() < 1e-15);
    assert!(g["residual"].as_f64().unwrap() < 1e-6);
}

#[test]
fn verify_reports_negative_control() {
    let dir = tempfile::tempdir().unwrap();
    let good = json_out(&["verify", "--preset", "left-right:3"]);
    assert_eq!(good["pass"], true);
    let spec = r#"{"q":3,"k":2,"family":"left_right","B":[0,1]}"#;
    let p = dir.path().join("h.json");
    std::fs::write(&p, spec).unwrap();
    let bad = json_out(&["verify", "--spec", p.to_str().unwrap()]);
    assert_eq!(bad["pass"], false);
    let aba = bad["checks"].as_array().unwrap().iter().find(|c| c["name"] == "aba_isometry").unwrap();
    assert_eq!(aba["pass"], false);
}

#[test]
fn entropy_csv_and_fit() {
    let o = hitlab(&["entropy", "-p", "5", "-q", "4", "-l", "2", "--preset", "star:4:2"]);
    assert!(o.status.success());
    let csv = String::from_utf8(o.stdout).unwrap();
    assert!(csv.starts_with("start,len,entropy_bits,graph_length,cut_edges"));
    let j = json_out(&["entropy", "-p", "5", "-q", "4", "-l", "2", "--preset", "star:4:2", "--format", "json"]);
    assert!((j["fit"]["slope"].as_f64().unwrap() - 2.0).abs() < 1e-9);
    assert!(j["fit"]["max_residual"].as_f64().unwrap() < 1e-9);
}

#[test]
fn corr_is_gauge_invariant_for_casimir() {
    let base = ["corr", "-p", "7", "-q", "3", "-l", "1", "--preset", "left-right:3", "--obs", "casimir", "--format", "json"];
    let a = json_out(&base);
    let mut dressed = base.to_vec();
    dressed.push("--holonomies");
    let b = json_out(&dressed);
    for (x, y) in a["correlators"].as_array().unwrap().iter().zip(b["correlators"].as_array().unwrap()) {
        assert!((x["re"].as_f64().unwrap() - y["re"].as_f64().unwrap()).abs() < 1e-9);
    }
}

#[test]
fn geometry_reports() {
    let l = json_out(&["length", "--preset", "left-right:3"]);
    assert!((l["c_a"].as_f64().unwrap() - 9.0 * 2f64.sqrt() / 16.0).abs() < 1e-12);
    let l = json_out(&["length", "-p", "7", "-q", "3", "-l", "2", "--preset", "left-right:3", "--region", "0:5"]);
    let len = l["graph_length"].as_f64().unwrap();
    assert!((l["expectation"].as_f64().unwrap() - len * 9.0 * 2f64.sqrt() / 16.0).abs() < 1e-9);
    assert!((l["variance"].as_f64().unwrap() - len * 63.0 / 128.0).abs() < 1e-9);

    let a = json_out(&["area", "--preset", "left-right:3"]);
    assert!((a["a_norm"].as_f64().unwrap() - 8f64.sqrt()).abs() < 1e-9);
    assert!(a["flag"].is_string());

    let g = json_out(&["angle", "--preset", "left-right:3", "--pattern", "2,2,2,2,2,2,2,2,2,3,3,3"]);
    assert!((g["cos_theta"].as_f64().unwrap() + 0.5).abs() < 1e-9);
    assert!((g["polygon"]["angle_sum"].as_f64().unwrap() - 9.0 * std::f64::consts::PI).abs() < 1e-9);
}

#[test]
fn config_file_and_thread_cap() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "seed = 11\nthreads = 2\n").unwrap();
    let c = json_out(&["nogo", "--case", "geomeasure", "--config", cfg.to_str().unwrap()]);
    assert_eq!(c["seed"], 11);
    // the command line overrides the file
    let c = json_out(&["nogo", "--case", "geomeasure", "--config", cfg.to_str().unwrap(), "--seed", "3"]);
    assert_eq!(c["seed"], 3);

    std::fs::write(&cfg, "bogus = 1\n").unwrap();
    let o = hitlab(&["report", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));

    let o = Command::new(env!("CARGO_BIN_EXE_hitlab"))
        .args(["nogo", "--case", "geomeasure"])
        .env("HITLAB_THREADS", "1")
        .output()
        .unwrap();
    assert!(o.status.success());
    let o = Command::new(env!("CARGO_BIN_EXE_hitlab")).args(["report"]).env("HITLAB_THREADS", "many").output().unwrap();
    assert_eq!(o.status.code(), Some(2));
}
