use serde_json::Value;
use std::f64::consts::PI;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gearmap")).args(args).output().unwrap()
}

fn stdout(args: &[&str]) -> String {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn json(args: &[&str]) -> Value {
    serde_json::from_str(&stdout(args)).unwrap()
}

fn f(v: &Value) -> f64 {
    v.as_f64().unwrap()
}

fn csv_rows(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines.map(|l| l.split(',').map(String::from).collect()).collect();
    (header, rows)
}

#[test]
fn map_output_is_byte_identical_across_runs() {
    let args = ["map", "--t", "0.9", "--lambda", "-0.1", "--format", "json"];
    let a = stdout(&args);
    assert_eq!(a, stdout(&args));
    assert!(a.starts_with("{\n  \"schema\": \"gearmap/1\",\n  \"command\": \"map\""));
    let svg = ["map", "--t", "0.9", "--lambda", "-0.1", "--format", "svg"];
    assert_eq!(stdout(&svg), stdout(&svg));
}

#[test]
fn goodman_map_is_a_gear_with_integral_parameters() {
    let d = json(&["map", "--t1", "0.5", "--t2", "1.0", "--format", "json"]);
    assert_eq!(d["classification"], "Gear");
    let (g, r) = (&d["gear"], &d["reference"]["integrals"]);
    assert!((f(&g["beta"]) - f(&r["beta"])).abs() < 1e-6);
    assert!((f(&g["gamma"]) - f(&r["gamma"])).abs() < 1e-6);
    assert_eq!(g["exterior_point"], "infinity");
}

#[test]
fn symmetric_map_reports_bounds_and_intersections() {
    let d = json(&["map", "--t", "1.0471975511965976", "--lambda", "0", "--format", "json"]);
    assert_eq!(d["classification"], "Pregear");
    assert_eq!(d["tooth_intersection"]["kind"], "two_points");
    let b = &d["reference"]["lambda_bounds"];
    assert!((f(&b[0]) + 13.0 / 32.0).abs() < 1e-15 && (f(&b[1]) - 3.0 / 32.0).abs() < 1e-15);
    assert!(d["gear"].is_object());
}

#[test]
fn usage_errors_exit_with_two() {
    for args in [
        vec!["map", "--t", "2", "--lambda", "0"],
        vec!["map", "--t", "0.5"],
        vec!["params", "--beta", "0.5", "--gamma", "1"],
        vec!["module", "--t", "1.6"],
        vec!["region", "--grid", "3"],
        vec!["module", "--t", "0.5", "--format", "svg"],
        vec!["frobnicate"],
    ] {
        assert_eq!(run(&args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn numeric_failure_exits_with_three_and_a_diagnostic() {
    let out = run(&["map", "--t", "0.01", "--lambda", "-30", "--format", "json"]);
    assert_eq!(out.status.code(), Some(3));
    let d: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(d["schema"], "gearmap/1");
    assert!(d["error"]["kind"].is_string() && d["error"]["message"].is_string());
}

#[test]
fn region_table_has_exact_rows() {
    let (header, rows) = csv_rows(&stdout(&["region", "--grid", "11", "--format", "csv"]));
    assert_eq!(header, ["t", "lambda_minus", "lambda_plus", "nehari_lo", "nehari_hi"]);
    assert_eq!(rows.len(), 11);
    for r in &rows {
        let v: Vec<f64> = r.iter().map(|x| x.parse().unwrap()).collect();
        assert!((v[2] - v[1] - 0.5).abs() < 1e-15);
        assert!(v[3] < v[1] && v[2] < v[4]);
    }
    // t_i = (π/2)·i/12, so π/3 is row i = 8.
    let v: Vec<f64> = rows[7].iter().map(|x| x.parse().unwrap()).collect();
    assert!((v[0] - PI / 3.0).abs() < 1e-15);
    assert!((v[1] + 13.0 / 32.0).abs() < 1e-15 && (v[2] - 3.0 / 32.0).abs() < 1e-15);
    assert!((v[3] + 27.0 / 32.0).abs() < 1e-15 && (v[4] - 21.0 / 32.0).abs() < 1e-15);
}

#[test]
fn region_probes_add_verdict_columns() {
    let (header, rows) = csv_rows(&stdout(&["region", "--grid", "10", "--probes", "--format", "csv"]));
    assert_eq!(header.len(), 10);
    assert_eq!(header[5], "probe_mid");
    assert!(rows.iter().all(|r| r[5] == "Pregear"), "{rows:?}");
}

#[test]
fn module_is_two_at_the_threshold() {
    let t = 2.0 * 2f64.powf(-0.25).atan();
    let d = json(&["module", "--t", &format!("{t}"), "--format", "json"]);
    assert!((f(&d["rows"][0]["M"]) - 2.0).abs() < 1e-12, "{d}");
    let (header, rows) = csv_rows(&stdout(&["module", "--grid", "20"]));
    assert_eq!(header, ["t", "M", "method"]);
    let m: Vec<f64> = rows.iter().map(|r| r[1].parse().unwrap()).collect();
    assert_eq!(m.len(), 20);
    assert!(m.windows(2).all(|w| w[0] < w[1]));
}

#[test]
fn params_close_the_loop() {
    let d = json(&["params", "--beta", "2", "--gamma", "1"]);
    assert!(f(&d["diagnostics"]["residual"]["beta"]).abs() < 1e-9);
    assert!(f(&d["diagnostics"]["residual"]["gamma"]).abs() < 1e-9);
    assert_eq!(d["diagnostics"]["inside_bounds"], true);
    let t = f(&d["t"]);
    let lambda = format!("{}", f(&d["lambda"]));
    let m = json(&["map", "--t", &format!("{t}"), "--lambda", &lambda, "--format", "json"]);
    assert!((f(&m["gear"]["beta"]) - 2.0).abs() < 1e-5);
    assert!((f(&m["gear"]["gamma"]) - 1.0).abs() < 1e-5);
}

#[test]
fn sweep_marks_an_interior_maximum() {
    let (header, rows) = csv_rows(&stdout(&["sweep", "--beta", "2", "--grid", "20"]));
    assert_eq!(header, ["gamma", "M", "argmax"]);
    let k = rows.iter().position(|r| r[2] == "1").unwrap();
    assert!(k > 0 && k + 1 < rows.len());
    assert_eq!(rows.iter().filter(|r| r[2] == "1").count(), 1);
}

#[test]
fn out_writes_a_file() {
    let dir = std::env::temp_dir().join(format!("gearmap-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("region.svg");
    let out = run(&["region", "--grid", "16", "--format", "svg", "--out", path.to_str().unwrap()]);
    assert!(out.status.success() && out.stdout.is_empty());
    let svg = std::fs::read_to_string(&path).unwrap();
    assert!(svg.starts_with("<?xml") && svg.trim_end().ends_with("</svg>"));
    std::fs::remove_dir_all(&dir).unwrap();
}
