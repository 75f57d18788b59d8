//! The `qknot` binary: documented examples, formats, config and exit codes.

use std::process::Command;

use serde_json::Value;

const BIN: &str = env!("CARGO_BIN_EXE_qknot");

fn qknot(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(BIN).args(args).output().unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn json(args: &[&str]) -> Value {
    let (code, out, err) = qknot(args);
    assert_eq!(code, 0, "{args:?}: {err}");
    serde_json::from_str(&out).unwrap()
}

fn f(v: &Value) -> f64 {
    v.as_f64().unwrap()
}

#[test]
fn table_odd_multiples_for_n1() {
    let v = json(&["table", "--N", "1", "--m-max", "5"]);
    assert_eq!(v["command"], "table");
    let rows = v["results"].as_array().unwrap();
    let got: Vec<(u64, f64)> = rows.iter().map(|r| (r["M"].as_u64().unwrap(), f(&r["ell"]))).collect();
    assert_eq!(got, vec![(1, 0.0), (3, 1.0), (5, 2.0)]);
}

#[test]
fn table_gamma_column() {
    let v = json(&["table", "--N", "1", "--m-max", "5", "--dim", "3", "--partial", "0"]);
    let g: Vec<f64> = v["results"].as_array().unwrap().iter().map(|r| f(&r["gamma"])).collect();
    assert_eq!(g, vec![0.0, 2.0, 6.0]);
}

#[test]
fn table_excludes_even_multiples() {
    let v = json(&["table", "--N", "2", "--m-max", "4"]);
    let ms: Vec<u64> = v["results"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["M"].as_u64().unwrap())
        .collect();
    assert_eq!(ms, vec![1, 2, 3]);
}

#[test]
fn shoot_at_a_bound_state() {
    let v = json(&["shoot", "--N", "1", "--nu", "0.5", "--energy", "1"]);
    let r = &v["results"][0];
    assert!(f(&r["residual"]) <= 1e-6);
    assert_eq!(r["agreement"], true);
    assert_eq!(r["bound_state"], true);
}

#[test]
fn shoot_off_spectrum_matches_prediction() {
    let v = json(&["shoot", "--N", "1", "--nu", "0.3", "--energy", "1"]);
    let r = &v["results"][0];
    assert!((f(&r["residual"]) - f(&r["predicted_residual"])).abs() <= 1e-6);
    assert!(f(&r["residual"]) > 0.5);
    assert_eq!(r["agreement"], true);
    assert!(r["c1"]["re"].is_f64() && r["c1"]["im"].is_f64());
}

#[test]
fn shoot_straight_contour() {
    let v = json(&["shoot", "--N", "0", "--nu", "0.8", "--energy", "2"]);
    assert!(f(&v["results"][0]["residual"]) <= 1e-6);
}

#[test]
fn shoot_from_physical_channel() {
    // D = 3, m = 1, γ = 2 gives ν = 1.5, allowed for N = 1
    let v = json(&[
        "shoot",
        "--N",
        "1",
        "--dim",
        "3",
        "--partial",
        "1",
        "--gamma",
        "0",
        "--energy",
        "1",
    ]);
    let r = &v["results"][0];
    assert!((f(&r["nu"]) - 1.5).abs() < 1e-15);
    assert!(f(&r["residual"]) <= 1e-6);
}

#[test]
fn json_numbers_round_trip() {
    use quantum_knot::contour::ContourSpec;
    use quantum_knot::ode::Numerics;
    let v = json(&["shoot", "--N", "1", "--nu", "0.3", "--energy", "1"]);
    let lib = quantum_knot::spectral::shoot(0.3, 1, 1.0, &ContourSpec::for_kappa(1, 1.0).unwrap(), &Numerics::default()).unwrap();
    let r = &v["results"][0];
    assert_eq!(f(&r["residual"]).to_bits(), lib.residual.to_bits());
    assert_eq!(f(&r["c1"]["re"]).to_bits(), lib.c1.re.to_bits());
    assert_eq!(f(&r["c2"]["im"]).to_bits(), lib.c2.im.to_bits());
}

#[test]
fn scan_finds_the_quantized_orders() {
    let (code, out, _) = qknot(&[
        "scan",
        "--N",
        "1",
        "--energy",
        "1",
        "--nu",
        "0.05:1.95:400",
        "--format",
        "csv",
    ]);
    assert_eq!(code, 0);
    let mut rdr = csv::Reader::from_reader(out.as_bytes());
    assert_eq!(rdr.headers().unwrap(), vec!["nu", "residual"]);
    let nus: Vec<f64> = rdr.records().map(|r| r.unwrap()[0].parse().unwrap()).collect();
    assert_eq!(nus.len(), 2);
    assert!((nus[0] - 0.5).abs() <= 1e-6 && (nus[1] - 1.5).abs() <= 1e-6, "{nus:?}");
}

#[test]
fn monodromy_integer_limit() {
    let v = json(&["monodromy", "--nu", "1", "--m", "2"]);
    let r = &v["results"][0];
    assert!((f(&r["a"]["re"]) - 3.0).abs() < 1e-14 && f(&r["a"]["im"]).abs() < 1e-14);
    assert!((f(&r["b"]["re"]) - 2.0).abs() < 1e-14 && f(&r["b"]["im"]).abs() < 1e-14);
    assert_eq!(r["oracle_agree"], true);
}

#[test]
fn contour_defaults_to_csv() {
    let (code, out, _) = qknot(&["contour", "--N", "2", "--samples", "50"]);
    assert_eq!(code, 0);
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("t,rho,theta,re,im,sector,segment"));
    let rows: Vec<&str> = lines.collect();
    assert!(rows.len() >= 50);
    assert!(rows[0].ends_with("incoming-ray") && rows.last().unwrap().ends_with("outgoing-ray"));
    let v = json(&["contour", "--N", "2", "--samples", "50", "--format", "json"]);
    assert_eq!(v["diagnostics"]["winding_number"], 2);
}

#[test]
fn unroll_reports_strip_check() {
    let v = json(&["unroll", "--N", "1", "--nu", "0.7", "--samples", "60"]);
    let d = &v["diagnostics"];
    assert!(f(&d["strip_check"]["max_residual"]) <= 1e-8);
    let rows = v["results"].as_array().unwrap();
    let loop_u: Vec<f64> = rows.iter().filter(|r| r["segment"] == "loop").map(|r| f(&r["u"])).collect();
    assert!(loop_u.windows(2).all(|w| w[1] > w[0]));
}

#[test]
fn output_file_and_config() {
    let dir = std::env::temp_dir().join(format!("qknot-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("run.toml");
    std::fs::write(&cfg, "N = 2\nm_max = 9\n").unwrap();
    let out = dir.join("table.json");
    let cfg_s = cfg.to_str().unwrap();
    let out_s = out.to_str().unwrap();

    let (code, stdout, _) = qknot(&["--config", cfg_s, "table", "--m-max", "3", "--out", out_s]);
    assert_eq!(code, 0);
    assert!(stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["params"]["N"], 2);
    assert_eq!(v["params"]["m_max"], 3);

    std::fs::write(&cfg, "N = 2\nmystery = 1\n").unwrap();
    assert_eq!(qknot(&["table", "--config", cfg_s, "--m-max", "3"]).0, 2);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(qknot(&["table", "--N", "1"]).0, 2);
    assert_eq!(qknot(&["shoot", "--N", "1", "--energy", "1"]).0, 2);
    assert_eq!(qknot(&["shoot", "--N", "1", "--nu", "0.5", "--energy", "-1"]).0, 2);
    assert_eq!(qknot(&["shoot", "--N", "1", "--nu", "0.5", "--eps", "0"]).0, 2);
    assert_eq!(qknot(&["scan", "--N", "1", "--nu", "0.1:0.9"]).0, 2);
    assert_eq!(qknot(&["monodromy", "--nu", "0.5", "--m", "1", "--z-arg", "4"]).0, 2);
    assert_eq!(qknot(&["table", "--N", "1", "--m-max", "3", "--format", "csv"]).0, 2);
    assert_eq!(qknot(&["verify", "--criterion", "42"]).0, 2);
    assert_eq!(qknot(&["frobnicate"]).0, 2);
}

#[test]
fn numerical_failure_exits_3_with_location() {
    let (code, _, err) = qknot(&["shoot", "--N", "1", "--nu", "0.3", "--max-steps", "10"]);
    assert_eq!(code, 3);
    assert!(err.contains("incoming-ray"), "{err}");
}

#[test]
fn single_criterion_verify() {
    let v = json(&["verify", "--criterion", "6"]);
    assert_eq!(v["diagnostics"]["all_passed"], true);
    assert_eq!(v["results"][0]["id"], 6);
}
