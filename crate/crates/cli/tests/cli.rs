use std::process::{Command, Output};

use serde_json::Value;

fn awgn_exp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_awgn-exp"))
        .args(args)
        .env_remove("AWGN_EXP_OUTPUT_DIR")
        .output()
        .expect("failed to run awgn-exp")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn capacity_text_and_json() {
    let out = awgn_exp(&["capacity", "--gamma", "1", "--sigma2", "1"]);
    assert!(out.status.success());
    assert!(stdout(&out).starts_with("0.346573590"));
    let v = json(&awgn_exp(&["capacity", "--format", "json"]));
    assert!((v["capacity_nats"].as_f64().unwrap() - 0.5 * 2f64.ln()).abs() < 1e-15);
    assert!((v["capacity_bits"].as_f64().unwrap() - 0.5).abs() < 1e-15);
    assert!(stdout(&awgn_exp(&["capacity", "--format", "json"]))
        .trim_start()
        .starts_with("{\n  \"capacity_nats\""));
}

#[test]
fn invalid_arguments_exit_with_usage_code() {
    assert_eq!(
        awgn_exp(&["capacity", "--gamma", "0"]).status.code(),
        Some(2)
    );
    assert_eq!(
        awgn_exp(&["capacity", "--sigma2", "-1"]).status.code(),
        Some(2)
    );
    assert_eq!(awgn_exp(&["exponent"]).status.code(), Some(2));
    assert_eq!(
        awgn_exp(&["exponent", "--rate", "-0.1"]).status.code(),
        Some(2)
    );
    assert_eq!(
        awgn_exp(&["exponent", "--rate", "0.5", "--method", "magic"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(awgn_exp(&["bogus"]).status.code(), Some(2));
}

#[test]
fn exponent_at_the_worked_point() {
    let v = json(&awgn_exp(&[
        "exponent",
        "--rate",
        "0.663628",
        "--method",
        "parametric",
    ]));
    assert!((v["exponent"].as_f64().unwrap() - 0.097152).abs() < 2e-5);
    assert_eq!(v["below_capacity"], Value::Bool(false));
    let d = &v["results"][0]["diagnostics"];
    assert!((d["nu"].as_f64().unwrap() - 0.3).abs() < 1e-4);
    assert!(v["max_discrepancy"].is_null());
}

#[test]
fn exponent_below_capacity_is_flagged() {
    let v = json(&awgn_exp(&["exponent", "--rate", "0.3"]));
    assert_eq!(v["exponent"].as_f64().unwrap(), 0.0);
    assert_eq!(v["below_capacity"], Value::Bool(true));
}

#[test]
fn all_methods_agree() {
    let v = json(&awgn_exp(&[
        "exponent", "--rate", "0.9", "--gamma", "2", "--sigma2", "0.5", "--method", "all",
    ]));
    let methods: Vec<&str> = v["results"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["method"].as_str().unwrap())
        .collect();
    assert_eq!(methods, ["parametric", "opt", "dk", "variational"]);
    assert!(v["max_discrepancy"].as_f64().unwrap() < 1e-4);
}

#[test]
fn curve_file_has_header_and_monotone_rows() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_awgn-exp"))
        .args([
            "curve",
            "--nu-max",
            "0.6",
            "--steps",
            "100",
            "--output",
            "curve.csv",
        ])
        .env("AWGN_EXP_OUTPUT_DIR", dir.path())
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = std::fs::read_to_string(dir.path().join("curve.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("nu,R_nats,G_nats,rho_star,G_over_R"));
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 101);
    assert_eq!(rows[0][0], 0.0);
    assert!((rows[0][1] - 0.346574).abs() < 1e-6);
    assert_eq!(&rows[0][2..], &[0.0, 0.0, 0.0]);
    let mid = &rows[50];
    let expected = [0.3, 0.663603, 0.097148, 0.530769, 0.146395];
    for (got, want) in mid.iter().zip(expected) {
        assert!((got - want).abs() < 1e-6, "{mid:?}");
    }
    for w in rows.windows(2) {
        assert!(w[1][0] > w[0][0] && w[1][1] > w[0][1] && w[1][2] > w[0][2]);
    }
}

#[test]
fn curve_rejects_sweeps_past_nu_zero() {
    let out = awgn_exp(&["curve", "--nu-max", "0.62"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("nu_0"));
}

#[test]
fn curve_is_bit_identical_across_runs() {
    let a = awgn_exp(&["curve", "--nu-max", "0.2", "--steps", "17", "--gamma", "3"]);
    let b = awgn_exp(&["curve", "--nu-max", "0.2", "--steps", "17", "--gamma", "3"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn crosscheck_passes_and_names_injected_failure() {
    let small = [
        "crosscheck",
        "--ratios",
        "1",
        "--rates",
        "2",
        "--samples",
        "2",
    ];
    let v = json(&awgn_exp(&small));
    assert_eq!(v["passed"], Value::Bool(true));

    let mut biased = small.to_vec();
    biased.extend(["--inject-zeta-bias", "1e-3"]);
    let out = awgn_exp(&biased);
    assert_eq!(out.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&out.stderr).contains("gaussian_pair_omega_zeta"));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["passed"], Value::Bool(false));
}

#[test]
fn simulate_is_reproducible_and_reports_the_exponent() {
    let args = [
        "simulate", "--n", "10", "--rate", "0.6", "--trials", "3000", "--seed", "5",
    ];
    let a = awgn_exp(&args);
    let b = awgn_exp(&args);
    assert_eq!(a.stdout, b.stdout);
    let v = json(&a);
    assert_eq!(v["trials"].as_u64(), Some(3000));
    assert_eq!(v["seed"].as_u64(), Some(5));
    let rate = v["rate_nats"].as_f64().unwrap();
    assert!(rate >= 0.6);
    let g = json(&awgn_exp(&["exponent", "--rate", &rate.to_string()]));
    assert_eq!(v["exponent_at_rate"], g["exponent"]);
    let keys: Vec<&String> = v.as_object().unwrap().keys().collect();
    assert!(keys.iter().any(|k| *k == "measured_exponent"));
}

#[test]
fn config_file_supplies_defaults_and_flags_override() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.cfg");
    std::fs::write(
        &path,
        "# run settings\ngamma = 4\nsigma2 = 1\nrate = 1.0\nmethod = dk\n",
    )
    .unwrap();
    let p = path.to_str().unwrap();
    let v = json(&awgn_exp(&["--config", p, "exponent"]));
    assert_eq!(v["gamma"].as_f64(), Some(4.0));
    assert_eq!(v["method"], "dk");
    let c = json(&awgn_exp(&[
        "--config", p, "capacity", "--gamma", "1", "--format", "json",
    ]));
    assert_eq!(c["gamma"].as_f64(), Some(1.0));

    std::fs::write(&path, "gamma = oops\n").unwrap();
    assert_eq!(
        awgn_exp(&["--config", p, "capacity"]).status.code(),
        Some(2)
    );
}
