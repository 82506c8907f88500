use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_optoswap"))
        .args(args)
        .arg("--out")
        .arg(dir)
        .env_remove("OPTOSWAP_OUT")
        .output()
        .expect("spawn optoswap")
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn write_config(dir: &Path, text: &str) -> String {
    let p = dir.join("config.json");
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn table1_values() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["table1"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&dir.path().join("table1.json"));
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 2);
    let warm = rows[0]["n_final"].as_f64().unwrap();
    let cold = rows[1]["n_final"].as_f64().unwrap();
    assert!((warm - 0.6064).abs() < 1e-3, "{warm}");
    assert!((cold - 0.00758).abs() < 5e-5, "{cold}");
    assert!((rows[0]["cooperativity"].as_f64().unwrap() / 7.7e5 - 1.0).abs() < 0.01);
    let inf = v["single_quantum_transfer"]["fidelity"]["infidelity"].as_f64().unwrap();
    assert!((inf - 0.023).abs() < 0.001, "{inf}");
    assert!(v["convention"].as_str().unwrap().contains("2i"));
}

#[test]
fn verify_is_byte_identical_for_a_seed() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let cfg = write_config(a.path(), r#"{"sweep": {"mc_samples": 100000}}"#);
    for d in [a.path(), b.path()] {
        let out = run(d, &["verify", "--seed", "42", "--config", &cfg, "--threads", "2"]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
    let x = fs::read(a.path().join("verify.json")).unwrap();
    let y = fs::read(b.path().join("verify.json")).unwrap();
    assert_eq!(x, y);
    let v: serde_json::Value = serde_json::from_slice(&x).unwrap();
    assert_eq!(v["seed"], 42);
    assert_eq!(v["pass"], true);
}

#[test]
fn different_seed_changes_monte_carlo() {
    let a = tempfile::tempdir().unwrap();
    let cfg = write_config(a.path(), r#"{"sweep": {"mc_samples": 20000}}"#);
    let mut reports = Vec::new();
    for seed in ["1", "2"] {
        let out = run(a.path(), &["verify", "--seed", seed, "--config", &cfg]);
        assert!(out.status.success());
        reports.push(json(&a.path().join("verify.json")));
    }
    assert_ne!(reports[0]["checks"][0]["value"], reports[1]["checks"][0]["value"]);
}

#[test]
fn bad_config_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "{\n  \"sweep\": { \"finese\": 3 }\n}");
    let out = run(dir.path(), &["table1", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 2"), "{err}");

    let cfg = write_config(dir.path(), r#"{"params": {"eta_l": 1.5}}"#);
    assert_eq!(run(dir.path(), &["table1", "--config", &cfg]).status.code(), Some(2));

    let missing = dir.path().join("nope.json");
    let out = run(dir.path(), &["table1", "--config", missing.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bad_grid_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["fock-transfer", "--grid-points", "100"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn kitten_small_amplitude_optimum_near_zero() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"{"grid": {"r_max": 6.0, "n_points": 64},
            "sweep": {"alpha_sq": [0.01], "xi": {"min": -0.1, "max": 0.1, "points": 5}}}"#,
    );
    let out = run(dir.path(), &["kitten", "--config", &cfg]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(dir.path().join("kitten_optimum.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "setting,alpha_re,alpha_im,alpha_sq,xi_opt,infidelity_opt,xi_estimate"
    );
    let first: Vec<f64> = lines.next().unwrap().split(',').skip(1).map(|c| c.parse().unwrap()).collect();
    // decoherence-free, real alpha = 0.1
    assert!((first[3] + 0.01 / 3.0).abs() < 1e-3, "{first:?}");
    assert!(first[4] < 1e-8, "{first:?}");
    let rows = fs::read_to_string(dir.path().join("kitten.csv")).unwrap().lines().count();
    assert_eq!(rows, 1 + 2 * 2 * 5);
    let meta = json(&dir.path().join("kitten.json"));
    assert_eq!(meta["columns"][5], "infidelity");
}

#[test]
fn sidecars_and_surface() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"{"sweep": {"gamma_ratio": {"min": 1e-8, "max": 1e-4, "points": 3},
                      "n_bath": {"min": 10, "max": 1e4, "points": 4}}}"#,
    );
    let out = run(dir.path(), &["cool-surface", "--config", &cfg]);
    assert!(out.status.success());
    let text = fs::read_to_string(dir.path().join("cool_surface.csv")).unwrap();
    assert_eq!(text.lines().count(), 1 + 12);
    for line in text.lines().skip(1) {
        let c: Vec<f64> = line.split(',').map(|x| x.parse().unwrap()).collect();
        assert!(c[2] <= c[3] * (1.0 + 1e-9) && c[2] > 0.0, "{line}");
    }
    let meta = json(&dir.path().join("cool_surface.json"));
    assert_eq!(meta["experiment"], "cool-surface");
    assert!(meta["generator"].as_str().unwrap().starts_with("optoswap"));
}

#[test]
fn tolerance_and_heating() {
    let dir = tempfile::tempdir().unwrap();
    assert!(run(dir.path(), &["tolerance"]).status.success());
    let text = fs::read_to_string(dir.path().join("tolerance.csv")).unwrap();
    assert_eq!(text.lines().count(), 1 + 3 * 9);
    assert!(run(dir.path(), &["heating"]).status.success());
    let v = json(&dir.path().join("heating.json"));
    let per = v["delta_n_bath_per_finesse_photon"].as_f64().unwrap();
    assert!((per / 5.1e-9 - 1.0).abs() < 0.05, "{per}");
}

#[test]
fn fock_transfer_negativity_falls_with_damping() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["fock-transfer", "--grid-points", "64"]);
    assert!(out.status.success());
    let text = fs::read_to_string(dir.path().join("fock_transfer.csv")).unwrap();
    let neg: Vec<f64> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(5).unwrap().parse().unwrap())
        .collect();
    assert_eq!(neg.len(), 3);
    assert!(neg[0] > neg[1] && neg[1] > neg[2] && neg[2] > 0.0, "{neg:?}");
    assert_eq!(
        fs::read_to_string(dir.path().join("wigner_n1_q0.csv")).unwrap().lines().count(),
        1 + 64 * 64
    );
}
