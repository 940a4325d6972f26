//! End-to-end checks of the command-line interface: exit codes, output
//! determinism, config-file handling, and the CSV format.

use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_diracbound"))
}

fn tmp(name: &str) -> std::path::PathBuf {
    let mut p = std::env::temp_dir();
    p.push(format!("diracbound-test-{}-{name}", std::process::id()));
    p
}

#[test]
fn spectrum_torus_reports_pi_sqrt2() {
    let out = bin()
        .args(["spectrum", "--geometry", "torus", "--l1", "1", "--l2", "1", "--spin", "1,1", "-k", "4"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let json: serde_json::Value = serde_json::from_str(&text).unwrap();
    let first = &json["results"][0];
    let lam: f64 = first["lambda_re"].as_str().unwrap().parse().unwrap();
    assert!((lam.abs() - std::f64::consts::PI * 2f64.sqrt()).abs() < 1e-10);
    assert_eq!(json["results"].as_array().unwrap().len(), 4);
    assert!(json["version"].is_string());
    assert!(json["tolerance"].is_string());
    assert_eq!(first["oracle"], "fourier-exact");
}

#[test]
fn invalid_spin_exits_2() {
    let out = bin()
        .args(["spectrum", "--geometry", "torus", "--spin", "2,0"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn boundary_suite_on_closed_geometry_exits_2() {
    let out = bin()
        .args(["verify", "--suite", "boundary", "--geometry", "torus"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn identical_config_and_seed_reproduce_bitwise() {
    let p = tmp("det.json");
    let mut captured: Vec<Vec<u8>> = Vec::new();
    for threads in ["2", "1"] {
        let out = bin()
            .args([
                "verify",
                "--suite",
                "identities",
                "--geometry",
                "torus",
                "--seed",
                "7",
                "--instances",
                "10",
                "--out",
                p.to_str().unwrap(),
            ])
            .env("DIRACBOUND_THREADS", threads)
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
        captured.push(std::fs::read(&p).unwrap());
    }
    assert_eq!(captured[0], captured[1], "verify outputs differ between identical runs");
    std::fs::remove_file(p).ok();
}

#[test]
fn bound_t1_on_disk_via_config_file() {
    let cfg = tmp("disk.cfg");
    std::fs::write(
        &cfg,
        "[geometry]\nkind = disk\nradius = 1.0\n[bc]\nkind = local\nsign = +1\n[solver]\nk = 1\n",
    )
    .unwrap();
    let out = bin()
        .args(["bound", "--theorem", "t1", "--config", cfg.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let json: serde_json::Value =
        serde_json::from_str(&String::from_utf8(out.stdout).unwrap()).unwrap();
    let rhs: f64 = json["results"][0]["rhs"].as_str().unwrap().parse().unwrap();
    let gap: f64 = json["results"][0]["gap"].as_str().unwrap().parse().unwrap();
    assert_eq!(rhs, 2.0);
    assert!(gap > 0.02);
    std::fs::remove_file(cfg).ok();
}

#[test]
fn theorem_dimension_mismatch_exits_2() {
    let out = bin()
        .args(["bound", "--theorem", "thm2", "--geometry", "disk"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = bin()
        .args(["bound", "--theorem", "t1", "--geometry", "sphere", "--n", "3"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn csv_output_has_header_and_17_digit_floats() {
    let out = bin()
        .args(["spectrum", "--geometry", "torus", "--spin", "1,1", "-k", "2", "--format", "csv"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap();
    assert!(header.contains("lambda_re"));
    let row = lines.next().unwrap();
    // 17 significant digits: d.16 digits mantissa + exponent
    assert!(row.contains("e0") || row.contains("e-") || row.contains("e1"));
    let field = row.split(',').nth(1).unwrap();
    let mantissa = field.split('e').next().unwrap();
    let digits = mantissa.chars().filter(|c| c.is_ascii_digit()).count();
    assert_eq!(digits, 18, "field {field}");
}

#[test]
fn converge_disk_eigenvalue_reports_second_order() {
    let out = bin()
        .args([
            "converge",
            "--quantity",
            "eigenvalue",
            "--refinements",
            "3",
            "--geometry",
            "disk",
            "--bc",
            "local",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let json: serde_json::Value =
        serde_json::from_str(&String::from_utf8(out.stdout).unwrap()).unwrap();
    let order: f64 = json["fitted_order"].as_str().unwrap().parse().unwrap();
    assert!(order >= 1.9, "fitted order {order}");
}

#[test]
fn scaling_suite_passes() {
    let out = bin()
        .args(["verify", "--suite", "scaling", "--geometry", "disk", "--bc", "local", "--sigma", "2"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
}
