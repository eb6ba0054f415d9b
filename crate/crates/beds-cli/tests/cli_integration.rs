//! Binary-level tests: exit codes, artifact contracts and byte-level
//! determinism across separate processes.

use std::path::Path;
use std::process::Command;

fn beds() -> Command {
    Command::new(env!("CARGO_BIN_EXE_beds"))
}

fn write(path: &Path, text: &str) {
    std::fs::write(path, text).unwrap();
}

const DISSIPATE: &str = "\
[dissipate]
seed = 42
tau0 = 4.0
kappa0 = 2.0
gamma = 0.5
gamma_kappa = 1.0
t_end = 1.0
dt = 0.001
";

#[test]
fn dissipate_writes_the_contracted_columns() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("d.conf");
    write(&conf, DISSIPATE);
    let out = dir.path().join("out");
    let status = beds()
        .args(["--config"])
        .arg(&conf)
        .args(["--quiet"])
        .arg("--out-dir")
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let csv = std::fs::read_to_string(out.join("trajectory.csv")).unwrap();
    assert!(csv.starts_with("t,mu,tau,phi,kappa,C,regime\n"));
    let report = std::fs::read_to_string(out.join("report.json")).unwrap();
    let json: serde_json::Value = serde_json::from_str(&report).unwrap();
    assert_eq!(json["schema_version"], 1);
    assert_eq!(json["kind"], "dissipate");
}

#[test]
fn same_seed_gives_byte_identical_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("n.conf");
    write(
        &conf,
        "[network]\nseed = 7\nrounds = 120\nprune_every = 60\n",
    );
    let (out1, out2) = (dir.path().join("a"), dir.path().join("b"));
    for out in [&out1, &out2] {
        let status = beds()
            .arg("--config")
            .arg(&conf)
            .arg("--out-dir")
            .arg(out)
            .arg("--quiet")
            .status()
            .unwrap();
        assert!(status.success());
    }
    for name in ["network.csv", "edges_final.txt"] {
        let a = std::fs::read(out1.join(name)).unwrap();
        let b = std::fs::read(out2.join(name)).unwrap();
        assert_eq!(a, b, "{name} must be byte-identical across runs");
    }
    // different seed changes the artifacts (the jitter is seeded)
    let out3 = dir.path().join("c");
    beds()
        .arg("--config")
        .arg(&conf)
        .arg("--out-dir")
        .arg(&out3)
        .args(["--seed", "8", "--quiet"])
        .status()
        .unwrap();
    let a = std::fs::read(out1.join("network.csv")).unwrap();
    let c = std::fs::read(out3.join("network.csv")).unwrap();
    assert_ne!(a, c, "a different seed must change the jittered run");
}

#[test]
fn config_errors_exit_2_and_name_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("bad.conf");
    write(&conf, &DISSIPATE.replace("gamma = 0.5", "gamma = -1"));
    let out = beds()
        .arg("--config")
        .arg(&conf)
        .arg("--out-dir")
        .arg(dir.path().join("out"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("gamma"), "stderr names the key: {stderr}");
    assert!(stderr.contains("line 5"), "stderr names the line: {stderr}");
}

#[test]
fn missing_config_file_exits_4() {
    let dir = tempfile::tempdir().unwrap();
    let out = beds()
        .arg("--config")
        .arg(dir.path().join("nope.conf"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn unwritable_out_dir_exits_4() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("d.conf");
    write(&conf, DISSIPATE);
    // a file where the out-dir should be
    let blocker = dir.path().join("blocked");
    std::fs::write(&blocker, "file").unwrap();
    let out = beds()
        .arg("--config")
        .arg(&conf)
        .arg("--out-dir")
        .arg(&blocker)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn numeric_failure_exits_3_and_lands_in_the_report() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("o.conf");
    // an absurd step size blows the optimizer up
    write(
        &conf,
        "\
[optimize]
mu0 = 1.0
tau0 = 1.0
kappa0 = 1.0
mu_star = 0.0
tau_star = 1.0
kappa_star = 1.0
lambda = 1.0
eta = 1e12
steps = 50
method = plain
",
    );
    let out_dir = dir.path().join("out");
    let out = beds()
        .arg("--config")
        .arg(&conf)
        .arg("--out-dir")
        .arg(&out_dir)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("report.json")).unwrap())
            .unwrap();
    let errors = report["errors"].as_array().unwrap();
    assert!(!errors.is_empty(), "report must record the failure");
    assert!(errors[0]["message"].as_str().unwrap().contains("non-finite"));
}

#[test]
fn taxonomy_scenario_reports_m_full() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("t.conf");
    write(
        &conf,
        "\
[taxonomy]
tau_mode = oscillate
kappa_mode = oscillate
",
    );
    let out_dir = dir.path().join("out");
    assert!(beds()
        .arg("--config")
        .arg(&conf)
        .arg("--out-dir")
        .arg(&out_dir)
        .arg("--quiet")
        .status()
        .unwrap()
        .success());
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("report.json")).unwrap())
            .unwrap();
    assert_eq!(report["metrics"]["cls"], "M-full");
}

#[test]
fn bounds_scenario_reports_p_min() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("b.conf");
    write(&conf, "[bounds]\ngamma = 2.0\ntau_star = 1.0\nkt = 1.0\n");
    let out_dir = dir.path().join("out");
    assert!(beds()
        .arg("--config")
        .arg(&conf)
        .arg("--out-dir")
        .arg(&out_dir)
        .arg("--quiet")
        .status()
        .unwrap()
        .success());
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("report.json")).unwrap())
            .unwrap();
    assert_eq!(report["metrics"]["p_min"], 1.0);
}

#[test]
fn csv_values_reparse_to_identical_bits() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("d.conf");
    write(&conf, DISSIPATE);
    let out_dir = dir.path().join("out");
    assert!(beds()
        .arg("--config")
        .arg(&conf)
        .arg("--out-dir")
        .arg(&out_dir)
        .arg("--quiet")
        .status()
        .unwrap()
        .success());
    let csv = std::fs::read_to_string(out_dir.join("trajectory.csv")).unwrap();
    let mut lines = csv.lines();
    lines.next(); // header
    // spot-check: tau column at t=1 equals 4·e^(-1) after reparsing
    let last = lines.last().unwrap();
    let tau: f64 = last.split(',').nth(2).unwrap().parse().unwrap();
    let expected = 4.0 * (-1.0_f64).exp();
    assert!((tau - expected).abs() < 1e-8 * expected);
    // and every float field round-trips through the printed form
    for line in csv.lines().skip(1).take(5) {
        for cell in line.split(',').take(6) {
            let v: f64 = cell.parse().unwrap();
            assert_eq!(format!("{v:.16e}"), cell);
        }
    }
}
