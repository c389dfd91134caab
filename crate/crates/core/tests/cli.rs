use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use trotter_dixmier::harness::{ExperimentConfig, OperatorSpec, PotentialProfile};

fn bin(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_trotter-dixmier"))
        .args(args)
        .current_dir(cwd)
        .env_remove("TROTTER_DIXMIER_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn commuting_config(out_dir: &str) -> ExperimentConfig {
    let diag = |profile, scale| OperatorSpec::PotentialDiag {
        n: 8,
        profile: Some(profile),
        values: None,
        scale,
    };
    ExperimentConfig {
        operator_a: diag(PotentialProfile::InverseShift, None),
        operator_b: diag(PotentialProfile::LogIndex, Some(0.2)),
        n_grid: vec![4, 8, 16, 32, 64],
        output_dir: out_dir.into(),
        ..ExperimentConfig::default()
    }
}

#[test]
fn norms_of_stored_identity() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("id.txt"), "2\n1 0 0 0\n0 0 1 0\n").unwrap();
    let out = bin(&["norms", "id.txt", "--kind", "schatten:1"], dir.path());
    assert!(out.status.success());
    assert_eq!(stdout(&out).trim(), "2");
    let out = bin(&["norms", "id.txt", "--kind", "operator"], dir.path());
    assert_eq!(stdout(&out).trim(), "1");
}

#[test]
fn norms_rejects_bad_input() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("bad.txt"), "2\n1 0 0\n").unwrap();
    assert_eq!(
        bin(&["norms", "bad.txt", "--kind", "operator"], dir.path())
            .status
            .code(),
        Some(2)
    );
    fs::write(dir.path().join("id.txt"), "1\n1 0\n").unwrap();
    assert_eq!(
        bin(&["norms", "id.txt", "--kind", "weak:0.5"], dir.path())
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn trace_of_harmonic_model() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin(
        &["trace", "--model", "harmonic", "--c", "1", "--n", "100000"],
        dir.path(),
    );
    assert!(out.status.success());
    let text = stdout(&out);
    let value: f64 = text
        .lines()
        .find_map(|l| l.strip_prefix("value = "))
        .unwrap()
        .parse()
        .unwrap();
    assert!((0.95..=1.0).contains(&value), "{value}");
    assert!(text.contains("converged = true"));
}

#[test]
fn validate_kato_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin(&["validate-kato", "--function", "exp"], dir.path());
    assert!(out.status.success());
    assert!(stdout(&out).contains("overall: pass"));
    let out = bin(
        &["validate-kato", "--function", "resolvent_power"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unknown_subcommand_prints_usage() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin(&["frobnicate"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));
}

#[test]
fn commuting_experiment_is_exact_and_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    for run in ["a", "b"] {
        let config = commuting_config(&format!("out_{run}"));
        fs::write(
            dir.path().join(format!("{run}.toml")),
            config.to_toml_string().unwrap(),
        )
        .unwrap();
        let out = bin(&["trotter", "--config", &format!("{run}.toml")], dir.path());
        assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
        assert!(stdout(&out).contains("fit skipped: roundoff floor"));
    }
    let mut names: Vec<_> = fs::read_dir(dir.path().join("out_a"))
        .unwrap()
        .map(|e| e.unwrap().file_name())
        .collect();
    names.sort();
    assert_eq!(names.len(), 9);
    for name in names
        .iter()
        .filter(|n| n.to_string_lossy().ends_with(".csv"))
    {
        let a = fs::read(dir.path().join("out_a").join(name)).unwrap();
        let b = fs::read(dir.path().join("out_b").join(name)).unwrap();
        assert_eq!(a, b, "{name:?}");
        let text = String::from_utf8(a).unwrap();
        for line in text.lines().skip(1) {
            let error: f64 = line.rsplit(',').next().unwrap().parse().unwrap();
            assert!(error <= 1e-12);
        }
    }
    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("out_a/summary.json")).unwrap())
            .unwrap();
    assert_eq!(summary["schema_version"], 1);
    assert_eq!(summary["passed"], true);
}

#[test]
fn thread_count_does_not_change_output() {
    let dir = tempfile::tempdir().unwrap();
    let config = ExperimentConfig {
        operator_a: OperatorSpec::RandomPsd { n: 6, seed: 1 },
        operator_b: OperatorSpec::RandomPsd { n: 6, seed: 2 },
        n_grid: vec![2, 4, 8, 16, 32, 64],
        ..commuting_config("single")
    };
    fs::write(dir.path().join("c.toml"), config.to_toml_string().unwrap()).unwrap();
    let single = Command::new(env!("CARGO_BIN_EXE_trotter-dixmier"))
        .args(["trotter", "--config", "c.toml"])
        .current_dir(dir.path())
        .env("TROTTER_DIXMIER_THREADS", "1")
        .output()
        .unwrap();
    assert!(single.status.code().is_some());
    let multi_config = ExperimentConfig {
        output_dir: "multi".into(),
        ..config
    };
    fs::write(
        dir.path().join("m.toml"),
        multi_config.to_toml_string().unwrap(),
    )
    .unwrap();
    let multi = Command::new(env!("CARGO_BIN_EXE_trotter-dixmier"))
        .args(["trotter", "--config", "m.toml"])
        .current_dir(dir.path())
        .env("TROTTER_DIXMIER_THREADS", "3")
        .output()
        .unwrap();
    assert_eq!(single.status.code(), multi.status.code());
    let csv = "errors_FG_operator.csv";
    assert_eq!(
        fs::read(dir.path().join("single").join(csv)).unwrap(),
        fs::read(dir.path().join("multi").join(csv)).unwrap()
    );
    let bad = Command::new(env!("CARGO_BIN_EXE_trotter-dixmier"))
        .args(["trotter", "--config", "c.toml"])
        .current_dir(dir.path())
        .env("TROTTER_DIXMIER_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn weak_half_config_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let config = ExperimentConfig {
        norms: vec!["weak:0.5".into()],
        ..commuting_config("out")
    };
    fs::write(dir.path().join("c.toml"), config.to_toml_string().unwrap()).unwrap();
    let out = bin(&["trotter", "--config", "c.toml"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("weak"));
    assert!(!dir.path().join("out").exists());
}

#[test]
fn print_default_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin(&["trotter", "--print-default"], dir.path());
    assert!(out.status.success());
    assert_eq!(
        ExperimentConfig::from_toml_str(&stdout(&out)).unwrap(),
        ExperimentConfig::default()
    );
}

#[test]
fn selftest_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin(&["selftest"], dir.path());
    assert!(out.status.success(), "{}", stdout(&out));
    assert!(!stdout(&out).contains("FAIL"));
}
