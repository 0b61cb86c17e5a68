use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn qtsim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qtsim"))
        .args(args)
        .env_remove("QTSIM_WORKERS")
        .output()
        .expect("binary runs")
}

fn qtsim_workers(args: &[&str], workers: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qtsim"))
        .args(args)
        .env("QTSIM_WORKERS", workers)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn only_file(dir: &Path) -> std::path::PathBuf {
    let entries: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .collect();
    assert_eq!(entries.len(), 1, "{entries:?}");
    entries.into_iter().next().unwrap()
}

#[test]
fn help_matches_golden() {
    let mut text = String::new();
    for sub in [
        "",
        "simulate",
        "attack-conformance",
        "resources",
        "calibrate",
        "run-suite",
    ] {
        let args: Vec<&str> = [sub, "--help"]
            .into_iter()
            .filter(|s| !s.is_empty())
            .collect();
        let o = qtsim(&args);
        assert_eq!(o.status.code(), Some(0));
        text.push_str(&format!("### qtsim {sub} --help\n"));
        text.push_str(&stdout(&o));
    }
    let golden =
        fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden/help.txt"))
            .unwrap();
    assert_eq!(text, golden);
}

#[test]
fn resources_row_for_six_bit_adder() {
    let o = qtsim(&["resources", "--adder", "qfa:6", "--adder", "qma:4"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(
        lines[0],
        "label,qubits,toffoli_count,cnot_count,toffoli_depth,cnot_depth"
    );
    let qfa: Vec<&str> = lines[1].split(',').collect();
    assert_eq!(qfa[0], "qfa:6");
    assert_eq!(qfa[1], "11");
    assert_eq!(qfa[4], "9");
    assert_eq!(qfa[5], "13");
    let qma: Vec<&str> = lines[2].split(',').collect();
    assert_eq!(&qma[2..4], ["1", "2"]);
}

#[test]
fn conformance_json_marks_each_layer() {
    let o = qtsim(&["attack-conformance", "--kind", "apc", "--max-n", "8"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let layers = v["layers"].as_array().unwrap();
    assert_eq!(layers.len(), 8);
    assert!(layers
        .iter()
        .all(|l| l["pass"].is_boolean() && l["fidelity"].is_number()));

    let o = qtsim(&[
        "attack-conformance",
        "--kind",
        "existing",
        "--max-n",
        "32",
        "--x",
        "1",
    ]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["all_pass"], true);
}

#[test]
fn validation_errors_exit_one() {
    for args in [
        &["resources", "--adder", "qfa"][..],
        &["simulate", "--adder", "qfa:1"],
        &["simulate", "--adder", "qfa:6", "--p2", "0.7"],
        &["simulate", "--adder", "qfa:6", "--shots", "0"],
        &["run-suite", "--tenancy", "white"],
        &["no-such-command"],
    ] {
        let o = qtsim(args);
        assert_eq!(
            o.status.code(),
            Some(1),
            "{args:?}: {}",
            String::from_utf8_lossy(&o.stderr)
        );
    }
    let o = qtsim_workers(&["resources"], "zero");
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn bad_config_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.json");
    fs::write(&path, r#"{"noise": {"p2": 0.01, "bogus": 1}}"#).unwrap();
    let o = qtsim(&[
        "simulate",
        "--adder",
        "qfa:6",
        "--config",
        path.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1));

    let missing = dir.path().join("missing.json");
    let o = qtsim(&[
        "simulate",
        "--adder",
        "qfa:6",
        "--config",
        missing.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn unwritable_output_is_runtime_error() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    fs::write(&blocker, "x").unwrap();
    let o = qtsim(&[
        "run-suite",
        "--shots",
        "2",
        "--out",
        blocker.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn config_file_values_apply_and_flags_override() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.json");
    fs::write(
        &path,
        r#"{"noise": {"p_meas": 0.49}, "experiment": {"shots": 7, "seed": 4}, "tenancy": {"model": "black"}}"#,
    )
    .unwrap();
    let cfg = path.to_str().unwrap();
    let o = qtsim(&["simulate", "--adder", "qfa:6", "--config", cfg]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["trajectories"], 21);
    assert!(v["mean"].as_f64().unwrap() < 0.5);

    let o = qtsim(&[
        "simulate", "--adder", "qfa:6", "--config", cfg, "--p-meas", "0", "--shots", "3",
    ]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["trajectories"], 9);
    assert_eq!(v["mean"], 1.0);
}

fn suite(format: &str, seed: &str, workers: &str) -> (String, Vec<u8>) {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "run-suite",
        "--shots",
        "6",
        "--seed",
        seed,
        "--p2",
        "0.02",
        "--p-meas",
        "0.01",
        "--ct-strength",
        "0.003",
        "--ct-coherent-angle",
        "0.05",
        "--format",
        format,
        "--out",
        dir.path().to_str().unwrap(),
    ];
    let o = qtsim_workers(&args, workers);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let path = only_file(dir.path());
    assert_eq!(stdout(&o).trim(), path.to_str().unwrap());
    let name = path.file_name().unwrap().to_str().unwrap().to_string();
    (name, fs::read(&path).unwrap())
}

#[test]
fn run_suite_is_byte_identical_across_runs_and_workers() {
    for format in ["csv", "json"] {
        let (name, first) = suite(format, "11", "1");
        assert!(
            name.starts_with("report-seed11-") && name.ends_with(format),
            "{name}"
        );
        for workers in ["1", "3", "8"] {
            let (n, bytes) = suite(format, "11", workers);
            assert_eq!(n, name);
            assert!(bytes == first, "{format} differs with {workers} workers");
        }
    }
    let (other, bytes) = suite("csv", "12", "2");
    assert!(other.starts_with("report-seed12-"));
    assert_ne!(bytes, suite("csv", "11", "2").1);
}
