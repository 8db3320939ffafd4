use std::fs;
use std::path::{Path, PathBuf};

use cavityq::cli::{check_passes, format_f64, load_config, parse_axis, run_cli, PRESETS};
use cavityq::experiments::{ExperimentConfig, Protocol};
use serde_json::Value;

fn presets_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("presets")
}

fn run(args: &[&str]) -> i32 {
    let mut all = vec!["cavityq"];
    all.extend_from_slice(args);
    run_cli(all)
}

fn schema() -> jsonschema::Validator {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("schemas/report.schema.json");
    let schema: Value = serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap();
    jsonschema::validator_for(&schema).unwrap()
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn shipped_presets_match_embedded_copies() {
    for (name, body) in PRESETS {
        let on_disk = fs::read_to_string(presets_dir().join(format!("{name}.json"))).unwrap();
        assert_eq!(on_disk, body, "{name}");
        ExperimentConfig::from_json(body).unwrap();
    }
}

#[test]
fn run_writes_report_and_trials() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let cfg = presets_dir().join("epr_ideal.json");
    assert_eq!(
        run(&[
            "run",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            out,
            "--trials",
            "50"
        ]),
        0
    );
    let report = read_json(&dir.path().join("report.json"));
    assert_eq!(report["summary"]["success_probability"].as_f64(), Some(1.0));
    assert_eq!(report["trials_csv"], "trials.csv");
    assert!(schema().is_valid(&report));

    let csv = fs::read_to_string(dir.path().join("trials.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next(),
        Some("trial,success,attempts,fidelity,outcomes")
    );
    assert_eq!(lines.count(), 50);

    let echoed: ExperimentConfig = serde_json::from_value(report["config"].clone()).unwrap();
    let mut expected = load_config(&cfg).unwrap();
    expected.trials = 50;
    assert_eq!(echoed, expected);
}

#[test]
fn report_is_byte_stable() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for (dir, jobs) in [(&a, "1"), (&b, "3")] {
        let out = dir.path().to_str().unwrap();
        assert_eq!(
            run(&[
                "run",
                "--config",
                "gate_eta05",
                "--trials",
                "300",
                "--jobs",
                jobs,
                "--out",
                out
            ]),
            0
        );
    }
    for f in ["report.json", "trials.csv"] {
        assert_eq!(
            fs::read(a.path().join(f)).unwrap(),
            fs::read(b.path().join(f)).unwrap(),
            "{f}"
        );
    }
}

#[test]
fn check_flag_on_presets() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    assert_eq!(
        run(&["run", "--config", "epr_ideal.json", "--check", "--out", out]),
        0
    );
    assert_eq!(
        run(&[
            "run",
            "--config",
            "gate_eta05.json",
            "--trials",
            "2000",
            "--check",
            "--out",
            out
        ]),
        0
    );
    assert_eq!(
        run(&[
            "run",
            "--config",
            "stationarity_thermal",
            "--check",
            "--out",
            out
        ]),
        0
    );
    assert!(schema().is_valid(&read_json(&dir.path().join("report.json"))));
}

#[test]
fn check_rejects_unpurified_runs() {
    let cfg = ExperimentConfig::from_json(PRESETS[0].1).unwrap();
    let mut stats = cavityq::experiments::SummaryStats::from_trials(&[]);
    assert!(!check_passes(&cfg, &stats));
    stats.min_fidelity = Some(1.0 - 1e-6);
    assert!(!check_passes(&cfg, &stats));
    stats.min_fidelity = Some(1.0 - 1e-12);
    assert!(check_passes(&cfg, &stats));
    let scan = ExperimentConfig {
        protocol: Protocol::StationarityScan,
        ..cfg
    };
    assert!(!check_passes(&scan, &stats));
}

#[test]
fn config_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    assert_eq!(run(&["run", "--config", "missing.json", "--out", out]), 1);
    let corrupt = dir.path().join("corrupt.json");
    fs::write(
        &corrupt,
        r#"{"protocol": "epr", "trials": 10, "seed": 1, "extra": true}"#,
    )
    .unwrap();
    assert_eq!(
        run(&["run", "--config", corrupt.to_str().unwrap(), "--out", out]),
        1
    );
    fs::write(&corrupt, "{ not json").unwrap();
    assert_eq!(
        run(&["run", "--config", corrupt.to_str().unwrap(), "--out", out]),
        1
    );
    assert_eq!(run(&["run", "--out", out]), 1);
    assert!(!dir.path().join("report.json").exists());
}

#[test]
fn unwritable_output_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    fs::write(&blocker, "x").unwrap();
    let out = blocker.join("sub");
    assert_eq!(
        run(&[
            "run",
            "--config",
            "epr_ideal",
            "--trials",
            "5",
            "--out",
            out.to_str().unwrap()
        ]),
        3
    );
}

#[test]
fn sweep_writes_one_row_per_point() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    assert_eq!(
        run(&[
            "sweep",
            "--config",
            "epr_p_therm_sweep",
            "--trials",
            "40",
            "--out",
            out
        ]),
        0
    );
    let csv = fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    let rows: Vec<&str> = csv.lines().skip(1).collect();
    assert_eq!(rows.len(), 4);
    let min_fid: Vec<f64> = rows
        .iter()
        .map(|r| r.split(',').nth(6).unwrap().parse().unwrap())
        .collect();
    assert!(min_fid[0] >= 1.0 - 1e-9);
    assert!(min_fid.iter().all(|&f| f <= 1.0));
    assert!(min_fid[3] < 1.0);
    assert!(schema().is_valid(&read_json(&dir.path().join("report.json"))));
}

#[test]
fn sweep_over_explicit_axis() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let args = [
        "sweep",
        "--config",
        "epr_eta",
        "--axis",
        "eta_transmission=0,0.3",
        "--trials",
        "60",
        "--out",
        out,
    ];
    assert_eq!(run(&args), 0);
    let report = read_json(&dir.path().join("report.json"));
    assert_eq!(report["rows"].as_array().unwrap().len(), 2);
    assert_eq!(
        report["rows"][0]["summary"]["min_fidelity"].as_f64(),
        Some(1.0)
    );
    assert_eq!(
        run(&[
            "sweep",
            "--config",
            "epr_eta",
            "--axis",
            "eta_transmission=",
            "--out",
            out
        ]),
        1
    );
    assert_eq!(
        run(&["sweep", "--config", "epr_eta", "--axis", "g=1", "--out", out]),
        1
    );
    assert_eq!(run(&["sweep", "--config", "epr_eta", "--out", out]), 1);
}

#[test]
fn axis_parsing() {
    assert_eq!(
        parse_axis("p_therm=0, 0.1").unwrap(),
        ("p_therm".to_string(), vec![0.0, 0.1])
    );
    assert!(parse_axis("p_therm").is_err());
    assert!(parse_axis("p_therm=a").is_err());
}

#[test]
fn list_presets_succeeds() {
    assert_eq!(run(&["list-presets"]), 0);
    let names: Vec<&str> = PRESETS.iter().map(|(n, _)| *n).collect();
    assert!(names.contains(&"epr_ideal") && names.contains(&"gate_eta05"));
}

#[test]
fn floats_keep_seventeen_digits() {
    assert_eq!(format_f64(0.1), "1.0000000000000001e-1");
    assert_eq!(format_f64(1.0), "1.0000000000000000e0");
    assert_eq!(format_f64(0.1).parse::<f64>().unwrap(), 0.1);
}
