use std::fs;
use std::path::{Path, PathBuf};

use xtalk_cli::config::RunConfig;
use xtalk_cli::svg::{heatmap, line_chart, render_records, Grid, Metric, PlotKind, Series};
use xtalk_cli::{load_dataset, run, CliError};
use xtalk_core::{Error, Record};

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

fn xtalk(args: &[&str]) -> i32 {
    let mut argv = vec!["xtalk"];
    argv.extend_from_slice(args);
    run(argv)
}

fn read(dir: &Path, name: &str) -> String {
    fs::read_to_string(dir.join(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

/// Data rows of a result CSV, header row excluded.
fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

fn echoed_config(text: &str) -> RunConfig {
    let line = text.lines().find_map(|l| l.strip_prefix("# config: ")).expect("config line");
    RunConfig::from_json(line).unwrap()
}

#[test]
fn coin_ideal_column_is_sin_squared() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    assert_eq!(xtalk(&["coin", "--lambda-grid", "0:90:5", "--timing", "attacker-first", "--out", out]), 0);
    let text = read(dir.path(), "coin.csv");
    assert!(text.lines().any(|l| l == "lambda_deg,p1_ideal,p1_attacked"));
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 19);
    for r in rows {
        let deg: f64 = r[0].parse().unwrap();
        let ideal: f64 = r[1].parse().unwrap();
        let attacked: f64 = r[2].parse().unwrap();
        assert!((ideal - deg.to_radians().sin().powi(2)).abs() <= 1e-10);
        assert!((0.0..=1.0).contains(&attacked));
    }
    assert!(dir.path().join("coin.svg").exists());
}

#[test]
fn scan_writes_ten_ordered_rows() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(xtalk(&["scan", "--out", dir.path().to_str().unwrap()]), 0);
    let rows = csv_rows(&read(dir.path(), "scan.csv"));
    assert_eq!(rows.len(), 10);
    let norms: Vec<f64> = rows.iter().map(|r| r[2].parse().unwrap()).collect();
    assert!(norms.windows(2).all(|w| w[0] >= w[1]));
    let svg = read(dir.path(), "scan.svg");
    assert_eq!(svg.matches("><title>").count(), 10);
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let names = ["fit.json", "coin.csv", "coin.svg", "xor.json", "detect.json"];
    let snapshot = || {
        for cmd in ["fit", "coin", "xor", "detect"] {
            assert_eq!(xtalk(&[cmd, "--out", out]), 0);
        }
        names.map(|n| fs::read(dir.path().join(n)).unwrap())
    };
    let first = snapshot();
    let second = snapshot();
    assert_eq!(first, second);
}

#[test]
fn echoed_config_reproduces_the_run() {
    let a = tempfile::tempdir().unwrap();
    let cfg_path = a.path().join("cfg.json");
    fs::write(&cfg_path, r#"{"pulses": {"q0": {"shape": "drag", "amplitude": 0.7}}, "coupling": {"type_01": "YX"}}"#).unwrap();
    let out_a = a.path().join("first");
    assert_eq!(xtalk(&["coin", "--config", cfg_path.to_str().unwrap(), "--lambda-grid", "0:60:15", "--out", out_a.to_str().unwrap()]), 0);
    let first = read(&out_a, "coin.csv");
    let echoed = echoed_config(&first);
    assert_eq!(echoed.pulses.q0.amplitude, 0.7);
    assert_eq!(echoed.protocol.lambda_grid_deg.step, 15.0);

    let replay = a.path().join("replay.json");
    fs::write(&replay, echoed.to_json()).unwrap();
    assert_eq!(xtalk(&["coin", "--config", replay.to_str().unwrap()]), 0);
    let second = read(Path::new(&echoed.output.directory), "coin.csv");
    assert_eq!(first, second);

    let fit_dir = a.path().join("fit");
    assert_eq!(xtalk(&["fit", "--config", replay.to_str().unwrap(), "--out", fit_dir.to_str().unwrap()]), 0);
    let doc: serde_json::Value = serde_json::from_str(&read(&fit_dir, "fit.json")).unwrap();
    let mut cfg: RunConfig = serde_json::from_value(doc["config"].clone()).unwrap();
    cfg.output.directory = echoed.output.directory.clone();
    assert_eq!(cfg, echoed);
}

#[test]
fn fit_json_shape() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(xtalk(&["fit", "--out", dir.path().to_str().unwrap()]), 0);
    let doc: serde_json::Value = serde_json::from_str(&read(dir.path(), "fit.json")).unwrap();
    assert_eq!(doc["format_version"], "xtalk/1");
    let r = &doc["result"];
    for key in ["theta", "loss", "iterations", "converged"] {
        assert!(!r[key].is_null(), "{key}");
    }
    let iso = r["iso"].as_array().unwrap();
    assert_eq!(iso.len(), 4);
    assert!(iso.iter().all(|row| row.as_array().unwrap().len() == 4 && row[0].as_array().unwrap().len() == 2));
}

#[test]
fn malformed_configs_exit_with_one() {
    let mut paths: Vec<PathBuf> = fs::read_dir(fixtures().join("bad")).unwrap().map(|e| e.unwrap().path()).collect();
    paths.sort();
    assert!(paths.len() >= 10);
    for p in paths {
        let dir = tempfile::tempdir().unwrap();
        let code = xtalk(&["fit", "--config", p.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
        assert_eq!(code, 1, "{}", p.display());
        assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 0, "{} wrote output", p.display());
    }
}

#[test]
fn argument_errors_exit_with_one() {
    assert_eq!(xtalk(&[]), 1);
    assert_eq!(xtalk(&["teleport"]), 1);
    assert_eq!(xtalk(&["coin", "--lambda-grid", "0:90"]), 1);
    assert_eq!(xtalk(&["coin", "--timing", "sideways"]), 1);
    assert_eq!(xtalk(&["sweep", "--target", "q7"]), 1);
    assert_eq!(xtalk(&["detuning", "--shape", "sawtooth"]), 1);
    assert_eq!(xtalk(&["fit", "--config", "/nonexistent/cfg.json"]), 1);
    assert_eq!(xtalk(&["--help"]), 0);
}

#[test]
fn missing_or_bad_dataset_exits_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    assert_eq!(xtalk(&["sqqnn", "--dataset", "/nonexistent/iris.csv", "--out", out]), 1);
    let empty = fixtures().join("data/empty.csv");
    assert_eq!(xtalk(&["sqqnn", "--dataset", empty.to_str().unwrap(), "--out", out]), 1);
}

#[test]
fn numerical_failures_map_to_two() {
    assert_eq!(CliError::Core(Error::NonPhysical { eigenvalue: -1e-3 }).exit_code(), 2);
    assert_eq!(CliError::Core(Error::Reconstruction { deficit: 1e-3 }).exit_code(), 2);
    assert_eq!(CliError::Core(Error::Validation("x".into())).exit_code(), 1);
    assert_eq!(CliError::Io("x".into()).exit_code(), 1);
}

#[test]
fn dataset_ingestion() {
    let iris = load_dataset(&Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/data/iris_binary.csv")).unwrap();
    assert_eq!(iris.len(), 100);
    assert!(iris.features.iter().all(|r| r.len() == 4));
    assert!(iris.labels.iter().all(|&l| l == 1.0 || l == -1.0));

    let two = load_dataset(&fixtures().join("data/one_per_class.csv")).unwrap();
    assert_eq!(two.labels, vec![1.0, -1.0]);
    assert_eq!(two.features[0], vec![5.1, 3.5, 1.4, 0.2]);

    for (name, row) in [("empty.csv", 1), ("bad_header.csv", 1), ("non_numeric.csv", 3), ("bad_label.csv", 2)] {
        match load_dataset(&fixtures().join("data").join(name)) {
            Err(CliError::Core(Error::Ingestion { row: r, .. })) => assert_eq!(r, row, "{name}"),
            other => panic!("{name}: {other:?}"),
        }
    }
}

#[test]
fn sqqnn_writes_accuracy_grid() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(xtalk(&["sqqnn", "--out", dir.path().to_str().unwrap()]), 0);
    let doc: serde_json::Value = serde_json::from_str(&read(dir.path(), "sqqnn.json")).unwrap();
    let r = &doc["result"];
    assert_eq!(r["test_size"], 30);
    assert_eq!(r["train_size"], 70);
    assert!(r["accuracy_no_attack"].as_f64().unwrap() >= 0.95);
    let grid = r["grid_accuracy"].as_array().unwrap();
    assert_eq!(grid.len(), 5);
    assert_eq!(read(dir.path(), "sqqnn.svg").matches("><title>").count(), 25);
}

fn record(id: &str, x: f64, theta: f64) -> Record {
    Record {
        config_id: id.into(),
        swept_name: "A1".into(),
        swept_value: x,
        influence_norm: None,
        theta: Some(theta),
        loss: Some(theta * theta),
        converged: true,
    }
}

fn polyline_xs(svg: &str) -> Vec<Vec<f64>> {
    svg.split("points=\"")
        .skip(1)
        .map(|s| {
            s.split('"').next().unwrap().split(' ').filter(|p| !p.is_empty()).map(|p| p.split(',').next().unwrap().parse().unwrap()).collect()
        })
        .collect()
}

#[test]
fn two_point_series_is_one_polyline() {
    let s = line_chart("t", "x", "y", &[Series { label: "a".into(), points: vec![(0.0, 1.0), (1.0, 2.0)] }]);
    assert_eq!(s.matches("<polyline").count(), 1);
    assert!(s.starts_with("<?xml") && s.contains("version=\"1.1\"") && s.trim_end().ends_with("</svg>"));
}

#[test]
fn sweep_plot_has_monotone_x() {
    let recs: Vec<Record> = (1..=10).map(|k| record("driver", k as f64 / 10.0, (k as f64).sin())).collect();
    let s = render_records(&recs, PlotKind::Line, Metric::Theta, "sweep");
    let xs = polyline_xs(&s);
    assert_eq!(xs.len(), 1);
    assert_eq!(xs[0].len(), 10);
    assert!(xs[0].windows(2).all(|w| w[0] < w[1]));
}

#[test]
fn heatmap_has_one_cell_per_value() {
    let grid = Grid {
        x_labels: (0..5).map(|k| k.to_string()).collect(),
        y_labels: (0..5).map(|k| k.to_string()).collect(),
        values: (0..5).map(|r| (0..5).map(|c| (r * 5 + c) as f64 / 24.0).collect()).collect(),
    };
    let s = heatmap("acc", "A1", "A0", &grid);
    assert_eq!(s.matches("><title>").count(), 25);
    let recs: Vec<Record> = ["a", "b"].iter().flat_map(|id| (0..3).map(move |k| record(id, k as f64, 0.1))).collect();
    assert_eq!(render_records(&recs, PlotKind::Heatmap, Metric::Loss, "h").matches("><title>").count(), 6);
}

#[test]
fn svg_is_deterministic() {
    let recs: Vec<Record> = (0..7).map(|k| record("c", k as f64, 1e-3 * k as f64)).collect();
    let a = render_records(&recs, PlotKind::Line, Metric::Loss, "x");
    let b = render_records(&recs, PlotKind::Line, Metric::Loss, "x");
    assert_eq!(a, b);
}
