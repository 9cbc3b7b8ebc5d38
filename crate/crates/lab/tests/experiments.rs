use std::path::Path;

use kp5lab::experiments::{ansatz_vs_flow, lowfreq_run, thm1_experiment};
use kp5lab::{run_manifest, ExperimentManifest, LabError, OutputDir, RunSpec, Thm1Options};

fn column(path: &Path, name: &str) -> Vec<f64> {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let i = header.iter().position(|h| *h == name).unwrap();
    lines.map(|l| l.split(',').nth(i).unwrap().parse().unwrap()).collect()
}

fn run_config(dir: &Path, json: &str) -> Result<ExperimentManifest, LabError> {
    let config = dir.join("config.json");
    std::fs::write(&config, json).unwrap();
    run_manifest(&config, None, 1)
}

fn assert_outputs_exist(m: &ExperimentManifest) {
    for f in &m.outputs {
        let meta = std::fs::metadata(f).unwrap();
        assert!(meta.len() > 0, "{f} is empty");
    }
}

#[test]
fn minimal_thm1_config() {
    let dir = tempfile::tempdir().unwrap();
    let m = run_config(dir.path(), r#"{"experiment": "thm1", "n": 2}"#).unwrap();
    assert_eq!(m.outputs.len(), 2);
    assert_outputs_exist(&m);
    assert!(dir.path().join("thm1_manifest.json").exists());
    assert_eq!(m.parameters["grid"], serde_json::json!([32, 32]));
    assert_eq!(m.parameters["grid_source"], "sizing rule");
    assert!(m.metric_value("max_l2_drift").is_some());
    assert!(m.metric_value("max_hamiltonian_drift").is_some());

    let initial = m.metric_value("initial_diff").unwrap();
    assert!((initial - 2.5833).abs() < 1e-4);
    let measured = m.metric_value("initial_diff_measured").unwrap();
    assert!((measured / initial - 1.0).abs() < 1e-10);
    assert!(m.metric_value("separation_c").unwrap() > 0.0);

    let loaded = ExperimentManifest::load(&dir.path().join("thm1_manifest.json")).unwrap();
    assert_eq!(loaded.outputs, m.outputs);
}

#[test]
fn non_admissible_config_is_a_parameter_error() {
    let dir = tempfile::tempdir().unwrap();
    let e = run_config(dir.path(), r#"{"experiment": "thm1", "n": 5}"#).unwrap_err();
    assert_eq!(e.exit_code(), 2);
    assert!(e.to_string().contains("n² + n + 1"), "{e}");
    let e = run_config(dir.path(), r#"{"experiment": "nope", "n": 2}"#).unwrap_err();
    assert_eq!(e.exit_code(), 2);
    let e = run_config(dir.path(), r#"{"experiment": "thm1", "n": 2, "colour": 1}"#).unwrap_err();
    assert_eq!(e.exit_code(), 2);
    let names: Vec<_> = std::fs::read_dir(dir.path()).unwrap().map(|e| e.unwrap().file_name()).collect();
    assert_eq!(names, ["config.json"]);
}

#[test]
fn failed_runs_remove_partial_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let e = run_config(dir.path(), r#"{"experiment": "evolve", "n": 2, "dt": 0.1, "sample": 0.1, "conserve_check": true}"#).unwrap_err();
    assert_eq!(e.exit_code(), 3);
    let names: Vec<_> = std::fs::read_dir(dir.path()).unwrap().map(|e| e.unwrap().file_name()).collect();
    assert_eq!(names, ["config.json"]);
}

#[test]
fn single_threaded_runs_are_byte_identical() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let json = r#"{"experiment": "thm1", "n": 2, "t_end": 0.3}"#;
    let ma = run_config(a.path(), json).unwrap();
    let mb = run_config(b.path(), json).unwrap();
    for (fa, fb) in ma.outputs.iter().zip(&mb.outputs) {
        assert_eq!(std::fs::read(fa).unwrap(), std::fs::read(fb).unwrap());
    }
}

#[test]
fn two_threads_match_one() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let mut spec = RunSpec::new(2).unwrap();
    spec.t_end = 0.2;
    let one = thm1_experiment(&spec, &Thm1Options::default(), &mut OutputDir::new(a.path()).unwrap()).unwrap();
    spec.threads = 2;
    let two = thm1_experiment(&spec, &Thm1Options::default(), &mut OutputDir::new(b.path()).unwrap()).unwrap();
    let (ca, cb) = (column(Path::new(&one.outputs[0]), "e_sigma_diff"), column(Path::new(&two.outputs[0]), "e_sigma_diff"));
    for (x, y) in ca.iter().zip(&cb) {
        assert!((x - y).abs() <= 1e-12 * x.abs().max(1.0));
    }
}

#[test]
fn ansatz_starts_on_the_flow() {
    let dir = tempfile::tempdir().unwrap();
    let mut spec = RunSpec::new(2).unwrap();
    spec.t_end = 0.1;
    let m = ansatz_vs_flow(&spec, &mut OutputDir::new(dir.path()).unwrap()).unwrap();
    let path = Path::new(&m.outputs[0]);
    assert!(column(path, "l2_gap")[0] < 1e-14);
    assert!(column(path, "dxsigma_gap")[0] < 1e-14);
}

/// `e_sigma_diff ≥ lower_envelope − (flow-to-ansatz gaps) − (low-frequency gaps)`
/// at every logged time.
#[test]
fn separation_inequality_chain_at_n2() {
    let dir = tempfile::tempdir().unwrap();
    let mut out = OutputDir::new(dir.path()).unwrap();
    let spec = RunSpec::new(2).unwrap();
    let thm1 = thm1_experiment(&spec, &Thm1Options::default(), &mut out).unwrap();
    let mut gap = 0.0;
    for theta in [-1.0, 1.0] {
        let s = RunSpec { theta, ..spec.clone() };
        gap += ansatz_vs_flow(&s, &mut out).unwrap().metric_value("max_dxsigma_gap").unwrap();
        gap += lowfreq_run(&s, &mut out).unwrap().metric_value("max_gap").unwrap();
    }
    let series = dir.path().join("thm1_n2_series.csv");
    let diff = column(&series, "e_sigma_diff");
    let envelope = column(&series, "lower_envelope");
    assert_eq!(diff.len(), 101);
    for (d, e) in diff.iter().zip(&envelope) {
        assert!(*d >= e - gap, "{d} < {e} − {gap}");
    }
    assert!(thm1.metric_value("separation_c").unwrap() > 0.0);
}

#[test]
fn missing_grid_is_sized_and_recorded() {
    let dir = tempfile::tempdir().unwrap();
    let m = run_config(dir.path(), r#"{"experiment": "evolve", "n": 2, "t_end": 0.05}"#).unwrap();
    assert_eq!(m.parameters["grid"], serde_json::json!([32, 32]));
    assert_eq!(m.parameters["grid_source"], "sizing rule");
    let m = run_config(dir.path(), r#"{"experiment": "evolve", "n": 2, "t_end": 0.05, "grid": [32, 64]}"#).unwrap();
    assert_eq!(m.parameters["grid_source"], "given");
}

#[test]
fn residual_config_reports_the_mean() {
    let dir = tempfile::tempdir().unwrap();
    let m = run_config(dir.path(), r#"{"experiment": "residual", "n": 2, "remainder": "literal"}"#).unwrap();
    assert!(m.metric_value("mean_residual").unwrap() > 0.0);
    assert!(dir.path().join("residual_n2_literal.csv").exists());
}

#[test]
#[ignore = "evolves the n = 18 data on a 256×16384 grid"]
fn ansatz_gap_decays_from_2_to_18() {
    let dir = tempfile::tempdir().unwrap();
    let m = run_config(dir.path(), r#"{"experiment": "compare", "ns": [2, 18]}"#).unwrap();
    assert!(m.metric_value("gap_ratio").unwrap() < 1.0);
    assert!(m.metric_value("delta_hat").unwrap() > 0.0);
}
