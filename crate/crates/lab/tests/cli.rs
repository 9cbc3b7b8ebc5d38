use std::path::Path;
use std::process::Command;

fn kp5lab(out: &Path, args: &[&str]) -> (i32, String, String) {
    let output = Command::new(env!("CARGO_BIN_EXE_kp5lab"))
        .arg("--out")
        .arg(out)
        .args(args)
        .output()
        .expect("binary runs");
    (
        output.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&output.stdout).into_owned(),
        String::from_utf8_lossy(&output.stderr).into_owned(),
    )
}

#[test]
fn pell_lists_the_first_indices() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _, _) = kp5lab(dir.path(), &["pell", "--count", "3", "--check", "1000"]);
    assert_eq!(code, 0);
    let csv = std::fs::read_to_string(dir.path().join("pell.csv")).unwrap();
    let ns: Vec<&str> = csv.lines().skip(1).map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(ns, ["2", "18", "653"]);
    assert!(dir.path().join("pell_manifest.json").exists());
}

#[test]
fn parameter_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _, err) = kp5lab(dir.path(), &["evolve", "--n", "5"]);
    assert_eq!(code, 2);
    assert!(err.contains("not admissible"), "{err}");
    let (code, _, _) = kp5lab(dir.path(), &["residual", "--n", "2", "--remainder", "bogus"]);
    assert_eq!(code, 2);
    let (code, _, _) = kp5lab(dir.path(), &["thm1", "--n", "2", "--theta", "3"]);
    assert_eq!(code, 2);
    let (code, _, _) = kp5lab(dir.path(), &["--threads", "0", "pell"]);
    assert_eq!(code, 2);
    let (code, _, _) = kp5lab(dir.path(), &["no-such-command"]);
    assert_eq!(code, 2);
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 0);
}

#[test]
fn numerical_failures_exit_with_three() {
    let dir = tempfile::tempdir().unwrap();
    // A coarse step drifts far beyond the conservation tolerance.
    let args = ["evolve", "--n", "2", "--dt", "0.1", "--sample", "0.1", "--conserve-check"];
    let (code, _, err) = kp5lab(dir.path(), &args);
    assert_eq!(code, 3, "{err}");
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 0);
}

#[test]
fn missing_config_is_an_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _, _) = kp5lab(dir.path(), &["run", "/nonexistent/config.json"]);
    assert_eq!(code, 1);
}

#[test]
fn run_subcommand_writes_a_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("lowfreq.json");
    std::fs::write(&config, r#"{"experiment": "lowfreq", "n": 2, "t_end": 0.5}"#).unwrap();
    let out = dir.path().join("out");
    let (code, stdout, err) = kp5lab(&out, &["run", config.to_str().unwrap()]);
    assert_eq!(code, 0, "{err}");
    assert!(stdout.contains("max_gap"));
    assert!(out.join("lowfreq_n2.csv").exists());
    assert!(out.join("lowfreq_manifest.json").exists());
}

#[test]
fn evolutions_refuse_653() {
    let dir = tempfile::tempdir().unwrap();
    for cmd in ["evolve", "thm1", "lowfreq", "ansatz-dump"] {
        let (code, _, err) = kp5lab(dir.path(), &[cmd, "--n", "653"]);
        assert_eq!(code, 2, "{cmd}: {err}");
    }
    let (code, _, _) = kp5lab(dir.path(), &["evolve", "--n", "2", "--grid", "32768,32768"]);
    assert_eq!(code, 2);
}
