use std::path::Path;
use std::process::{Command, Output};

use ultracold::runner::load_container;

fn ultracold(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ultracold"))
        .args(args)
        .current_dir(dir)
        .env_remove("QOC_THREADS")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn lists_every_scenario() {
    let dir = tempfile::tempdir().unwrap();
    let o = ultracold(&["list-scenarios"], dir.path());
    assert!(o.status.success());
    let text = stdout(&o);
    for id in ["gpe-shakeup", "bosehubbard-mott", "twoparticle-gate", "oneparticle-tweezer", "twolevel-landau-zener"] {
        assert!(text.contains(id), "{id}");
    }
}

#[test]
fn run_prints_progress_and_writes_results() {
    let dir = tempfile::tempdir().unwrap();
    let o = ultracold(&["run", "--scenario", "twolevel-landau-zener", "--out", "res"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.contains("ITER 0 | fidelity : "));
    assert!(text.contains("STOPPING: "));
    let printed: f64 = text
        .lines()
        .find_map(|l| l.strip_prefix("final fidelity: "))
        .unwrap()
        .parse()
        .unwrap();
    let dc = load_container(&dir.path().join("res/twolevel-landau-zener.json")).unwrap();
    assert_eq!(dc.scalar("final_fidelity"), Some(printed));
    assert!(dir.path().join("res/twolevel-landau-zener.config.json").exists());
}

#[test]
fn reruns_from_the_dumped_config_are_identical() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["run", "--scenario", "twolevel-landau-zener", "-q", "--seed", "3"];
    let o = ultracold(&[&args[..], &["--set", "optimizer.algorithm=dgroup-bfgs", "--out", "a"]].concat(), dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let o = ultracold(&["run", "a/twolevel-landau-zener.config.json", "-q", "--out", "b"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(!stdout(&o).contains("ITER"));
    let a = std::fs::read(dir.path().join("a/twolevel-landau-zener.json")).unwrap();
    let b = std::fs::read(dir.path().join("b/twolevel-landau-zener.json")).unwrap();
    assert_eq!(a, b);
}

#[test]
fn configuration_errors_exit_with_2() {
    let dir = tempfile::tempdir().unwrap();
    let o = ultracold(&["run", "--scenario", "nope"], dir.path());
    assert_eq!(o.status.code(), Some(2));

    std::fs::write(
        dir.path().join("bad.json"),
        r#"{"scenario": "gpe-shakeup", "overrides": {"optimizer": {"bogus": 1}}}"#,
    )
    .unwrap();
    let o = ultracold(&["validate", "bad.json"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("overrides.optimizer.bogus"));

    let o = Command::new(env!("CARGO_BIN_EXE_ultracold"))
        .args(["list-scenarios"])
        .env("QOC_THREADS", "lots")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn missing_files_exit_with_4() {
    let dir = tempfile::tempdir().unwrap();
    let o = ultracold(&["run", "absent.json"], dir.path());
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn failed_optimization_exits_with_3() {
    let dir = tempfile::tempdir().unwrap();
    let o = ultracold(
        &[
            "run",
            "--scenario",
            "twolevel-landau-zener",
            "-q",
            "--set",
            "optimizer.max_step_size=1e-300",
            "--set",
            "optimizer.max_initial_guess=1e-300",
        ],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(3), "{}{}", stdout(&o), stderr(&o));
    assert!(stdout(&o).contains("status: line search failed"));
}

#[test]
fn validate_accepts_a_good_config() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("ok.json"),
        r#"{"scenario": "bosehubbard-mott", "seed": 1, "overrides": {"krylov_order": 5}}"#,
    )
    .unwrap();
    let o = ultracold(&["validate", "ok.json"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("ok (bosehubbard-mott)"));
}
