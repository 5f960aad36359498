use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_rmhd-contact"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn text(o: &Output) -> (String, String) {
    (String::from_utf8_lossy(&o.stdout).into_owned(), String::from_utf8_lossy(&o.stderr).into_owned())
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_owned()
}

fn scenarios() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios")
}

const LEFT: &str = r#"{"pressure": 1.0, "velocity": [0.2, 0.1, 0.0], "magnetic": [0.8, 0.3, 0.0], "entropy": 0.0}"#;
const RIGHT: &str = r#"{"pressure": 1.0, "velocity": [0.2, 0.1, 0.0], "magnetic": [0.8, 0.3, 0.0], "entropy": 0.6}"#;

#[test]
fn classify_contact() {
    let d = tempfile::tempdir().unwrap();
    let l = write(d.path(), "l.json", LEFT);
    let r = write(d.path(), "r.json", RIGHT);
    let f = write(d.path(), "f.json", r#"{"dtphi": 0.2, "d2phi": 0.0}"#);
    let o = run(&["classify", "--left", &l, "--right", &r, "--front", &f]);
    let (out, _) = text(&o);
    assert_eq!(o.status.code(), Some(0));
    assert!(out.starts_with("Contact"), "{out}");
}

#[test]
fn negative_pressure_fails_with_condition_tag() {
    let d = tempfile::tempdir().unwrap();
    let s = write(d.path(), "s.json", r#"{"pressure": -1, "velocity": [0,0,0], "magnetic": [1,0,0], "entropy": 0}"#);
    let o = run(&["check-state", &s]);
    let (_, err) = text(&o);
    assert_eq!(o.status.code(), Some(1));
    assert!(err.contains("(9')"), "{err}");
}

#[test]
fn admissible_state_passes_and_writes_json() {
    let d = tempfile::tempdir().unwrap();
    let s = write(d.path(), "s.json", LEFT);
    let out = d.path().join("out");
    let o = run(&["check-state", &s, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("check-state.json")).unwrap()).unwrap();
    assert_eq!(report["admissible"], true);
}

#[test]
fn speeds_table() {
    let d = tempfile::tempdir().unwrap();
    let s = write(d.path(), "s.json", LEFT);
    let o = run(&["speeds", &s, "--normal", "0.6,-0.8"]);
    let (out, _) = text(&o);
    assert_eq!(o.status.code(), Some(0));
    assert!(out.contains("fast+"));
    assert_eq!(run(&["speeds", &s, "--normal", "1"]).status.code(), Some(2));
}

#[test]
fn audit_reports_the_rayleigh_taylor_condition() {
    assert_eq!(run(&["audit", "--grid", "16x16"]).status.code(), Some(0));
    let o = run(&["audit", "--builtin", "constant", "--grid", "16x16"]);
    let (_, err) = text(&o);
    assert_eq!(o.status.code(), Some(1));
    assert!(err.contains("(RTL)"), "{err}");
}

#[test]
fn configuration_errors_exit_with_two() {
    let d = tempfile::tempdir().unwrap();
    let bad = write(d.path(), "bad.json", "{ not json");
    assert_eq!(run(&["check-state", &bad]).status.code(), Some(2));
    assert_eq!(run(&["check-state", "/nonexistent/state.json"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "--bogus"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "--only", "12"]).status.code(), Some(2));
    let unknown = write(
        d.path(),
        "cfg.json",
        r#"{"schema_version": 1, "grid": {"n1": 8, "n2": 8}, "extra": true,
            "scenario": {"solver": "periodic", "initial": {"type": "planar"}}}"#,
    );
    assert_eq!(run(&["simulate-periodic", &unknown]).status.code(), Some(2));
    let wrong = scenarios().join("manufactured.json");
    assert_eq!(run(&["simulate-periodic", wrong.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn simulate_linear_writes_outputs_deterministically() {
    let d = tempfile::tempdir().unwrap();
    let cfg = scenarios().join("rayleigh_taylor.json");
    let go = |dir: &Path| {
        let o = run(&["simulate-linear", cfg.to_str().unwrap(), "--grid", "16x16", "--out", dir.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0), "{:?}", text(&o));
        std::fs::read(dir.join("series.csv")).unwrap()
    };
    let a = go(&d.path().join("a"));
    let b = go(&d.path().join("b"));
    assert_eq!(a, b);
    for f in ["summary.json", "snapshot.bin"] {
        assert!(d.path().join("a").join(f).exists());
    }
}

#[test]
fn simulate_periodic_runs() {
    let d = tempfile::tempdir().unwrap();
    let cfg = scenarios().join("periodic_planar.json");
    let o = run(&["simulate-periodic", cfg.to_str().unwrap(), "--grid", "16x16", "--out", d.path().to_str().unwrap()]);
    let (out, _) = text(&o);
    assert_eq!(o.status.code(), Some(0));
    assert!(out.contains("sup |W|"));
}

#[test]
fn verify_subset_passes() {
    let d = tempfile::tempdir().unwrap();
    let o = run(&["verify", "--only", "1,2,4,11", "--seed", "7", "--out", d.path().to_str().unwrap()]);
    let (out, _) = text(&o);
    assert_eq!(o.status.code(), Some(0), "{out}");
    assert_eq!(out.matches("[PASS]").count(), 4);
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(d.path().join("verify.json")).unwrap()).unwrap();
    assert_eq!(v["seed"], 7);
}

#[test]
fn convergence_reports_orders() {
    let o = run(&["convergence", "--levels", "16,32", "--final-time", "0.25", "--tol", "1.5"]);
    let (out, _) = text(&o);
    assert_eq!(o.status.code(), Some(0), "{out}");
    assert!(out.contains("order"));
    let o = run(&["convergence", "--levels", "16,32", "--final-time", "0.25", "--tol", "10"]);
    assert_eq!(o.status.code(), Some(1));
}
