use std::path::Path;
use std::process::{Command, Output};

fn triline(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_triline")).args(args).env_remove("TRILINE_OUT").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

/// Data rows of a time series; column 0 is the step.
fn rows(path: &Path) -> Vec<Vec<f64>> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#') && !l.starts_with("step"))
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect()
}

fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol * x.abs().max(y.abs()).max(1e-30))
}

#[test]
fn run_writes_timeseries_snapshots_and_checkpoints() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("bubble");
    let o = triline(&["run", "bubble", "--out", out.to_str().unwrap(), "--max-steps", "200", "--checkpoint-every", "100"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("MaxSteps after 200 steps"));
    let table = rows(&out.join("timeseries.csv"));
    assert_eq!(table.iter().map(|r| r[0] as u64).collect::<Vec<_>>(), [0, 100, 200]);
    for name in ["snapshot_00000000.csv", "snapshot_00000200.csv", "checkpoint_00000100.json", "checkpoint_00000200.json"] {
        assert!(out.join(name).exists(), "{name}");
    }
}

#[test]
fn resuming_reproduces_the_uninterrupted_run() {
    let dir = tempfile::tempdir().unwrap();
    let full = dir.path().join("full");
    let half = dir.path().join("half");
    let rest = dir.path().join("rest");
    let scenario = "lens_equal_tensions";
    assert!(triline(&["run", scenario, "--out", full.to_str().unwrap(), "--max-steps", "400"]).status.success());
    let o = triline(&["run", scenario, "--out", half.to_str().unwrap(), "--max-steps", "200", "--checkpoint-every", "200"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let cp = half.join("checkpoint_00000200.json");
    let o = triline(&["run", scenario, "--out", rest.to_str().unwrap(), "--max-steps", "400", "--resume", cp.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let whole = rows(&full.join("timeseries.csv"));
    let resumed = rows(&rest.join("timeseries.csv"));
    assert_eq!(resumed.first().unwrap()[0], 200.0);
    for r in &resumed {
        let w = whole.iter().find(|w| w[0] == r[0]).expect("same cadence");
        assert!(close(w, r, 1e-12), "step {}: {w:?} vs {r:?}", r[0]);
    }
}

#[test]
fn identical_runs_write_identical_output() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    for d in [&a, &b] {
        assert!(triline(&["run", "young_flat", "--out", d.to_str().unwrap(), "--max-steps", "300"]).status.success());
    }
    let read = |d: &Path| std::fs::read(d.join("timeseries.csv")).unwrap();
    assert_eq!(read(&a), read(&b));
}

#[test]
fn output_directory_falls_back_to_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_triline"))
        .args(["run", "bubble", "--max-steps", "10"])
        .env("TRILINE_OUT", dir.path())
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(dir.path().join("timeseries.csv").exists());
}

#[test]
fn invalid_input_exits_with_two() {
    assert_eq!(triline(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(triline(&["run", "no_such_scenario"]).status.code(), Some(2));
    assert_eq!(triline(&["verify-transport", "--case", "no_such_case"]).status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "name = \"x\"\nmode = \"planar\"\n").unwrap();
    let o = triline(&["run", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("domain"), "{}", stderr(&o));
    let o = triline(&["report", dir.path().join("missing.csv").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn verify_transport_prints_a_convergence_table() {
    let o = triline(&["verify-transport", "--case", "surf_deforming_ellipsoid", "--refinements", "2"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("case,level,h,residual,order"));
    // three forms of the theorem, three levels each
    let body: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(body.len(), 9);
    for row in body.iter().filter(|r| r[1] != "0") {
        let order: f64 = row[4].parse().unwrap();
        assert!(order > 1.9, "{row:?}");
    }
}

#[test]
fn check_eos_passes_on_every_preset() {
    for name in ["lens_equal_tensions", "young_flat", "bubble_axisymmetric"] {
        let o = triline(&["check-eos", name]);
        assert!(o.status.success(), "{name}: {}", stderr(&o));
        assert!(stdout(&o).lines().skip(1).all(|l| l.ends_with(",true")));
    }
}

#[test]
fn report_summarises_and_draws() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r");
    assert!(triline(&["run", "bubble", "--out", out.to_str().unwrap(), "--max-steps", "300"]).status.success());
    let csv = out.join("timeseries.csv");
    let o = triline(&["report", csv.to_str().unwrap(), "--svg"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("(nonincreasing)"));
    let svg = std::fs::read_to_string(out.join("timeseries_energy.svg")).unwrap();
    assert!(svg.starts_with("<svg") || svg.starts_with("<?xml"));
}

#[test]
fn equilibrium_reports_residuals() {
    let o = triline(&["equilibrium", "bubble", "--max-steps", "500"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.contains("curve ") && text.contains("relative residual"), "{text}");
    assert!(stderr(&o).contains("warning"));
}
