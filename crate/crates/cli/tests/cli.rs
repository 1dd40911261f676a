use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn udn_ho(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_udn-ho"))
        .arg("--out")
        .arg(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn dumped_config_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let out = udn_ho(dir.path(), &["dump-config"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let path = dir.path().join("scenario.toml");
    fs::write(&path, &out.stdout).unwrap();
    let sweep = udn_ho(
        dir.path(),
        &["--config", path.to_str().unwrap(), "sweep", "--variable", "user-height", "--min", "0", "--max", "10", "--points", "2", "--no-mc"],
    );
    assert!(sweep.status.success(), "{}", stderr(&sweep));
}

#[test]
fn analytic_sweep_writes_expected_columns() {
    let dir = tempfile::tempdir().unwrap();
    let out = udn_ho(dir.path(), &["sweep", "--preset", "height", "--points", "4", "--no-mc", "--name", "h.csv"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = fs::read_to_string(dir.path().join("h.csv")).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap();
    assert!(header.starts_with("point,user_height_m,bias_sm_db,A_m,A_s,HOL_mm,HOL_ms,HOL_sm,HOL_ss,HOL_total"), "{header}");
    assert!(!header.contains("_mc"));
    assert!(header.ends_with(",error"));
    assert_eq!(lines.count(), 4);
}

#[test]
fn bad_configuration_exits_with_code_two() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    fs::write(&path, "eta = 1.5\n").unwrap();
    let out = udn_ho(dir.path(), &["--config", path.to_str().unwrap(), "sweep", "--preset", "height", "--no-mc"]);
    assert_eq!(out.status.code(), Some(2), "{}", stderr(&out));

    let out = udn_ho(dir.path(), &["sweep", "--variable", "user-height", "--min", "10", "--max", "10", "--points", "3", "--no-mc"]);
    assert_eq!(out.status.code(), Some(2), "{}", stderr(&out));
    assert!(!dir.path().join("sweep.csv").exists());
}

#[test]
fn mutated_bias_ratio_fails_validation() {
    let dir = tempfile::tempdir().unwrap();
    let out = udn_ho(dir.path(), &["--realizations", "200", "--traj-km", "5", "validate", "--mutate-beta", "2"]);
    assert_eq!(out.status.code(), Some(1), "{}", stderr(&out));
    let report = fs::read_to_string(dir.path().join("validation.csv")).unwrap();
    assert!(report.lines().any(|l| l.ends_with(",false")), "{report}");
}

#[test]
fn plot_script_rejects_empty_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("empty.csv");
    fs::write(&csv, "point,user_height_m,HOL_mm,HOL_ms,HOL_sm,HOL_ss,HOL_total\n").unwrap();
    let out = udn_ho(dir.path(), &["plot-script", csv.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("no data rows"), "{}", stderr(&out));
    assert!(!dir.path().join("empty.py").exists());
}

#[test]
fn monte_carlo_sweep_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["--seed", "9", "--realizations", "10", "--traj-km", "2", "sweep", "--preset", "height", "--points", "3", "--mc"];
    let mut runs = Vec::new();
    for name in ["a.csv", "b.csv"] {
        let mut a = args.to_vec();
        a.extend(["--name", name]);
        let out = udn_ho(dir.path(), &a);
        assert!(out.status.success(), "{}", stderr(&out));
        runs.push(fs::read(dir.path().join(name)).unwrap());
    }
    assert_eq!(runs[0], runs[1]);
    assert!(String::from_utf8_lossy(&runs[0]).lines().next().unwrap().contains("HOL_total_mc"));
}

#[test]
fn simulate_dumps_events() {
    let dir = tempfile::tempdir().unwrap();
    let out = udn_ho(dir.path(), &["--realizations", "3", "--traj-km", "2", "simulate", "--events"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let events = fs::read_to_string(dir.path().join("events.csv")).unwrap();
    assert!(events.starts_with("realization,s_position_m,from_tier,from_id,to_tier,to_id"));
    assert!(events.lines().count() > 1);
}
