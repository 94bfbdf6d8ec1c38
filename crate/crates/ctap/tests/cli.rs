use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn calibrated() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/calibrated.json")
}

fn ctap(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ctap"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn with_config<'a>(cmd: &'a str, config: &'a Path, extra: &[&'a str]) -> Vec<&'a str> {
    let mut v = vec![cmd, "--config", config.to_str().unwrap()];
    v.extend_from_slice(extra);
    v
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

/// Short run of the calibrated set: same comb, 5% of the duration.
const SHORT: [&str; 4] = [
    "--override",
    "schedule.total_s=0.01",
    "--override",
    "schedule.tau_s=0.0011",
];

fn data_rows(path: &Path) -> Vec<Vec<f64>> {
    let mut r = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_path(path)
        .unwrap();
    r.records()
        .map(|rec| rec.unwrap().iter().map(|f| f.parse().unwrap()).collect())
        .collect()
}

#[test]
fn malformed_config_exits_two_without_output() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{ \"field\": ").unwrap();
    let out = dir.path().join("out");
    let o = ctap(&with_config("potential", &bad, &[]), &out);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    assert!(!out.join("potential.csv").exists());
}

#[test]
fn invalid_field_reports_its_path() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = calibrated();
    let o = ctap(
        &with_config("potential", &cfg, &["--override", "schedule.tau_s=-1"]),
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("schedule.tau_s"), "{}", stderr(&o));
    assert!(!dir.path().join("potential.csv").exists());

    let o = ctap(
        &with_config("potential", &cfg, &["--override", "grid.spacing=3"]),
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("grid"), "{}", stderr(&o));
}

#[test]
fn potential_has_three_minima_and_lower_barriers_at_half_time() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = calibrated();
    let o = ctap(&with_config("potential", &cfg, &[]), dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let summary = stderr(&o);
    assert!(summary.contains("minima=3"), "{summary}");
    let barriers = |s: &str| -> Vec<f64> {
        let inner = s.split("barrier_heights_J=[").nth(1).unwrap().split(']').next().unwrap();
        inner.split(", ").map(|v| v.parse().unwrap()).collect()
    };
    let start = barriers(&summary);
    let text = std::fs::read_to_string(dir.path().join("potential.csv")).unwrap();
    assert!(text.starts_with("# ctap potential\n# config_sha256="));
    assert!(text.contains("\nx_m,V_J\n"));
    assert_eq!(data_rows(&dir.path().join("potential.csv")).len(), 256);

    let half = dir.path().join("half");
    let o = ctap(
        &with_config("potential", &cfg, &["--override", "output.potential_time_s=0.0991620"]),
        &half,
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let mid = barriers(&stderr(&o));
    assert_eq!(mid.len(), 2);
    assert!(mid.iter().zip(&start).all(|(m, s)| m < s), "{mid:?} vs {start:?}");
}

#[test]
fn ground_state_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = calibrated();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    let oa = ctap(&with_config("ground-state", &cfg, &[]), &a);
    let ob = ctap(&with_config("ground-state", &cfg, &[]), &b);
    assert!(oa.status.success() && ob.status.success(), "{}", stderr(&oa));
    let fa = std::fs::read(a.join("ground_state.csv")).unwrap();
    assert_eq!(fa, std::fs::read(b.join("ground_state.csv")).unwrap());
    let rows = data_rows(&a.join("ground_state.csv"));
    let dx = rows[1][0] - rows[0][0];
    let norm: f64 = rows.iter().map(|r| r[3]).sum::<f64>() * dx;
    assert!((norm - 1.0).abs() < 1e-9, "{norm}");
    let zero_point: f64 = stdout(&oa)
        .split("mu_above_minimum_over_hbar_omega=")
        .nth(1)
        .and_then(|s| s.split_whitespace().next())
        .unwrap()
        .parse()
        .unwrap();
    // the dressed well is softer than its harmonic approximation
    assert!(zero_point > 0.2 && zero_point < 0.5, "{zero_point}");
}

#[test]
fn short_ctap_run_writes_every_file_and_repeats_bytewise() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = calibrated();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    let oa = ctap(&with_config("ctap", &cfg, &SHORT), &a);
    ctap(&with_config("ctap", &cfg, &SHORT), &b);
    assert_eq!(oa.status.code(), Some(0), "{}", stderr(&oa));
    assert!(stdout(&oa).starts_with("final P_R="), "{}", stdout(&oa));
    for name in ["populations.csv", "schedule.csv", "snapshot_00.csv", "snapshot_01.csv", "snapshot_02.csv"] {
        let fa = std::fs::read(a.join(name)).unwrap();
        assert_eq!(fa, std::fs::read(b.join(name)).unwrap(), "{name}");
        let text = String::from_utf8(fa).unwrap();
        assert!(text.contains("# config_sha256="), "{name}");
        assert!(text.contains("# method="), "{name}");
    }
    let rows = data_rows(&a.join("populations.csv"));
    assert_eq!(rows.len(), 500);
    for r in &rows {
        assert!(r[1] + r[2] + r[3] <= r[4] + 1e-9);
    }
    let sched = data_rows(&a.join("schedule.csv"));
    assert_eq!(sched[0].len(), 7);
    assert!(sched.iter().all(|r| r[1..].windows(2).all(|w| w[0] < w[1])));
}

#[test]
fn solver_failure_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = calibrated();
    let mut args = SHORT.to_vec();
    args.extend_from_slice(&["--override", "solver.dt_s=1e-5"]);
    let o = ctap(&with_config("ctap", &cfg, &args), dir.path());
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
    assert!(stderr(&o).contains("stability"), "{}", stderr(&o));
}

#[test]
fn sweep_keeps_row_order_and_reports_failures() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = calibrated();
    let mut args = SHORT.to_vec();
    args.extend_from_slice(&[
        "--override",
        "sweep={\"variable\":\"T\",\"values\":[0.008,0.01]}",
    ]);
    let o = ctap(&with_config("sweep", &cfg, &args), dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let rows = data_rows(&dir.path().join("sweep.csv"));
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0][0], 0.008);
    assert_eq!(rows[1][0], 0.01);
    for r in &rows {
        assert!((r[4] - (1.0 - r[3])).abs() < 1e-15);
    }

    let o = ctap(
        &with_config("sweep", &cfg, &["--override", "sweep={\"variable\":\"kappa\",\"values\":[1.0]}"]),
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
    let o = ctap(&with_config("sweep", &cfg, &[]), dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn three_level_command_transfers_and_repeats() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = calibrated();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    let oa = ctap(&with_config("three-level", &cfg, &[]), &a);
    let ob = ctap(&with_config("three-level", &cfg, &[]), &b);
    assert!(oa.status.success() && ob.status.success(), "{}", stderr(&oa));
    for name in ["three_level.csv", "couplings.csv"] {
        assert_eq!(std::fs::read(a.join(name)).unwrap(), std::fs::read(b.join(name)).unwrap());
    }
    let rows = data_rows(&a.join("three_level.csv"));
    let last = rows.last().unwrap();
    assert!(last[3] > 0.999, "{last:?}");
    assert!(rows.iter().all(|r| r[2] < 1e-3));
    let text = std::fs::read_to_string(a.join("couplings.csv")).unwrap();
    assert!(text.contains("\nt,J_LM,J_MR\n"));
}
