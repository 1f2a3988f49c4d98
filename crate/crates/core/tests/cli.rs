use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const REFERENCE: [&str; 6] = [
    "--lambda",
    "0.3333333333333333",
    "--delta2",
    "4",
    "--xi2",
    "9",
];

fn arident(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_arident"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn with_reference(cmd: &str, extra: &[&str]) -> Output {
    let mut args = vec![cmd];
    args.extend(REFERENCE);
    args.extend(extra);
    arident(&args)
}

#[test]
fn theory_csv_lists_covariances() {
    let o = with_reference("theory", &["--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "tau,psi\n0,13.5\n1,1.5\n2,0.5\n");
}

#[test]
fn theory_json_reports_optima() {
    let o = with_reference("theory", &["--order", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["theory"]["theta_star"][1], 0.025);
    assert_eq!(v["theory"]["ar1"]["coeffs"][0], 1.0 / 9.0);
    assert_eq!(v["passed"], true);
}

#[test]
fn simulate_writes_t_y() {
    let o = with_reference("simulate", &["--n", "5", "--seed", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let lines: Vec<_> = text.lines().collect();
    assert_eq!(lines[0], "t,y");
    assert_eq!(lines.len(), 6);
    assert!(lines[1].starts_with("1,"));
}

#[test]
fn batch_csv_has_one_row_per_batch() {
    let o = with_reference(
        "batch",
        &[
            "--n", "200", "--kappa", "7", "--order", "2", "--format", "csv",
        ],
    );
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("batch_index,phi1,phi2\n0,"));
    assert_eq!(text.lines().count(), 8);
}

#[test]
fn series_last_row_matches_batch_summary() {
    let series = with_reference("series", &["--n", "300", "--kappa", "5", "--seed", "9"]);
    let batch = with_reference("batch", &["--n", "300", "--kappa", "5", "--seed", "9"]);
    let text = stdout(&series);
    assert!(text.starts_with("batch,phi1,running_mean1,running_var1\n"));
    let last: Vec<f64> = text
        .lines()
        .last()
        .unwrap()
        .split(',')
        .map(|c| c.parse().unwrap())
        .collect();
    let v: serde_json::Value = serde_json::from_str(&stdout(&batch)).unwrap();
    let summary = &v["empirical"]["batch"];
    assert_eq!(last[0], 5.0);
    assert_eq!(last[2], summary["emp_mean"][0].as_f64().unwrap());
    assert_eq!(last[3], summary["emp_variance"].as_f64().unwrap());
}

#[test]
fn kappa_one_is_a_validation_error() {
    let o = with_reference("batch", &["--kappa", "1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("kappa"), "{}", stderr(&o));
}

#[test]
fn validation_errors_exit_one() {
    for args in [
        &["fit", "--lambda", "1.5", "--delta2", "1", "--xi2", "1"][..],
        &["theory", "--lambda", "0.5", "--delta2", "-1", "--xi2", "1"],
        &[
            "theory",
            "--lambda",
            "0.5",
            "--delta2",
            "1",
            "--xi2",
            "1",
            "--noise",
            "colored:1.2",
        ],
        &[
            "theory", "--lambda", "0.5", "--delta2", "1", "--xi2", "1", "--order", "3",
        ],
        &["fit", "--scenario", "no-such-scenario"],
        &["theory", "--delta2", "1", "--xi2", "1"],
        &["theory", "--bogus"],
        &[
            "theory", "--lambda", "0.5", "--delta2", "1", "--xi2", "1", "--format", "xml",
        ],
    ] {
        let o = arident(args);
        assert_eq!(o.status.code(), Some(1), "{args:?}: {}", stderr(&o));
    }
}

#[test]
fn degenerate_process_exits_two() {
    let o = arident(&["theory", "--lambda", "0.5", "--delta2", "0", "--xi2", "0"]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("traj.csv");
    let o = with_reference("simulate", &["--n", "4", "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).is_empty());
    assert!(fs::read_to_string(&path).unwrap().starts_with("t,y\n1,"));
}

fn reproduce_into(dir: &Path) -> Output {
    arident(&["reproduce", "--out", dir.to_str().unwrap()])
}

#[test]
fn bundled_suite_passes_and_is_deterministic() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let oa = reproduce_into(a.path());
    let ob = reproduce_into(b.path());
    assert_eq!(oa.status.code(), Some(0), "{}", stdout(&oa));
    assert_eq!(stdout(&oa), stdout(&ob));
    assert!(!stdout(&oa).contains("FAIL"));
    assert!(stdout(&oa).contains("not point-reproducible"));

    let mut names: Vec<_> = fs::read_dir(a.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    assert!(names.contains(&"summary.json".to_string()));
    assert!(names.contains(&"white-ar1-n.json".to_string()));
    assert!(names.contains(&"colored-ar2.csv".to_string()));
    for name in names {
        let x = fs::read(a.path().join(&name)).unwrap();
        let y = fs::read(b.path().join(&name)).unwrap();
        assert_eq!(x, y, "{name} differs between runs");
    }
}

#[test]
fn band_failure_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("tight.cfg");
    fs::write(
        &cfg,
        "[scenario.tight]\nlambda = 0.3333333333333333\nq.variance = 4\nv.variance = 9\n\
         n = 200\nkappa = 4\nseed = 1\ntolerance = 1e-12\n",
    )
    .unwrap();
    let o = arident(&["reproduce", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3), "{}", stdout(&o));
    assert!(stdout(&o).starts_with("FAIL tight"));
}

#[test]
fn bad_config_field_is_named() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    fs::write(
        &cfg,
        "[scenario.x]\nlambda = 0.5\nq.variance = 1\nv.variance = 1\nkappa = 1\n",
    )
    .unwrap();
    let o = arident(&["reproduce", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("scenario.x.kappa"), "{}", stderr(&o));
}
