use std::fs;
use std::process::Command;

use evocert::cli::{csv_files, RecordFile};

fn evocert(args: &[&str], out: &std::path::Path) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_evocert")).args(args).arg("--out").arg(out).output().unwrap()
}

/// Re-parses the JSON record in `dir` and checks every CSV on disk is reproduced.
fn assert_regenerates(dir: &std::path::Path, name: &str) {
    let file = RecordFile::from_json(&fs::read_to_string(dir.join(format!("{name}.json"))).unwrap()).unwrap();
    for (rel, body) in csv_files(&file.record).unwrap() {
        assert_eq!(fs::read_to_string(dir.join(&rel)).unwrap(), body, "{rel}");
    }
}

#[test]
fn default_table() {
    let dir = tempfile::tempdir().unwrap();
    let out = evocert(&["table"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(dir.path().join("table.csv")).unwrap();
    let rows: Vec<Vec<f64>> = csv.lines().skip(1).map(|l| l.split(',').map(|v| v.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 5);
    assert_eq!(rows.iter().map(|r| r[0]).collect::<Vec<_>>(), vec![1.6, 2.0, 4.0, 10.0, 20.0]);
    assert!((rows[2][2] - 0.3138).abs() < 1e-3);
    assert_regenerates(dir.path(), "table");
}

#[test]
fn scenario_figures_and_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let out = evocert(&["scenario", "--A", "1", "--A", "4"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    for a in ["A1", "A4"] {
        for f in ["fig_alpha", "fig_gamma", "fig_norm_R", "fig_ratio", "fig_profile"] {
            assert!(dir.path().join(a).join(format!("{f}.csv")).exists(), "{a}/{f}");
        }
    }
    // A = 1 decays: the last R value is tiny
    let norm = fs::read_to_string(dir.path().join("A1/fig_norm_R.csv")).unwrap();
    let last: f64 = norm.lines().last().unwrap().split(',').nth(2).unwrap().parse().unwrap();
    assert!(last < 1e-6);
    assert_regenerates(dir.path(), "scenario");
}

#[test]
fn small_commands_succeed() {
    for (args, name) in [
        (vec!["wave", "--sup-pos", "0", "--p", "2"], "wave"),
        (vec!["kaplan", "--A", "1", "--A", "3"], "kaplan"),
        (vec!["limit"], "limit"),
        (vec!["sobolev", "--trials", "500", "--seed", "9"], "sobolev"),
    ] {
        let dir = tempfile::tempdir().unwrap();
        let out = evocert(&args, dir.path());
        assert_eq!(out.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
        assert_regenerates(dir.path(), name);
    }
}

#[test]
fn inf_marker_in_table() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(evocert(&["table", "--A", "0.5"], dir.path()).status.code(), Some(0));
    let csv = fs::read_to_string(dir.path().join("table.csv")).unwrap();
    assert_eq!(csv.lines().nth(1).unwrap(), "5.0000000000000000e-1,inf,inf,,");
}

#[test]
fn usage_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    for args in
        [vec!["table", "--p", "1"], vec!["nonsense"], vec!["fd", "--points", "8"], vec!["table", "--modes", "2,3"]]
    {
        assert_eq!(evocert(&args, dir.path()).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn numeric_failures_exit_with_three() {
    // no amplitude in the bracket escapes before such a short horizon
    let dir = tempfile::tempdir().unwrap();
    let out = evocert(&["critical", "--horizon", "0.01"], dir.path());
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
}
