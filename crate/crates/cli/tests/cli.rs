use std::fs;
use std::process::{Command, Output};

fn acp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_acp"))
        .args(args)
        .output()
        .unwrap()
}

#[test]
fn unknown_flag_and_subcommand_exit_2() {
    assert_eq!(acp(&["bounds", "--nope"]).status.code(), Some(2));
    assert_eq!(acp(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(acp(&["slope", "--format", "json"]).status.code(), Some(2));
}

#[test]
fn invalid_parameter_values_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    assert_eq!(
        acp(&["bounds", "--trials", "10", "--out", out])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        acp(&["bounds", "--delta", "1.5", "--family", "uniform", "--trials", "100", "--out", out])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        acp(&["approx", "--eps", "0.2,0.1", "--out", out])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        acp(&["coloring", "--instances", "3", "--out", out])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn unwritable_output_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    fs::write(&blocker, b"x").unwrap();
    let out = blocker.join("sub");
    let status = acp(&["approx", "--items", "5", "--out", out.to_str().unwrap()]).status;
    assert_eq!(status.code(), Some(1));
}

#[test]
fn help_lists_defaults() {
    let text = String::from_utf8(acp(&["bounds", "--help"]).stdout).unwrap();
    for needle in [
        "[default: 10000]",
        "[default: exponential]",
        "[default: 10]",
        "[default: 0.05]",
        "[default: 42]",
    ] {
        assert!(text.contains(needle), "missing {needle}");
    }
    let text = String::from_utf8(acp(&["slope", "--help"]).stdout).unwrap();
    assert!(text.contains("[default: 0.1,0.3,1.0,3.0]"));
    assert!(text.contains("[default: 200]"));
    assert_eq!(acp(&["coloring", "--help"]).status.code(), Some(0));
}

#[test]
fn exponential_bounds_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = acp(&[
        "bounds",
        "--family",
        "exponential",
        "--i-total",
        "10",
        "--trials",
        "10000",
        "--seed",
        "7",
        "--out",
        out,
    ]);
    assert!(o.status.success());
    let csv = fs::read_to_string(dir.path().join("bounds.csv")).unwrap();
    let mut lines = csv.lines();
    assert!(lines
        .next()
        .unwrap()
        .starts_with("lower,upper,empirical_mean_cost,standard_error"));
    let fields: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(&fields[..2], ["10.000000", "12.000000"]);
    let mean: f64 = fields[2].parse().unwrap();
    let se: f64 = fields[3].parse().unwrap();
    assert!((mean - 11.0).abs() <= 3.0 * se);
    assert!(!csv.contains('\r'));
}

#[test]
fn coloring_prediction_column() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    assert!(acp(&[
        "coloring",
        "--configs",
        "default",
        "--seed",
        "42",
        "--out",
        out
    ])
    .status
    .success());
    let csv = fs::read_to_string(dir.path().join("coloring_summary.csv")).unwrap();
    let predictions: Vec<&str> = csv
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(5).unwrap())
        .collect();
    assert_eq!(
        predictions,
        [
            "8.000000",
            "10.000000",
            "12.000000",
            "15.000000",
            "15.000000"
        ]
    );
}

#[test]
fn config_file_supplies_defaults_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "# approx run\nitems = 6\neps = 0,0.5\nseed = 3\n").unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    let c = dir.path().join("c");
    let cfg = cfg.to_str().unwrap();
    assert!(
        acp(&["approx", "--config", cfg, "--out", a.to_str().unwrap()])
            .status
            .success()
    );
    assert!(acp(&[
        "approx",
        "--items",
        "6",
        "--eps",
        "0,0.5",
        "--seed",
        "3",
        "--out",
        b.to_str().unwrap()
    ])
    .status
    .success());
    assert!(acp(&[
        "approx",
        "--config",
        cfg,
        "--items",
        "7",
        "--out",
        c.to_str().unwrap()
    ])
    .status
    .success());
    let read = |d: &std::path::Path| fs::read(d.join("approx.csv")).unwrap();
    assert_eq!(read(&a), read(&b));
    assert_eq!(String::from_utf8(read(&a)).unwrap().lines().count(), 3);
    // 2^7 candidates instead of 2^6 halves every p_goal.
    let p_goal = |d: &std::path::Path| -> Vec<String> {
        String::from_utf8(read(d))
            .unwrap()
            .lines()
            .skip(1)
            .map(|l| l.split(',').nth(3).unwrap().to_string())
            .collect()
    };
    assert_ne!(p_goal(&a), p_goal(&c));
    assert_eq!(
        acp(&["approx", "--config", "/nonexistent/cfg"])
            .status
            .code(),
        Some(2)
    );
}
