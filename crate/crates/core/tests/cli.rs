use std::process::{Command, Output};

fn monty(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_monty-lab")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn analyze_quarter_grid_switch_column() {
    let out = monty(&["analyze", "--p", "0..1", "step", "1/4", "--q", "1/2"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let switch: Vec<&str> = text.lines().skip(1).map(|l| l.split_whitespace().nth(6).unwrap()).collect();
    assert_eq!(switch, ["2/3", "1/2", "1/3", "1/6", "0"]);

    let flag = monty(&["analyze", "--p", "0..1", "--step", "1/4", "--q", "1/2"]);
    assert_eq!(stdout(&flag), text);
}

#[test]
fn analyze_jsonl_and_posteriors() {
    let out = monty(&["analyze", "--p", "1/2", "--q", "0", "--format", "json"]);
    let row: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    assert_eq!(row["win_switch"], "1/3");
    assert_eq!(row["posterior_evil"], "1/4");
    assert_eq!(row["posterior_car"], "1/2");

    let out = monty(&["analyze", "--posteriors", "--p", "1/2", "--format", "json"]);
    let row: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    assert_eq!(row["posterior_evil"], "1/4");
    assert_eq!(row["best_response"], "indifferent");

    let out = monty(&["analyze", "--p", "1/2", "--offset", "-1/4", "--q", "0", "--format", "json"]);
    let row: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    assert_eq!(row["p"], "1/4");
}

#[test]
fn optimize_reports_one_half() {
    for args in [&["optimize"][..], &["analyze", "--equilibrium", "--format", "json"][..]] {
        let out = monty(args);
        assert!(out.status.success());
        assert!(stdout(&out).contains("1/2"));
    }
}

#[test]
fn simulate_passes_and_rejects_zero_games() {
    let out = monty(&[
        "simulate", "--host", "moody", "--p", "1/4", "--guest", "switch", "--n", "20000", "--seed", "5", "--format",
        "json",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    assert_eq!(report["replications"], 20000);
    assert_eq!(report["exact_value"], "1/2");

    let out = monty(&["simulate", "--n", "0"]);
    assert!(!out.status.success());

    let out = monty(&[
        "simulate", "--host", "moody", "--p", "0..1", "--step", "1/2", "--guest", "mixed", "--q", "0,1", "--n", "2000",
    ]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).lines().count(), 1 + 6);
}

#[test]
fn simulate_flags_a_mismatch() {
    // A zero tolerance makes any sampling noise a failure.
    let out = monty(&["simulate", "--host", "moody", "--p", "1/2", "--guest", "stay", "--n", "1000", "--z-max", "0"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn export_round_trip_through_estimate() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("games.jsonl");
    let p = path.to_str().unwrap();
    let out = monty(&["export", "--host", "moody", "--p", "1/2", "--guest", "stay", "--n", "3000", "--out", p]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().count(), 3000);
    let games = monty_lab::archive::read_jsonl(text.as_bytes()).unwrap();
    assert!(games.iter().all(|g| g.check_invariants().is_ok()));

    let out = monty(&["export", "--what", "estimate", "--input", p]);
    let est: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    assert_eq!(est["games"], 3000);
    assert!(est["lower"].as_f64().unwrap() <= 0.5 && 0.5 <= est["upper"].as_f64().unwrap());

    let out = monty(&["export", "--what", "belief-trace", "--input", p, "--prior", "1/2"]);
    assert_eq!(stdout(&out).lines().count(), 3000);

    let out = monty(&["export", "--what", "atoms", "--host", "evil", "--guest", "switch"]);
    assert!(stdout(&out).trim_end().ends_with("total weight 1"));
}

#[test]
fn bad_arguments_fail() {
    assert!(!monty(&["analyze", "--p", "3/2"]).status.success());
    assert!(!monty(&["simulate", "--host", "sneaky"]).status.success());
    assert!(!monty(&["export", "--what", "estimate"]).status.success());
}
