use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_robust-select"));
    cmd.env("ROBUST_SELECT_THREADS", "1");
    cmd
}

fn tiny() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data/tiny.json")
}

fn run(cmd: &mut Command) -> (i32, String, String) {
    let Output { status, stdout, stderr } = cmd.output().expect("binary runs");
    (
        status.code().expect("exit code"),
        String::from_utf8(stdout).unwrap(),
        String::from_utf8(stderr).unwrap(),
    )
}

fn solve(algorithm: &str) -> serde_json::Value {
    let (code, out, err) = run(bin().args(["solve", "--config"]).arg(tiny()).args(["--algorithm", algorithm]));
    assert_eq!(code, 0, "{err}");
    serde_json::from_str(out.trim()).unwrap()
}

#[test]
fn solve_matches_brute_force_on_tiny_instance() {
    let fast = solve("fast");
    let brute = solve("brute");
    assert_eq!(fast["selected"], serde_json::json!([2]));
    assert_eq!(fast["selected"], brute["selected"]);
    assert_eq!(fast["algorithm"], "fast");
    for key in ["min_value", "evaluations", "wall_time_ms", "params"] {
        assert!(fast.get(key).is_some(), "missing {key}");
    }
    assert!((fast["min_value"].as_f64().unwrap() - 50f64.sqrt()).abs() < 1e-12);
}

#[test]
fn solve_writes_output_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("solution.json");
    let (code, out, _) = run(bin()
        .args(["solve", "--algorithm", "ratio", "--config"])
        .arg(tiny())
        .arg("--output")
        .arg(&path));
    assert_eq!(code, 0);
    assert!(out.is_empty());
    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    assert_eq!(json["selected"], serde_json::json!([2]));
}

#[test]
fn configuration_errors_exit_2() {
    let (code, _, err) = run(bin().args(["solve", "--config", "/nonexistent/scenario.json"]));
    assert_eq!(code, 2);
    assert!(err.contains("/nonexistent/scenario.json"), "{err}");

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"agents": [[0, "x"]], "actions": [], "matroid": {"type": "uniform", "rank": 1}}"#).unwrap();
    let (code, _, err) = run(bin().args(["solve", "--config"]).arg(&bad));
    assert_eq!(code, 2);
    assert!(err.contains("agents[0]"), "{err}");

    let (code, _, _) = run(bin().args(["solve", "--delta", "0", "--config"]).arg(tiny()));
    assert_eq!(code, 2);
    let (code, _, _) = run(bin().args(["solve", "--algorithm", "simplex", "--config"]).arg(tiny()));
    assert_eq!(code, 2);
    let (code, _, _) = run(bin().args(["bench", "--algorithms", "fast,nope"]));
    assert_eq!(code, 2);
    let (code, _, _) = run(bin().args(["bench", "--trials", "1", "--out", "/nonexistent/dir/r.csv"]));
    assert_eq!(code, 2);
    let (code, _, _) = run(&mut bin());
    assert_eq!(code, 2);
}

#[test]
fn bench_single_trial_summary_and_repeatability() {
    let dir = tempfile::tempdir().unwrap();
    let go = |tag: &str| {
        let out = dir.path().join(format!("r{tag}.csv"));
        let summary = dir.path().join(format!("s{tag}.csv"));
        let (code, table, err) = run(bin()
            .args(["bench", "--trials", "1", "--z-min", "1", "--z-max", "1", "--seed", "3"])
            .arg("--out")
            .arg(&out)
            .arg("--summary")
            .arg(&summary));
        assert_eq!(code, 0, "{err}");
        assert!(table.contains("fast") && table.contains("ratio"));
        (std::fs::read_to_string(out).unwrap(), std::fs::read_to_string(summary).unwrap())
    };
    let (raw, summary) = go("a");
    let lines: Vec<&str> = summary.lines().collect();
    assert_eq!(
        lines[0],
        "z,algorithm,mean_objective,sd_objective,mean_evaluations,sd_evaluations,mean_wall_time_ms"
    );
    assert_eq!(lines.len(), 3);
    assert!(lines[1].starts_with("1,fast,") && lines[2].starts_with("1,ratio,"));
    assert_eq!(raw.lines().next(), Some("z,trial,algorithm,objective,evaluations,wall_time_ms,seed"));
    assert_eq!(raw.lines().count(), 3);
    assert!(raw.ends_with('\n') && summary.ends_with('\n'));
    assert_eq!(go("b"), (raw, summary));
}

#[test]
fn check_defaults_pass() {
    let (code, out, err) = run(bin().arg("check"));
    assert_eq!(code, 0, "{out}{err}");
    assert!(out.lines().all(|l| l.starts_with("suite ") || l == "result pass"));
    assert!(out.contains("failed=0"));
}

#[test]
fn check_rejects_large_ground_sets() {
    let (code, _, _) = run(bin().args(["check", "--max-actions", "20"]));
    assert_eq!(code, 2);
}

#[test]
fn check_reports_corrupted_matroid() {
    let (code, out, _) = run(bin().args(["check", "--instances", "5", "--inject-corrupt-matroid"]));
    assert_eq!(code, 1);
    let cx = out
        .lines()
        .find_map(|l| l.strip_prefix("counterexample "))
        .expect("counterexample line");
    let cx: serde_json::Value = serde_json::from_str(cx).unwrap();
    assert_eq!(cx["suite"], "matroid_axioms");
    assert!(cx["instance"].is_object());
    assert!(out.ends_with("result fail\n"));
}

#[test]
fn check_instances_replay_through_solve() {
    let dir = tempfile::tempdir().unwrap();
    let family = robust_select::verify::InstanceFamily {
        count: 4,
        max_agents: 3,
        max_actions: 6,
        seed: 11,
    };
    for (k, scenario) in family.generate().unwrap().iter().enumerate() {
        let path = dir.path().join(format!("instance{k}.json"));
        std::fs::write(&path, scenario.to_json()).unwrap();
        let (code, out, err) = run(bin().args(["solve", "--algorithm", "brute", "--config"]).arg(&path));
        assert_eq!(code, 0, "{err}");
        let got: serde_json::Value = serde_json::from_str(out.trim()).unwrap();
        let want = robust_select::solvers::brute_force_maxmin(scenario).unwrap();
        assert_eq!(got["selected"], serde_json::json!(want.selected.to_vec()));
        assert_eq!(got["min_value"].as_f64().unwrap(), want.min_value);
    }
}
