use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn capsac(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_capsac"))
        .args(args)
        .env_remove("CAPSAC_SOLVER_CMD")
        .output()
        .expect("capsac runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn gen_is_deterministic_per_seed() {
    let a = capsac(&["--seed", "4", "gen", "u-P16D4%D75"]);
    let b = capsac(&["--seed", "4", "gen", "u-P16D4%D75"]);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let c = capsac(&["--seed", "5", "gen", "u-P16D4%D75"]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn build_is_byte_deterministic() {
    let t4 = data("t4.json");
    let a = capsac(&["build", path_str(&t4), "--ord"]);
    let b = capsac(&["build", path_str(&t4), "--ord"]);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    assert!(stdout(&a).contains("Minimize"));
}

#[test]
fn oracle_and_solve_agree_on_t4() {
    let t4 = data("t4.json");
    let oracle = capsac(&["oracle", path_str(&t4)]);
    assert_eq!(code(&oracle), 0);
    assert!(stderr(&oracle).contains("objective 2\n"));
    for form in ["pcapsac", "rcapsac"] {
        let solve = capsac(&["solve", path_str(&t4), "--formulation", form]);
        assert_eq!(code(&solve), 0, "{form}");
        assert!(stderr(&solve).contains("objective 2\n"), "{form}: {}", stderr(&solve));
    }
}

#[test]
fn solve_through_an_external_command() {
    let t4 = data("t4.json");
    let cmd = format!("{} {{model}} {{solution}} {{time_limit}}", env!("CARGO_BIN_EXE_capsac-highs-lp"));
    let out = capsac(&["--solver-cmd", &cmd, "--time-limit", "60", "solve", path_str(&t4), "--sigma", "2"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(stderr(&out).contains("objective 4\n"));
}

#[test]
fn infeasible_deadline_exits_two() {
    let relay = data("relay4.json");
    let oracle = capsac(&["oracle", path_str(&relay), "--t-hat", "0.5"]);
    assert_eq!(code(&oracle), 2);
    assert!(stderr(&oracle).contains("infeasible"));
    let solve = capsac(&["solve", path_str(&relay), "--t-hat", "0.5"]);
    assert_eq!(code(&solve), 2);
}

#[test]
fn validate_reports_violations_with_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let t4 = data("t4.json");
    let sol = dir.path().join("s.json");
    assert_eq!(code(&capsac(&["oracle", path_str(&t4), "-o", path_str(&sol)])), 0);
    let ok = capsac(&["validate", path_str(&t4), path_str(&sol)]);
    assert_eq!(code(&ok), 0);
    assert!(stdout(&ok).contains("coverage ok"));

    let mut doc: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&sol).unwrap()).unwrap();
    doc["regions"].as_array_mut().unwrap().truncate(1);
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, doc.to_string()).unwrap();
    let out = capsac(&["validate", path_str(&t4), path_str(&bad)]);
    assert_eq!(code(&out), 2);
    assert!(stdout(&out).contains("coverage violated"));
}

#[test]
fn reduce_answers_yes_and_no() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("g.json");
    std::fs::write(&g, r#"{"points":[[0,0],[2,0]],"side":1,"k":1}"#).unwrap();
    let no = capsac(&["reduce", path_str(&g), "--answer"]);
    assert_eq!((code(&no), stdout(&no).trim()), (2, "no"));
    let yes = capsac(&["reduce", path_str(&g), "--k", "2", "--answer"]);
    assert_eq!((code(&yes), stdout(&yes).trim()), (0, "yes"));
    let by_milp = capsac(&["reduce", path_str(&g), "--k", "2", "--answer", "--milp"]);
    assert_eq!((code(&by_milp), stdout(&by_milp).trim()), (0, "yes"));

    let doc = capsac(&["reduce", path_str(&g), "--side", "3"]);
    assert_eq!(code(&doc), 0);
    let v: serde_json::Value = serde_json::from_slice(&doc.stdout).unwrap();
    assert!(v["instance"]["photos"].is_array());
    assert!(v["induced"].as_array().unwrap().contains(&serde_json::json!(["p1", "p2"])));
}

#[test]
fn bench_profile_plot_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let runs = dir.path().join("runs.csv");
    let prof = dir.path().join("prof.csv");
    let svg = dir.path().join("prof.svg");
    let b = capsac(&["bench", "u-P9D3%D100", "--configs", "pb-bc0bar,rb", "-o", path_str(&runs)]);
    assert_eq!(code(&b), 0, "{}", stderr(&b));
    assert_eq!(code(&capsac(&["profile", path_str(&runs), "-o", path_str(&prof)])), 0);
    assert!(std::fs::read_to_string(&prof).unwrap().starts_with("# capsac-profile v1\ntau,pb-bc0bar,rb\n"));
    assert_eq!(code(&capsac(&["plot", path_str(&prof), "-o", path_str(&svg)])), 0);
    assert!(std::fs::read_to_string(&svg).unwrap().starts_with("<svg"));
}

#[test]
fn deadline_sweep_ends_infeasible() {
    let out = capsac(&["sweep-that", path_str(&data("relay4.json")), "--oracle"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    let last = text.lines().last().unwrap();
    assert!(last.contains("infeasible"), "{text}");
}

#[test]
fn usage_and_io_errors_exit_one() {
    assert_eq!(code(&capsac(&["frobnicate"])), 1);
    assert_eq!(code(&capsac(&["solve", "/nonexistent/instance.json"])), 1);
    assert_eq!(code(&capsac(&["solve", path_str(&data("t4.json")), "--bc", "bc9"])), 1);
    assert_eq!(code(&capsac(&["--help"])), 0);
}
