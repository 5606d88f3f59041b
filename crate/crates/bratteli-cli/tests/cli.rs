use std::path::PathBuf;
use std::process::{Command, Output};
use std::time::{Duration, Instant};

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(format!("{name}.json"))
        .display()
        .to_string()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bratteli")).args(args).output().unwrap()
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn verify_example_2_6_is_perfect() {
    let out = run(&["verify", "--diagram", &fixture("example_2_6"), "--no-timestamp"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["status"], "PERFECT_UP_TO_DEPTH");
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["report"]["verdict"]["bijection_labels"], serde_json::json!([["a", "b"], ["b", "c"], ["c", "a"]]));
}

#[test]
fn synthesize_example_4_4_refuses() {
    let out = run(&["synthesize", "--diagram", &fixture("example_4_4"), "--no-timestamp"]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    let msg = v["report"]["failures"][0]["message"].as_str().unwrap();
    assert!(msg.contains("no path from [c,c] to [b,a]"), "{msg}");
}

#[test]
fn malformed_input_is_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bad.json");
    std::fs::write(&p, "{ not json").unwrap();
    let out = run(&["validate", "--diagram", p.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(json(&out)["status"], "INPUT_ERROR");
    assert_eq!(run(&["validate"]).status.code(), Some(3));
    assert_eq!(run(&["no-such-command"]).status.code(), Some(3));
}

#[test]
fn reports_are_deterministic_without_timestamp() {
    let args = ["hgraph", "--diagram", &fixture("example_4_4"), "--level", "2", "--no-timestamp"];
    assert_eq!(run(&args).stdout, run(&args).stdout);
    let with = json(&run(&["validate", "--diagram", &fixture("example_3_6")]));
    assert!(with.get("generated_at_unix").is_some());
    let without = json(&run(&["validate", "--diagram", &fixture("example_3_6"), "--no-timestamp"]));
    assert!(without.get("generated_at_unix").is_none());
}

#[test]
fn out_directory_receives_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let out = run(&["synthesize", "--diagram", &fixture("example_3_6"), "--out", d, "--no-timestamp"]);
    assert_eq!(out.status.code(), Some(0));
    let names: Vec<String> = std::fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    assert!(names.contains(&"report.json".to_string()));
    assert!(names.contains(&"order.json".to_string()));
    assert!(names.iter().any(|n| n.starts_with("trace_n")));
    assert!(!names.iter().any(|n| n.ends_with(".tmp")));
    let order = std::fs::read_to_string(dir.path().join("order.json")).unwrap();
    let file = bratteli::io::OrderFile::parse(&order).unwrap();
    let b = bratteli::fixtures::growing_example(6).diagram;
    file.build(&b).unwrap();

    let out = run(&["hgraph", "--diagram", &fixture("example_4_4"), "--level", "2", "--dot", "--out", d]);
    assert_eq!(out.status.code(), Some(0));
    let dot = std::fs::read_to_string(dir.path().join("H2_u3.dot")).unwrap();
    assert!(dot.starts_with("digraph H2"));
}

#[test]
fn obstruction_verdicts() {
    for (name, code, status) in [
        ("class_a_k3", 1, "NO_PERFECT_ORDER"),
        ("class_a_k2_c2", 1, "NO_PERFECT_ORDER"),
        ("class_a_k2_c1", 0, "NOT_BLOCKED"),
    ] {
        let out = run(&["verify", "--diagram", &fixture(name), "--no-timestamp"]);
        assert_eq!(out.status.code(), Some(code), "{name}");
        assert_eq!(json(&out)["status"], status, "{name}");
    }
}

#[test]
fn single_target_synthesis_and_balance() {
    let out = run(&["synthesize", "--diagram", &fixture("example_4_6"), "--level", "3", "--target", "1", "--no-timestamp"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["report"]["run"]["word"], "v2 v3 v1 v2");
    let out = run(&["balance", "--diagram", &fixture("example_4_8"), "--level", "4", "--target", "0", "--no-timestamp"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["report"]["targets"][0]["source"], "given");
}

#[test]
fn census_emits_json_lines() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("two.json");
    std::fs::write(&p, r#"{"version":1,"block":[[1,1],[1,1]],"depth":3,"stationary":true}"#).unwrap();
    let out = run(&["census", "--diagram", p.to_str().unwrap(), "--no-timestamp"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<serde_json::Value> = text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), 5);
    let perfect = lines[..4].iter().filter(|l| l["status"] == "PERFECT_UP_TO_DEPTH").count();
    assert_eq!(perfect, 2);
    assert_eq!(lines[4]["report"]["perfect"], 2);
    let out = run(&["census", "--diagram", &fixture("example_4_4"), "--budget", "10"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn infinitesimal_example_5_2() {
    let out = run(&["infinitesimal", "--diagram", &fixture("example_5_2"), "--no-timestamp"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["report"]["vectors"][0]["vector"]["entries"], serde_json::json!([0, 0, -1, 1]));
    assert_eq!(v["report"]["rank"]["rank"], 1);
    assert_eq!(v["report"]["rank"]["dependency"], serde_json::json!([1, 1]));
}

#[test]
fn depth_override_extends_stationary_fixtures() {
    let out = run(&["verify", "--diagram", &fixture("example_2_6"), "--depth", "6", "--no-timestamp"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["report"]["verdict"]["horizon"], 6);
    let out = run(&["validate", "--diagram", &fixture("example_3_6"), "--depth", "4", "--no-timestamp"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["report"]["diagram"]["depth"], 4);
}

#[test]
fn every_fixture_runs_quickly() {
    let cases: Vec<Vec<String>> = vec![
        vec!["verify".into(), "--diagram".into(), fixture("example_2_6")],
        vec!["synthesize".into(), "--diagram".into(), fixture("example_4_4")],
        vec!["synthesize".into(), "--diagram".into(), fixture("example_3_6")],
        vec!["validate".into(), "--diagram".into(), fixture("example_3_8")],
        vec!["synthesize".into(), "--diagram".into(), fixture("example_4_6"), "--level".into(), "3".into(), "--target".into(), "1".into()],
        vec!["synthesize".into(), "--diagram".into(), fixture("example_4_8"), "--level".into(), "4".into(), "--target".into(), "0".into()],
        vec!["infinitesimal".into(), "--diagram".into(), fixture("example_5_2")],
        vec!["infinitesimal".into(), "--diagram".into(), fixture("example_5_3")],
        vec!["verify".into(), "--diagram".into(), fixture("class_a_k3")],
    ];
    for args in cases {
        let start = Instant::now();
        let out = Command::new(env!("CARGO_BIN_EXE_bratteli")).args(&args).output().unwrap();
        assert!(out.status.code().unwrap() <= 1, "{args:?}");
        assert!(start.elapsed() < Duration::from_secs(1), "{args:?} took {:?}", start.elapsed());
    }
}
