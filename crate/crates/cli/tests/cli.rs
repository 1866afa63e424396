use std::process::{Command, Output};

fn crcg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_crcg")).args(args).output().unwrap()
}

fn stdout(out: &Output) -> String {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

const DESCRIPTION: &str = "Start. Large cyan circle collides with small yellow circle. Small purple triangle enters basket. Large cyan circle collides with small yellow circle. Small purple triangle collides with basket. End.";
const QUESTION: &str = "Will the tiny purple triangle end up in the basket if the large cyan circle is removed?";

#[test]
fn parsed_text_answers_through_the_fact_program() {
    let tmp = tempfile::tempdir().unwrap();
    let lp = tmp.path().join("case.lp");
    let facts = stdout(&crcg(&["craft-parse", "--description", DESCRIPTION, "--question", QUESTION]));
    std::fs::write(&lp, facts).unwrap();
    let answer = stdout(&crcg(&["answer", "--scene", lp.to_str().unwrap()]));
    assert_eq!(answer, "option 1  determined yes  sim [(2,0)]  answer yes\n");
}

#[test]
fn missing_sidecar_is_a_scoring_failure() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().to_str().unwrap();
    stdout(&crcg(&["gen", "--scenes", "2", "--out", dir]));
    std::fs::remove_file(tmp.path().join("scene-0001.truth.json")).unwrap();
    let out = crcg(&["bench", "--scenes-dir", dir, "--no-timing"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("scene-0001.truth.json"));
}

#[test]
fn bad_inputs_are_configuration_failures() {
    let out = crcg(&["gen", "--scenes", "1", "--out", "/nonexistent/x", "--p-drop", "1.5"]);
    assert_eq!(out.status.code(), Some(2));
    let out = crcg(&["graph", "--scene", "/nonexistent/scene.json"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn replay_miss_does_not_reach_the_network() {
    let tmp = tempfile::tempdir().unwrap();
    let out = crcg(&[
        "craft-answer", "--description", DESCRIPTION, "--question", QUESTION, "--setting", "baseline",
        "--cache", tmp.path().to_str().unwrap(), "--replay-only", "--model", "m",
    ]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("replay-only"));
}

#[test]
fn determined_questions_skip_the_service_in_approx() {
    let tmp = tempfile::tempdir().unwrap();
    let out = stdout(&crcg(&[
        "craft-answer", "--description", DESCRIPTION, "--question", QUESTION, "--setting", "approx",
        "--cache", tmp.path().to_str().unwrap(), "--replay-only", "--model", "m",
    ]));
    assert!(out.contains("\"answer\": \"yes\"") && out.contains("\"prompt\": null"), "{out}");
}
