//! End-to-end runs of the `etale-lab` binary.

use std::path::PathBuf;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_etale-lab")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn scenario_file(name: &str, text: &str) -> PathBuf {
    let path = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name);
    std::fs::write(&path, text).unwrap();
    path
}

const SWAPPED_DBL: &str = r#"{
  "name": "broken",
  "space": {"cantor": "01"},
  "system": {
    "regime": "C",
    "labels": ["1", "g"],
    "table": [["1", "g"], ["g", "1"]],
    "maps": [
      {"name": "1", "rules": ["id"]},
      {"name": "g", "rules": ["0 -> 1", "1 -> 0"]}
    ],
    "witnesses": [{"pair": ["g", "1"], "set": "0*1"}]
  }
}"#;

#[test]
fn validate_accepts_gallery_scenarios() {
    let o = run(&["validate", "dbl"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(stdout(&o).contains("status    valid"));
}

#[test]
fn malformed_witness_system_exits_1_naming_the_axiom() {
    let path = scenario_file("broken.json", SWAPPED_DBL);
    let o = run(&["validate", path.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("agreement axiom"), "{}", stderr(&o));
}

#[test]
fn syntax_errors_are_located() {
    let path = scenario_file("syntax.json", "{\n  \"name\": \"x\",\n  \"space\": {\"finite\": 2},\n  \"bogus\": 1\n}");
    let o = run(&["validate", path.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("line"), "{}", stderr(&o));
}

#[test]
fn usage_errors_exit_1() {
    assert_eq!(code(&run(&["frobnicate"])), 1);
    assert_eq!(code(&run(&["report"])), 1);
    assert_eq!(code(&run(&["report", "dbl", "--json", "--text"])), 1);
    assert_eq!(code(&run(&["orbit", "dbl", "--tol", "0"])), 1);
    assert_eq!(code(&run(&["--help"])), 0);
}

#[test]
fn monoid_cap_exceeded_exits_3() {
    let text = r#"{
      "name": "big",
      "space": {"finite": 5},
      "system": {
        "regime": "A",
        "cap": 10,
        "generators": [
          {"name": "c", "rules": ["0 -> 1", "1 -> 2", "2 -> 3", "3 -> 4", "4 -> 0"]},
          {"name": "s", "rules": ["0 -> 1", "1 -> 0", "2 -> 2", "3 -> 3", "4 -> 4"]}
        ]
      }
    }"#;
    let path = scenario_file("big.json", text);
    let o = run(&["validate", path.to_str().unwrap()]);
    assert_eq!(code(&o), 3, "{}", stderr(&o));
}

#[test]
fn json_and_text_reports_agree() {
    let json = run(&["report", "dbl", "--json"]);
    assert_eq!(code(&json), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&json)).unwrap();
    let keys: Vec<&String> = v.as_object().unwrap().keys().collect();
    assert_eq!(keys, ["scenario", "command", "version", "bounds", "results"]);
    let text = stdout(&run(&["report", "dbl"]));
    for (key, value) in v["results"].as_object().unwrap() {
        if let Some(s) = value.as_str() {
            let line = text.lines().find(|l| l.trim_start().starts_with(key.as_str())).unwrap();
            assert!(line.ends_with(s), "{key}: {line} vs {s}");
        }
        if let Some(b) = value.as_bool() {
            assert!(text.lines().any(|l| l.trim_start().starts_with(key.as_str()) && l.ends_with(&b.to_string())));
        }
    }
}

#[test]
fn gallery_is_byte_stable_and_matches_fixtures() {
    let first = run(&["gallery", "--json"]);
    let second = run(&["gallery", "--json"]);
    assert_eq!(code(&first), 0, "{}", stderr(&first));
    assert_eq!(first.stdout, second.stdout);
    assert_eq!(first.stderr, second.stderr);
    let one = run(&["gallery", "pair3", "--json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&one)).unwrap();
    assert_eq!(v["results"]["report"]["arrows"], 9);
    assert_eq!(v["results"]["report"]["minimal"], "true");
}

#[test]
fn fixture_mismatch_exits_2() {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("fixtures");
    std::fs::create_dir_all(&dir).unwrap();
    std::fs::write(dir.join("dbl.json"), "{}\n").unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_etale-lab"))
        .args(["gallery", "dbl"])
        .env("ETALE_LAB_FIXTURES", &dir)
        .output()
        .unwrap();
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("differs at line 1"), "{}", stderr(&o));
}

#[test]
fn selftest_passes_with_a_small_case_count() {
    let o = run(&["selftest", "--cases", "5", "--seed", "11"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert!(stdout(&o).lines().all(|l| l.starts_with("PASS")));
}
