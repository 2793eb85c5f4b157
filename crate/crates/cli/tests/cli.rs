use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_iet-lang"));
    c.env_remove("IETLANG_CORPUS_DIR");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn scratch(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("iet-lang-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

const STURMIAN: &str = r#"{"alphabet": ["1", "2"],
  "lengths": [{"p":-1,"q":2,"bp":1,"bq":2,"d":5}, {"p":3,"q":2,"bp":-1,"bq":2,"d":5}],
  "orderD": ["1", "2"], "orderA": ["2", "1"], "kind": "standard"}"#;

#[test]
fn complexity_table_from_a_map_file() {
    let path = scratch("sturmian.json", STURMIAN);
    let o = run(&["language", "--iet", path.to_str().unwrap(), "--depth", "10", "--format", "tsv"]);
    assert!(o.status.success());
    let rows: Vec<Vec<String>> =
        stdout(&o).lines().skip(1).map(|l| l.split('\t').map(str::to_string).collect()).collect();
    assert_eq!(rows.len(), 10);
    for (i, row) in rows.iter().enumerate() {
        assert_eq!(row[0], (i + 1).to_string());
        assert_eq!(row[1], (i + 2).to_string());
    }
}

#[test]
fn seven_word_language_has_no_order() {
    let o = run(&["orders", "--example", "no-order-7words"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "no order condition (0 classes)\n");
    assert_eq!(run(&["orders", "--example", "no-order-7words", "--expect-none"]).status.code(), Some(0));
}

#[test]
fn rauzy_graph_as_dot() {
    let o = run(&["rauzy", "--example", "fake-sturmian", "-n", "3", "--format", "dot"]);
    assert!(o.status.success());
    let dot = stdout(&o);
    assert!(dot.starts_with("digraph"));
    assert_eq!(dot.lines().filter(|l| l.contains("[label=") && !l.contains("->")).count(), 4);
}

#[test]
fn failed_expectations_exit_with_one() {
    assert_eq!(run(&["orders", "--example", "sturmian", "--expect-none"]).status.code(), Some(1));
    assert_eq!(run(&["orders", "--example", "sturmian", "--expect-class", "12/12"]).status.code(), Some(1));
    assert_eq!(run(&["orders", "--example", "sturmian", "--expect-class", "12/21"]).status.code(), Some(0));
    assert_eq!(run(&["orders", "--example", "mon-fibonacci", "--expect-class", "231/132"]).status.code(), Some(0));
}

#[test]
fn checking_a_given_order() {
    let good = scratch("good.json", r#"{"orderD": ["1","2"], "orderA": ["2","1"]}"#);
    let bad = scratch("bad.json", r#"{"orderD": ["1","2"], "orderA": ["1","2"]}"#);
    let o = run(&["orders", "--example", "sturmian", "--orders", good.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("connections: none"));
    assert_eq!(run(&["orders", "--example", "sturmian", "--orders", bad.to_str().unwrap()]).status.code(), Some(1));
}

#[test]
fn input_errors_exit_with_two() {
    assert_eq!(run(&["language"]).status.code(), Some(2));
    assert_eq!(run(&["language", "--example", "nope"]).status.code(), Some(2));
    assert_eq!(run(&["language", "--example", "sturmian", "--depth", "0"]).status.code(), Some(2));
    assert_eq!(run(&["rauzy", "--example", "sturmian", "--format", "dot", "--iet", "x.json"]).status.code(), Some(2));
    assert_eq!(run(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(run(&["code", "--example", "sturmian", "--x", "one half"]).status.code(), Some(2));
}

#[test]
fn windows_file_gives_the_same_language_as_the_example() {
    let w = scratch(
        "skew.json",
        r#"{"alphabet": ["1","2"], "sequences": [{"left": {"kind":"periodic","word":"1"}, "middle": "2", "right": {"kind":"periodic","word":"1"}}]}"#,
    );
    let a = run(&["language", "--windows", w.to_str().unwrap(), "-n", "8"]);
    let b = run(&["language", "--example", "skew-sturmian", "-n", "8"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn language_json_round_trips() {
    let o = run(&["language", "--example", "mon-fibonacci", "-n", "9", "--format", "json"]);
    let path = scratch("mon-lang.json", &stdout(&o));
    let again = run(&["language", "--language", path.to_str().unwrap(), "--format", "json"]);
    assert_eq!(o.stdout, again.stdout);
}

#[test]
fn corpus_directory_can_be_overridden() {
    let dir = std::env::temp_dir().join(format!("iet-lang-corpus-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    std::fs::write(
        dir.join("tiny.json"),
        r#"{"schema": 1, "name": "tiny", "description": "one periodic word", "alphabet": ["a","b"],
            "periodic": ["ab"], "depth": 4,
            "expected": [{"check": "complexity", "depth": 4, "p": [2,2,2,2], "provenance": "definitional"}]}"#,
    )
    .unwrap();
    let o = bin().env("IETLANG_CORPUS_DIR", &dir).args(["corpus", "list"]).output().unwrap();
    assert_eq!(stdout(&o), "tiny\tone periodic word\n");
    let o = bin().env("IETLANG_CORPUS_DIR", &dir).args(["corpus", "check"]).output().unwrap();
    assert!(o.status.success(), "{}", stdout(&o));
    let o = bin().env("IETLANG_CORPUS_DIR", &dir).args(["language", "--example", "sturmian"]).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn corpus_check_passes() {
    let o = run(&["corpus", "check"]);
    assert!(o.status.success(), "{}", stdout(&o));
    assert!(!stdout(&o).contains("FAILED"));
}

#[test]
fn splitting_and_blowups() {
    let o = run(&["split", "--example", "skew-sturmian-split"]);
    assert_eq!(o.status.code(), Some(0));
    let o = run(&["split", "--example", "skew-sturmian-split", "--blocks", "1,23"]);
    assert_ne!(o.status.code(), Some(0));

    let o = run(&["blowup", "--example", "mon-fibonacci"]);
    assert!(stdout(&o).contains("closed-form length 4\n"));
    // Substitutive tails have no finite affine layout.
    assert_eq!(run(&["blowup", "--affine", "--example", "mon-fibonacci"]).status.code(), Some(1));
    let o = run(&["blowup", "--affine", "--example", "fake-sturmian"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("2 pieces, total length 3"), "{}", stdout(&o));
}

#[test]
fn coding_of_a_point() {
    let o = run(&["code", "--example", "sturmian", "--x", "1/3", "--back", "3", "--fwd", "5"]);
    assert_eq!(stdout(&o).trim().len(), 9);
    assert_eq!(stdout(&o).find('|'), Some(3));
}
