use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn pic(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pic"))
        .args(args)
        .env_remove("PIC_THREADS")
        .env_remove("PIC_ALPHA")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn predict_worked_example() {
    let (train, test) = (data("table1.csv"), data("table1_test.csv"));
    let o = pic(&["predict", "--train", s(&train), "--test", s(&test), "--target", "Class", "--alpha", "0.5"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let rec = &v.as_array().unwrap()[0];
    assert_eq!(rec["predicted_label"], "2");
    assert_eq!(rec["rule_text"], "{f3=c2} -> 2");
    assert!((rec["a_score"].as_f64().unwrap() - 0.75).abs() < 1e-12);
    assert_eq!(rec["fallback"], "none");
    // the test row's label is "?", not a class
    assert!(rec.get("actual_label").is_none());
}

#[test]
fn predict_csv_output() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("p.csv");
    let (train, test) = (data("table1.csv"), data("table1_test.csv"));
    let o = pic(&[
        "predict",
        "--train",
        s(&train),
        "--test",
        s(&test),
        "--target",
        "Class",
        "--alpha",
        "0.5",
        "--format",
        "csv",
        "--output",
        s(&out),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("row,predicted_label,actual_label,rule_text,length,a_score"));
    assert!(lines.next().unwrap().starts_with("0,2,,{f3=c2} -> 2,1,0.75,"));
}

#[test]
fn alpha_out_of_range_is_a_config_error() {
    let (train, test) = (data("table1.csv"), data("table1_test.csv"));
    let o = pic(&["predict", "--train", s(&train), "--test", s(&test), "--target", "Class", "--alpha", "1.5"]);
    assert_eq!(code(&o), 3);
    assert!(stderr(&o).contains("alpha"));
}

#[test]
fn env_overrides_flags_defaults() {
    let (train, test) = (data("table1.csv"), data("table1_test.csv"));
    let o = Command::new(env!("CARGO_BIN_EXE_pic"))
        .args(["predict", "--train", s(&train), "--test", s(&test), "--target", "Class"])
        .env("PIC_ALPHA", "7")
        .output()
        .unwrap();
    assert_eq!(code(&o), 3);
}

#[test]
fn empty_test_file_gives_no_records() {
    let dir = TempDir::new().unwrap();
    let empty = dir.path().join("empty.csv");
    fs::write(&empty, "").unwrap();
    let train = data("table1.csv");
    let o = pic(&["predict", "--train", s(&train), "--test", s(&empty), "--target", "Class"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert_eq!(stdout(&o).trim(), "[]");
}

#[test]
fn ragged_input_names_file_and_line() {
    let dir = TempDir::new().unwrap();
    let bad = dir.path().join("bad.csv");
    fs::write(&bad, "y,a,b\n0,x,y\n1,x\n").unwrap();
    let test = data("table1_test.csv");
    let o = pic(&["predict", "--train", s(&bad), "--test", s(&test), "--target", "y"]);
    assert_eq!(code(&o), 2);
    let err = stderr(&o);
    assert!(err.contains("bad.csv") && err.contains("line 3"), "{err}");
}

#[test]
fn missing_file_is_an_io_error() {
    let o = pic(&["crossval", "--data", "/nonexistent/x.csv", "--target", "y"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("/nonexistent/x.csv"));
}

#[test]
fn unknown_bin_override_is_a_config_error() {
    let d = data("table1.csv");
    let o = pic(&["crossval", "--data", s(&d), "--target", "Class", "--bin", "nope=3", "--folds", "3"]);
    assert_eq!(code(&o), 3);
}

#[test]
fn crossval_rejects_one_fold() {
    let d = data("tictactoe.csv");
    let o = pic(&["crossval", "--data", s(&d), "--target", "class", "--folds", "1"]);
    assert_eq!(code(&o), 3);
}

#[test]
fn crossval_rejects_folds_beyond_class_size() {
    let d = data("table1.csv");
    let o = pic(&["crossval", "--data", s(&d), "--target", "Class", "--folds", "4"]);
    assert_eq!(code(&o), 3);
    assert!(stderr(&o).contains("fewer than the 4 folds"));
}

#[test]
fn crossval_same_seed_same_files() {
    let dir = TempDir::new().unwrap();
    let d = data("vote.csv");
    let run = |tag: &str, threads: &str| {
        let paths: Vec<PathBuf> = ["json", "csv", "hist.csv", "hist.json"]
            .iter()
            .map(|ext| dir.path().join(format!("{tag}.{ext}")))
            .collect();
        let o = pic(&[
            "--threads",
            threads,
            "crossval",
            "--data",
            s(&d),
            "--target",
            "class",
            "--alpha",
            "0.7",
            "--seed",
            "9",
            "--repeats",
            "2",
            "--output",
            s(&paths[0]),
            "--runs-csv",
            s(&paths[1]),
            "--histogram",
            s(&paths[2]),
            "--histogram-json",
            s(&paths[3]),
        ]);
        assert_eq!(code(&o), 0, "{}", stderr(&o));
        (stdout(&o), paths.iter().map(|p| fs::read(p).unwrap()).collect::<Vec<_>>())
    };
    let a = run("a", "1");
    let b = run("b", "1");
    let c = run("c", "3");
    assert_eq!(a, b);
    assert_eq!(a, c);

    let report: serde_json::Value = serde_json::from_slice(&a.1[0]).unwrap();
    assert!(report.get("wall_time").is_none());
    assert_eq!(report["accuracy_per_run"].as_array().unwrap().len(), 2);
    assert!(String::from_utf8(a.1[2].clone()).unwrap().starts_with("rule_text,count\n"));
}

#[test]
fn crossval_timing_is_opt_in() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("r.json");
    let d = data("table1.csv");
    let o = pic(&["crossval", "--data", s(&d), "--target", "Class", "--folds", "3", "--timing", "--output", s(&out)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let report: serde_json::Value = serde_json::from_slice(&fs::read(&out).unwrap()).unwrap();
    assert!(report["wall_time"].as_f64().unwrap() >= 0.0);
}

#[test]
fn oracle_check_worked_example() {
    let (d, t) = (data("table1.csv"), data("table1_test.csv"));
    let o = pic(&["oracle-check", "--data", s(&d), "--test", s(&t), "--target", "Class", "--alpha", "0.5"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert!(stdout(&o).contains("checked 1 rows, 0 disagreements"));
    let o = pic(&["oracle-check", "--data", s(&d), "--target", "Class", "--alpha", "0.5"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("checked 7 rows, 0 disagreements"));
}

#[test]
fn oracle_check_refuses_wide_data() {
    let d = data("mushroom.csv");
    let o = pic(&["oracle-check", "--data", s(&d), "--target", "class"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("at most 20 features"));
}

fn write_rules(dir: &Path, name: &str, json: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, json).unwrap();
    p
}

#[test]
fn rules_compare_subset_and_vocabulary() {
    let dir = TempDir::new().unwrap();
    let d = data("table1.csv");
    let ours = write_rules(
        dir.path(),
        "ours.json",
        r#"[{"predicates":[{"feature":"f3","value":"c2"}],"label":"2"},
            {"predicates":[{"feature":"f1","value":"a2"}],"label":"1"}]"#,
    );
    let theirs = write_rules(
        dir.path(),
        "theirs.json",
        r#"[{"predicates":[{"feature":"f3","value":"c2"},{"feature":"f4","value":"d1"}],"label":"2"},
            {"predicates":[{"feature":"f1","value":"a2"}],"label":"2"}]"#,
    );
    let o = pic(&["rules-compare", "--ours", s(&ours), "--theirs", s(&theirs), "--data", s(&d), "--target", "Class"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert_eq!(stdout(&o), "common 1\n  {f3=c2} -> 2\npersonalized 1\n  {f1=a2} -> 1\n");

    let o = pic(&["rules-compare", "--ours", s(&ours), "--theirs", s(&ours), "--data", s(&d), "--target", "Class"]);
    assert!(stdout(&o).contains("personalized 0"));

    let alien =
        write_rules(dir.path(), "alien.json", r#"[{"predicates":[{"feature":"odor","value":"p"}],"label":"1"}]"#);
    let o = pic(&["rules-compare", "--ours", s(&ours), "--theirs", s(&alien), "--data", s(&d), "--target", "Class"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("alien.json") && stderr(&o).contains("\"odor\""), "{}", stderr(&o));
}

#[test]
fn rules_compare_reads_crossval_reports() {
    let dir = TempDir::new().unwrap();
    let d = data("vote.csv");
    let report = dir.path().join("report.json");
    let o = pic(&[
        "crossval",
        "--data",
        s(&d),
        "--target",
        "class",
        "--alpha",
        "0.7",
        "--repeats",
        "1",
        "--output",
        s(&report),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let o = pic(&["rules-compare", "--ours", s(&report), "--theirs", s(&report), "--data", s(&d), "--target", "class"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(stdout(&o).contains("personalized 0"));
}

#[test]
fn help_exits_zero_and_bad_flag_exits_three() {
    assert_eq!(code(&pic(&["--help"])), 0);
    assert_eq!(code(&pic(&["predict", "--no-such-flag"])), 3);
}
