//! End-to-end tests of the `pamr` binary: exit codes, output shapes, and
//! flag handling.

use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};

fn pamr() -> Command {
    Command::new(env!("CARGO_BIN_EXE_pamr"))
}

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/data")
        .join(name)
        .display()
        .to_string()
}

fn guideline_examples() -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../pamr/tests/data/guideline_examples.amr")
        .display()
        .to_string()
}

fn stdout(output: &Output) -> String {
    String::from_utf8(output.stdout.clone()).unwrap()
}

fn stderr(output: &Output) -> String {
    String::from_utf8(output.stderr.clone()).unwrap()
}

#[test]
fn parse_text_round_trips_the_fixture_corpus() {
    let output = pamr().args(["parse", &guideline_examples()]).output().unwrap();
    assert!(output.status.success(), "{}", stderr(&output));
    let text = stdout(&output);
    assert!(text.starts_with("(w / want-01"));
    assert_eq!(text.matches("\n\n").count(), 27, "28 records separated by blanks");
}

#[test]
fn parse_json_lists_thirteen_triples_for_the_reentrant_record() {
    let output = pamr()
        .args(["parse", &guideline_examples(), "--format", "json"])
        .output()
        .unwrap();
    assert!(output.status.success(), "{}", stderr(&output));
    let records: serde_json::Value = serde_json::from_str(&stdout(&output)).unwrap();
    let fa1 = records
        .as_array()
        .unwrap()
        .iter()
        .find(|r| r["id"] == "fa1")
        .expect("fa1 present");
    let triples = fa1["triples"].as_array().unwrap();
    assert_eq!(triples.len(), 13);
    assert_eq!(triples[0]["kind"], "top");
    let kinds: Vec<&str> = triples.iter().map(|t| t["kind"].as_str().unwrap()).collect();
    assert_eq!(kinds.iter().filter(|k| **k == "instance").count(), 5);
    assert_eq!(kinds.iter().filter(|k| **k == "relation").count(), 5);
    assert_eq!(kinds.iter().filter(|k| **k == "attribute").count(), 2);
}

#[test]
fn parse_canonical_renames_variables() {
    let mut child = pamr()
        .args(["parse", "-", "--canonical"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .take()
        .unwrap()
        .write_all(b"(q / doxtar)")
        .unwrap();
    let output = child.wait_with_output().unwrap();
    assert!(output.status.success());
    assert_eq!(stdout(&output).trim(), "(x / doxtar)");

    let mut child = pamr()
        .args(["parse", "-", "--canonical", "--format", "json"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .take()
        .unwrap()
        .write_all(b"(q / want-01 :ARG0 (zz / girl))")
        .unwrap();
    let output = child.wait_with_output().unwrap();
    let records: serde_json::Value = serde_json::from_str(&stdout(&output)).unwrap();
    assert_eq!(records[0]["triples"][0]["root"], "x");
    assert_eq!(records[0]["triples"][2]["var"], "x2");
}

#[test]
fn parse_rejects_empty_and_malformed_input() {
    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("empty.amr");
    std::fs::write(&empty, "").unwrap();
    let output = pamr().args(["parse", &empty.display().to_string()]).output().unwrap();
    assert_eq!(output.status.code(), Some(2));
    assert!(stderr(&output).contains("no records"));

    let malformed = dir.path().join("bad.amr");
    std::fs::write(&malformed, "# ::id b\n# ::snt s\n(a / b\n   :ARG0 (c / d)\n").unwrap();
    let output = pamr()
        .args(["parse", &malformed.display().to_string()])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
    assert!(stderr(&output).contains("line"), "{}", stderr(&output));

    let missing = pamr().args(["parse", "/no/such/file.amr"]).output().unwrap();
    assert_eq!(missing.status.code(), Some(3));
}

#[test]
fn check_clean_corpus_exits_zero() {
    let output = pamr().args(["check", &guideline_examples()]).output().unwrap();
    assert!(output.status.success(), "{}", stderr(&output));
    assert!(stdout(&output).contains("0 errors, 0 warnings"));
}

#[test]
fn check_reports_rule_violations_with_exit_one() {
    let output = pamr().args(["check", &data("bad_r5.amr")]).output().unwrap();
    assert_eq!(output.status.code(), Some(1));
    let text = stdout(&output);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 2, "one finding plus summary: {text}");
    assert!(lines[0].starts_with("bad1\tR5\terror\tx\t"), "{}", lines[0]);
    assert!(lines[1].starts_with("1 errors, 0 warnings"));
}

#[test]
fn check_rules_filter_limits_findings() {
    // The R5 fixture stays silent when only R1 is enabled.
    let output = pamr()
        .args(["check", &data("bad_r5.amr"), "--rules", "R1"])
        .output()
        .unwrap();
    assert!(output.status.success());
    assert!(stdout(&output).contains("0 errors, 0 warnings"));

    let output = pamr()
        .args(["check", &data("bad_r5.amr"), "--rules", "R5,R1"])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(1));

    let output = pamr()
        .args(["check", &data("bad_r5.amr"), "--rules", "R99"])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn check_strict_turns_warnings_into_failure() {
    let output = pamr().args(["check", &data("warn_r3.amr")]).output().unwrap();
    assert!(output.status.success(), "{}", stderr(&output));
    assert!(stdout(&output).contains("0 errors, 1 warnings"));

    let output = pamr()
        .args(["check", &data("warn_r3.amr"), "--strict"])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(1));
}

#[test]
fn check_accepts_a_lexicon_through_flag_and_environment() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("new_verb.amr");
    std::fs::write(&corpus, "# ::id n1\n# ::snt paridam\n(x / paridan :ARG0 (y / man))\n")
        .unwrap();
    let lexicon = dir.path().join("extra.lex");
    std::fs::write(&lexicon, "FRAME\tparidan\tARG0=jumper\n").unwrap();
    let corpus_path = corpus.display().to_string();

    // Unknown frame without the lexicon.
    let output = pamr().args(["check", &corpus_path]).output().unwrap();
    assert_eq!(output.status.code(), Some(1));
    assert!(stdout(&output).contains("R1"));

    let output = pamr()
        .args(["check", &corpus_path, "--lexicon", &lexicon.display().to_string()])
        .output()
        .unwrap();
    assert!(output.status.success(), "{}", stderr(&output));

    let output = pamr()
        .args(["check", &corpus_path])
        .env("PAMR_LEXICON", &lexicon)
        .output()
        .unwrap();
    assert!(output.status.success(), "{}", stderr(&output));
}

#[test]
fn score_self_is_perfect_and_deterministic() {
    let args = ["score", &guideline_examples(), &guideline_examples(), "--seed", "42"];
    let first = pamr().args(args).output().unwrap();
    assert!(first.status.success(), "{}", stderr(&first));
    let text = stdout(&first);
    assert!(text.lines().last().unwrap().starts_with("micro\t1.000000"));

    let second = pamr().args(args).output().unwrap();
    assert_eq!(first.stdout, second.stdout, "byte-identical reruns");
}

#[test]
fn score_hand_derived_pair() {
    let output = pamr()
        .args(["score", &data("pair_a.amr"), &data("pair_b.amr")])
        .output()
        .unwrap();
    assert!(output.status.success());
    assert!(stdout(&output).contains("micro\t0.750000\t0.750000\t0.750000"));

    let output = pamr()
        .args(["score", &data("pair_a.amr"), &data("pair_b.amr"), "--unlabeled"])
        .output()
        .unwrap();
    assert!(stdout(&output).contains("micro\t1.000000\t1.000000\t1.000000"));
}

#[test]
fn score_json_and_text_agree_to_six_decimals() {
    let text_run = pamr()
        .args(["score", &data("pair_a.amr"), &data("pair_b.amr")])
        .output()
        .unwrap();
    let json_run = pamr()
        .args(["score", &data("pair_a.amr"), &data("pair_b.amr"), "--format", "json"])
        .output()
        .unwrap();
    let report: serde_json::Value = serde_json::from_str(&stdout(&json_run)).unwrap();
    let micro_f1 = report["micro"]["f1"].as_f64().unwrap();
    let text = stdout(&text_run);
    let text_f1: f64 = text
        .lines()
        .last()
        .unwrap()
        .split('\t')
        .next_back()
        .unwrap()
        .parse()
        .unwrap();
    assert!((micro_f1 - text_f1).abs() < 1e-6);
    assert_eq!(report["pairs"][0]["id"], "d1");
    assert_eq!(report["micro"]["matched"], 3);
}

#[test]
fn seed_is_irrelevant_on_the_exact_path() {
    // Both graphs are far below the exact-search threshold.
    let run = |seed: &str| {
        let output = pamr()
            .args(["score", &data("pair_a.amr"), &data("pair_b.amr"), "--seed", seed])
            .output()
            .unwrap();
        assert!(output.status.success());
        output.stdout
    };
    assert_eq!(run("0"), run("123456789"));
}

#[test]
fn iaa_of_identical_corpora_is_perfect() {
    // Same graphs, annotator labels taken from the file stems.
    let dir = tempfile::tempdir().unwrap();
    let record = "# ::id s1\n# ::snt dalghak raft\n(x / raftan :ARG0 (y / dalghak))\n";
    let mut paths = Vec::new();
    for name in ["a.amr", "b.amr", "c.amr"] {
        let path = dir.path().join(name);
        std::fs::write(&path, record).unwrap();
        paths.push(path.display().to_string());
    }
    let output = pamr()
        .args(["iaa", &paths[0], &paths[1], &paths[2]])
        .output()
        .unwrap();
    assert!(output.status.success(), "{}", stderr(&output));
    let text = stdout(&output);
    assert!(text.contains("annotators: a, b, c"), "{text}");
    assert!(text.ends_with("average_f1: 1.000000\n"), "{text}");
}

#[test]
fn score_rejects_zero_restarts() {
    let output = pamr()
        .args(["score", &data("pair_a.amr"), &data("pair_b.amr"), "--restarts", "0"])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
    assert!(stderr(&output).contains("restarts"), "{}", stderr(&output));
}

#[test]
fn score_rejects_unaligned_ids() {
    let output = pamr()
        .args(["score", &data("pair_a.amr"), &data("iaa_ann1.amr")])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
    let message = stderr(&output);
    assert!(message.contains("d1") && message.contains("s1"), "{message}");
}

#[test]
fn stats_reports_sentence_count_first() {
    let output = pamr().args(["stats", &guideline_examples()]).output().unwrap();
    assert!(output.status.success());
    let text = stdout(&output);
    assert!(text.starts_with("sentences: 28\n"), "{text}");
    assert!(text.contains("reentrancies: 3"));

    let json = pamr()
        .args(["stats", &guideline_examples(), "--format", "json"])
        .output()
        .unwrap();
    let value: serde_json::Value = serde_json::from_str(&stdout(&json)).unwrap();
    assert_eq!(value["sentence_count"], 28);
}

#[test]
fn iaa_over_three_annotators() {
    let output = pamr()
        .args([
            "iaa",
            &data("iaa_ann1.amr"),
            &data("iaa_ann2.amr"),
            &data("iaa_ann3.amr"),
        ])
        .output()
        .unwrap();
    assert!(output.status.success(), "{}", stderr(&output));
    let text = stdout(&output);
    assert!(text.starts_with("annotators: ann1, ann2, ann3\n"), "{text}");
    assert!(text.contains("shared_ids: 5"));
    assert!(text.lines().last().unwrap().starts_with("average_f1: 0."));

    // Identical corpora agree perfectly.
    let output = pamr()
        .args(["iaa", "--unlabeled", &data("iaa_ann1.amr"), &data("iaa_ann1.amr")])
        .output()
        .unwrap();
    // Same ::annotator in both files is a usage error.
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn iaa_requires_two_files() {
    let output = pamr().args(["iaa", &data("iaa_ann1.amr")]).output().unwrap();
    assert_eq!(output.status.code(), Some(2), "clap enforces arity");
}
