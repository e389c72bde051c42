use std::fs;
use std::path::Path;
use std::process::{Command, Output, Stdio};

use honkit::commands::report_rows;
use honkit::{parse_str, Format};
use honkit_core::{multi_order_reports, ReportOptions};

fn honkit(args: &[&str]) -> Output {
    honkit_env(args, &[])
}

fn honkit_env(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_honkit"));
    cmd.args(args);
    for (k, _) in std::env::vars().filter(|(k, _)| k.starts_with("HONKIT_")) {
        cmd.env_remove(k);
    }
    cmd.envs(env.iter().copied());
    cmd.output().unwrap()
}

fn stdout(o: &Output) -> String {
    assert!(
        o.status.success(),
        "exit {:?}: {}",
        o.status.code(),
        String::from_utf8_lossy(&o.stderr)
    );
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

const BRANCHING: &str = "x,a,c\ny,a,d\nx,a,c\ny,a,d\na,b,c\nb,c,d,a\n";

/// CSV lines without the leading comment block.
fn data_lines(text: &str) -> Vec<&str> {
    text.lines().filter(|l| !l.starts_with('#')).collect()
}

#[test]
fn report_rows_match_the_library() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "paths.txt", BRANCHING);
    let out = stdout(&honkit(&["report", "--input", &input, "--max-order", "3"]));
    let corpus = parse_str(BRANCHING, Format::Lines).unwrap();
    let expected =
        report_rows(&multi_order_reports(&corpus, 3, &ReportOptions::default()).unwrap());
    let rows = data_lines(&out);
    assert_eq!(rows.len(), 4);
    assert_eq!(rows.join("\n") + "\n", expected);
    assert!(out.contains("# max_order=3\n"));
}

#[test]
fn deterministic_corpus_selects_order_one() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "det.txt", "a,b,c,d\na,b,c\nb,c,d\n");
    let out = stdout(&honkit(&["order", "-i", &input]));
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["result"]["optimal_order"], 1);
    assert_eq!(v["config"]["epsilon"], 0.05);
    let row = &v["result"]["trace"][0];
    for key in ["k", "lambda", "delta_d", "p_value"] {
        assert!(row.get(key).is_some(), "{key} missing");
    }
}

#[test]
fn self_comparison() {
    let dir = tempfile::tempdir().unwrap();
    let a = write(dir.path(), "a.txt", BRANCHING);
    let out = stdout(&honkit(&[
        "compare",
        "--a",
        &a,
        "--b",
        &a,
        "--max-order",
        "2",
    ]));
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    for s in v["result"]["report"]["similarity"].as_array().unwrap() {
        assert!((s["cosine"].as_f64().unwrap() - 1.0).abs() < 1e-12, "{s}");
    }
    for o in v["result"]["report"]["orders"].as_array().unwrap() {
        assert!(o["kl_divergence"].as_f64().unwrap() <= 1e-10);
    }
    let kl = v["result"]["csv"]["kl"].as_str().unwrap();
    assert!(kl.starts_with("order,kl_divergence\n1,"));

    let csv = stdout(&honkit(&[
        "compare",
        "--a",
        &a,
        "--b",
        &a,
        "--max-order",
        "2",
        "--format",
        "csv",
    ]));
    for block in ["cosine", "kl", "metric_curves", "tau_accuracy"] {
        assert!(csv.contains(&format!("# block={block}\n")));
    }
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "paths.txt", BRANCHING);
    for args in [
        vec!["report", "-i", &input],
        vec!["pagerank", "-i", &input],
        vec!["predict", "-i", &input, "--holdout"],
        vec!["synth", "--paths", "50"],
    ] {
        assert_eq!(stdout(&honkit(&args)), stdout(&honkit(&args)), "{args:?}");
    }
}

#[test]
fn build_serializations() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "p.txt", "a,b,c,2\na,b,d,1\n");
    let out = stdout(&honkit(&[
        "build",
        "-i",
        &input,
        "--order",
        "2",
        "--input-format",
        "ngram",
    ]));
    assert_eq!(
        data_lines(&out),
        [
            "from_state,to_state,count,probability",
            "a|b,b|c,2,0.6666666666666666",
            "a|b,b|d,1,0.3333333333333333"
        ]
    );
    let out = stdout(&honkit(&[
        "build",
        "-i",
        &input,
        "--order",
        "1",
        "--input-format",
        "ngram",
        "--edge-list",
    ]));
    assert_eq!(data_lines(&out), ["u,v,count", "a,b,3", "b,c,2", "b,d,1"]);
    let out = stdout(&honkit(&[
        "build",
        "-i",
        &input,
        "--order",
        "1",
        "--input-format",
        "ngram",
        "--format",
        "json",
    ]));
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["result"]["edge_count"], 3);
}

#[test]
fn pagerank_and_scores_file() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "p.txt", BRANCHING);
    let scores = dir.path().join("scores.csv");
    let out = stdout(&honkit(&[
        "pagerank",
        "-i",
        &input,
        "--max-order",
        "2",
        "--scores",
        scores.to_str().unwrap(),
    ]));
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    let points = v["result"].as_array().unwrap();
    assert_eq!(points.len(), 2);
    for key in ["order", "tau", "converged", "iterations"] {
        assert!(points[0].get(key).is_some(), "{key}");
    }
    let text = fs::read_to_string(scores).unwrap();
    let rows = data_lines(&text);
    assert_eq!(rows[0], "order,node,score");
    let total: f64 = rows[1..]
        .iter()
        .filter(|r| r.starts_with("1,"))
        .map(|r| r.rsplit(',').next().unwrap().parse::<f64>().unwrap())
        .sum();
    assert!((total - 1.0).abs() < 1e-10);
}

#[test]
fn predict_protocols() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "p.txt", BRANCHING);
    let out = stdout(&honkit(&["predict", "-i", &input, "--max-order", "2"]));
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    let rows = v["result"].as_array().unwrap();
    assert_eq!(rows.len(), 2);
    assert!(rows.iter().all(|r| r["protocol"] == "in_sample"));

    let synth = stdout(&honkit(&["synth", "--paths", "200", "--order", "2"]));
    let corpus = write(dir.path(), "synth.txt", &synth);
    let out = stdout(&honkit(&[
        "predict",
        "-i",
        &corpus,
        "--max-order",
        "3",
        "--holdout",
    ]));
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    let protocols: Vec<&str> = v["result"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["protocol"].as_str().unwrap())
        .collect();
    assert_eq!(
        protocols,
        [
            "in_sample",
            "in_sample",
            "in_sample",
            "holdout",
            "holdout",
            "holdout"
        ]
    );
}

#[test]
fn synth_writes_lines_format() {
    let out = stdout(&honkit(&[
        "synth",
        "--paths",
        "30",
        "--min-len",
        "5",
        "--max-len",
        "5",
        "--seed",
        "3",
    ]));
    let corpus = parse_str(&out, Format::Lines).unwrap();
    assert_eq!(corpus.instance_count(), 30);
    assert!(corpus.paths().iter().all(|p| p.len() == 5));
    assert!(out.starts_with("# command=synth\n"));
    assert_ne!(
        out,
        stdout(&honkit(&[
            "synth",
            "--paths",
            "30",
            "--min-len",
            "5",
            "--max-len",
            "5",
            "--seed",
            "4"
        ]))
    );
}

#[test]
fn stats_and_stdin() {
    let mut child = Command::new(env!("CARGO_BIN_EXE_honkit"))
        .args(["stats", "-i", "-"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    use std::io::Write;
    child
        .stdin
        .take()
        .unwrap()
        .write_all(b"a,b,c\na,b\n")
        .unwrap();
    let out = stdout(&child.wait_with_output().unwrap());
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["result"]["path_count"], 2);
    assert_eq!(v["result"]["mean_transitions"], 1.5);
}

#[test]
fn environment_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "p.txt", BRANCHING);
    let rows = |o: Output| data_lines(&stdout(&o)).len() - 1;
    assert_eq!(rows(honkit(&["report", "-i", &input])), 5);
    assert_eq!(
        rows(honkit_env(
            &["report", "-i", &input],
            &[("HONKIT_MAX_ORDER", "2")]
        )),
        2
    );
    assert_eq!(
        rows(honkit_env(
            &["report", "-i", &input, "--max-order", "3"],
            &[("HONKIT_MAX_ORDER", "2")]
        )),
        3
    );
}

#[test]
fn output_file() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "p.txt", BRANCHING);
    let target = dir.path().join("out.csv");
    let o = honkit(&["report", "-i", &input, "-o", target.to_str().unwrap()]);
    assert!(stdout(&o).is_empty());
    assert!(fs::read_to_string(target)
        .unwrap()
        .contains("order,node_count"));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let good = write(dir.path(), "good.txt", BRANCHING);
    let bad = write(dir.path(), "bad.txt", "a,b\n\na,,b\n");

    assert_eq!(honkit(&["--help"]).status.code(), Some(0));
    assert_eq!(honkit(&["--version"]).status.code(), Some(0));
    assert_eq!(honkit(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(
        honkit(&["report", "-i", &good, "--bogus"]).status.code(),
        Some(1)
    );
    assert_eq!(
        honkit(&["order", "-i", &good, "--epsilon", "1.5"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        honkit(&["report", "-i", &good, "--max-order", "0"])
            .status
            .code(),
        Some(1)
    );

    let missing = honkit(&["report", "-i", "/nonexistent/paths.txt"]);
    assert_eq!(missing.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&missing.stderr).contains("/nonexistent/paths.txt"));

    let o = honkit(&["report", "-i", &bad]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("bad.txt") && err.contains("line 3"), "{err}");

    let o = honkit(&["stats", "-i", &good, "--input-format", "ngram"]);
    assert_eq!(o.status.code(), Some(2));
}
