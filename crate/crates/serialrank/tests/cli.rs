//! End-to-end checks of the `serialrank` binary: output files, stdout
//! contract, determinism, the `--seed` override, and the exit-code split
//! between usage errors (2) and runtime failures (1).

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_serialrank"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("stdout is utf-8")
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("stderr is utf-8")
}

fn exit(out: &Output) -> i32 {
    out.status.code().expect("no signal")
}

/// Round robin where `t1` beats everyone, `t2` beats everyone but `t1`, etc.
fn consistent_matchlist(dir: &Path, n: usize) -> std::path::PathBuf {
    let mut body = String::new();
    for i in 1..=n {
        for j in (i + 1)..=n {
            body.push_str(&format!("t{i},t{j},1\n"));
        }
    }
    let path = dir.join("matches.csv");
    fs::write(&path, body).unwrap();
    path
}

#[test]
fn rank_ranks_a_consistent_file_and_writes_csvs() {
    let dir = TempDir::new().unwrap();
    let file = consistent_matchlist(dir.path(), 8);
    let out_dir = dir.path().join("out");

    let out = run(&[
        "rank",
        file.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(exit(&out), 0, "stderr: {}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("ranked 8 items with serialrank"), "{text}");
    assert_eq!(text.matches("wrote ").count(), 2, "{text}");

    let ranking = fs::read_to_string(out_dir.join("ranking.csv")).unwrap();
    let mut lines = ranking.lines();
    assert_eq!(lines.next(), Some("rank,label,value"));
    let first = lines.next().unwrap();
    assert!(first.starts_with("1,t1,"), "{first}");
    assert_eq!(ranking.lines().count(), 9);

    let upsets = fs::read_to_string(out_dir.join("upsets.csv")).unwrap();
    assert_eq!(upsets.lines().next(), Some("k,upset_fraction,pairs,vacuous"));
    // Every cutoff of a consistent tournament is upset-free.
    for line in upsets.lines().skip(1) {
        assert_eq!(line.split(',').nth(1), Some("0"), "{line}");
    }
}

#[test]
fn rank_merges_the_topk_cutoff_into_the_upset_table() {
    let dir = TempDir::new().unwrap();
    let file = consistent_matchlist(dir.path(), 8);
    let out_dir = dir.path().join("out");

    let out = run(&[
        "rank",
        file.to_str().unwrap(),
        "--topk",
        "3",
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(exit(&out), 0, "stderr: {}", stderr(&out));
    let upsets = fs::read_to_string(out_dir.join("upsets.csv")).unwrap();
    assert!(
        upsets.lines().any(|l| l.starts_with("3,")),
        "cutoff 3 missing from:\n{upsets}"
    );
}

#[test]
fn rank_reports_missing_files_as_runtime_failures() {
    let out = run(&["rank", "/no/such/file.csv"]);
    assert_eq!(exit(&out), 1);
    assert!(stderr(&out).starts_with("error: "), "{}", stderr(&out));
}

#[test]
fn rank_names_the_groups_of_a_disconnected_tournament() {
    let dir = TempDir::new().unwrap();
    let file = dir.path().join("split.csv");
    fs::write(&file, "ape,bat,1\ncat,dog,1\n").unwrap();

    let out = run(&[
        "rank",
        file.to_str().unwrap(),
        "--method",
        "rank-centrality",
    ]);
    assert_eq!(exit(&out), 1);
    let err = stderr(&out);
    assert!(err.contains("disconnected"), "{err}");
    assert!(err.contains("ape") && err.contains("cat"), "{err}");
}

#[test]
fn unknown_method_is_a_usage_error() {
    let dir = TempDir::new().unwrap();
    let file = consistent_matchlist(dir.path(), 4);
    let out = run(&["rank", file.to_str().unwrap(), "--method", "nope"]);
    assert_eq!(exit(&out), 2);
}

fn bench_config(dir: &Path, seed: u64, out_dir: &Path) -> std::path::PathBuf {
    let cfg = format!(
        r#"{{
  "n": 10,
  "trials": 3,
  "methods": ["serialrank", "point-score"],
  "sweep": {{ "parameter": "corrupt-fraction", "grid": [0.0, 0.2] }},
  "seed": {seed},
  "output": "{}"
}}"#,
        out_dir.display()
    );
    let path = dir.join("bench.json");
    fs::write(&path, cfg).unwrap();
    path
}

#[test]
fn bench_writes_three_deterministic_files() {
    let dir = TempDir::new().unwrap();
    let out_dir = dir.path().join("results");
    let cfg = bench_config(dir.path(), 7, &out_dir);

    let out = run(&["bench", "--config", cfg.to_str().unwrap()]);
    assert_eq!(exit(&out), 0, "stderr: {}", stderr(&out));
    assert_eq!(stdout(&out).matches("wrote ").count(), 3);

    let summary = fs::read_to_string(out_dir.join("summary.csv")).unwrap();
    let trials = fs::read_to_string(out_dir.join("trials.csv")).unwrap();
    let svg = fs::read_to_string(out_dir.join("sweep.svg")).unwrap();
    // One aggregate row per (method, grid value).
    assert_eq!(summary.lines().count(), 1 + 2 * 2);
    assert_eq!(trials.lines().count(), 1 + 2 * 2 * 3);
    assert!(svg.starts_with("<svg"));
    assert!(svg.ends_with("</svg>\n"));

    let again = run(&["bench", "--config", cfg.to_str().unwrap()]);
    assert_eq!(exit(&again), 0);
    assert_eq!(summary, fs::read_to_string(out_dir.join("summary.csv")).unwrap());
    assert_eq!(trials, fs::read_to_string(out_dir.join("trials.csv")).unwrap());
    assert_eq!(svg, fs::read_to_string(out_dir.join("sweep.svg")).unwrap());
}

#[test]
fn bench_seed_flag_overrides_the_config_seed() {
    let dir = TempDir::new().unwrap();
    let out_dir = dir.path().join("results");
    let cfg = bench_config(dir.path(), 7, &out_dir);

    let read_trials = || fs::read_to_string(out_dir.join("trials.csv")).unwrap();
    assert_eq!(exit(&run(&["--seed", "9", "bench", "--config", cfg.to_str().unwrap()])), 0);
    let seed_nine = read_trials();
    assert_eq!(exit(&run(&["--seed", "9", "bench", "--config", cfg.to_str().unwrap()])), 0);
    assert_eq!(seed_nine, read_trials(), "same seed must replay identically");
    assert_eq!(exit(&run(&["bench", "--config", cfg.to_str().unwrap()])), 0);
    assert_ne!(seed_nine, read_trials(), "config seed 7 must differ from override 9");
}

#[test]
fn bench_separates_config_mistakes_from_runtime_failures() {
    let dir = TempDir::new().unwrap();

    let invalid = dir.path().join("invalid.json");
    fs::write(
        &invalid,
        r#"{ "n": 10, "trials": 0, "methods": ["serialrank"],
             "sweep": { "parameter": "corrupt-fraction", "grid": [0.1] }, "seed": 1, "output": "." }"#,
    )
    .unwrap();
    let out = run(&["bench", "--config", invalid.to_str().unwrap()]);
    assert_eq!(exit(&out), 2, "zero trials is a config error: {}", stderr(&out));

    let malformed = dir.path().join("malformed.json");
    fs::write(&malformed, "{ not json").unwrap();
    let out = run(&["bench", "--config", malformed.to_str().unwrap()]);
    assert_eq!(exit(&out), 2, "unparseable config: {}", stderr(&out));

    let out = run(&["bench", "--config", "/no/such/config.json"]);
    assert_eq!(exit(&out), 1, "missing file is a runtime failure: {}", stderr(&out));
}

#[test]
fn probe_writes_an_exact_zero_row_at_full_observation() {
    let dir = TempDir::new().unwrap();
    let out = run(&[
        "probe",
        "--n",
        "16",
        "--q-grid",
        "1.0",
        "--trials",
        "5",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(exit(&out), 0, "stderr: {}", stderr(&out));

    let csv = fs::read_to_string(dir.path().join("probe.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("q,trials,misses,mean_fiedler_l2,mean_linf"));
    // The clean reference is the q = 1, p = 1 pipeline itself, so the
    // noiseless row is exactly zero, not merely small.
    assert_eq!(lines.next(), Some("1,5,0,0.000000000,0.000000"));
}

#[test]
fn probe_rejects_out_of_range_probabilities() {
    let out = run(&["probe", "--n", "16", "--q-grid", "0.0"]);
    assert_eq!(exit(&out), 2, "stderr: {}", stderr(&out));
    assert!(stderr(&out).contains("q"), "{}", stderr(&out));
}

#[test]
fn diagnose_prints_machine_readable_json() {
    let dir = TempDir::new().unwrap();
    let file = consistent_matchlist(dir.path(), 6);
    let dump = dir.path().join("sim.csv");

    let out = run(&[
        "diagnose",
        file.to_str().unwrap(),
        "--dump-similarity",
        dump.to_str().unwrap(),
    ]);
    assert_eq!(exit(&out), 0, "stderr: {}", stderr(&out));

    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["similarity"], "match");
    assert_eq!(report["fiedler_simple"], true);
    assert_eq!(report["ranks"].as_array().unwrap().len(), 6);
    assert!(report["eigenvalues"].as_array().unwrap().len() >= 2);

    let sim = fs::read_to_string(&dump).unwrap();
    assert!(sim.lines().count() > 6, "similarity dump present:\n{sim}");
}
