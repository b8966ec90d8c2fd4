//! End-to-end tests of the `seqanon` binary: worked examples, output
//! layout, determinism, exit codes, atomic writes, and help snapshots.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use seqanon::seqio::parse_fasta;
use tempfile::TempDir;

fn run_in(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_seqanon"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary launches")
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("stdout is UTF-8")
}

fn stderr_of(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("stderr is UTF-8")
}

fn exit_code(out: &Output) -> i32 {
    out.status.code().expect("terminated by exit, not signal")
}

/// A small corpus with family structure, written as `corpus.fasta`.
fn write_corpus(dir: &Path) {
    let out = run_in(
        dir,
        &[
            "synth",
            "--families",
            "3",
            "--copies",
            "4",
            "--length",
            "120",
            "--substitution-rate",
            "0.02",
            "--seed",
            "0",
            "--output",
            "corpus.fasta",
        ],
    );
    assert_eq!(exit_code(&out), 0, "synth failed: {}", stderr_of(&out));
}

fn no_temp_files(dir: &Path) {
    for entry in fs::read_dir(dir).unwrap() {
        let name = entry.unwrap().file_name().to_string_lossy().into_owned();
        assert!(!name.starts_with(".seqanon."), "leftover temp file {name}");
    }
}

#[test]
fn distance_reproduces_the_prealigned_worked_example() {
    let dir = TempDir::new().unwrap();
    fs::write(dir.path().join("q.fasta"), ">q\nCCTGTAAA\n").unwrap();
    fs::write(dir.path().join("h.fasta"), ">h\nCA-GTRAA\n").unwrap();
    let out = run_in(dir.path(), &["distance", "q.fasta", "h.fasta"]);
    assert_eq!(exit_code(&out), 0, "{}", stderr_of(&out));
    assert_eq!(stdout_of(&out), "CCTGTAAA\nCA-GTRAA\nCMNGTRAA\n7\n");
}

#[test]
fn distance_aligns_ungapped_inputs_first() {
    let dir = TempDir::new().unwrap();
    fs::write(dir.path().join("a.fasta"), ">a\nACGTTATA\n").unwrap();
    fs::write(dir.path().join("b.fasta"), ">b\nACGTCATA\n").unwrap();
    let out = run_in(dir.path(), &["distance", "a.fasta", "b.fasta"]);
    assert_eq!(exit_code(&out), 0, "{}", stderr_of(&out));
    let text = stdout_of(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines, ["ACGTTATA", "ACGTCATA", "ACGTYATA", "2"]);
}

#[test]
fn obfuscate_writes_fasta_and_report_with_default_paths() {
    let dir = TempDir::new().unwrap();
    write_corpus(dir.path());
    let out = run_in(
        dir.path(),
        &["obfuscate", "corpus.fasta", "--word-size", "8", "--seed", "3"],
    );
    assert_eq!(exit_code(&out), 0, "{}", stderr_of(&out));

    let input = parse_fasta(&fs::read_to_string(dir.path().join("corpus.fasta")).unwrap()).unwrap();
    let fasta = fs::read_to_string(dir.path().join("corpus.obfuscated.fasta")).unwrap();
    let output = parse_fasta(&fasta).unwrap();
    assert_eq!(output.len(), 6);

    // The cluster ids partition the input ids exactly.
    let mut members: Vec<String> = output
        .iter()
        .flat_map(|r| r.id().split('+').map(str::to_string))
        .collect();
    members.sort();
    let mut expected: Vec<String> = input.iter().map(|r| r.id().to_string()).collect();
    expected.sort();
    assert_eq!(members, expected);

    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("corpus.report.json")).unwrap())
            .unwrap();
    assert_eq!(report["method"], "itermegablast");
    assert_eq!(report["n_sequences"], 12);
    assert_eq!(report["n_clusters"], 6);
    assert_eq!(report["seed"], 3);
    let cluster_sum: u64 = report["clusters"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["loss_total"].as_u64().unwrap())
        .sum();
    assert_eq!(report["total_distance"].as_u64().unwrap(), cluster_sum);
    no_temp_files(dir.path());
}

/// Run the synth + obfuscate pipeline in a fresh directory and return the
/// obfuscated FASTA bytes and the report with its timing field blanked.
fn pipeline_artifacts(extra: &[&str]) -> (String, serde_json::Value) {
    let dir = TempDir::new().unwrap();
    write_corpus(dir.path());
    let mut args =
        vec!["obfuscate", "corpus.fasta", "--word-size", "8", "--seed", "5"];
    args.extend_from_slice(extra);
    let out = run_in(dir.path(), &args);
    assert_eq!(exit_code(&out), 0, "{}", stderr_of(&out));
    let fasta = fs::read_to_string(dir.path().join("corpus.obfuscated.fasta")).unwrap();
    let mut report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("corpus.report.json")).unwrap())
            .unwrap();
    report["wall_time"] = serde_json::Value::Null;
    (fasta, report)
}

#[test]
fn obfuscate_is_deterministic_for_a_fixed_seed() {
    let first = pipeline_artifacts(&[]);
    let second = pipeline_artifacts(&[]);
    assert_eq!(first.0, second.0);
    assert_eq!(first.1, second.1);
}

#[test]
fn thread_count_does_not_change_outputs() {
    let single = pipeline_artifacts(&["--method", "mwm", "--threads", "1"]);
    let multi = pipeline_artifacts(&["--method", "mwm", "--threads", "3"]);
    assert_eq!(single.0, multi.0);
    assert_eq!(single.1, multi.1);
}

#[test]
fn repeat_emits_an_aggregate_and_no_fasta() {
    let dir = TempDir::new().unwrap();
    write_corpus(dir.path());
    let out = run_in(
        dir.path(),
        &[
            "obfuscate",
            "corpus.fasta",
            "--word-size",
            "8",
            "--method",
            "greedy",
            "--repeat",
            "3",
            "--format",
            "tsv",
        ],
    );
    assert_eq!(exit_code(&out), 0, "{}", stderr_of(&out));
    assert!(!dir.path().join("corpus.obfuscated.fasta").exists());
    let report = fs::read_to_string(dir.path().join("corpus.report.tsv")).unwrap();
    assert!(report.starts_with("# schema=seqanon-aggregate-v1\n"));
    let data_rows = report.lines().filter(|l| !l.starts_with('#')).count();
    assert_eq!(data_rows, 1 + 3, "header plus one row per seed");
}

#[test]
fn missing_input_fails_with_a_path_bearing_message() {
    let dir = TempDir::new().unwrap();
    let out = run_in(dir.path(), &["obfuscate", "nope.fasta"]);
    assert_eq!(exit_code(&out), 1);
    assert!(stderr_of(&out).contains("nope.fasta"));
}

#[test]
fn unknown_method_is_rejected_before_any_work() {
    let dir = TempDir::new().unwrap();
    write_corpus(dir.path());
    let out = run_in(dir.path(), &["obfuscate", "corpus.fasta", "--method", "bogus"]);
    assert_eq!(exit_code(&out), 1);
    assert!(stderr_of(&out).contains("unknown method"));
    assert!(!dir.path().join("corpus.obfuscated.fasta").exists());
}

#[test]
fn repeat_conflicts_with_an_explicit_fasta_path() {
    let dir = TempDir::new().unwrap();
    write_corpus(dir.path());
    let out = run_in(
        dir.path(),
        &["obfuscate", "corpus.fasta", "--repeat", "2", "--output", "x.fasta"],
    );
    assert_eq!(exit_code(&out), 1);
    assert!(stderr_of(&out).contains("--output conflicts"));
    assert!(!dir.path().join("x.fasta").exists());
}

#[test]
fn bare_invocation_shows_usage_and_fails() {
    let dir = TempDir::new().unwrap();
    let out = run_in(dir.path(), &[]);
    assert_eq!(exit_code(&out), 1);
    assert!(stderr_of(&out).contains("Usage:"));
}

#[test]
fn report_into_a_missing_directory_leaves_no_file() {
    let dir = TempDir::new().unwrap();
    write_corpus(dir.path());
    let out = run_in(
        dir.path(),
        &[
            "obfuscate",
            "corpus.fasta",
            "--word-size",
            "8",
            "--report",
            "missing/report.json",
        ],
    );
    assert_eq!(exit_code(&out), 1);
    assert!(!dir.path().join("missing").exists());
    no_temp_files(dir.path());
}

fn bench_args() -> Vec<&'static str> {
    vec![
        "bench",
        "--sizes",
        "4,7",
        "--methods",
        "itermegablast,greedy",
        "--repeat",
        "2",
        "--word-size",
        "8",
        "--synth-families",
        "3",
        "--synth-copies",
        "4",
        "--synth-length",
        "100",
        "--synth-substitution-rate",
        "0.02",
        "--synth-seed",
        "1",
    ]
}

/// The bench table with its wall-time columns removed.
fn strip_timing(table: &str) -> String {
    table
        .lines()
        .map(|line| {
            if line.starts_with('#') {
                return line.to_string();
            }
            let cells: Vec<&str> = line.split('\t').collect();
            cells
                .iter()
                .enumerate()
                .filter(|(ix, _)| !(7..10).contains(ix))
                .map(|(_, c)| *c)
                .collect::<Vec<_>>()
                .join("\t")
        })
        .collect::<Vec<_>>()
        .join("\n")
}

#[test]
fn bench_table_is_deterministic_and_bounds_search_invocations() {
    let dir = TempDir::new().unwrap();
    let first = run_in(dir.path(), &bench_args());
    assert_eq!(exit_code(&first), 0, "{}", stderr_of(&first));
    let table = stdout_of(&first);

    let rows: Vec<&str> =
        table.lines().filter(|l| !l.starts_with('#') && !l.starts_with("size")).collect();
    assert_eq!(rows.len(), 4, "two sizes x two methods");
    for row in &rows {
        let cells: Vec<&str> = row.split('\t').collect();
        assert_eq!(cells.len(), 10);
        if cells[1] == "itermegablast" {
            let size: usize = cells[0].parse().unwrap();
            let searches: usize = cells[6].parse().unwrap();
            assert!(searches <= size / 2, "{searches} searches for size {size}");
        }
    }

    let second = run_in(dir.path(), &bench_args());
    assert_eq!(exit_code(&second), 0);
    assert_eq!(strip_timing(&table), strip_timing(&stdout_of(&second)));
}

#[test]
fn bench_rejects_oversized_prefixes() {
    let dir = TempDir::new().unwrap();
    let out = run_in(
        dir.path(),
        &["bench", "--sizes", "99", "--synth-families", "3", "--synth-copies", "4", "--synth-length", "50"],
    );
    assert_eq!(exit_code(&out), 1);
    assert!(stderr_of(&out).contains("exceeds dataset"));
}

#[test]
fn matrix_emits_symmetric_tsv() {
    let dir = TempDir::new().unwrap();
    write_corpus(dir.path());
    let out = run_in(
        dir.path(),
        &["matrix", "corpus.fasta", "--word-size", "8", "--output", "m.tsv"],
    );
    assert_eq!(exit_code(&out), 0, "{}", stderr_of(&out));
    let tsv = fs::read_to_string(dir.path().join("m.tsv")).unwrap();
    let mut lines = tsv.lines();
    let labels: Vec<&str> = lines.next().unwrap().split('\t').skip(1).collect();
    assert_eq!(labels.len(), 12);
    let cells: Vec<Vec<u64>> = lines
        .map(|l| l.split('\t').skip(1).map(|c| c.parse().unwrap()).collect())
        .collect();
    assert_eq!(cells.len(), 12);
    for i in 0..12 {
        assert_eq!(cells[i][i], 0);
        for j in 0..12 {
            assert_eq!(cells[i][j], cells[j][i]);
        }
    }
    no_temp_files(dir.path());
}

#[test]
fn synth_is_deterministic_and_parses() {
    let dir = TempDir::new().unwrap();
    let args = ["synth", "--families", "2", "--copies", "3", "--length", "80", "--seed", "4"];
    let first = run_in(dir.path(), &args);
    let second = run_in(dir.path(), &args);
    assert_eq!(exit_code(&first), 0);
    assert_eq!(stdout_of(&first), stdout_of(&second));
    let db = parse_fasta(&stdout_of(&first)).unwrap();
    assert_eq!(db.len(), 6);
    assert_eq!(db.get(0).id(), "f0c0");
}

#[test]
fn tables_prints_both_sections() {
    let dir = TempDir::new().unwrap();
    let out = run_in(dir.path(), &["tables"]);
    assert_eq!(exit_code(&out), 0);
    let text = stdout_of(&out);
    assert!(text.contains("# table=generalize\n"));
    assert!(text.contains("# table=distance\n"));
    // Gap row of the distance table: 4 against bases, 0 on the diagonal, 1
    // against N.
    assert!(text.contains("\n-\t4\t4\t4\t4\t3\t3\t3\t3\t3\t3\t2\t2\t2\t2\t0\t1\n"));
}

#[test]
fn help_snapshots_are_current() {
    let cases: [(&str, Option<&str>); 7] = [
        (include_str!("snapshots/main.txt"), None),
        (include_str!("snapshots/obfuscate.txt"), Some("obfuscate")),
        (include_str!("snapshots/distance.txt"), Some("distance")),
        (include_str!("snapshots/matrix.txt"), Some("matrix")),
        (include_str!("snapshots/bench.txt"), Some("bench")),
        (include_str!("snapshots/synth.txt"), Some("synth")),
        (include_str!("snapshots/tables.txt"), Some("tables")),
    ];
    let dir = TempDir::new().unwrap();
    for (snapshot, subcommand) in cases {
        let mut args = Vec::new();
        if let Some(sub) = subcommand {
            args.push(sub);
        }
        args.push("--help");
        let out = run_in(dir.path(), &args);
        assert_eq!(exit_code(&out), 0);
        assert_eq!(stdout_of(&out), snapshot, "stale snapshot for {subcommand:?}");
    }
}
