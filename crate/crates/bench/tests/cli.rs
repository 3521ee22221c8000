use std::process::{Command, Output};

use batchsim_bench::CSV_HEADER;

fn batchsim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_batchsim")).args(args).output().unwrap()
}

fn stdout(output: &Output) -> String {
    String::from_utf8(output.stdout.clone()).unwrap()
}

#[test]
fn counts_command() {
    let out = batchsim(&["counts", "--types", "2", "--max-batch-len", "2", "--composed"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("total:     12"), "{text}");
    assert!(text.contains("reachable: 6"), "{text}");
    assert!(text.contains("(matches)"), "{text}");
}

#[test]
fn counts_beyond_compiled_tables_fail() {
    let out = batchsim(&["counts", "--types", "6", "--max-batch-len", "2", "--composed"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));
}

#[test]
fn smax_command() {
    let out = batchsim(&["smax", "--max-batch-len", "5", "--p-set", "0.5", "--monte-carlo", "--samples", "10000"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("s_max:  2.580645"), "{text}");
    assert!(text.contains("Monte-Carlo"), "{text}");
}

#[test]
fn smax_rejects_degenerate_probability() {
    for p in ["0", "1"] {
        let out = batchsim(&["smax", "--p-set", p]);
        assert!(!out.status.success());
        assert!(String::from_utf8_lossy(&out.stderr).contains("degenerate"));
    }
}

#[test]
fn run_writes_reproducible_csv() {
    let dir = tempfile::tempdir().unwrap();
    let args = |path: &str| {
        batchsim(&[
            "run", "--max-batch-len", "3", "--p-set", "0.25", "--events", "500", "--iterations", "100", "--runs",
            "3", "--seed", "5", "--out", path,
        ])
    };
    let first = dir.path().join("a.csv");
    let second = dir.path().join("b.csv");
    assert!(args(first.to_str().unwrap()).status.success());
    assert!(args(second.to_str().unwrap()).status.success());

    let read = |path| {
        let mut reader = csv::Reader::from_path(path).unwrap();
        let header = reader.headers().unwrap().iter().collect::<Vec<_>>().join(",");
        assert_eq!(header, CSV_HEADER);
        reader.records().map(|r| r.unwrap()).collect::<Vec<_>>()
    };
    let (a, b) = (read(&first), read(&second));
    assert_eq!(a.len(), 6);
    // Everything except wall time and speedup is deterministic.
    for (x, y) in a.iter().zip(&b) {
        for column in [0, 1, 2, 3, 4, 5, 6, 9, 10] {
            assert_eq!(x[column], y[column]);
        }
    }
    let seeds: Vec<&str> = a.iter().map(|r| &r[5]).collect();
    assert_eq!(seeds, ["5", "5", "6", "6", "7", "7"]);
}

#[test]
fn run_csv_to_stdout_in_single_mode() {
    let out = batchsim(&[
        "run", "--mode", "baseline", "--events", "100", "--iterations", "10", "--runs", "2", "--out", "-",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], CSV_HEADER);
    assert_eq!(lines.len(), 3);
    assert!(lines[1..].iter().all(|l| l.contains(",baseline,") && l.contains(",,")));
}

#[test]
fn invalid_run_arguments_fail() {
    assert!(!batchsim(&["run", "--max-batch-len", "7"]).status.success());
    assert!(!batchsim(&["run", "--runs", "0"]).status.success());
    assert!(!batchsim(&["run", "--mode", "sideways"]).status.success());
}
