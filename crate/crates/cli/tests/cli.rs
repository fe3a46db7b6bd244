//! End-to-end tests of the command-line surface: byte-determinism, file
//! round-trips, error tokens, and agreement between `enumerate` and `stats`.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn modcon(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_modcon"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn write(dir: &Path, name: &str, contents: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, contents).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn check_reports_seed_graph_admissible() {
    let dir = tempfile::tempdir().unwrap();
    let e = write(dir.path(), "e.mat", "3 2 2\n0 1\n0 1\n");
    let out = modcon(&["check", &e]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("admissible=true"));
    assert!(text.contains("left_eigvec=0 1"));
    assert!(text.contains("p_dot_one=1"));
    assert!(text.contains("laplacian=1 2; 0 0"));
}

#[test]
fn check_rejects_non_prime_modulus_with_token() {
    let dir = tempfile::tempdir().unwrap();
    let e = write(dir.path(), "e.mat", "4 2 2\n0 1\n0 1\n");
    let out = modcon(&["check", &e]);
    assert!(!out.status.success());
    assert!(stderr(&out).contains("ParseError"));
}

#[test]
fn check_rejects_out_of_range_entry_with_line() {
    let dir = tempfile::tempdir().unwrap();
    let e = write(dir.path(), "e.mat", "3 2 2\n0 5\n0 1\n");
    let out = modcon(&["check", &e]);
    assert!(!out.status.success());
    let err = stderr(&out);
    assert!(err.contains("ParseError") && err.contains("line 2"), "{err}");
}

#[test]
fn gen_is_byte_deterministic_per_seed() {
    let args = [
        "gen", "--method", "sar", "--n", "3", "--p", "5", "--count", "5", "--seed", "12345",
    ];
    let a = modcon(&args);
    let b = modcon(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout, "same command + same seed = same bytes");

    let c = modcon(&[
        "gen", "--method", "sar", "--n", "3", "--p", "5", "--count", "5", "--seed", "54321",
    ]);
    assert_ne!(a.stdout, c.stdout, "different seed should move the stream");
}

#[test]
fn gen_requires_seed() {
    let out = modcon(&["gen", "--method", "sar", "--n", "2", "--p", "3"]);
    assert!(!out.status.success());
}

#[test]
fn gen_reports_impossible_config_token() {
    let out = modcon(&[
        "gen", "--method", "sar", "--n", "2", "--p", "2", "--seed", "1",
    ]);
    assert!(!out.status.success());
    assert!(stderr(&out).contains("ImpossibleConfig"));
}

#[test]
fn gen_dedup_cosets_collapses_to_representatives() {
    let out = modcon(&[
        "gen", "--method", "sar", "--n", "2", "--p", "3", "--count", "40", "--seed", "9",
        "--dedup-cosets",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    let records: Vec<&str> = text.split("\n\n").filter(|s| !s.trim().is_empty()).collect();
    // the four non-permutation matrices form two cosets; 40 draws cover both
    assert_eq!(records.len(), 2, "{text}");
}

#[test]
fn gen_output_file_roundtrips_through_transform() {
    let dir = tempfile::tempdir().unwrap();
    let t_path = dir.path().join("t.mat");
    let out = modcon(&[
        "gen", "--method", "stabilizer", "--n", "3", "--p", "5", "--count", "1", "--seed", "4",
        "-o", t_path.to_str().unwrap(),
    ]);
    assert!(out.status.success());

    // identity transform returns the parsed matrix byte-for-byte
    let id = write(dir.path(), "id.mat", "5 3 3\n1 0 0\n0 1 0\n0 0 1\n");
    let emitted = fs::read_to_string(&t_path).unwrap();
    let out = modcon(&["transform", "-E", t_path.to_str().unwrap(), "-T", &id]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), emitted);
}

#[test]
fn enumerate_counts_match_stats_closed_forms() {
    for (n, p) in [("2", "2"), ("2", "3"), ("3", "2"), ("3", "3")] {
        for (set, key) in [
            ("mrs", "m_rs"),
            ("grs", "g_rs"),
            ("urs", "u_rs"),
            ("perm", "perms"),
        ] {
            let enum_out = modcon(&["enumerate", "--n", n, "--p", p, "--set", set]);
            assert!(enum_out.status.success());
            let text = stdout(&enum_out);
            let count_line = text
                .lines()
                .find(|l| l.starts_with("count="))
                .expect("count line");
            let count = count_line.trim_start_matches("count=").to_string();

            let stats_out = modcon(&["stats", "--n", n, "--p", p]);
            let stats_text = stdout(&stats_out);
            let expected = stats_text
                .lines()
                .find(|l| l.starts_with(&format!("{key}=")))
                .unwrap()
                .split('=')
                .nth(1)
                .unwrap()
                .to_string();
            assert_eq!(count, expected, "set {set} at ({n},{p})");
        }
    }
}

#[test]
fn enumerate_emits_parseable_records() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("grs.txt");
    let out = modcon(&[
        "enumerate", "--n", "2", "--p", "3", "--set", "grs", "-o",
        out_path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).trim(), "count=6");
    let text = fs::read_to_string(&out_path).unwrap();
    let records: Vec<&str> = text.split("\n\n").filter(|s| !s.trim().is_empty()).collect();
    assert_eq!(records.len(), 6);
    for r in records {
        assert!(r.starts_with("3 2 2\n"));
    }
}

#[test]
fn enumerate_budget_token() {
    let out = modcon(&[
        "enumerate", "--n", "4", "--p", "7", "--set", "grs", "--budget", "100",
    ]);
    assert!(!out.status.success());
    assert!(stderr(&out).contains("BudgetExceeded"));
}

#[test]
fn stats_prints_exact_delta() {
    let out = modcon(&["stats", "--n", "2", "--p", "3"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("delta=4/9"));

    let out = modcon(&["stats", "--n", "2", "--p", "3", "--approx"]);
    let text = stdout(&out);
    assert!(text.contains("delta=4/9"));
    assert!(text.contains("delta_approx=0.4444444444444444"));
}

#[test]
fn stats_sweep_skips_composites() {
    let out = modcon(&["stats", "--sweep", "2:2", "2:10"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let rows: Vec<&str> = text.lines().skip(1).collect();
    // primes 2, 3, 5, 7 within [2, 10]
    assert_eq!(rows.len(), 4);
    assert!(rows.iter().all(|r| r.starts_with("2,")));
}

#[test]
fn transform_matches_worked_example() {
    let dir = tempfile::tempdir().unwrap();
    let e = write(dir.path(), "e.mat", "3 2 2\n0 1\n0 1\n");
    let t = write(dir.path(), "t.mat", "3 2 2\n0 1\n2 2\n");
    let out = modcon(&["transform", "-E", &e, "-T", &t]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "3 2 2\n2 2\n2 2\n");
}

#[test]
fn transform_rejects_singular_with_token() {
    let dir = tempfile::tempdir().unwrap();
    let e = write(dir.path(), "e.mat", "3 2 2\n0 1\n0 1\n");
    let t = write(dir.path(), "t.mat", "3 2 2\n1 1\n1 1\n");
    let out = modcon(&["transform", "-E", &e, "-T", &t]);
    assert!(!out.status.success());
    assert!(stderr(&out).contains("SingularMatrix"));
}

#[test]
fn gain_prints_verdict_and_matrix() {
    let dir = tempfile::tempdir().unwrap();
    let a = write(dir.path(), "a.mat", "3 2 2\n0 1\n1 0\n");
    let b = write(dir.path(), "b.mat", "3 2 1\n0\n1\n");
    let out = modcon(&["gain", "-A", &a, "-B", &b]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("controllable_dim=2"));
    assert!(text.contains("stabilizable=true"));
    assert!(text.contains("3 1 2\n1 0\n"));
}

#[test]
fn gain_not_stabilizable_token() {
    let dir = tempfile::tempdir().unwrap();
    let a = write(dir.path(), "a.mat", "3 2 2\n1 0\n0 1\n");
    let b = write(dir.path(), "b.mat", "3 2 1\n0\n0\n");
    let out = modcon(&["gain", "-A", &a, "-B", &b]);
    assert!(!out.status.success());
    assert!(stderr(&out).contains("NotStabilizable"));
}

#[test]
fn simulate_scalar_writes_trace() {
    let dir = tempfile::tempdir().unwrap();
    let e = write(dir.path(), "e.mat", "3 2 2\n0 1\n0 1\n");
    let x0 = write(dir.path(), "x0.mat", "3 2 1\n2\n1\n");
    let trace_path = dir.path().join("trace.csv");
    let out = modcon(&[
        "simulate", "--mode", "scalar", "-E", &e, "--x0", &x0, "--trace",
        trace_path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("sync_step=1"));
    assert!(text.contains("alpha=1"));
    let csv = fs::read_to_string(&trace_path).unwrap();
    assert!(csv.starts_with("k,agent,dim,value\n"));
    assert!(csv.contains("0,1,1,2"));
    assert!(csv.contains("0,alpha,1,1"));
}

#[test]
fn simulate_lti_synthesizes_gain_when_omitted() {
    let dir = tempfile::tempdir().unwrap();
    let e = write(dir.path(), "e.mat", "3 2 2\n0 1\n0 1\n");
    let a = write(dir.path(), "a.mat", "3 2 2\n0 1\n1 0\n");
    let b = write(dir.path(), "b.mat", "3 2 1\n0\n1\n");
    let x0 = write(dir.path(), "x0.mat", "3 4 1\n1\n2\n2\n1\n");
    let out = modcon(&[
        "simulate", "--mode", "lti", "-E", &e, "-A", &a, "-B", &b, "--x0", &x0,
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("sync_step=2"));
    assert!(text.contains("alpha=2 1"));
    assert!(text.contains("alpha_recursion_ok=true"));
}

#[test]
fn simulate_lti_rejects_inadmissible_graph() {
    let dir = tempfile::tempdir().unwrap();
    let e = write(dir.path(), "e.mat", "3 2 2\n1 0\n0 1\n");
    let a = write(dir.path(), "a.mat", "3 2 2\n0 1\n1 0\n");
    let b = write(dir.path(), "b.mat", "3 2 1\n0\n1\n");
    let x0 = write(dir.path(), "x0.mat", "3 4 1\n1\n2\n2\n1\n");
    let out = modcon(&[
        "simulate", "--mode", "lti", "-E", &e, "-A", &a, "-B", &b, "--x0", &x0,
    ]);
    assert!(!out.status.success());
    assert!(stderr(&out).contains("NotAdmissible"));
}

#[test]
fn simulate_lti_rejects_bad_gain() {
    let dir = tempfile::tempdir().unwrap();
    let e = write(dir.path(), "e.mat", "3 2 2\n0 1\n0 1\n");
    let a = write(dir.path(), "a.mat", "3 2 2\n0 1\n1 0\n");
    let b = write(dir.path(), "b.mat", "3 2 1\n0\n1\n");
    let k = write(dir.path(), "k.mat", "3 1 2\n0 0\n");
    let x0 = write(dir.path(), "x0.mat", "3 4 1\n1\n2\n2\n1\n");
    let out = modcon(&[
        "simulate", "--mode", "lti", "-E", &e, "-A", &a, "-B", &b, "-K", &k, "--x0", &x0,
    ]);
    assert!(!out.status.success());
    assert!(stderr(&out).contains("BadGain"));
}
