//! End-to-end tests of the installed `bsroots` binary: exit codes, output
//! shapes, and byte-stability of the JSON across repeated runs, thread
//! counts, and arithmetic back-ends.

use std::io::Write;
use std::path::Path;
use std::process::Command;

struct Run {
    stdout: String,
    stderr: String,
    code: i32,
}

fn bsroots(args: &[&str]) -> Run {
    bsroots_env(args, &[])
}

fn bsroots_env(args: &[&str], envs: &[(&str, &str)]) -> Run {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_bsroots"));
    cmd.args(args);
    for (k, v) in envs {
        cmd.env(k, v);
    }
    let out = cmd.output().expect("binary runs");
    Run {
        stdout: String::from_utf8(out.stdout).expect("stdout is UTF-8"),
        stderr: String::from_utf8(out.stderr).expect("stderr is UTF-8"),
        code: out.status.code().expect("exit code"),
    }
}

fn write_sing(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    let mut fh = std::fs::File::create(&path).expect("temp file");
    fh.write_all(text.as_bytes()).expect("write");
    path.to_str().expect("utf-8 path").to_string()
}

const QUINTIC_GERM: &str = r#"[{"weights": ["1/5", "1/4"], "count": 1}]"#;

// ======================================================================
// Success paths
// ======================================================================

#[test]
fn analyze_produces_byte_identical_json_across_runs_threads_and_backends() {
    let dir = tempfile::tempdir().expect("tempdir");
    let sing = write_sing(dir.path(), "germ.json", QUINTIC_GERM);
    let args = [
        "analyze",
        "x^5 + x^2*y^3 + y^4*z",
        "--sing",
        &sing,
        "--format",
        "json",
    ];

    let first = bsroots(&args);
    assert_eq!(first.code, 0, "stderr: {}", first.stderr);
    let again = bsroots(&args);
    assert_eq!(first.stdout, again.stdout, "repeated run changed bytes");

    let single = bsroots_env(&args, &[("BSROOTS_THREADS", "1")]);
    assert_eq!(first.stdout, single.stdout, "thread count changed bytes");

    let modular = bsroots(&[
        "analyze",
        "x^5 + x^2*y^3 + y^4*z",
        "--sing",
        &sing,
        "--modular",
        "--format",
        "json",
    ]);
    assert_eq!(first.stdout, modular.stdout, "arithmetic backend changed bytes");

    let v: serde_json::Value = serde_json::from_str(&first.stdout).expect("valid JSON");
    assert_eq!(v["r_f0"], serde_json::json!(["3/5", "4/5", "6/5", "7/5"]));
    assert_eq!(v["r_f_complete"], serde_json::json!(true));
    assert_eq!(v["tau"], serde_json::json!(12));
    assert!(first.stdout.ends_with('\n'), "canonical JSON ends with a newline");
}

#[test]
fn sing_file_accepts_named_types() {
    let dir = tempfile::tempdir().expect("tempdir");
    let sing = write_sing(dir.path(), "nodes.json", r#"[{"type": "A1", "count": 2}]"#);
    let run = bsroots(&[
        "analyze",
        "x^2*z + y^2*z - z^3",
        "--sing",
        &sing,
        "--format",
        "json",
    ]);
    assert_eq!(run.code, 0, "stderr: {}", run.stderr);
    let v: serde_json::Value = serde_json::from_str(&run.stdout).expect("valid JSON");
    assert_eq!(v["mu_z"], serde_json::json!(2));
    assert_eq!(v["r_z"], serde_json::json!(["1"]));
    assert_eq!(v["r_f0"], serde_json::json!(["4/3", "5/3"]));
    assert_eq!(v["r_f_complete"], serde_json::json!(true));
}

#[test]
fn arrangement_flag_derives_the_singularities_itself() {
    let run = bsroots(&[
        "analyze",
        "--lines",
        "x*y*(x+y)",
        "--vars",
        "x,y,z",
        "--format",
        "json",
    ]);
    assert_eq!(run.code, 0, "stderr: {}", run.stderr);
    let v: serde_json::Value = serde_json::from_str(&run.stdout).expect("valid JSON");
    assert_eq!(v["tau"], serde_json::json!(4));
    assert_eq!(v["r_z"], serde_json::json!(["2/3", "1", "4/3"]));
    assert_eq!(v["r_f_complete"], serde_json::json!(true));
}

#[test]
fn text_report_shows_the_verdict_per_candidate() {
    let dir = tempfile::tempdir().expect("tempdir");
    let sing = write_sing(dir.path(), "germ.json", QUINTIC_GERM);
    let run = bsroots(&["analyze", "x^5 + y^4*z", "--sing", &sing]);
    assert_eq!(run.code, 0, "stderr: {}", run.stderr);
    for needle in [
        "tau_Z = 12",
        "R_Z:",
        "ROOT_R0",
        "R_f^0 (roots at the origin): 6/5, 7/5, 8/5, 9/5",
        "complete: yes",
    ] {
        assert!(run.stdout.contains(needle), "missing {needle:?} in:\n{}", run.stdout);
    }
}

#[test]
fn table_subcommands_share_one_surface() {
    // gamma needs no polynomial at all.
    let gamma = bsroots(&["gamma", "3", "5", "--format", "tsv"]);
    assert_eq!(gamma.code, 0);
    assert!(gamma.stdout.lines().count() >= 2, "k row plus value row");

    // arnold prints the node bounds.
    let arnold = bsroots(&["arnold", "4", "6"]);
    assert_eq!(arnold.code, 0);
    assert!(arnold.stdout.contains("68"), "got: {}", arnold.stdout);

    // tables/deltas/e2 accept the same request grammar.
    let tables = bsroots(&["tables", "x^5 + y^4*z", "--format", "tsv"]);
    assert_eq!(tables.code, 0);
    assert!(tables.stdout.contains("mu_prime"));

    let deltas = bsroots(&["deltas", "x^5 + y^4*z"]);
    assert_eq!(deltas.code, 0);
    assert_eq!(deltas.stdout, "T^6+T^7+T^8+T^9\ndegree = 9\n");

    let e2 = bsroots(&["e2", "x^4*y^2*z + z^7", "--format", "tsv"]);
    assert_eq!(e2.code, 0);
    assert!(e2.stdout.contains("mu2"), "got: {}", e2.stdout);
    assert!(e2.stdout.contains("nu2"));
}

#[test]
fn germ_subcommands_print_spectrum_and_roots() {
    let spectrum = bsroots(&["spectrum", "--type", "E8"]);
    assert_eq!(spectrum.code, 0);
    assert!(spectrum.stdout.contains("m = 15"), "got: {}", spectrum.stdout);

    let by_weights = bsroots(&["local-bs", "--weights", "1/3,1/2"]);
    assert_eq!(by_weights.code, 0);
    assert!(by_weights.stdout.contains("reduced:"), "got: {}", by_weights.stdout);
    assert!(by_weights.stdout.contains("5/6"));
}

// ======================================================================
// Failure paths, one exit code at a time
// ======================================================================

#[test]
fn unusable_input_exits_one() {
    let bad_poly = bsroots(&["analyze", "x^2 + y^3"]);
    assert_eq!(bad_poly.code, 1);
    assert!(bad_poly.stderr.starts_with("bsroots:"), "got: {}", bad_poly.stderr);

    let bad_type = bsroots(&["spectrum", "--type", "Q99"]);
    assert_eq!(bad_type.code, 1);

    let bad_kmax = bsroots(&["tables", "x^3+y^3+z^3", "--kmax", "999"]);
    assert_eq!(bad_kmax.code, 1);
    assert!(bad_kmax.stderr.contains("kmax"), "got: {}", bad_kmax.stderr);

    let dup_vars = bsroots(&["tables", "x^3+y^3+z^3", "--vars", "x,y,x"]);
    assert_eq!(dup_vars.code, 1);

    let dup_line = bsroots(&["analyze", "--lines", "x*x*y", "--vars", "x,y,z"]);
    assert_eq!(dup_line.code, 1);
    assert!(dup_line.stderr.starts_with("bsroots:"));
}

#[test]
fn data_inconsistent_with_the_tables_exits_two() {
    // Singular curve declared smooth: the global count is 12, not 0.
    let smooth_claim = bsroots(&["analyze", "x^5 + y^4*z"]);
    assert_eq!(smooth_claim.code, 2);
    assert!(smooth_claim.stderr.contains("12"), "got: {}", smooth_claim.stderr);

    // Wrong weights for this curve: 11 vs 12.
    let dir = tempfile::tempdir().expect("tempdir");
    let sing = write_sing(dir.path(), "germ.json", QUINTIC_GERM);
    let wrong = bsroots(&["analyze", "x^5 + x^3*y^2 + y^4*z", "--sing", &sing]);
    assert_eq!(wrong.code, 2);
    assert!(wrong.stderr.contains("11"), "got: {}", wrong.stderr);
    assert!(wrong.stderr.contains("12"));
}

#[test]
fn undetermined_candidates_exit_three_but_still_report() {
    let dir = tempfile::tempdir().expect("tempdir");
    let sing = write_sing(
        dir.path(),
        "degenerate.json",
        r#"[{"weights": ["3/14", "1/7"], "count": 1},
            {"weights": ["3/7", "1/7"], "count": 1}]"#,
    );
    let run = bsroots(&["analyze", "x^4*y^2*z + z^7", "--sing", &sing]);
    assert_eq!(run.code, 3, "stderr: {}", run.stderr);
    assert!(run.stdout.contains("UNDETERMINED"), "got: {}", run.stdout);
    assert!(run.stdout.contains("3/7"));
    assert!(run.stdout.contains("complete: no"));

    // The JSON rendering carries the same verdicts.
    let json = bsroots(&[
        "analyze",
        "x^4*y^2*z + z^7",
        "--sing",
        &sing,
        "--format",
        "json",
    ]);
    assert_eq!(json.code, 3);
    let v: serde_json::Value = serde_json::from_str(&json.stdout).expect("valid JSON");
    assert_eq!(v["undetermined"], serde_json::json!(["3/7"]));
    assert_eq!(v["r_f0"], serde_json::json!(["11/7", "12/7", "13/7"]));
    assert_eq!(v["r_f_complete"], serde_json::json!(false));
}

#[test]
fn sing_flag_guards_the_table_subcommands_too() {
    let dir = tempfile::tempdir().expect("tempdir");
    let sing = write_sing(dir.path(), "germ.json", QUINTIC_GERM);
    // Declared weights belong to a different curve: caught even though
    // the subcommand only prints tables.
    let run = bsroots(&["tables", "x^5 + x^3*y^2 + y^4*z", "--sing", &sing]);
    assert_eq!(run.code, 2);

    let ok = bsroots(&["tables", "x^5 + y^4*z", "--sing", &sing]);
    assert_eq!(ok.code, 0);
}
