//! End-to-end CLI behavior: exit codes, file handling, output formats.

use std::path::Path;
use std::process::{Command, Output};

fn gpc_env(args: &[&str], dir: &Path, env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_gpc"));
    cmd.args(args).current_dir(dir);
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn gpc(args: &[&str], dir: &Path) -> Output {
    gpc_env(args, dir, &[])
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout_str(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8")
}

fn write(dir: &Path, name: &str, contents: &str) {
    std::fs::write(dir.join(name), contents).unwrap();
}

#[test]
fn usage_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "a.csv", "0,1\n");

    let out = gpc(&["frobnicate"], dir.path());
    assert_eq!(code(&out), 2, "unknown subcommand");

    let out = gpc(&["norm", "a.csv", "--sigma", "-1"], dir.path());
    assert_eq!(code(&out), 2, "negative sigma");

    let out = gpc(&["norm", "a.csv", "--weight", "bogus"], dir.path());
    assert_eq!(code(&out), 2, "unknown weight token");

    let out = gpc(&["curve", "a.csv", "--range", "3:1"], dir.path());
    assert_eq!(code(&out), 2, "inverted range");

    let out = gpc(&["curve", "a.csv", "--samples", "1"], dir.path());
    assert_eq!(code(&out), 2, "too few samples");

    let out = gpc(
        &["stability", "a.csv", "a.csv", "--theorem", "Z"],
        dir.path(),
    );
    assert_eq!(code(&out), 2, "unknown theorem");

    let out = gpc(&["moments", "a.csv", "--max-order", "40"], dir.path());
    assert_eq!(code(&out), 2, "order above cap");

    let out = gpc_env(
        &["norm", "a.csv"],
        dir.path(),
        &[("GPC_QUAD_RTOL", "not-a-number")],
    );
    assert_eq!(code(&out), 2, "malformed env override");

    let out = gpc_env(&["norm", "a.csv"], dir.path(), &[("GPC_QUAD_PAD", "2")]);
    assert_eq!(code(&out), 2, "padding below the minimum");
}

#[test]
fn data_errors_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "bad.csv", "0,1\noops\n");
    write(dir.path(), "diag.csv", "1,1\n");
    write(dir.path(), "neg.csv", "0,1\n");

    let out = gpc(&["norm", "missing.csv"], dir.path());
    assert_eq!(code(&out), 3, "missing file");

    let out = gpc(&["norm", "bad.csv"], dir.path());
    assert_eq!(code(&out), 3, "malformed row");
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.contains("line 2"), "error names the line: {stderr}");

    let out = gpc(&["norm", "diag.csv"], dir.path());
    assert_eq!(code(&out), 3, "diagonal point");

    // multiplicative life needs strictly positive births
    let out = gpc(&["norm", "neg.csv", "--weight", "mullife"], dir.path());
    assert_eq!(code(&out), 3, "degenerate weight normalizer");
}

#[test]
fn hypothesis_violations_exit_4() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "short.csv", "0,0.5\n");
    write(dir.path(), "ok.csv", "0,1\n2,3\n");

    // theorem P requires total lifespan >= 1 on both diagrams
    let out = gpc(
        &["stability", "short.csv", "ok.csv", "--theorem", "P"],
        dir.path(),
    );
    assert_eq!(code(&out), 4);

    // midlife weights do not vanish on the diagonal
    let out = gpc(
        &[
            "stability",
            "ok.csv",
            "ok.csv",
            "--theorem",
            "B",
            "--weight",
            "midlife",
        ],
        dir.path(),
    );
    assert_eq!(code(&out), 4);

    // life weights with different totals have no static Lipschitz constant
    write(dir.path(), "other.csv", "0,3\n");
    let out = gpc(
        &[
            "stability",
            "ok.csv",
            "other.csv",
            "--theorem",
            "J",
            "--weight",
            "life",
        ],
        dir.path(),
    );
    assert_eq!(code(&out), 4);
}

#[test]
fn stability_report_and_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "c.csv", "0,1\n");
    write(dir.path(), "d.csv", "0,1.1\n");

    let out = gpc(
        &[
            "stability",
            "c.csv",
            "d.csv",
            "--theorem",
            "A",
            "--sigma",
            "1",
        ],
        dir.path(),
    );
    assert_eq!(code(&out), 0);
    let text = stdout_str(&out);
    assert!(text.contains("theorem A\n"));
    assert!(text.contains("w1 0.1\n"));
    assert!(text.contains("bound 0.3128379167\n"));
    assert!(text.contains("holds true\n"));

    let out = gpc(
        &["stability", "c.csv", "d.csv", "--theorem", "A", "--csv"],
        dir.path(),
    );
    assert_eq!(code(&out), 0);
    let text = stdout_str(&out);
    assert!(text.starts_with("# theorem,constant,additive,w1,l1_dist,bound,holds,slack\n"));
    assert_eq!(text.lines().count(), 2, "header comment plus one row");
    assert!(text
        .lines()
        .nth(1)
        .unwrap()
        .starts_with("A,3.128379167,0,0.1,"));
}

#[test]
fn stability_corpus_mode() {
    let dir = tempfile::tempdir().unwrap();
    let left = dir.path().join("left");
    let right = dir.path().join("right");
    std::fs::create_dir(&left).unwrap();
    std::fs::create_dir(&right).unwrap();
    std::fs::write(left.join("x.csv"), "0,1\n").unwrap();
    std::fs::write(right.join("x.csv"), "0,1.05\n").unwrap();
    std::fs::write(left.join("y.csv"), "1,2\n3,4\n").unwrap();
    std::fs::write(right.join("y.csv"), "1,2.2\n3,3.9\n").unwrap();
    std::fs::write(left.join("only-left.csv"), "0,1\n").unwrap();

    let out = gpc(
        &[
            "stability",
            "left",
            "right",
            "--theorem",
            "A",
            "--sigma",
            "0.5",
        ],
        dir.path(),
    );
    assert_eq!(code(&out), 0);
    let text = stdout_str(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 3, "header + two shared files: {text}");
    assert!(lines[1].starts_with("x.csv,A,"));
    assert!(lines[2].starts_with("y.csv,A,"));

    // empty intersection is a data error
    let lonely = dir.path().join("lonely");
    std::fs::create_dir(&lonely).unwrap();
    let out = gpc(
        &["stability", "left", "lonely", "--theorem", "A"],
        dir.path(),
    );
    assert_eq!(code(&out), 3);
}

#[test]
fn dist_outputs_and_matching_dump() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "a.csv", "0,1\n5,7\n");
    write(dir.path(), "b.csv", "0.1,1.2\n");

    let out = gpc(&["dist", "a.csv", "a.csv"], dir.path());
    assert_eq!(code(&out), 0);
    let text = stdout_str(&out);
    assert!(text.contains("w1,0\n"));
    assert!(text.contains("l1,0\n"));

    let out = gpc(&["dist", "a.csv", "b.csv", "--w1-only"], dir.path());
    assert_eq!(code(&out), 0);
    let text = stdout_str(&out);
    // (0,1) matches (0.1,1.2) at cost 0.2; (5,7) goes diagonal at cost 1
    assert_eq!(text, "w1,1.2\n");

    let out = gpc(
        &["dist", "a.csv", "b.csv", "--w1-only", "--matching", "m.csv"],
        dir.path(),
    );
    assert_eq!(code(&out), 0);
    let dump = std::fs::read_to_string(dir.path().join("m.csv")).unwrap();
    assert_eq!(dump, "c_index,d_index,cost\n0,0,0.2\n1,DIAG,1\n");

    // determinism across runs
    let again = gpc(&["dist", "a.csv", "b.csv"], dir.path());
    let once = gpc(&["dist", "a.csv", "b.csv"], dir.path());
    assert_eq!(again.stdout, once.stdout);
}

#[test]
fn moments_table_and_probe() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "a.csv", "1,2\n3,4\n");
    write(dir.path(), "b.csv", "1,2\n3,4\n");
    write(dir.path(), "c.csv", "1,2\n");

    let out = gpc(&["moments", "a.csv", "--max-order", "2"], dir.path());
    assert_eq!(code(&out), 0);
    let text = stdout_str(&out);
    assert!(text.starts_with("m1,m2,value\n0,0,2\n"));
    assert!(text.contains("\n1,1,14\n"), "mixed moment row: {text}");

    let out = gpc(&["moments", "a.csv", "b.csv"], dir.path());
    assert_eq!(stdout_str(&out), "identical\n");

    let out = gpc(&["moments", "a.csv", "c.csv"], dir.path());
    assert_eq!(stdout_str(&out), "distinguished,0,0\n");
}

#[test]
fn surface_grid_output() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "a.csv", "0,1\n");
    let out = gpc(
        &[
            "surface", "a.csv", "--grid", "-1:1:0:2", "--nx", "3", "--ny", "3", "--sigma", "1",
        ],
        dir.path(),
    );
    assert_eq!(code(&out), 0);
    let text = stdout_str(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 2 + 9, "header lines + 3x3 grid");
    assert_eq!(lines[1], "x,y,value");
    // the grid center sits on the diagram point: the kernel peak 1/(2 pi)
    assert!(text.contains("0,1,0.1591549431\n"), "{text}");

    let out = gpc(&["surface", "a.csv", "--grid", "0:1:5"], dir.path());
    assert_eq!(code(&out), 2, "malformed grid spec");
}

#[test]
fn curve_file_output_is_atomic() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "a.csv", "0,1\n");

    let out = gpc(
        &["curve", "a.csv", "--samples", "4", "-o", "out.csv"],
        dir.path(),
    );
    assert_eq!(code(&out), 0);
    let written = std::fs::read_to_string(dir.path().join("out.csv")).unwrap();
    assert!(written.starts_with("# sigma=1 weight=none diagram=0x"));
    assert!(
        !dir.path().join("out.csv.tmp").exists(),
        "temp file cleaned up"
    );

    // unwritable target: error, and no partial output appears
    let out = gpc(&["curve", "a.csv", "-o", "nosuchdir/out.csv"], dir.path());
    assert_eq!(code(&out), 3);
    assert!(!dir.path().join("nosuchdir").exists());
}

#[test]
fn quadrature_env_overrides_apply() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "a.csv", "0,1\n");
    // a coarser tolerance still reproduces the norm to its own precision
    let out = gpc_env(
        &["norm", "a.csv"],
        dir.path(),
        &[("GPC_QUAD_RTOL", "1e-6"), ("GPC_QUAD_PAD", "8")],
    );
    assert_eq!(code(&out), 0);
    let text = stdout_str(&out);
    let quadrature: f64 = text
        .lines()
        .find_map(|l| l.strip_prefix("quadrature,"))
        .unwrap()
        .parse()
        .unwrap();
    assert!((quadrature - 1.1996412).abs() < 1e-4);
}
