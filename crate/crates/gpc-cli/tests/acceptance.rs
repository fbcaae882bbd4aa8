//! Acceptance criterion 8: the CLI emits the spot values
//! `G_{(0,1)}(0.5) = 0.4781203 ± 1e-6` and `||G_{(0,1)}||_1 = 1.1996412 ± 1e-6`
//! at sigma = 1, byte-identically across two runs.

use std::path::Path;
use std::process::{Command, Output};

fn gpc(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gpc"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn stdout_str(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 output")
}

#[test]
fn criterion_8_cli_spot_values() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("single.csv"), "0,1\n").unwrap();

    // norm: closed and quadrature values, twice
    let norm_args = ["norm", "single.csv", "--sigma", "1"];
    let first = gpc(&norm_args, dir.path());
    let second = gpc(&norm_args, dir.path());
    assert!(first.status.success());
    assert_eq!(
        first.stdout, second.stdout,
        "norm output must be byte-identical"
    );
    let text = stdout_str(&first);
    let closed: f64 = text
        .lines()
        .find_map(|l| l.strip_prefix("closed,"))
        .expect("closed line")
        .parse()
        .unwrap();
    let quadrature: f64 = text
        .lines()
        .find_map(|l| l.strip_prefix("quadrature,"))
        .expect("quadrature line")
        .parse()
        .unwrap();
    assert!((closed - 1.1996412).abs() <= 1e-6, "closed = {closed}");
    assert!(
        (quadrature - 1.1996412).abs() <= 1e-6,
        "quadrature = {quadrature}"
    );

    // curve: the t = 0.5 sample, twice
    let curve_args = [
        "curve",
        "single.csv",
        "--sigma",
        "1",
        "--range",
        "0:1",
        "--samples",
        "3",
    ];
    let first = gpc(&curve_args, dir.path());
    let second = gpc(&curve_args, dir.path());
    assert!(first.status.success());
    assert_eq!(
        first.stdout, second.stdout,
        "curve output must be byte-identical"
    );
    let text = stdout_str(&first);
    let mid: f64 = text
        .lines()
        .find_map(|l| l.strip_prefix("0.5,"))
        .expect("t = 0.5 row")
        .parse()
        .unwrap();
    assert!((mid - 0.4781203).abs() <= 1e-6, "G(0.5) = {mid}");

    println!(
        "criterion 8 (CLI spot values): PASS — norm {closed}, curve midpoint {mid}, \
         byte-identical across runs"
    );
}
