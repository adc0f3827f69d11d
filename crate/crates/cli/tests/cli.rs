//! End-to-end tests for the `fschan` binary: known outputs, determinism,
//! and the exit-code contract.

use std::process::{Command, Output};

fn fschan(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fschan"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = fschan(args);
    assert!(
        out.status.success(),
        "command {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn tau_reports_exact_ratio_and_witness() {
    let text = stdout(&["tau", "--channel", "sw-erasure:w=3,d=1,q=2"]);
    assert!(text.contains("tau = 1/3"));
    assert!(text.contains("witness = 001-[0]->010 010-[0]->100 100-[1]->001"));
}

#[test]
fn entropy_of_noiseless_channel_is_zero() {
    let text = stdout(&["entropy", "--channel", "noiseless:q=2"]);
    assert!(text.contains("h_ch = 0 "));
}

#[test]
fn c0f_prints_exact_value_and_iterative_check() {
    let text = stdout(&["c0f", "--channel", "sw-erasure:w=3,d=1,q=2", "--k", "300"]);
    assert!(text.contains("c0f = 2/3"));
    assert!(text.contains("c0f_dp = 0.66"));
}

#[test]
fn codesearch_finds_the_parity_code() {
    let text = stdout(&["codesearch", "--channel", "sw-erasure:w=3,d=1,q=2", "--n-max", "3"]);
    assert!(text.contains("3,4,0.6666666666666666,true"));
    assert!(text.contains("codebook\n000\n011\n101\n110\n"));
}

#[test]
fn maximin_counts_overlap_blocks() {
    let text = stdout(&[
        "maximin",
        "--channel",
        "sw-erasure:w=3,d=1,q=2",
        "--n",
        "3",
        "--inputs",
        "000,011,101,110",
    ]);
    assert!(text.contains("blocks = 4"));
    assert!(text.contains("maximin_info = 2 symbols"));
}

#[test]
fn verify_reports_consistency() {
    let text = stdout(&["verify", "--channel", "sw-erasure:w=3,d=1,q=2", "--n", "2"]);
    assert!(text.contains("max_code_size = 4"));
    assert!(text.contains("consistent = true"));
}

#[test]
fn build_then_load_from_file_round_trips() {
    let dir = std::env::temp_dir().join("fschan-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("sw31.json");
    let path_str = path.to_str().unwrap();
    stdout(&["build", "--channel", "sw-erasure:w=3,d=1,q=2", "--out", path_str]);
    let from_family = stdout(&["tau", "--channel", "sw-erasure:w=3,d=1,q=2"]);
    let from_file = stdout(&["tau", "--channel", path_str]);
    assert_eq!(from_family, from_file);
}

#[test]
fn repeated_runs_are_byte_identical() {
    for args in [
        vec!["bounds", "--channel", "sw-erasure:w=5,d=2,q=2", "--bruteforce-n", "4"],
        vec!["verify", "--channel", "sw-erasure:w=3,d=1,q=2", "--n", "2", "--seed", "7"],
        vec![
            "simulate",
            "--channel",
            "sw-erasure:w=3,d=1,q=2",
            "--a-exponent",
            "0.5667",
            "--epochs",
            "5",
            "--adversary",
            "seeded",
            "--disturbance",
            "seeded",
            "--seed",
            "42",
        ],
    ] {
        let first = fschan(&args);
        let second = fschan(&args);
        assert!(first.status.success());
        assert_eq!(first.stdout, second.stdout, "nondeterministic stdout for {args:?}");
    }
}

#[test]
fn simulate_emits_csv_and_verdicts() {
    let out = fschan(&[
        "simulate",
        "--channel",
        "sw-erasure:w=3,d=1,q=2",
        "--a-exponent",
        "0.5667",
        "--epochs",
        "3",
    ]);
    assert!(out.status.success());
    let csv = String::from_utf8(out.stdout).unwrap();
    assert!(csv.starts_with("epoch,t,x,xhat,error,delta,erasures,saturated\n"));
    assert_eq!(csv.lines().count(), 5, "header plus epochs 0..=3");
    let log = String::from_utf8(out.stderr).unwrap();
    assert!(log.contains("rate condition:"));
    assert!(log.contains("structural condition:"));
}

#[test]
fn usage_errors_exit_with_code_two() {
    let out = fschan(&["no-such-command"]);
    assert_eq!(out.status.code(), Some(2));
    let out = fschan(&["tau"]);
    assert_eq!(out.status.code(), Some(2), "missing required --channel");
}

#[test]
fn computation_errors_exit_with_code_one_and_a_diagnostic() {
    let out = fschan(&["entropy", "--channel", "no-such-family:q=2"]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.starts_with("error: "));
    assert_eq!(err.lines().count(), 1);

    let out = fschan(&["tau", "--channel", "/nonexistent/channel.json"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8(out.stderr).unwrap().starts_with("error: "));
}
