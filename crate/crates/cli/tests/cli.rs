use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use qps_core::ion::{PulseSequence, Space, sequence_unitary};

fn qps(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qps"))
        .current_dir(dir)
        .env("QPS_THREADS", "2")
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

#[test]
fn exit_codes_distinguish_validation_from_success() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&qps(dir.path(), &["--help"])), 0);
    assert_eq!(code(&qps(dir.path(), &["no-such-command"])), 1);
    assert_eq!(code(&qps(dir.path(), &["simulate", "--epsilon", "1.5"])), 1);
    assert_eq!(code(&qps(dir.path(), &["simulate", "--ratio", "-1", "--trials", "10"])), 1);
    assert_eq!(code(&qps(dir.path(), &["simulate", "--noise-mask", "laser"])), 1);
    assert_eq!(code(&qps(dir.path(), &["invasion", "--bias", "1.0"])), 1);
    assert_eq!(code(&qps(dir.path(), &["compile-pulses", "--emit-pulses", "missing/dir/x.txt"])), 2);
    assert_eq!(code(&qps(dir.path(), &["validate"])), 0);
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("run.conf"), "# experiment\nepsilon = 0.25\nratio = 4\ntrials = 50\nout = from-file\n").unwrap();
    let out = qps(dir.path(), &["--config", "run.conf", "simulate", "--ratio", "2"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(dir.path().join("from-file/ratios.csv")).unwrap();
    let row: Vec<&str> = csv.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(row[0].parse::<f64>().unwrap(), 0.25);
    assert_eq!(row[1].parse::<f64>().unwrap(), 2.0);
    let trials: u64 = fs::read_to_string(dir.path().join("from-file/scaling.csv")).unwrap().lines().nth(1).unwrap()
        .split(',').nth(2).unwrap().parse().unwrap();
    assert_eq!(trials, 50);
}

#[test]
fn malformed_config_reports_every_problem() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("bad.conf"), "epsilon 0.1\nwidth = 3\n").unwrap();
    let out = qps(dir.path(), &["--config", "bad.conf", "validate"]);
    assert_eq!(code(&out), 1);
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 1") && err.contains("unknown key 'width'"), "{err}");
}

#[test]
fn validate_checks_network_files() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("ok.txt"), "3\n0.5 0.5 0.5\n0.25 0.25 0.25\n0.25 0.25 0.25\n1 2\n").unwrap();
    fs::write(dir.path().join("bad.txt"), "2\n0.5 0.7\n0.5 0.4\n1\n").unwrap();
    let ok = qps(dir.path(), &["validate", "--network", "ok.txt"]);
    assert_eq!(code(&ok), 0);
    assert!(String::from_utf8_lossy(&ok.stdout).contains("3 clips, 2 actions"));
    assert_eq!(code(&qps(dir.path(), &["validate", "--network", "bad.txt"])), 1);
}

#[test]
fn emitted_pulses_parse_back_to_the_same_sequence() {
    let dir = tempfile::tempdir().unwrap();
    let out = qps(dir.path(), &["compile-pulses", "--epsilon", "0.1", "--ratio", "3", "--m", "2", "--emit-pulses", "p.txt"]);
    assert_eq!(code(&out), 0);
    let text = fs::read_to_string(dir.path().join("p.txt")).unwrap();
    let seq = PulseSequence::parse(&text, 2).unwrap();
    assert_eq!(seq.len(), 28);
    assert_eq!(seq.to_text(), text);
    assert!(sequence_unitary(&seq, Space::HiddenPair).is_ok());

    let stdout = qps(dir.path(), &["compile-pulses", "--controlized"]);
    assert_eq!(String::from_utf8_lossy(&stdout.stdout).lines().count(), 35);
}

#[test]
fn invasion_writes_one_row_per_round() {
    let dir = tempfile::tempdir().unwrap();
    let out = qps(dir.path(), &["--seed", "3", "invasion", "--agent", "classical", "--rounds", "40", "--switch-at", "20"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(dir.path().join("session.csv")).unwrap();
    assert_eq!(csv.lines().next().unwrap(), "round,signal,action,reward,n_u,epsilon,flags");
    assert_eq!(csv.lines().count(), 41);
}

#[test]
fn documented_command_examples() {
    let dir = tempfile::tempdir().unwrap();
    let out = qps(dir.path(), &["simulate", "--epsilon", "0.05", "--ratio", "9", "--sigma", "0", "--trials", "10000", "--seed", "7"]);
    assert_eq!(code(&out), 0);
    let csv = fs::read_to_string(dir.path().join("ratios.csv")).unwrap();
    let ratio: f64 = csv.lines().nth(1).unwrap().split(',').nth(5).unwrap().parse().unwrap();
    assert!((ratio - 9.0).abs() / 9.0 < 0.1, "{ratio}");

    let out = qps(dir.path(), &["compile-pulses", "--epsilon", "0.05", "--ratio", "9", "--m", "5", "--emit-pulses", "m5.txt"]);
    assert_eq!(code(&out), 0);
    assert_eq!(fs::read_to_string(dir.path().join("m5.txt")).unwrap().lines().count(), 64);

    let out = qps(dir.path(), &["fig-scaling", "--sigma", "0.031415926535897934", "--trials", "20"]);
    assert_eq!(code(&out), 0);
    assert_eq!(fs::read_to_string(dir.path().join("scaling.csv")).unwrap().lines().count(), 41);
}
