//! Black-box tests of the `ccldgm` binary: exit codes, determinism, and the
//! shape of every subcommand's output.

use std::process::{Command, Output};

fn ccldgm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ccldgm"))
        .args(args)
        .output()
        .expect("binary should run")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn rd_bound_prints_four_decimals() {
    let out = ccldgm(&["rd-bound", "--rate", "0.5"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).trim(), "0.1100");
}

#[test]
fn rd_bound_rejects_invalid_rate() {
    let out = ccldgm(&["rd-bound", "--rate", "1.5"]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("rate"), "message should name the flag: {err}");
}

#[test]
fn encode_is_byte_identical_under_a_repeated_seed() {
    let args = [
        "encode", "--l", "3", "--r", "6", "--n", "100", "--L", "1", "--beta", "2", "--seed", "7",
    ];
    let a = ccldgm(&args);
    let b = ccldgm(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert!(stdout(&a).starts_with("distortion 0."));
}

#[test]
fn encode_requires_a_seed() {
    let out = ccldgm(&["encode", "--n", "100"]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("--seed"), "{err}");
    // unknown flags are usage errors too
    let out = ccldgm(&["encode", "--seed", "1", "--no-such-flag"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn sample_writes_a_parseable_edge_list() {
    let dir = std::env::temp_dir().join(format!("ccldgm-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("graph.txt");
    let out = ccldgm(&[
        "sample", "--l", "3", "--r", "6", "--n", "20", "--L", "4", "--w", "2", "--seed", "5",
        "--out", path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&path).unwrap();
    let graph = ccldgm::ensemble::FactorGraph::read_edge_list(text.as_bytes()).unwrap();
    assert_eq!(graph.num_gens(), 80);
    assert_eq!(graph.num_edges(), 240);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn sample_rejects_width_beyond_chain_length() {
    let out = ccldgm(&[
        "sample", "--l", "3", "--r", "6", "--n", "20", "--L", "2", "--w", "3", "--seed", "1",
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn experiment_runs_from_a_config_file() {
    let dir = std::env::temp_dir().join(format!("ccldgm-cli-cfg-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("exp.toml");
    std::fs::write(
        &cfg,
        "instances = 2\nbase_seed = 3\nworkers = 1\n\n[spec]\ngen_degree = 3\nbit_degree = 6\n\
         gens_per_position = 40\npositions = 1\nwidth = 1\n",
    )
    .unwrap();
    let out = ccldgm(&["experiment", "--config", cfg.to_str().unwrap()]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.starts_with("l,r,n,L,w,beta,instances,mean_D,std_D,saturated_D"));
    assert!(text.lines().nth(1).unwrap().starts_with("3,6,40,1,1,2,2,"));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn experiment_with_missing_config_exits_with_validation_error() {
    let out = ccldgm(&["experiment", "--config", "missing.cfg"]);
    assert!(!out.status.success());
}

#[test]
fn experiment_without_seed_or_config_is_rejected() {
    let out = ccldgm(&["experiment", "--n", "40", "--instances", "1"]);
    assert!(!out.status.success());
}

#[test]
fn sweep_beta_emits_one_row_per_grid_point() {
    let out = ccldgm(&[
        "sweep-beta", "--n", "40", "--L", "1", "--betas", "1.0,2.0", "--instances", "2",
        "--seed", "9", "--workers", "1",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert_eq!(text.lines().count(), 3); // header + two rows
}

#[test]
fn profile_emits_one_row_per_position() {
    let out = ccldgm(&[
        "profile", "--n", "40", "--L", "4", "--w", "2", "--instances", "2", "--seed", "11",
        "--workers", "1",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert_eq!(text.lines().next().unwrap(), "z,d_z");
    assert_eq!(text.lines().count(), 5); // header + L rows
}

#[test]
fn oracle_check_reports_per_instance_gaps() {
    let out = ccldgm(&[
        "oracle-check", "--n", "16", "--L", "1", "--instances", "5", "--seed", "13",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.starts_with("instance,d_min,d_bpgd,gap"));
    assert!(text.lines().last().unwrap().starts_with("optimal "));
}

#[test]
fn help_lists_every_subcommand() {
    let out = ccldgm(&["--help"]);
    assert!(out.status.success());
    let text = stdout(&out);
    for sub in [
        "sample",
        "encode",
        "experiment",
        "sweep-beta",
        "profile",
        "rd-bound",
        "oracle-check",
    ] {
        assert!(text.contains(sub), "help should mention {sub}");
    }
}
