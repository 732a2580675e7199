//! End-to-end tests of the installed binary: output stability, exit-code
//! contract, format validity, and config-file precedence.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bck(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bck"))
        .args(args)
        .output()
        .expect("binary should spawn")
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("stdout should be utf-8")
}

fn stderr_of(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("stderr should be utf-8")
}

fn temp_file(name: &str) -> PathBuf {
    let mut p = std::env::temp_dir();
    p.push(format!("bck-cli-test-{}-{name}", std::process::id()));
    p
}

#[test]
fn reruns_are_byte_identical() {
    let args = ["density", "--b", "1", "--beta", "2", "--reps", "40", "--seed", "11"];
    let first = bck(&args);
    let second = bck(&args);
    assert!(first.status.success());
    assert_eq!(first.stdout, second.stdout);
}

#[test]
fn thread_count_never_changes_the_output() {
    let base = ["survival", "--b", "1", "--beta", "2", "--k", "0,1,5", "--t",
        "0.5", "--reps", "48", "--seed", "7"];
    let mut single = base.to_vec();
    single.extend(["--threads", "1"]);
    let mut quad = base.to_vec();
    quad.extend(["--threads", "4"]);
    let one = bck(&single);
    let four = bck(&quad);
    assert!(one.status.success());
    assert_eq!(one.stdout, four.stdout);
}

#[test]
fn no_arguments_is_a_usage_error() {
    let out = bck(&[]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unknown_flag_is_a_usage_error() {
    let out = bck(&["density", "--frobnicate", "3"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn joint_mode_with_excess_site_mass_is_a_usage_error() {
    let out = bck(&["density", "--mode", "joint", "--b", "0.9", "--k", "0.2",
        "--beta", "0"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_of(&out).contains("b + k"));
    assert!(out.stdout.is_empty(), "no data may reach stdout on a config error");
}

#[test]
fn oversized_oracle_lattice_is_a_usage_error() {
    let out = bck(&["oracle-check", "--n", "80"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn oracle_check_passes_on_a_healthy_build() {
    let out = bck(&["oracle-check", "--n", "12", "--reps", "11", "--seed", "3"]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr_of(&out));
    let text = stdout_of(&out);
    assert!(text.contains("oracle_discrepancies,0,"));
}

#[test]
fn corrupted_rotation_is_caught_with_a_counterexample() {
    let out = bck(&["oracle-check", "--n", "12", "--reps", "11", "--seed", "3",
        "--corrupt-rotation"]);
    assert_eq!(out.status.code(), Some(1));
    let err = stderr_of(&out);
    assert!(err.contains("counterexample at ("), "diagnostic was: {err}");
    assert!(out.stdout.is_empty(), "no data may reach stdout on a failed check");
}

#[test]
fn json_output_is_valid_and_carries_the_config() {
    let out = bck(&["offspring", "--b", "1", "--k", "2", "--beta", "2", "--reps",
        "30", "--format", "json"]);
    assert!(out.status.success());
    let doc: serde_json::Value =
        serde_json::from_str(&stdout_of(&out)).expect("stdout should be valid json");
    assert_eq!(doc["command"], "offspring");
    assert_eq!(doc["config"]["b"], 1.0);
    assert_eq!(doc["config"]["k"][0], 2.0);
    assert_eq!(doc["rows"][0]["quantity"], "offspring_mean");
    assert!(doc["rows"][0]["mean"].is_number());
    assert!(doc["config"].get("threads").is_none(),
        "thread count must not leak into the output");
}

#[test]
fn csv_header_is_stable() {
    let out = bck(&["offspring", "--beta", "2", "--reps", "10"]);
    assert!(out.status.success());
    let text = stdout_of(&out);
    let header = text.lines().next().unwrap();
    assert_eq!(
        header,
        "quantity,mean,std_error,reference,replicates,beta,b,k,seed,mode,t,L,eps,m,n,grid,notes"
    );
}

#[test]
fn config_file_fills_defaults_and_flags_override_it() {
    let path = temp_file("conf");
    std::fs::write(&path, "seed=7\nreps=25\nbeta=2\n# trailing comment\n").unwrap();
    let path_str = path.to_str().unwrap();

    let from_file = bck(&["offspring", "--config", path_str, "--k", "1"]);
    assert!(from_file.status.success());
    let text = stdout_of(&from_file);
    let data = text.lines().nth(1).unwrap();
    let cols: Vec<&str> = data.split(',').collect();
    assert_eq!(cols[4], "25", "reps should come from the file");
    assert_eq!(cols[8], "7", "seed should come from the file");

    let overridden = bck(&["offspring", "--config", path_str, "--k", "1",
        "--seed", "9"]);
    let text = stdout_of(&overridden);
    let cols: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(cols[8], "9", "an explicit flag must beat the file");

    std::fs::remove_file(&path).ok();
}

#[test]
fn unknown_config_key_is_a_usage_error() {
    let path = temp_file("badconf");
    std::fs::write(&path, "bogus=1\n").unwrap();
    let out = bck(&["offspring", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_of(&out).contains("bogus"));
    std::fs::remove_file(&path).ok();
}

#[test]
fn kill_intensity_without_killing_reports_zero_against_zero() {
    let out = bck(&["kill-intensity", "--b", "1", "--k", "0", "--beta", "2",
        "--reps", "10"]);
    assert!(out.status.success());
    let text = stdout_of(&out);
    assert!(text.contains("aged_kill_count,0,0,0,"));
}

#[test]
fn out_flag_redirects_the_data() {
    let path = temp_file("redirect.csv");
    let out = bck(&["offspring", "--beta", "2", "--reps", "10", "--out",
        path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty(), "data went to the file, not stdout");
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("quantity,"));
    std::fs::remove_file(&path).ok();
}

#[test]
fn k_grid_on_a_single_value_subcommand_is_a_usage_error() {
    let out = bck(&["offspring", "--k", "1,2,3", "--beta", "2"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn stationarity_demands_zero_killing() {
    let out = bck(&["stationarity", "--b", "0.1", "--k", "1", "--beta", "0",
        "--t", "10", "--L", "10"]);
    assert_eq!(out.status.code(), Some(2));
}
