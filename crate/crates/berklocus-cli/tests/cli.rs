use std::io::Write;
use std::process::{Command, Output, Stdio};

use berklocus::oracle::fixtures;
use serde_json::Value;

fn run_with(args: &[&str], stdin: &str, env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_berklocus"));
    cmd.args(args).stdin(Stdio::piped()).stdout(Stdio::piped()).stderr(Stdio::piped());
    cmd.env_remove("BERKLOCUS_CONFIG");
    for (k, v) in env {
        cmd.env(k, v);
    }
    let mut child = cmd.spawn().unwrap();
    // the process may exit before reading its input
    let _ = child.stdin.take().unwrap().write_all(stdin.as_bytes());
    child.wait_with_output().unwrap()
}

fn run(args: &[&str], stdin: &str) -> Output {
    run_with(args, stdin, &[])
}

fn json_of(o: &Output) -> Value {
    assert!(o.status.success(), "stderr: {}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).unwrap()
}

fn kinds(v: &Value) -> Vec<String> {
    let mut k: Vec<String> =
        v["components"].as_array().unwrap().iter().map(|c| c["kind"].as_str().unwrap().to_string()).collect();
    k.sort();
    k
}

const TRANSLATION: &str = "p = 3\nnum = [1, 1]\nden = [1]\n";
const CUBE: &str = "p = 3\nnum = [0, 0, 0, 1]\nden = [1]\n";
const SQUARE: &str = "p = 5\nnum = [0, 0, 1]\nden = [1]\n";

#[test]
fn translation_has_one_indifferent_component() {
    let v = json_of(&run(&["analyze", "--input", "-", "--format", "json"], TRANSLATION));
    assert_eq!(v["schema_version"], 1);
    assert_eq!(kinds(&v), ["indifferent"]);
    assert_eq!(v["crucial_points"]["total"], 0);
}

#[test]
fn cube_in_residue_characteristic_three() {
    let v = json_of(&run(&["analyze", "--input", "-", "--format", "json"], CUBE));
    assert!(kinds(&v).contains(&"hyperbolic".to_string()));
    assert_eq!(v["crucial_points"]["total"], 2);
    let checks = v["checks"].as_array().unwrap();
    assert!(checks.iter().all(|c| c["status"] != "fail"));
    // exact rationals are strings
    assert!(v["classical"].as_array().unwrap().iter().all(|c| c["multiplier_valuation"].is_string()));
}

#[test]
fn malformed_coefficient_is_a_parse_error() {
    let o = run(&["analyze", "--input", "-"], "p = 5\n\nnum = [1, 1/0]\nden = [1]\n");
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("line 3") && err.contains("num[1]"), "{err}");
}

#[test]
fn unusable_radius_needs_extension() {
    let o = run(&["reduce-at", "--input", "-", "--center", "0", "--s", "1/3"], SQUARE);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("ramification 3"));
}

#[test]
fn scaling_reduces_to_multiplication() {
    let o = run(&["reduce-at", "--input", "-", "--center", "0", "--s", "-2", "--format", "json"], "p = 5\nnum = [0, 2]\nden = [1]");
    let v = json_of(&o);
    assert_eq!(v["local_data"]["reduced_map"], "2w");
    assert_eq!(v["local_data"]["class"], "multiplicatively-indifferent");
}

#[test]
fn segment_map_reduction_at_gauss_point() {
    let o = run(&["reduce-at", "--input", "-", "--center", "0", "--s", "0"], "p = 3\nnum = [0, 0, 1]\nden = [-1, 2]");
    let text = String::from_utf8_lossy(&o.stdout);
    assert!(text.contains("fixed, repelling, degree 2"), "{text}");
}

#[test]
fn square_tree_is_a_star() {
    let o = run(&["tree", "--input", "-"], SQUARE);
    assert!(o.status.success());
    let dot = String::from_utf8(o.stdout).unwrap();
    assert!(dot.starts_with("graph fixlocus {"));
    let centre = dot.lines().find(|l| l.contains("zeta(0, 0)")).unwrap().split_whitespace().next().unwrap().to_string();
    let spokes = dot.lines().filter(|l| l.contains(" -- ") && l.contains(&centre)).count();
    assert_eq!(spokes, 3);
    assert!(dot.contains("class=\"repelling\""));
}

#[test]
fn tree_marks_id_indifferent_arcs() {
    let dot = String::from_utf8(run(&["tree", "--input", "-"], TRANSLATION).stdout).unwrap();
    assert!(dot.contains("class=\"id-indifferent\", color=red"));
    assert!(dot.contains("class=\"additively-indifferent\", color=blue"));
}

#[test]
fn suite_passes() {
    let o = run(&["verify", "--suite"], "");
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stdout));
}

#[test]
fn good_residue_check_skipped_when_p_small() {
    let v = json_of(&run(&["verify", "--input", "-", "--format", "json"], CUBE));
    let c = v["checks"].as_array().unwrap().iter().find(|c| c["name"] == "no-hyperbolic-when-p-exceeds-degree").unwrap();
    assert_eq!(c["status"], "skipped");
    assert!(c["detail"].as_str().unwrap().starts_with("skipped (precondition)"));
}

#[test]
fn moebius_verification_includes_closed_form() {
    let v = json_of(&run(&["verify", "--input", "-", "--format", "json"], "p = 5\nnum = [1, 6]\nden = [1]"));
    assert!(v["checks"].as_array().unwrap().iter().any(|c| c["name"] == "closed-form-membership" && c["status"] == "pass"));
}

#[test]
fn echo_round_trips_and_output_is_deterministic() {
    let input = "p = 3\nn = 2\nnum = [pi, 1/2, 3*pi - 1]\nden = [1, pi]\n";
    let a = run(&["analyze", "--input", "-", "--format", "json"], input);
    let b = run(&["analyze", "--input", "-", "--format", "json"], input);
    assert_eq!(a.stdout, b.stdout);
    let v = json_of(&a);
    let echo = v["map"]["echo"].as_str().unwrap();
    let again = json_of(&run(&["analyze", "--input", "-", "--format", "json"], echo));
    assert_eq!(again["map"], v["map"]);
}

#[test]
fn config_file_and_param_override() {
    let dir = std::env::temp_dir().join(format!("berklocus-cli-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("config");
    std::fs::write(&cfg, "format = json\nray_budget = 32\n").unwrap();
    let input = "p = 5\nt = 1\nnum = [t, 1]\nden = [1]\n";
    let o = run_with(&["analyze", "--input", "-", "--param", "t=0"], input, &[("BERKLOCUS_CONFIG", cfg.to_str().unwrap())]);
    let v = json_of(&o);
    // with t = 0 the map is the identity
    assert_eq!(v["identity"], true);
    std::fs::write(&cfg, "colour = red\n").unwrap();
    let o = run_with(&["analyze", "--input", "-"], input, &[("BERKLOCUS_CONFIG", cfg.to_str().unwrap())]);
    assert_eq!(o.status.code(), Some(1));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn fixture_inputs_parse() {
    for fx in fixtures() {
        let o = run(&["reduce-at", "--input", "-", "--center", "0", "--s", "0"], &fx.input_text());
        assert!(o.status.success(), "{}: {}", fx.name, String::from_utf8_lossy(&o.stderr));
    }
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(run(&["analyze"], "").status.code(), Some(1));
    assert_eq!(run(&["weights", "--input", "-", "--format", "dot"], SQUARE).status.code(), Some(1));
}
