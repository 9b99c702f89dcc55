//! End-to-end runs of the binary: exit codes, report structure, and
//! byte stability across identical invocations.

use std::io::Write as _;
use std::process::{Command, Output};

use lelong::fixtures::{gen_example, ExampleParams, Fact};
use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lelong-cli")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf8 stdout")
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("utf8 stderr")
}

fn temp_json(value: &Value) -> tempfile::NamedTempFile {
    let mut file = tempfile::NamedTempFile::new().expect("temp file");
    file.write_all(serde_json::to_string(value).expect("serialize").as_bytes()).expect("write");
    file
}

fn example_current(id: &str) -> tempfile::NamedTempFile {
    let data = gen_example(id, &ExampleParams::default()).expect("catalog id");
    temp_json(&serde_json::to_value(&data.current).expect("current serializes"))
}

#[test]
fn example_check_passes_and_reports_the_value() {
    let out = run(&["example", "--id", "3.2", "--check"]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("2/3"), "missing Lelong value in:\n{text}");
    assert!(text.contains("all 4 stated facts re-checked") || text.contains("re-checked"));
}

#[test]
fn example_unknown_id_is_an_input_error() {
    let out = run(&["example", "--id", "9.9"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("unknown example id"));
}

#[test]
fn usage_errors_exit_two() {
    let out = run(&["example", "--no-such-flag"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn mass_reads_a_current_file() {
    let file = example_current("3.2");
    let out = run(&["mass", "--current", file.path().to_str().unwrap()]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("mass: 1"), "missing mass in:\n{text}");
    assert!(text.contains("fnv1a64"), "missing input digest in:\n{text}");
}

#[test]
fn malformed_current_is_an_input_error() {
    let file = temp_json(&Value::String("not a current".into()));
    let out = run(&["mass", "--current", file.path().to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("malformed current"));
}

#[test]
fn lelong_reports_the_exact_value_at_a_catalog_point() {
    let data = gen_example("3.2", &ExampleParams::default()).expect("catalog id");
    let (point, value) = data
        .facts
        .iter()
        .find_map(|f| match f {
            Fact::LelongAt { point, value } => Some((point.clone(), value.clone())),
            _ => None,
        })
        .expect("the fixture states a Lelong value");
    let file = example_current("3.2");
    let point_arg = serde_json::to_string(&point).expect("point serializes");
    let out = run(&["lelong", "--current", file.path().to_str().unwrap(), "--point", &point_arg]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains(&format!("lower: {value}")), "missing value in:\n{text}");
    assert!(text.contains("exact: true"));
}

#[test]
fn lelong_rejects_a_point_of_the_wrong_dimension() {
    let file = example_current("3.2");
    let out =
        run(&["lelong", "--current", file.path().to_str().unwrap(), "--point", "[0,0,0,1]"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("ambient dimension"));
}

#[test]
fn levelset_counts_and_dumps_points() {
    let file = example_current("3.2");
    let out = run(&[
        "levelset",
        "--current",
        file.path().to_str().unwrap(),
        "--alpha",
        "2/3",
        "--dump-points",
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("points_in: 3"), "wrong count in:\n{text}");
    assert!(text.contains("dump:"));
}

#[test]
fn classify_reports_a_verified_shape() {
    let file = example_current("3.3");
    let out =
        run(&["classify", "--current", file.path().to_str().unwrap(), "--alpha", "49/100"]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("verified: true"));
    assert!(text.contains("shape: "));
}

#[test]
fn invariants_computes_both_counts_inline() {
    let out =
        run(&["invariants", "--points", "[[1,0,0],[0,1,0],[0,0,1],[1,1,1]]"]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("m1: 2"), "wrong m1 in:\n{text}");
    assert!(text.contains("m2: 4"), "wrong m2 in:\n{text}");
}

#[test]
fn verify_theorem_fuzz_passes_and_counts_checks() {
    let out = run(&["verify-theorem", "--which", "1.2", "--fuzz", "5", "--seed", "7"]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("checks: 10"), "5 currents x 2 thresholds in:\n{text}");
    assert!(text.contains("pass: true"));
}

#[test]
fn verify_theorem_fuzz_requires_a_seed() {
    let out = run(&["verify-theorem", "--which", "1.2", "--fuzz", "5"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("--seed"));
}

#[test]
fn reports_are_byte_stable() {
    let args = ["verify-theorem", "--which", "1.1", "--fuzz", "3", "--seed", "11"];
    let first = run(&args);
    let second = run(&args);
    assert_eq!(code(&first), 0);
    assert_eq!(first.stdout, second.stdout);

    let json_args = ["example", "--id", "3.6", "--check", "--json"];
    let first = run(&json_args);
    let second = run(&json_args);
    assert_eq!(code(&first), 0);
    assert_eq!(first.stdout, second.stdout);
}

#[test]
fn json_report_has_the_contract_fields() {
    let out = run(&["example", "--id", "3.2", "--check", "--json"]);
    assert_eq!(code(&out), 0);
    let report: Value = serde_json::from_str(&stdout(&out)).expect("valid JSON");
    for key in ["command", "inputs", "results", "certificates", "warnings"] {
        assert!(report.get(key).is_some(), "missing {key}");
    }
    assert_eq!(report["results"]["mass"], Value::String("1".into()));
}

#[test]
fn green_report_feeds_prop21() {
    let out = run(&[
        "green",
        "--construct",
        "pencil",
        "--points",
        "[[0,0],[1,0],[0,1]]",
        "--json",
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let report: Value = serde_json::from_str(&stdout(&out)).expect("valid JSON");
    assert_eq!(report["results"]["gamma"], Value::Number(2.into()));
    let green_file = temp_json(&report["results"]["green"]);
    let current_file = example_current("3.2");
    let out = run(&[
        "prop21",
        "--current",
        current_file.path().to_str().unwrap(),
        "--green",
        green_file.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    assert!(stdout(&out).contains("holds: true"));
}

#[test]
fn green_estimate_requires_a_seed() {
    let out = run(&[
        "green",
        "--construct",
        "pencil",
        "--points",
        "[[0,0],[1,0],[0,1]]",
        "--radii",
        "1e4,1e6",
    ]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("--seed"));
}

#[test]
fn green_estimate_tracks_gamma() {
    let pts = lelong::fixtures::random_seven_point_config(
        6_000,
        lelong::fixtures::SevenPointKind::Generic,
    );
    let points_arg = serde_json::to_string(&pts).expect("points serialize");
    let out = run(&[
        "green",
        "--construct",
        "seven-point",
        "--points",
        &points_arg,
        "--radii",
        "1e4,1e6",
        "--seed",
        "5",
        "--json",
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let report: Value = serde_json::from_str(&stdout(&out)).expect("valid JSON");
    assert_eq!(report["results"]["gamma"], Value::Number(4.into()));
    let err = report["results"]["estimate"]["gamma_error"].as_f64().expect("estimate ran");
    assert!(err <= 1e-2, "estimate strays by {err}");
    let certs = report["certificates"].as_array().expect("certificates");
    assert!(certs.iter().any(|c| c.as_str().unwrap_or("").contains("sum to 16")));
}

#[test]
fn verify_theorem_single_check_on_a_catalog_current() {
    let file = example_current("3.3");
    let out = run(&[
        "verify-theorem",
        "--which",
        "1.2",
        "--current",
        file.path().to_str().unwrap(),
        "--alpha",
        "2/5",
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    assert!(stdout(&out).contains("pass: true"));
}
