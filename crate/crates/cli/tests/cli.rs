use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use rotgen_core::verify::SuiteConfig;
use serde_json::Value;

fn rotgen(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rotgen")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn repo_file(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..").join(rel)
}

fn read_report(path: &Path) -> Value {
    let report: Value = serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap();
    let schema: Value = serde_json::from_str(&fs::read_to_string(repo_file("docs/report.schema.json")).unwrap()).unwrap();
    let validator = jsonschema::validator_for(&schema).expect("schema compiles");
    let errors: Vec<String> = validator.iter_errors(&report).map(|e| format!("{} at {}", e, e.instance_path)).collect();
    assert!(errors.is_empty(), "report does not match the schema: {errors:#?}");
    report
}

fn write_config(dir: &tempfile::TempDir, text: &str) -> PathBuf {
    let path = dir.path().join("config.json");
    fs::write(&path, text).unwrap();
    path
}

#[test]
fn sym_examples() {
    let out = rotgen(&["sym", "[Lx,Ly] - i*hbar*Lz", "--check-zero"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert_eq!(stdout(&out).trim(), "0");

    let out = rotgen(&["sym", "x*dy"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out).trim(), "x∂y");

    let out = rotgen(&["sym", "[x, -i*hbar*dx]"]);
    assert_eq!(stdout(&out).trim(), "iħ");

    let out = rotgen(&["sym", "[Lx,Ly]", "--check-zero"]);
    assert_eq!(code(&out), 1);
}

#[test]
fn sym_parse_error_reports_position() {
    let out = rotgen(&["sym", "x + q"]);
    assert_eq!(code(&out), 2);
    let err = stderr(&out);
    assert!(err.contains("position 4"), "{err}");
    assert!(err.contains("      ^"), "{err}");
}

#[test]
fn sym_report() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("sym.json");
    let out = rotgen(&["sym", "[Lz, x]", "--check-zero", "--json", json.to_str().unwrap(), "--quiet"]);
    assert_eq!(code(&out), 1);
    assert!(stdout(&out).is_empty());
    let report = read_report(&json);
    assert_eq!(report["sym"]["canonical"], "iħy");
    assert_eq!(report["sym"]["is_zero"], false);
    assert_eq!(report["manifest"]["subcommand"], "sym");
    assert_eq!(report["manifest"]["config"], Value::Null);
    assert_eq!(report["records"][0]["pass"], false);
}

#[test]
fn resolvent_examples() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("r.json");
    let out = rotgen(&["resolvent", "-n", "64", "--lambda", "1,2,5", "--json", json.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    let report = read_report(&json);
    assert_eq!(report["summary"]["failed"], 0);
    assert_eq!(report["summary"]["total"], 6);
    let config = &report["manifest"]["config"];
    assert_eq!(config["checks"], serde_json::json!(["resolvent"]));
    assert_eq!(config["resolvent"]["lambdas"], serde_json::json!(["1", "2", "5"]));

    for bad in ["-1", "0", "1,abc", "2;3"] {
        let out = rotgen(&["resolvent", "--lambda", bad]);
        assert_eq!(code(&out), 2, "--lambda {bad}: {}", stderr(&out));
    }
    let out = rotgen(&["resolvent", "--scheme", "spectral", "-n", "32", "--quiet"]);
    assert_eq!(code(&out), 0);
    let out = rotgen(&["resolvent", "--scheme", "chebyshev"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn every_human_number_is_in_the_json() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("r.json");
    let out = rotgen(&["resolvent", "-n", "16", "--lambda", "0.5+1i,3", "--json", json.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let report = read_report(&json);
    let mut json_numbers = Vec::new();
    for r in report["records"].as_array().unwrap() {
        for key in ["residual", "tolerance"] {
            if let Some(v) = r[key].as_f64() {
                json_numbers.push(v);
            }
        }
    }
    let text = stdout(&out);
    let mut seen = 0;
    for line in text.lines().filter(|l| l.starts_with("PASS") || l.starts_with("FAIL")) {
        let fields: Vec<&str> = line.split_whitespace().collect();
        let (res, tol) = (fields[fields.len() - 3], fields[fields.len() - 1]);
        for v in [res, tol] {
            let v: f64 = v.parse().unwrap();
            assert!(json_numbers.contains(&v), "{v} from '{line}' missing in JSON");
            seen += 1;
        }
    }
    assert_eq!(seen, json_numbers.len());
    let summary = text.lines().last().unwrap();
    assert_eq!(summary, format!("{}/{} passed, 0 failed, 0 reported only", report["summary"]["passed"], report["summary"]["total"]));
}

#[test]
fn logrep_examples() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("l.json");
    let out = rotgen(&["logrep", "--gen", "rot2d", "-n", "16", "--kappa", "2", "--t", "0.3", "--json", json.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    let report = read_report(&json);
    let checks: Vec<&str> = report["records"].as_array().unwrap().iter().map(|r| r["check"].as_str().unwrap()).collect();
    assert_eq!(checks, ["logrep_reconstruction", "logrep_series", "semigroup_violation", "semigroup_control"]);
    assert_eq!(report["manifest"]["config"]["semigroup"]["times"], serde_json::json!([0.3, 0.15, 0.0]));

    let out = rotgen(&["logrep", "--kappa", "0"]);
    assert_eq!(code(&out), 3);
    assert!(stderr(&out).contains("non-zero"), "{}", stderr(&out));
}

#[test]
fn logrep_branch_cut_is_a_precondition_violation() {
    // U(t,s) of the upwind derivative has eigenvalues near 1, so κ = −1
    // puts the spectrum of U + κI on the cut
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("l.json");
    let out = rotgen(&["logrep", "--gen", "upwind", "-n", "16", "--kappa", "-1", "--t", "0.5", "--json", json.to_str().unwrap()]);
    assert_eq!(code(&out), 3, "{}", stdout(&out));
    let err = stderr(&out);
    assert!(err.contains("eigenvalue") && err.contains("branch cut"), "{err}");
    let report = read_report(&json);
    assert!(report["records"].as_array().unwrap().iter().all(|r| r["precondition"] == true));
}

#[test]
fn logrep_rot3d() {
    let out = rotgen(&["logrep", "--gen", "rot3d", "-n", "8", "--quiet"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
}

#[test]
fn rotate_resolved_and_under_resolved() {
    let out = rotgen(&["rotate", "-n", "32", "--theta", "pi/6,pi/2"]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    assert!(stdout(&out).contains("rotation_group_law"));

    let out = rotgen(&["rotate", "-n", "4", "--theta", "pi/4", "--field", "x"]);
    assert_eq!(code(&out), 1, "{}", stdout(&out));
    assert!(stdout(&out).contains("FAIL rotation_compare"));

    let out = rotgen(&["rotate", "--theta", "sixty"]);
    assert_eq!(code(&out), 2);
    let out = rotgen(&["rotate", "--field", "w"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn rotate_wide_field_is_a_precondition_violation() {
    let out = rotgen(&["rotate", "-n", "8", "--theta", "0.1", "--field", "1", "--sigma", "3"]);
    assert_eq!(code(&out), 3, "{}", stdout(&out));
}

#[test]
fn suite_config_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    for (text, needle) in [("", "empty"), ("   \n", "empty"), ("{}", "checks"), ("{\"checks\": [\"symbolic\"] ", "EOF")] {
        let out = rotgen(&["suite", write_config(&dir, text).to_str().unwrap()]);
        assert_eq!(code(&out), 2, "{text:?}");
        assert!(stderr(&out).contains(needle), "{text:?}: {}", stderr(&out));
    }
    let text = r#"{"checks": ["symbolic"], "bogus": 1, "rotation": {"n": 8, "fields": [{"x": 1, "w": 2}]}}"#;
    let out = rotgen(&["suite", write_config(&dir, text).to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    let err = stderr(&out);
    assert!(err.contains("bogus") && err.contains("rotation.fields[0].w"), "{err}");

    let out = rotgen(&["suite", write_config(&dir, r#"{"checks": ["symbolic"], "sum": {"n": 1}}"#).to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("sum.n"), "{}", stderr(&out));

    let out = rotgen(&["suite", dir.path().join("missing.json").to_str().unwrap()]);
    assert_eq!(code(&out), 2);
}

#[test]
fn suite_under_resolved_rotation_fails() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(&dir, r#"{"checks": ["rotation"], "rotation": {"n": 4, "thetas": [0.5], "group_pairs": []}}"#);
    let out = rotgen(&["suite", config.to_str().unwrap(), "--quiet"]);
    assert_eq!(code(&out), 1);
}

#[test]
fn suite_report_manifest_and_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let from_config = dir.path().join("from_config.json");
    let text = format!(
        r#"{{"checks": ["symbolic", "oracle", "norm_growth"], "seed": 7, "output": {:?}, "oracle": {{"count": 4, "max_dim": 6}}, "norm_growth": {{"n": [8, 16]}}}}"#,
        from_config.to_str().unwrap()
    );
    let config = write_config(&dir, &text);
    let out = rotgen(&["suite", config.to_str().unwrap(), "--jobs", "2", "--quiet"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let report = read_report(&from_config);
    let manifest = &report["manifest"];
    assert_eq!(manifest["seed"], 7);
    assert_eq!(manifest["jobs"], 2);
    assert_eq!(manifest["config_path"], config.to_str().unwrap());
    assert_eq!(manifest["config"]["oracle"]["count"], 4);
    assert_eq!(manifest["config"]["resolvent"]["n"], serde_json::json!([32, 64, 128]));
    assert!(!manifest["version"].as_str().unwrap().is_empty());
    assert!(chrono_like(manifest["timestamp"].as_str().unwrap()));

    let flag_json = dir.path().join("flag.json");
    let csv = dir.path().join("flag.csv");
    let out = rotgen(&["suite", config.to_str().unwrap(), "--seed", "9", "--json", flag_json.to_str().unwrap(), "--csv", csv.to_str().unwrap(), "--quiet"]);
    assert_eq!(code(&out), 0);
    let report = read_report(&flag_json);
    assert_eq!(report["manifest"]["seed"], 9);
    assert_eq!(report["manifest"]["config"]["seed"], 9);

    let csv_text = fs::read_to_string(&csv).unwrap();
    let mut lines = csv_text.lines();
    let manifest_line = lines.next().unwrap();
    let embedded: Value = serde_json::from_str(manifest_line.strip_prefix("# manifest: ").unwrap()).unwrap();
    assert_eq!(embedded["seed"], 9);
    assert_eq!(lines.next().unwrap(), "check,case,n,L,kappa_re,kappa_im,t,s,residual,tolerance,relation,pass,wall_ms,error");
    assert_eq!(lines.count(), report["records"].as_array().unwrap().len());
}

fn chrono_like(ts: &str) -> bool {
    ts.len() > 20 && ts.as_bytes()[4] == b'-' && ts.contains('T')
}

#[test]
fn shipped_default_config_is_the_default_suite() {
    let text = fs::read_to_string(repo_file("configs/default.json")).unwrap();
    assert_eq!(SuiteConfig::from_json_str(&text).unwrap(), SuiteConfig::default_suite());
}
