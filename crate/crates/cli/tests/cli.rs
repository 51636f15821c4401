use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use padic_orbits_cli::{cmd_count_heights, CliError, Overrides, Problem, ProblemFile};
use serde_json::Value;

const FIXTURES: [&str; 5] = ["counterexample", "translation", "fibonacci", "multiplier", "fixed_point"];
const COMMANDS: [&str; 7] = ["orbit", "period", "mahler-fit", "series-diag", "dml-solve", "return-set", "gap-ratio"];

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(format!("{name}.json"))
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_padic-orbits")).args(args).output().unwrap()
}

fn run_json(args: &[&str]) -> Value {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn problem_files_round_trip() {
    for name in FIXTURES.iter().chain(["malformed"].iter()) {
        let text = std::fs::read_to_string(fixture(name)).unwrap();
        let p = ProblemFile::from_json(&text).unwrap();
        assert_eq!(ProblemFile::from_json(&p.to_json()).unwrap(), p, "{name}");
    }
}

#[test]
fn reports_are_byte_identical_across_runs() {
    for name in FIXTURES {
        let f = fixture(name);
        for cmd in COMMANDS {
            let args = [cmd, f.to_str().unwrap(), "--horizon", "120"];
            let (a, b) = (run(&args), run(&args));
            assert_eq!(a.status.code(), b.status.code(), "{cmd} {name}");
            assert_eq!(a.stdout, b.stdout, "{cmd} {name}");
            assert_eq!(a.stderr, b.stderr, "{cmd} {name}");
        }
    }
}

#[test]
fn envelope_keys_are_sorted() {
    let out = run(&["period", fixture("fibonacci").to_str().unwrap()]);
    let text = String::from_utf8(out.stdout).unwrap();
    let top: Vec<&str> = text.lines().filter(|l| l.starts_with("  \"")).map(|l| l.trim().split('"').nth(1).unwrap()).collect();
    assert_eq!(top, ["command", "input_digest", "parameters", "payload", "tool_version", "warnings"]);
}

#[test]
fn counterexample_orbit_reaches_24() {
    let v = run_json(&["orbit", fixture("counterexample").to_str().unwrap(), "--horizon", "4"]);
    let points = v["payload"]["points"].as_array().unwrap();
    assert_eq!(points.len(), 5);
    assert_eq!(points[4], serde_json::json!(["0", "24", "5"]));
}

#[test]
fn translation_has_period_five() {
    let v = run_json(&["period", fixture("translation").to_str().unwrap()]);
    assert_eq!(v["payload"]["period"], 5);
    assert_eq!(v["payload"]["preperiod"], 0);
}

#[test]
fn malformed_polynomial_exits_with_syntax_error() {
    let out = run(&["orbit", fixture("malformed").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"]["kind"], "syntax");
    assert_eq!(err["error"]["position"], 5);
}

#[test]
fn malformed_json_exits_2() {
    let dir = std::env::temp_dir().join(format!("padic-orbits-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("broken.json");
    std::fs::write(&path, "{\"prime\": 5,").unwrap();
    assert_eq!(run(&["period", path.to_str().unwrap()]).status.code(), Some(2));
    std::fs::write(&path, r#"{"prime": 4, "variables": ["x"], "map": ["x"], "point": ["0"]}"#).unwrap();
    assert_eq!(run(&["period", path.to_str().unwrap()]).status.code(), Some(2));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn count_heights_examples() {
    let v = run_json(&["count-heights", "1"]);
    assert_eq!(v["payload"]["count"], 3);
    let out = run(&["count-heights", "20000"]);
    assert_eq!(out.status.code(), Some(4));
    assert_eq!(cmd_count_heights(10).unwrap().payload["count"], 127);
}

#[test]
fn precision_failures_map_to_exit_3() {
    let e = CliError::Core(padic_orbits::Error::PrecisionExhausted("class 0".into()));
    assert_eq!(e.exit_code(), 3);
    assert_eq!(e.to_json()["error"]["kind"], padic_orbits::Error::PrecisionExhausted(String::new()).name());
}

#[test]
fn fibonacci_zero_set_is_zero() {
    let v = run_json(&["dml-solve", fixture("fibonacci").to_str().unwrap()]);
    let sols = v["payload"]["solutions"].as_array().unwrap();
    assert_eq!(sols[0]["exact_hits"], serde_json::json!([0]));
    assert_eq!(sols[0]["progressions"], serde_json::json!([]));
}

#[test]
fn translation_ratios_are_one() {
    let v = run_json(&["gap-ratio", fixture("translation").to_str().unwrap(), "--horizon", "300"]);
    for r in v["payload"]["report"]["records"].as_array().unwrap().iter().skip(2) {
        let h = &r["height"];
        assert_eq!(h["numerator"], r["n"].to_string());
        assert_eq!(h["denominator"], "1");
        assert_eq!(r["ratio"], 1.0);
    }
}

#[test]
fn certified_reports_carry_a_bound() {
    for name in FIXTURES {
        let text = std::fs::read_to_string(fixture(name)).unwrap();
        let p = Problem::load(&text, Overrides { horizon: Some(200), ..Overrides::default() }).unwrap();
        if p.targets.is_empty() {
            continue;
        }
        let r = padic_orbits_cli::cmd_dml_solve(&p).unwrap();
        for s in r.payload["solutions"].as_array().unwrap() {
            if s["certification"] == "ETALE_CERTIFIED" && s["warnings"].as_array().unwrap().is_empty() {
                assert!(s["uniform_bound"].is_u64(), "{name}");
            }
        }
    }
}

#[test]
fn out_flag_writes_the_same_bytes() {
    let f = fixture("translation");
    let path = std::env::temp_dir().join(format!("padic-orbits-out-{}.json", std::process::id()));
    let direct = run(&["period", f.to_str().unwrap()]);
    let out = run(&["period", f.to_str().unwrap(), "--out", path.to_str().unwrap()]);
    assert!(out.status.success() && out.stdout.is_empty());
    assert_eq!(std::fs::read(&path).unwrap(), direct.stdout);
    std::fs::remove_file(&path).unwrap();
}
