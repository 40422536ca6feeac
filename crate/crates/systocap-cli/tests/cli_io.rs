//! End-to-end checks of the binary's IO contract: machine-format
//! determinism, exit codes, stream separation, and config validation.

use std::path::PathBuf;
use std::process::{Command, Output};

fn write_cfg(name: &str, text: &str) -> PathBuf {
    let mut path = PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    path.push(name);
    std::fs::write(&path, text).expect("write config");
    path
}

/// Runs the binary hermetically: the enumeration cap env var is cleared
/// unless a test sets it explicitly.
fn run(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_systocap"));
    cmd.args(args).env_remove("SYSTOCAP_ENUM_CAP");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("spawn systocap")
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("stdout is UTF-8")
}

fn stderr_of(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("stderr is UTF-8")
}

const L1_CFG: &str = r#"{
  "norm": { "family": "lp", "p": 1, "dim": 2 },
  "samples": 400,
  "seed": 11
}"#;

#[test]
fn machine_format_is_byte_identical_across_runs() {
    let cfg = write_cfg("det.json", L1_CFG);
    let args = ["capacity", "--config", cfg.to_str().unwrap(), "--format", "machine"];
    let first = run(&args, &[]);
    let second = run(&args, &[]);
    assert_eq!(first.status.code(), Some(0));
    assert_eq!(first.stdout, second.stdout);
    let text = stdout_of(&first);
    assert!(!text.contains("runtime"), "machine output must not carry timing");
    assert!(stderr_of(&first).is_empty());
}

/// The report's config block, written back out as the whole config file,
/// reproduces the run byte for byte. Flag overrides fold into the echo.
#[test]
fn report_config_block_reproduces_the_run() {
    let cfg = write_cfg(
        "echo-src.json",
        r#"{
  "norm": { "family": "ellipsoid", "gram": [["5", "3"], ["3", "2"]] },
  "samples": 250
}"#,
    );
    let first = run(
        &[
            "capacity",
            "--config",
            cfg.to_str().unwrap(),
            "--seed",
            "7",
            "--format",
            "machine",
        ],
        &[],
    );
    assert_eq!(first.status.code(), Some(0));
    let parsed: serde_json::Value =
        serde_json::from_str(&stdout_of(&first)).expect("machine output is JSON");
    let echoed = serde_json::to_string(&parsed["config"]).expect("config block");
    let echo_cfg = write_cfg("echo-back.json", &echoed);

    // No subcommand, no overrides: the echoed document carries everything.
    let second = run(
        &["--config", echo_cfg.to_str().unwrap(), "--format", "machine"],
        &[],
    );
    assert_eq!(second.status.code(), Some(0));
    assert_eq!(first.stdout, second.stdout);
}

#[test]
fn machine_integers_and_reals_keep_their_types() {
    let cfg = write_cfg("types.json", L1_CFG);
    let out = run(
        &["capacity", "--config", cfg.to_str().unwrap(), "--format", "machine"],
        &[],
    );
    let text = stdout_of(&out);
    assert!(text.contains("\"minimizer\": [0, 1]"), "integer vector stays integral");
    assert!(text.contains("\"value\": 2.0000000000000000e0"), "reals use 17 significant digits");
    assert!(text.contains("\"samples\": 400"));
    let parsed: serde_json::Value = serde_json::from_str(&text).expect("machine output is JSON");
    assert_eq!(parsed["config"]["norm"]["dim"], serde_json::Value::from(2));
}

#[test]
fn machine_keys_are_sorted_at_every_level() {
    let cfg = write_cfg("sorted.json", L1_CFG);
    let out = run(
        &["capacity", "--config", cfg.to_str().unwrap(), "--format", "machine"],
        &[],
    );
    let text = stdout_of(&out);
    let mut depth = 0usize;
    let mut last: Vec<Option<String>> = vec![None; 8];
    for line in text.lines() {
        let trimmed = line.trim();
        if let Some(rest) = trimmed.strip_prefix('"') {
            if let Some(end) = rest.find('"') {
                let key = rest[..end].to_string();
                if let Some(prev) = &last[depth] {
                    assert!(prev < &key, "keys out of order at depth {depth}: {prev} then {key}");
                }
                last[depth] = Some(key);
            }
        }
        if trimmed.ends_with('{') {
            depth += 1;
            last[depth] = None;
        } else if trimmed.starts_with('}') {
            last[depth] = None;
            depth -= 1;
        }
    }
}

#[test]
fn human_format_has_the_identity_line_and_runtime() {
    let cfg = write_cfg("human.json", L1_CFG);
    let out = run(&["capacity", "--config", cfg.to_str().unwrap()], &[]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout_of(&out);
    assert!(text.contains("value = 2·systole"));
    assert!(text.contains("runtime"));
    assert!(text.contains("systocap capacity report"));
}

#[test]
fn subcommand_and_config_command_must_agree() {
    let cfg = write_cfg(
        "mismatch.json",
        r#"{ "norm": { "family": "lp", "p": 1, "dim": 2 }, "command": "systole" }"#,
    );
    let out = run(&["capacity", "--config", cfg.to_str().unwrap()], &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_of(&out).contains("disagrees"));

    let fallback = run(&["--config", cfg.to_str().unwrap()], &[]);
    assert_eq!(fallback.status.code(), Some(0));
    assert!(stdout_of(&fallback).contains("systole"));
}

#[test]
fn usage_errors_exit_with_two() {
    let cfg = write_cfg("usage.json", L1_CFG);
    let path = cfg.to_str().unwrap();

    let no_config = run(&["systole"], &[]);
    assert_eq!(no_config.status.code(), Some(2));

    let no_command = run(&["--config", path], &[]);
    assert_eq!(no_command.status.code(), Some(2));

    let one_sample = run(&["verify-embedding", "--config", path, "--samples", "1"], &[]);
    assert_eq!(one_sample.status.code(), Some(2));
    assert!(stderr_of(&one_sample).contains("at least 2 samples"));

    let bad_env = run(&["systole", "--config", path], &[("SYSTOCAP_ENUM_CAP", "banana")]);
    assert_eq!(bad_env.status.code(), Some(2));

    let bad_flag = run(&["systole", "--config", path, "--format", "yaml"], &[]);
    assert_eq!(bad_flag.status.code(), Some(2));
}

#[test]
fn invalid_configs_exit_with_two() {
    let sub_unit = write_cfg(
        "p05.json",
        r#"{ "norm": { "family": "lp", "p": 0.5, "dim": 2 } }"#,
    );
    let out = run(&["systole", "--config", sub_unit.to_str().unwrap()], &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_of(&out).contains("p >= 1"));

    let foreign = write_cfg(
        "foreign.json",
        r#"{ "norm": { "family": "lp", "p": 1, "dim": 2, "gram": [[1]] } }"#,
    );
    let out = run(&["systole", "--config", foreign.to_str().unwrap()], &[]);
    assert_eq!(out.status.code(), Some(2));

    let unknown = write_cfg(
        "unknown.json",
        r#"{ "norm": { "family": "lp", "p": 1, "dim": 2 }, "extra": 1 }"#,
    );
    let out = run(&["systole", "--config", unknown.to_str().unwrap()], &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_of(&out).contains("unknown field"));
}

#[test]
fn component_failures_exit_with_one_and_report_on_stderr() {
    let cfg = write_cfg("cap.json", L1_CFG);
    let out = run(
        &["capacity", "--config", cfg.to_str().unwrap(), "--format", "machine"],
        &[("SYSTOCAP_ENUM_CAP", "2")],
    );
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout_of(&out).is_empty());
    let err = stderr_of(&out);
    assert!(err.contains("\"kind\": \"resource-limit\""));
    let parsed: serde_json::Value = serde_json::from_str(&err).expect("error block is JSON");
    assert!(parsed["error"]["message"].is_string());
}

#[test]
fn rational_strings_reach_the_exact_path() {
    let cfg = write_cfg(
        "rat.json",
        r#"{
  "norm": { "family": "ellipsoid", "gram": [["5", "3"], ["3", "2"]] },
  "samples": 300
}"#,
    );
    let out = run(
        &["capacity", "--config", cfg.to_str().unwrap(), "--format", "machine"],
        &[],
    );
    assert_eq!(out.status.code(), Some(0));
    let text = stdout_of(&out);
    assert!(text.contains("\"minimizer\": [1, -1]"));
    assert!(text.contains("\"systole\": 1.0000000000000000e0"));
    assert!(text.contains("\"case\": \"riemannian\""));
}

#[test]
fn minorant_gram_flag_reclassifies_the_run() {
    let cfg = write_cfg(
        "minorant.json",
        r#"{
  "norm": { "family": "polytope-v", "vertices": [[1, 0], [-1, 0], [0, 1], [0, -1]] },
  "samples": 300,
  "assume_hz": false
}"#,
    );
    let gram = write_cfg("minorant-gram.json", r#"[["1", "0"], ["0", "1"]]"#);
    let without = run(
        &["capacity", "--config", cfg.to_str().unwrap(), "--format", "machine"],
        &[],
    );
    assert_eq!(without.status.code(), Some(0));
    assert!(stdout_of(&without).contains("\"case\": \"upper-bound-only\""));

    let with = run(
        &[
            "capacity",
            "--config",
            cfg.to_str().unwrap(),
            "--minorant-gram",
            gram.to_str().unwrap(),
            "--format",
            "machine",
        ],
        &[],
    );
    assert_eq!(with.status.code(), Some(0));
    let text = stdout_of(&with);
    assert!(
        text.contains("\"case\": \"minorant-provided\""),
        "expected minorant case, got:\n{text}"
    );
}

#[test]
fn certify_lower_cites_the_hofer_zehnder_constant() {
    let cfg = write_cfg("lower.json", L1_CFG);
    let out = run(
        &["certify-lower", "--config", cfg.to_str().unwrap(), "--format", "machine"],
        &[],
    );
    assert_eq!(out.status.code(), Some(0));
    let text = stdout_of(&out);
    assert!(text.contains("c_HZ(K x K*) = 4 by [Theorem 1.7]{AKO}"));
    assert!(text.contains("\"status\": \"certified\""));
}

#[test]
fn certify_upper_reports_the_cylinder_identity() {
    let cfg = write_cfg("upper.json", L1_CFG);
    let out = run(
        &["certify-upper", "--config", cfg.to_str().unwrap(), "--format", "machine"],
        &[],
    );
    assert_eq!(out.status.code(), Some(0));
    let text = stdout_of(&out);
    assert!(text.contains("\"pass\": true"));
    let parsed: serde_json::Value = serde_json::from_str(&text).expect("report is JSON");
    let residual = parsed["cylinder_identity_residual"].as_f64().unwrap();
    assert!(residual <= 1e-12, "pi r1^2 = 2 s_1 residual {residual}");
}

#[test]
fn flag_overrides_beat_config_values() {
    let cfg = write_cfg("override.json", L1_CFG);
    let out = run(
        &[
            "axioms",
            "--config",
            cfg.to_str().unwrap(),
            "--samples",
            "123",
            "--seed",
            "99",
            "--format",
            "machine",
        ],
        &[],
    );
    assert_eq!(out.status.code(), Some(0));
    let text = stdout_of(&out);
    assert!(text.contains("\"samples\": 123"));
    assert!(text.contains("\"seed\": 99"));
}
