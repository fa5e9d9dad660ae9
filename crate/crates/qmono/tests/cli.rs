//! End-to-end checks of the `qmono` binary: exit codes, output formats, and
//! the no-direction agreement between `test` and `oracle`.

mod common;

use common::fixture_path;
use std::collections::BTreeSet;
use std::process::{Command, Output};

fn qmono(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qmono"))
        .args(args)
        .env_remove("QMONO_SEED")
        .output()
        .expect("binary runs")
}

fn fixture_arg(name: &str) -> String {
    fixture_path(name).to_string_lossy().into_owned()
}

#[test]
fn test_subcommand_answers_and_exit_codes() {
    let fig3 = fixture_arg("fig3.circ");

    // x1^4*x2 is a degree-5 5-monomial
    let out = qmono(&[
        "test",
        "-c",
        &fig3,
        "-q",
        "5",
        "-k",
        "5",
        "--confidence",
        "1e-4",
        "--seed",
        "7",
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("decision: yes"), "{text}");

    // no multilinear monomial at all
    let out = qmono(&["test", "-c", &fig3, "-q", "2", "-k", "2", "--seed", "7"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).contains("decision: no"));

    // bad flags exit 2 (clap usage error)
    let out = qmono(&["test", "-c", &fig3, "-q", "5"]);
    assert_eq!(out.status.code(), Some(2));

    // unreadable file exits 2
    let out = qmono(&["test", "-c", "/nonexistent.circ", "-q", "2", "-k", "1"]);
    assert_eq!(out.status.code(), Some(2));

    // q = 1 is a validation error
    let out = qmono(&["test", "-c", &fig3, "-q", "1", "-k", "1", "--seed", "3"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn precondition_gate_exits_three() {
    let fig3 = fixture_arg("fig3.circ");
    // minimum 5-monomial degree in fig3 is 2 (x2^2), so k=5 violates the
    // assumption when checked
    let out = qmono(&[
        "test",
        "-c",
        &fig3,
        "-q",
        "5",
        "-k",
        "5",
        "--check-precondition",
        "--seed",
        "7",
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("precondition"));

    // k = 2 satisfies it and the answer is yes
    let out = qmono(&[
        "test",
        "-c",
        &fig3,
        "-q",
        "5",
        "-k",
        "2",
        "--check-precondition",
        "--confidence",
        "1e-4",
        "--seed",
        "7",
    ]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn oracle_subcommand_prints_witnesses() {
    let fig3 = fixture_arg("fig3.circ");
    let out = qmono(&["oracle", "-c", &fig3, "-q", "5", "-k", "5"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("x1^4*x2"));

    let out = qmono(&["oracle", "-c", &fig3, "-q", "2", "-k", "2"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn expand_subcommand_prints_canonical_terms() {
    let fig3 = fixture_arg("fig3.circ");
    let out = qmono(&["expand", "-c", &fig3]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&out.stdout), "2*x1^4*x2\n2*x2^2\n");

    let fig1 = fixture_arg("fig1.circ");
    let out = qmono(&["expand", "-c", &fig1]);
    assert_eq!(String::from_utf8_lossy(&out.stdout), "1*x^3\n");

    // a tiny cap is an error, not a truncation
    let out = qmono(&["expand", "-c", &fig3, "--max-terms", "1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn reconstruct_subcommand_emits_dsl_and_provenance() {
    let fig3 = fixture_arg("fig3.circ");
    let dir = std::env::temp_dir().join(format!("qmono_cli_test_{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let sidecar = dir.join("prov.json");

    let out = qmono(&[
        "reconstruct",
        "-c",
        &fig3,
        "--provenance",
        sidecar.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let dsl = String::from_utf8_lossy(&out.stdout);
    let reparsed = qmono::parse(&dsl).expect("emitted DSL parses");
    assert!(reparsed.variables().iter().any(|v| v == "z1"));

    let prov: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&sidecar).unwrap()).unwrap();
    assert_eq!(prov["z_vars"].as_array().unwrap().len(), 9);
    assert_eq!(prov["x_occurrences"].as_array().unwrap().len(), 2);
    std::fs::remove_dir_all(&dir).ok();

    // a non-tree-like circuit is rejected with exit 2
    let shared = dir.with_extension("circ");
    std::fs::write(&shared, "var x\ngate m MUL x x\ngate s ADD m m\nout s\n").unwrap();
    let out = qmono(&["reconstruct", "-c", shared.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("tree-like"));
    std::fs::remove_file(&shared).ok();
}

#[test]
fn dump_plan_emits_json_to_stderr() {
    let fig1 = fixture_arg("fig1.circ");
    let out = qmono(&[
        "test",
        "-c",
        &fig1,
        "-q",
        "4",
        "-k",
        "3",
        "--seed",
        "9",
        "--restarts",
        "1",
        "--dump-plan",
    ]);
    let stderr = String::from_utf8_lossy(&out.stderr);
    let line = stderr.lines().next().expect("plan dumped");
    let plan: serde_json::Value = serde_json::from_str(line).expect("plan is JSON");
    assert_eq!(plan["q"], 4);
    assert!(plan["groups"].is_array());
    assert!(plan["y_vars"].is_array());
}

#[test]
fn selftest_passes() {
    let out = qmono(&["selftest", "--seed", "5"]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.lines().count() >= 4);
    assert!(!text.contains("FAIL"));
}

fn json_keys(value: &serde_json::Value) -> BTreeSet<String> {
    value
        .as_object()
        .map(|o| o.keys().cloned().collect())
        .unwrap_or_default()
}

#[test]
fn json_output_is_schema_stable() {
    let fig3 = fixture_arg("fig3.circ");
    let mut key_sets: Vec<BTreeSet<String>> = Vec::new();
    for (seed, q, k) in [("1", "5", "5"), ("2", "2", "2"), ("3", "3", "2")] {
        let out = qmono(&[
            "test",
            "-c",
            &fig3,
            "-q",
            q,
            "-k",
            k,
            "--seed",
            seed,
            "--json",
            "--restarts",
            "2",
        ]);
        let parsed: serde_json::Value =
            serde_json::from_slice(&out.stdout).expect("valid JSON report");
        key_sets.push(json_keys(&parsed));
    }
    assert!(key_sets.windows(2).all(|w| w[0] == w[1]));
    assert!(key_sets[0].contains("decision"));
    assert!(key_sets[0].contains("iterations_executed"));
    assert!(key_sets[0].contains("first_hit_iteration"));
    assert!(key_sets[0].contains("restart_index"));
    assert!(key_sets[0].contains("field_degree"));
    assert!(key_sets[0].contains("wall_time"));

    // oracle JSON shape is stable between yes and no answers
    let yes = qmono(&["oracle", "-c", &fig3, "-q", "5", "-k", "5", "--json"]);
    let no = qmono(&["oracle", "-c", &fig3, "-q", "2", "-k", "2", "--json"]);
    let yes: serde_json::Value = serde_json::from_slice(&yes.stdout).unwrap();
    let no: serde_json::Value = serde_json::from_slice(&no.stdout).unwrap();
    assert_eq!(json_keys(&yes), json_keys(&no));
}

#[test]
fn test_never_contradicts_the_oracle_in_the_no_direction() {
    // for every fixture and a battery of (q, k), when the oracle says no,
    // `test --check-precondition` must never answer yes: it answers no, or
    // exits 3 when a lower-degree q-monomial voids the assumption the
    // algorithm runs under
    let cases = [
        ("fig1.circ", [(2u32, 1u32), (2, 3), (3, 3)]),
        ("fig3.circ", [(2, 2), (3, 5), (5, 4)]),
        ("example3.circ", [(2, 1), (3, 5), (2, 4)]),
    ];
    for (fixture, qks) in cases {
        let path = fixture_arg(fixture);
        for (q, k) in qks {
            let oracle_out = qmono(&[
                "oracle",
                "-c",
                &path,
                "-q",
                &q.to_string(),
                "-k",
                &k.to_string(),
            ]);
            if oracle_out.status.code() != Some(1) {
                continue; // only the no direction is checked here
            }
            for seed in 0..50u64 {
                let out = qmono(&[
                    "test",
                    "-c",
                    &path,
                    "-q",
                    &q.to_string(),
                    "-k",
                    &k.to_string(),
                    "--seed",
                    &seed.to_string(),
                    "--restarts",
                    "1",
                    "--check-precondition",
                ]);
                let code = out.status.code();
                assert!(
                    code == Some(1) || code == Some(3),
                    "{fixture} q={q} k={k} seed={seed}: exit {code:?} contradicts the oracle"
                );
            }
        }
    }
}

#[test]
fn seed_env_var_is_honored() {
    let fig3 = fixture_arg("fig3.circ");
    let run = |env_seed: Option<&str>| -> String {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_qmono"));
        cmd.args([
            "test",
            "-c",
            &fig3,
            "-q",
            "5",
            "-k",
            "2",
            "--json",
            "--restarts",
            "3",
        ]);
        cmd.env_remove("QMONO_SEED");
        if let Some(s) = env_seed {
            cmd.env("QMONO_SEED", s);
        }
        let out = cmd.output().unwrap();
        String::from_utf8_lossy(&out.stdout).into_owned()
    };
    let a: serde_json::Value = serde_json::from_str(&run(Some("31337"))).unwrap();
    let b: serde_json::Value = serde_json::from_str(&run(Some("31337"))).unwrap();
    assert_eq!(a["decision"], b["decision"]);
    assert_eq!(a["iterations_executed"], b["iterations_executed"]);
    assert_eq!(a["first_hit_iteration"], b["first_hit_iteration"]);
}
