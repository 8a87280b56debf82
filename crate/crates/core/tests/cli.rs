use std::process::Command;

use proptest::prelude::*;
use scott_core::cli::{dispatch, CommandOutcome};
use scott_core::formula::Formula;
use scott_core::limitsim::StageReport;

fn call(args: &[&str]) -> CommandOutcome {
    dispatch(std::iter::once("scott").chain(args.iter().copied()))
}

fn json(out: &CommandOutcome) -> serde_json::Value {
    assert_eq!(out.exit_code, 0, "{}", out.stderr);
    serde_json::from_str(&out.stdout).unwrap()
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_scott");
    let run = |args: &[&str]| Command::new(bin).args(args).output().unwrap();
    let ok = run(&["dinf", "genpair", "a", "b"]);
    assert_eq!(ok.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&ok.stdout), "{\"generating\":true}\n");
    assert!(ok.stderr.is_empty());
    let usage = run(&["frobnicate"]);
    assert_eq!(usage.status.code(), Some(2));
    assert!(usage.stdout.is_empty());
    let bad = run(&["words", "reduce", "--rank", "1", "ab"]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("out of range"));
}

#[test]
fn documented_examples() {
    assert_eq!(json(&call(&["words", "primitive", "--rank", "2", "ab", "b"])), serde_json::json!({"primitive": true}));
    assert_eq!(json(&call(&["dinf", "genpair", "aba", "bab"])), serde_json::json!({"generating": false}));
    let c = r#"{"default":{"linear":[1,0]}}"#;
    assert_eq!(json(&call(&["q", "classify", c])), serde_json::json!({"row": 2, "lower": "Sigma03", "upper": "Sigma03"}));
    assert_eq!(json(&call(&["fgab", "normalize", "4", "6"])), serde_json::json!({"torsion": [2, 12]}));
    assert_eq!(json(&call(&["q", "member", r#"{"exceptions":{"2":"inf"}}"#, "3/8"])), serde_json::json!({"member": true}));
}

#[test]
fn scott_payloads_reparse() {
    let cases: [&[&str]; 5] = [
        &["dinf", "scott"],
        &["fgab", "scott", "--rank", "2", "--torsion", "2,3"],
        &["fgab", "scott-finite", r#"{"order":2,"table":[[0,1],[1,0]]}"#],
        &["q", "scott", r#"{"default":"inf"}"#],
        &["q", "scott", r#"{"default":{"linear":[1,0]}}"#],
    ];
    for args in cases {
        let v = json(&call(args));
        let f = Formula::from_json(&v["formula"]).unwrap();
        assert_eq!(scott_core::formula::classify(&f).to_string(), v["class"]);
    }
}

#[test]
fn sim_payloads_reparse() {
    let trace = r#"{"steps":[[0,0],[1,0],[1,1],[0,1]]}"#;
    let runs: [&[&str]; 3] = [
        &["sim", "abelian", "--k", "3", "--trace", trace],
        &["sim", "dihedral", "--trace", trace],
        &["sim", "rank1", "--char", r#"{"exceptions":{"2":"inf"}}"#, "--p", "3", "--q", "2", "--trace", trace],
    ];
    for args in runs {
        let out = call(args);
        assert_eq!(out.exit_code, 0, "{}", out.stderr);
        let lines: Vec<&str> = out.stdout.lines().collect();
        assert_eq!(lines.len(), 5);
        for line in &lines[..4] {
            serde_json::from_str::<StageReport>(line).unwrap();
        }
        let summary: serde_json::Value = serde_json::from_str(lines[4]).unwrap();
        assert_eq!(summary["verification"]["passed"], true);
    }
}

#[test]
fn latex_output() {
    let out = call(&["--latex", "dinf", "scott"]);
    assert_eq!(out.exit_code, 0);
    assert!(out.stdout.starts_with('$') && out.stdout.trim_end().ends_with('$'));
}

proptest! {
    #[test]
    fn malformed_json_is_a_domain_error(garbage in "[{\\[][ -~]{0,20}") {
        prop_assume!(serde_json::from_str::<serde_json::Value>(&garbage).is_err());
        for args in [
            vec!["q", "classify", garbage.as_str()],
            vec!["formula", "classify", garbage.as_str()],
            vec!["sim", "dihedral", "--trace", garbage.as_str()],
        ] {
            let out = call(&args);
            prop_assert_eq!(out.exit_code, 1);
            prop_assert!(out.stdout.is_empty());
            prop_assert!(out.stderr.starts_with("error:"));
        }
    }

    #[test]
    fn bad_words_are_domain_errors(word in "[a-c0-9^*-]{1,8}") {
        let out = call(&["words", "reduce", "--rank", "1", "--", &word]);
        prop_assert!(out.exit_code == 0 || out.exit_code == 1);
        prop_assert_eq!(out.exit_code == 0, out.stderr.is_empty());
    }

    #[test]
    fn unknown_subcommands_are_usage_errors(name in "[a-z]{3,10}") {
        prop_assume!(!["words", "dinf", "fgab", "formula", "sim", "help"].contains(&name.as_str()));
        prop_assert_eq!(call(&[&name]).exit_code, 2);
    }
}
