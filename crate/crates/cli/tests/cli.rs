use std::process::{Command, Output};

use proptest::prelude::*;
use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hyperbasis"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn text(args: &[&str]) -> (i32, String) {
    let out = run(args);
    (
        out.status.code().unwrap(),
        String::from_utf8(out.stdout).unwrap(),
    )
}

fn json(args: &[&str]) -> (i32, Value) {
    let mut all = vec!["--json"];
    all.extend_from_slice(args);
    let out = run(&all);
    let v = serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "{args:?}: invalid JSON ({e}): {}",
            String::from_utf8_lossy(&out.stdout)
        )
    });
    (out.status.code().unwrap(), v)
}

#[test]
fn expand_lists_the_semigroup_laws() {
    let args = [
        "expand",
        "--hyper",
        "hyperassociativity",
        "--type",
        "2",
        "--max-ops",
        "3",
    ];
    let (code, v) = json(&args);
    assert_eq!(code, 0);
    let ids: Vec<&str> = v["identities"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_str().unwrap())
        .collect();
    assert_eq!(v["count"], ids.len());
    assert!(ids.contains(&"x1x2x3 = x1(x2x3)"));
    assert!(ids.contains(&"x1x1 = x1x1(x1x1)"));
    let (tcode, t) = text(&args);
    assert_eq!(tcode, 0);
    for id in &ids {
        assert!(
            t.lines().any(|l| l.trim() == *id),
            "{id} missing from text output"
        );
    }
}

#[test]
fn free_reports_stable_or_bound_exceeded() {
    let (code, v) = json(&["free", "--law", "xx=xxxx", "--gens", "1"]);
    assert_eq!(code, 0);
    assert_eq!(v["status"]["kind"], "stable");
    assert_eq!(v["status"]["cardinality"], 3);
    let (code, t) = text(&["free", "--law", "xx=xxxx", "--gens", "1"]);
    assert_eq!(code, 0);
    assert!(t.starts_with("Stable, 3 elements"));

    let (code, v) = json(&["free", "--law", "xy=yx", "--gens", "2", "--bound", "6"]);
    assert_eq!(code, 1);
    assert_eq!(v["status"]["kind"], "bound_exceeded");
}

#[test]
fn free_small_law_count() {
    let (code, t) = text(&["free", "--law", "xyxzxyx=xyzyx", "--gens", "2"]);
    assert_eq!(code, 0);
    assert!(t.starts_with("Stable, 298 elements"), "{t}");
}

#[test]
fn derive_exit_codes() {
    let (code, v) = json(&[
        "derive",
        "--axioms",
        "xx=xxxx",
        "--goal",
        "xx=xxxxxx",
        "--words",
    ]);
    assert_eq!(code, 0);
    assert_eq!(v["status"], "derived");
    assert_eq!(v["checked"], true);
    let (code, t) = text(&[
        "derive",
        "--axioms",
        "xx=xxxx",
        "--goal",
        "xx=xxxxxx",
        "--words",
    ]);
    assert_eq!(code, 0);
    assert!(t.contains(&format!("in {} steps", v["length"])));

    let (code, v) = json(&[
        "derive",
        "--axioms",
        "xy=yx",
        "--goal",
        "xx=x",
        "--words",
        "--max-visited",
        "100",
    ]);
    assert_eq!(code, 1);
    assert_eq!(v["status"], "unknown");

    let (code, _) = text(&["derive", "--axioms", "x,y", "--goal", "z"]);
    assert_eq!(code, 2);
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        &["bogus"][..],
        &["free", "--law", "xx=", "--gens", "1"],
        &["free", "--law", "xx=xxxx", "--gens", "0"],
        &["typeorder", "2,x"],
        &["expand", "--hyper", "hyperfoo", "--type", "2"],
        &["witness", "tfam", "--level", "1", "--k", "7"],
        &["models", "--law", "xx=xxxx", "--size", "9"],
    ] {
        assert_eq!(text(args).0, 2, "{args:?}");
    }
}

#[test]
fn typeorder_and_covers() {
    let (code, v) = json(&["typeorder", "2", "2,2"]);
    assert_eq!(code, 0);
    assert_eq!(v["relation"], "less");
    let (_, v) = json(&["typeorder", "2,1", "1,1,1"]);
    assert_eq!(v["relation"], "incomparable");
    let (_, t) = text(&["typeorder", "2,1", "1,1,1"]);
    assert!(t.contains("incomparable"));
}

#[test]
fn trivial_and_witness_commands() {
    let (code, v) = json(&["trivial", "--hyper", "hypercommutativity", "--type", "2"]);
    assert_eq!(code, 0);
    assert_eq!(v["status"], "trivial");
    assert_eq!(v["checked"], true);

    let (code, t) = text(&["witness", "tfam", "--level", "1", "--k", "1", "--star"]);
    assert_eq!(code, 0);
    assert!(t.contains("(x · x) ∘ ((x · y) ∘ (y · y))"));
}

#[test]
fn word_commands_agree_across_modes() {
    let (code, v) = json(&["word", "sqfree", "--len", "6"]);
    assert_eq!(code, 0);
    let (_, t) = text(&["word", "sqfree", "--len", "6"]);
    assert!(t.contains("abcacb"));
    assert!(v.to_string().contains("abcacb"));

    let (code, v) = json(&["word", "squares", "abcabc"]);
    assert_eq!(code, 0);
    assert!(v.to_string().contains("abc"));
}

#[test]
fn manifest_digest_is_stable() {
    let dir = std::env::temp_dir();
    let mut digests = Vec::new();
    for i in 0..2 {
        let path = dir.join(format!(
            "hyperbasis-manifest-{}-{i}.json",
            std::process::id()
        ));
        let p = path.to_str().unwrap();
        let (code, _) = text(&["--manifest", p, "models", "--law", "xx=xxxx", "--size", "2"]);
        assert_eq!(code, 0);
        let m: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
        assert_eq!(m["version"], env!("CARGO_PKG_VERSION"));
        assert!(m["command_line"]
            .as_array()
            .unwrap()
            .iter()
            .any(|a| a == "models"));
        digests.push(m["digest"].as_str().unwrap().to_string());
        std::fs::remove_file(&path).unwrap();
    }
    assert_eq!(digests[0], digests[1]);
    assert_eq!(digests[0].len(), 64);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    // whatever the goal, an unknown outcome never exits 0 and a derived one
    // never exits 1
    #[test]
    fn unknown_never_exits_zero(lhs in "[xy]{1,5}", rhs in "[xy]{1,5}", visited in 1usize..200) {
        let goal = format!("{lhs}={rhs}");
        let max = visited.to_string();
        let (code, v) = json(&["derive", "--axioms", "xxyyz=xxyxxyz", "--goal", &goal, "--words", "--max-visited", &max]);
        match v["status"].as_str().unwrap() {
            "derived" => prop_assert_eq!(code, 0),
            "unknown" => prop_assert_eq!(code, 1),
            other => prop_assert!(false, "unexpected status {}", other),
        }
    }
}
