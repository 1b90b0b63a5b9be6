//! End-to-end tests of the `freecover` binary: subcommand behavior, exit
//! codes, JSON envelopes, and run-to-run determinism.

use std::process::{Command, Output};

fn freecover(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_freecover"))
        .args(args)
        .env_remove("FREECOVER_MAX_VERTICES")
        .output()
        .expect("binary runs")
}

fn stdout_json(output: &Output) -> serde_json::Value {
    serde_json::from_slice(&output.stdout).expect("stdout is JSON")
}

#[test]
fn fold_emits_graph_json() {
    let out = freecover(&["fold", "aab", "b"]);
    assert!(out.status.success());
    let json = stdout_json(&out);
    assert_eq!(json["result"]["graph"]["rank"], 2);
    assert_eq!(json["result"]["is_rose"], false);
    assert_eq!(json["result"]["cycle_rank"], 2);
    assert_eq!(json["config"]["max_vertices"], 10000);
    assert!(json["version"].is_string());
}

#[test]
fn fold_dot_output() {
    let out = freecover(&["fold", "aa", "b", "--output", "dot"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("digraph"));
    assert!(text.contains("label=\"x1\""));
    assert!(text.contains("doublecircle"));
}

#[test]
fn cover_reports_cycle_basis() {
    let out = freecover(&["cover", "--n", "2", "--q", "2"]);
    assert!(out.status.success());
    let json = stdout_json(&out);
    assert_eq!(json["result"]["quotient"]["order"], 4);
    assert_eq!(json["result"]["cycle_basis"].as_array().unwrap().len(), 5);
}

#[test]
fn tower_depth_two() {
    let out = freecover(&["tower", "--n", "2", "--q", "2", "--max-depth", "2"]);
    assert!(out.status.success());
    let json = stdout_json(&out);
    assert_eq!(json["result"]["total_degree"], "128");
    assert_eq!(json["result"]["levels"].as_array().unwrap().len(), 2);
}

#[test]
fn tower_budget_error_is_input_error() {
    let out = freecover(&["tower", "--n", "2", "--q", "2", "--max-depth", "3"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("budget"));
}

#[test]
fn max_vertices_env_mirrors_flag() {
    let out = Command::new(env!("CARGO_BIN_EXE_freecover"))
        .args(["tower", "--n", "2", "--q", "2", "--max-depth", "2"])
        .env("FREECOVER_MAX_VERTICES", "10")
        .output()
        .expect("binary runs");
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn separate_exit_codes() {
    let found = freecover(&["separate", "a", "--q", "2"]);
    assert_eq!(found.status.code(), Some(0));
    assert_eq!(stdout_json(&found)["result"]["level"], 1);

    let commutator = freecover(&["separate", "ABab", "--q", "2"]);
    assert_eq!(commutator.status.code(), Some(0));
    assert_eq!(stdout_json(&commutator)["result"]["level"], 2);

    // squares of commutators live below depth 2
    let deep = freecover(&["separate", "ABabABab", "--q", "2", "--max-depth", "2"]);
    assert_eq!(deep.status.code(), Some(1));

    let trivial = freecover(&["separate", "1", "--q", "2"]);
    assert_eq!(trivial.status.code(), Some(2));
}

#[test]
fn deck_matches_trace_law() {
    let out = freecover(&["deck", "--n", "2", "--q", "2", "--element", "01"]);
    assert!(out.status.success());
    let json = stdout_json(&out);
    assert_eq!(json["result"]["dimension"], 5);
    assert_eq!(json["result"]["trace"], "1");

    let identity = freecover(&["deck", "--n", "2", "--q", "2", "--element", "00"]);
    assert_eq!(stdout_json(&identity)["result"]["trace"], "5");

    let bad = freecover(&["deck", "--n", "2", "--q", "2", "--element", "02"]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn check_epi_verdicts() {
    let auto = freecover(&["check-epi", "--phi", "ab,b", "--level", "1", "--q", "2"]);
    assert_eq!(auto.status.code(), Some(0));

    let doubling = freecover(&["check-epi", "--phi", "aa,b", "--level", "0"]);
    assert_eq!(doubling.status.code(), Some(1));
    assert_eq!(
        stdout_json(&doubling)["result"]["epi_on_homology"],
        false
    );
}

#[test]
fn certify_finds_the_counterexample() {
    let out = freecover(&["certify", "--phi", "aabbABabaBBAA,b"]);
    assert_eq!(out.status.code(), Some(0));
    let json = stdout_json(&out);
    assert_eq!(json["result"]["q"], 2);
    assert_eq!(json["result"]["level"], 1);
    assert_eq!(json["result"]["verdict"], "non_epimorphism_on_homology");

    let identity = freecover(&["certify", "--phi", "a,b"]);
    assert_eq!(identity.status.code(), Some(1));
}

#[test]
fn nilpotent_verdicts() {
    let conjugating = freecover(&["nilpotent", "--phi", "aabbABabaBBAA,b", "--k", "4"]);
    assert_eq!(conjugating.status.code(), Some(0));
    let doubling = freecover(&["nilpotent", "--phi", "aa,b", "--k", "4"]);
    assert_eq!(doubling.status.code(), Some(1));
}

#[test]
fn whitehead_reports() {
    let certified = freecover(&["whitehead", "baBBAA"]);
    assert_eq!(certified.status.code(), Some(0));
    let json = stdout_json(&certified);
    assert_eq!(json["result"]["certified_not_separable"], true);
    assert_eq!(json["result"]["connectivity"]["cut_vertices"].as_array().unwrap().len(), 0);

    let primitive = freecover(&["whitehead", "ab"]);
    assert_eq!(primitive.status.code(), Some(1));
    let json = stdout_json(&primitive);
    assert_eq!(json["result"]["reduction"]["minimal_length"], 1);

    let dot = freecover(&["whitehead", "baBBAA", "--output", "dot"]);
    assert!(String::from_utf8(dot.stdout).unwrap().starts_with("graph whitehead"));
}

#[test]
fn witness_5_bundles_evidence() {
    let out = freecover(&["witness-5", "--n", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let json = stdout_json(&out);
    let report = &json["result"];
    assert_eq!(report["fold_oracle_surjective"], false);
    assert_eq!(report["whitehead"]["certified_not_separable"], true);
    assert_eq!(report["homology_certificate"]["q"], 2);
    assert_eq!(report["homology_certificate"]["level"], 1);
    let levels = report["nilpotent_epi_levels"].as_array().unwrap();
    assert_eq!(levels.len(), 5);
    assert!(levels.iter().all(|v| v["surjective"] == true));
}

#[test]
fn surface_reports() {
    let info = freecover(&[
        "surface", "--rotation", "a b A B", "--q", "2", "--max-depth", "1", "info",
    ]);
    assert!(info.status.success());
    let json = stdout_json(&info);
    assert_eq!(json["result"]["base_genus"], 1);
    assert_eq!(json["result"]["base_boundary"], 1);
    let covers = json["result"]["covers"].as_array().unwrap();
    assert_eq!(covers.len(), 2);
    assert_eq!(covers[1]["euler_characteristic"], -4);

    let isotropic = freecover(&[
        "surface", "--rotation", "a b A B", "--q", "2", "--max-depth", "1",
        "isotropic", "--loop-word", "a",
    ]);
    assert_eq!(isotropic.status.code(), Some(0));

    let disjoint = freecover(&[
        "surface", "--rotation", "a b A B", "--q", "2", "--max-depth", "1",
        "disjoint", "--x", "a", "--y", "b",
    ]);
    assert_eq!(disjoint.status.code(), Some(0));

    let self_disjoint = freecover(&[
        "surface", "--rotation", "a b A B", "--q", "2", "--max-depth", "1",
        "disjoint", "--x", "a", "--y", "a",
    ]);
    assert_eq!(self_disjoint.status.code(), Some(1));

    let preserve = freecover(&[
        "surface", "--rotation", "a b A B", "--q", "2", "--max-depth", "1",
        "preserve", "--phi", "Bab,b",
    ]);
    assert_eq!(preserve.status.code(), Some(0));

    let flip = freecover(&[
        "surface", "--rotation", "a b A B", "--q", "2", "--max-depth", "1",
        "preserve", "--phi", "A,b",
    ]);
    assert_eq!(flip.status.code(), Some(1));

    let bad_rotation = freecover(&["surface", "--rotation", "a b A", "info"]);
    assert_eq!(bad_rotation.status.code(), Some(2));
}

#[test]
fn parse_errors_exit_2() {
    let bad_word = freecover(&["fold", "a?b"]);
    assert_eq!(bad_word.status.code(), Some(2));
    let err = String::from_utf8(bad_word.stderr).unwrap();
    assert!(err.contains("error"));

    let bad_flag = freecover(&["certify", "--phi"]);
    assert_eq!(bad_flag.status.code(), Some(2));
}

#[test]
fn outputs_are_deterministic() {
    for args in [
        vec!["witness-5", "--n", "2", "--seed", "7"],
        vec!["certify", "--phi", "aabbABabaBBAA,b", "--seed", "7"],
        vec!["cover", "--n", "2", "--q", "3"],
        vec![
            "surface", "--rotation", "a b A B", "--q", "2", "--max-depth", "1",
            "preserve", "--phi", "Bab,b",
        ],
    ] {
        let first = freecover(&args);
        let second = freecover(&args);
        assert_eq!(first.stdout, second.stdout, "args: {args:?}");
    }
}

#[test]
fn json_embeds_config_and_version() {
    let out = freecover(&["separate", "a", "--q", "5", "--seed", "99"]);
    let json = stdout_json(&out);
    assert_eq!(json["config"]["q"], serde_json::json!([5]));
    assert_eq!(json["config"]["seed"], 99);
    assert_eq!(json["version"], env!("CARGO_PKG_VERSION"));
}
