use std::fs;
use std::path::Path;

use poset_ramsey::cli::{run, EXIT_EXHAUSTED, EXIT_OK, EXIT_USAGE, EXIT_WITNESS};
use serde_json::Value;

fn rll(args: &[&str]) -> i32 {
    run(std::iter::once("rll").chain(args.iter().copied()))
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn bound_reports_the_contradiction() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("bound.json");
    assert_eq!(rll(&["bound", "--n", "2", "--c", "6.14", "-o", path_str(&out)]), EXIT_OK);
    let cert = read_json(&out);
    assert_eq!(cert["outcome"], "ok");
    assert_eq!(cert["tool"], "rll");
    assert_eq!(cert["payload"]["report"]["k"], 12);
    assert_eq!(cert["payload"]["report"]["contradiction"], true);
}

#[test]
fn layered_coloring_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let col = dir.path().join("c.json");
    let cert = dir.path().join("cert.json");
    let args = ["construct", "layered", "--m", "1", "--n", "1", "-o", path_str(&col), "--certificate", path_str(&cert)];
    assert_eq!(rll(&args), EXIT_OK);
    let check = dir.path().join("verify.json");
    assert_eq!(
        rll(&["verify", "--coloring", path_str(&col), "--ramsey", "1,1", "--kind", "weak", "-o", path_str(&check)]),
        EXIT_OK
    );
    let v = read_json(&check);
    assert_eq!(v["payload"]["ramsey"]["ok"], true);
    let digest = &v["inputs"][0]["sha256"];
    assert_eq!(digest.as_str().unwrap().len(), 64);
    assert_eq!(read_json(&cert)["payload"]["coloring_sha256"], *digest);
}

#[test]
fn pair_code_is_blue_free_and_spread() {
    let dir = tempfile::tempdir().unwrap();
    let col = dir.path().join("c.json");
    let cert = dir.path().join("cert.json");
    assert_eq!(rll(&["construct", "pairs", "--n", "14", "-o", path_str(&col), "--certificate", path_str(&cert)]), EXIT_OK);
    let out = dir.path().join("v.json");
    let args = ["verify", "--coloring", path_str(&col), "--blue-free", "2", "--kind", "induced", "--distance", "4", "-o", path_str(&out)];
    assert_eq!(rll(&args), EXIT_OK);
    let v = read_json(&out);
    assert_eq!(v["payload"]["blue_free"]["ok"], true);
    assert_eq!(v["payload"]["distance"]["ok"], true);
}

#[test]
fn embed_single_permutation_on_all_red() {
    let dir = tempfile::tempdir().unwrap();
    let col = dir.path().join("c.json");
    fs::write(&col, poset_ramsey::lattice::to_json(&poset_ramsey::lattice::Coloring::uniform(3, poset_ramsey::lattice::Color::Red)))
        .unwrap();
    let out = dir.path().join("e.json");
    assert_eq!(rll(&["embed", "--coloring", path_str(&col), "--n", "2", "--k", "1", "--pi", "3", "-o", path_str(&out)]), EXIT_OK);
    assert_eq!(read_json(&out)["payload"]["success"], true);
}

#[test]
fn sweep_with_blue_q2_reports_a_collision() {
    let dir = tempfile::tempdir().unwrap();
    let col = dir.path().join("c.json");
    fs::write(&col, poset_ramsey::lattice::to_json(&poset_ramsey::lattice::Coloring::uniform(4, poset_ramsey::lattice::Color::Blue)))
        .unwrap();
    let out = dir.path().join("e.json");
    assert_eq!(rll(&["embed", "--coloring", path_str(&col), "--n", "2", "--k", "2", "--all", "-o", path_str(&out)]), EXIT_WITNESS);
    assert_eq!(read_json(&out)["outcome"], "witness");
}

#[test]
fn resample_budget_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let cert = dir.path().join("cert.json");
    let args = ["construct", "lll", "--n", "12", "--m", "3", "--max-resamples", "10", "--certificate", path_str(&cert)];
    assert_eq!(rll(&args), EXIT_EXHAUSTED);
    let v = read_json(&cert);
    assert_eq!(v["outcome"], "exhausted");
    assert!(v["payload"]["best_effort"].is_object());
}

#[test]
fn usage_errors() {
    assert_eq!(rll(&["bound"]), EXIT_USAGE);
    assert_eq!(rll(&["verify", "--code-statement", "36,2,17"]), EXIT_USAGE);
    assert_eq!(rll(&["frobnicate"]), EXIT_USAGE);
    assert_eq!(rll(&["construct", "layered", "--n", "3"]), EXIT_USAGE);
    assert_eq!(rll(&["verify", "--coloring", "/nonexistent/c.json", "--conditions"]), EXIT_USAGE);
    assert_eq!(rll(&["code", "witness", "--N", "3", "--m", "1", "--k", "1", "--Y", "1", "--y", "1"]), EXIT_USAGE);
}

#[test]
fn certificates_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let mut certs = Vec::new();
    let cert = dir.path().join("cert.json");
    for _ in 0..2 {
        let args = ["construct", "lll", "--n", "16", "--m", "4", "--seed", "5", "--certificate", path_str(&cert)];
        assert_eq!(rll(&args), EXIT_OK);
        let mut v = read_json(&cert);
        v.as_object_mut().unwrap().remove("wall_clock_ms");
        certs.push(v);
    }
    assert_eq!(certs[0], certs[1]);
    assert_eq!(certs[0]["seeds"], serde_json::json!([5]));
}

#[test]
fn code_subcommands() {
    assert_eq!(rll(&["code", "prime", "--N", "36"]), EXIT_OK);
    assert_eq!(rll(&["code", "subset-sum", "--values", "1,2", "--p", "7", "--target", "5"]), EXIT_WITNESS);
    assert_eq!(rll(&["code", "witness", "--N", "36", "--m", "2", "--k", "17", "--Y", "1,2", "--y", "1"]), EXIT_OK);
    assert_eq!(rll(&["verify", "--code-statement", "36,2,17,37,37"]), EXIT_OK);
}
