use std::path::Path;
use std::process::{Command, Output};

use fibcat::generators::{battery_sources, candidate_mutations, full_tables, mutate_instance, Address, CellForm};
use fibcat::instance::{emit, load_str, to_json};
use serde_json::Value;

fn fibcat(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fibcat")).args(args).env("FIBCAT_THREADS", "1").output().expect("binary runs")
}

fn path(p: &Path) -> &str {
    p.to_str().expect("utf-8 temp path")
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("json report")
}

#[test]
fn strict_file_passes_every_suite() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("strict.json");
    let g = fibcat(&["--gen", "strict", "--base", "powerset2", "--fiber", "bz2", "--emit", path(&f)]);
    assert!(g.status.success());
    let out = fibcat(&[path(&f), "--check", "all"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    assert_eq!(report(&out)["passed"], Value::Bool(true));
}

#[test]
fn strict_generation_is_a_fixed_file() {
    let a = fibcat(&["--gen", "strict", "--base", "powerset2", "--fiber", "bz2"]);
    let b = fibcat(&["--gen", "strict", "--base", "powerset2", "--fiber", "bz2"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let doc: Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(doc["base"]["category"]["objects"].as_array().unwrap().len(), 4);
}

#[test]
fn twist_generation_is_reproducible() {
    let a = fibcat(&["--gen", "twist", "--seed", "7"]);
    let b = fibcat(&["--gen", "twist", "--seed", "7"]);
    let c = fibcat(&["--gen", "twist", "--seed", "8"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn extending_a_twisted_skeleton_reproduces_the_oracle_tables() {
    let dir = tempfile::tempdir().unwrap();
    let (t, o, e) = (dir.path().join("t.json"), dir.path().join("oracle.json"), dir.path().join("extended.out"));
    let g = fibcat(&[
        "--gen", "twist", "--seed", "7", "--base", "chain3", "--marking", "split", "--fiber", "bz3", "--form", "skeleton",
        "--emit", path(&t), "--oracle", path(&o),
    ]);
    assert!(g.status.success(), "{}", String::from_utf8_lossy(&g.stderr));
    let skeleton = load_str(&std::fs::read_to_string(&t).unwrap()).unwrap();
    assert!(skeleton.morphisms[0].theta.is_none());
    let e2 = dir.path().join("extended2.out");
    let x = fibcat(&[path(&t), "--extend", "skeleton", "--emit", path(&e)]);
    assert_eq!(x.status.code(), Some(0));
    let y = fibcat(&[path(&e), "--extend", "ets-skeleton", "--emit", path(&e2)]);
    assert_eq!(y.status.code(), Some(0));
    let extended = load_str(&std::fs::read_to_string(&e2).unwrap()).unwrap();
    assert_eq!(full_tables(&extended).to_json(), std::fs::read_to_string(&o).unwrap());
    // the extended file re-loads and passes the full checks
    let c = fibcat(&[path(&e2), "--check", "all"]);
    assert_eq!(c.status.code(), Some(0));
}

#[test]
fn mutate_writes_the_requested_number_of_files() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().join("mutants");
    let g = fibcat(&["--gen", "mutate", "--count", "100", "--seed", "7", "--emit", path(&d)]);
    assert!(g.status.success(), "{}", String::from_utf8_lossy(&g.stderr));
    let files = std::fs::read_dir(&d).unwrap().filter(|e| e.as_ref().unwrap().file_name() != "manifest.json").count();
    assert_eq!(files, 100);
    let manifest: Value = serde_json::from_str(&std::fs::read_to_string(d.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["mutants"].as_array().unwrap().len(), 100);
}

#[test]
fn skeleton_check_on_a_mutated_file_fails_with_a_square_witness() {
    let sources = battery_sources(7).unwrap();
    let skel = sources.iter().find(|i| i.name.ends_with("chain3-skeleton")).expect("a skeleton-form source");
    let spec = candidate_mutations(skel)
        .into_iter()
        .find(|s| matches!(s.address, Address::Theta { form: CellForm::Smooth, .. }))
        .expect("a smooth transition can be mutated");
    let bad = mutate_instance(skel, &spec).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("bad.json");
    std::fs::write(&f, to_json(&emit(&bad))).unwrap();
    let out = fibcat(&[path(&f), "--check", "skeleton"]);
    assert_eq!(out.status.code(), Some(1));
    let r = report(&out);
    let sections = r["reports"][0]["sections"].as_array().unwrap();
    let witness = sections
        .iter()
        .filter(|s| s["status"] == "fail")
        .flat_map(|s| s["violations"].as_array().unwrap().iter())
        .map(|v| v["witness"].as_array().unwrap().len())
        .max()
        .unwrap();
    assert!(witness >= 2, "a failing square names its morphisms");
}

#[test]
fn reports_are_deterministic_apart_from_timing() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("t.json");
    assert!(fibcat(&["--gen", "twist", "--seed", "3", "--emit", path(&f)]).status.success());
    let strip = |o: Output| {
        let mut v = report(&o);
        v.as_object_mut().unwrap().remove("timing_ms");
        serde_json::to_string(&v).unwrap()
    };
    let a = strip(fibcat(&[path(&f), "--check", "ets"]));
    let b = strip(fibcat(&[path(&f), "--check", "ets"]));
    assert_eq!(a, b);
}

#[test]
fn malformed_input_exits_with_code_two_and_a_location() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("broken.json");
    std::fs::write(&f, "{\n  \"schema_version\": 1,\n  \"name\": }").unwrap();
    let out = fibcat(&[path(&f), "--check", "all"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));

    let g = fibcat(&["--gen", "strict"]);
    let mut doc: Value = serde_json::from_slice(&g.stdout).unwrap();
    doc["fibered"][0]["functors"]["o->1"] = Value::String("nonsense".into());
    std::fs::write(&f, serde_json::to_string(&doc).unwrap()).unwrap();
    let out = fibcat(&[path(&f), "--check", "all"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("fibered"));
}

#[test]
fn unknown_flags_values_and_missing_actions_are_input_errors() {
    assert_eq!(fibcat(&["--check", "everything", "x.json"]).status.code(), Some(2));
    assert_eq!(fibcat(&["--gen", "strict", "--fiber", "z5"]).status.code(), Some(2));
    assert_eq!(fibcat(&["--gen", "strict", "--base", "powerset9"]).status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("s.json");
    assert!(fibcat(&["--gen", "strict", "--emit", path(&f)]).status.success());
    assert_eq!(fibcat(&[path(&f)]).status.code(), Some(2));
}

#[test]
fn text_format_ends_with_a_verdict() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("s.json");
    assert!(fibcat(&["--gen", "strict", "--fiber", "poset2", "--emit", path(&f)]).status.success());
    let out = fibcat(&[path(&f), "--check", "base", "--format", "text"]);
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("PASSED"), "{text}");
}
