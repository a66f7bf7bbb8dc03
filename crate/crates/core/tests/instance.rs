use fibcat::generators::{battery_sources, candidate_mutations, mutate_instance, positive_corpus};
use fibcat::instance::{emit, load, load_str, parse, to_json, ParseError};
use fibcat::suites::{run, Suite};

#[test]
fn emitting_and_loading_is_the_identity_on_documents() {
    let mut insts = battery_sources(1).unwrap();
    insts.extend(positive_corpus(1).unwrap().into_iter().map(|e| e.instance));
    for inst in &insts {
        let doc = emit(inst);
        let text = to_json(&doc);
        assert_eq!(parse(&text).unwrap(), doc, "{}", inst.name);
        let back = load_str(&text).unwrap();
        assert_eq!(emit(&back), doc, "{}", inst.name);
    }
}

#[test]
fn loaded_mutants_keep_their_verdict() {
    let inst = &battery_sources(2).unwrap()[0];
    for spec in candidate_mutations(inst).into_iter().step_by(17).take(6) {
        let bad = mutate_instance(inst, &spec).unwrap();
        let back = load(&emit(&bad)).unwrap();
        assert_eq!(run(&back, Suite::All).passed(), run(&bad, Suite::All).passed(), "{}", bad.name);
    }
}

#[test]
fn syntax_errors_carry_their_position() {
    let text = "{\n  \"schema_version\": 1,\n  \"name\": oops\n}";
    match parse(text) {
        Err(ParseError::Syntax { line, .. }) => assert_eq!(line, 3),
        other => panic!("expected a syntax error, got {other:?}"),
    }
}

#[test]
fn documents_are_checked_field_by_field() {
    let inst = &battery_sources(1).unwrap()[0];
    let doc = emit(inst);

    let mut v = doc.clone();
    v.schema_version = 99;
    assert!(matches!(parse(&to_json(&v)), Err(ParseError::Field { ref path, .. }) if path == "schema_version"));

    let mut v = doc.clone();
    v.fibered[1].name = v.fibered[0].name.clone();
    assert!(matches!(load(&v), Err(ParseError::Field { ref path, .. }) if path == "fibered[1].name"));

    // unknown keys are rejected rather than ignored
    let mut json: serde_json::Value = serde_json::from_str(&to_json(&doc)).unwrap();
    json["colour"] = serde_json::json!("red");
    assert!(matches!(parse(&json.to_string()), Err(ParseError::Syntax { .. })));
}
