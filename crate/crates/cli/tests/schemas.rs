use std::collections::BTreeSet;
use std::path::PathBuf;

use qcantor::constructions::ConstructionSpec;
use qcantor::generators::GeneratorSpec;
use qcantor_cli::{run, Manifest};
use serde_json::Value;

fn schema(name: &str) -> Value {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../schemas").join(name);
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn kinds(schema: &Value) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    for variant in schema["oneOf"].as_array().unwrap() {
        let kind = &variant["properties"]["kind"];
        if let Some(k) = kind["const"].as_str() {
            out.insert(k.to_owned());
        }
        for k in kind["enum"].as_array().into_iter().flatten() {
            out.insert(k.as_str().unwrap().to_owned());
        }
    }
    out
}

fn kind_of<T: serde::Serialize>(value: &T) -> String {
    serde_json::to_value(value).unwrap()["kind"].as_str().unwrap().to_owned()
}

#[test]
fn manifest_keys_match_schema() {
    let s = schema("manifest.v1.schema.json");
    let dir = tempfile::tempdir().unwrap();
    let out = run(["qcantor", "repro", "ex31", "--n", "50", "--out", dir.path().join("m").to_str().unwrap()]).unwrap();
    let written: Value = serde_json::from_str(&std::fs::read_to_string(out.manifest.as_ref().unwrap()).unwrap()).unwrap();
    let keys: BTreeSet<&str> = written.as_object().unwrap().keys().map(String::as_str).collect();
    let declared: BTreeSet<&str> = s["properties"].as_object().unwrap().keys().map(String::as_str).collect();
    assert_eq!(keys, declared);
    for req in s["required"].as_array().unwrap() {
        assert!(keys.contains(req.as_str().unwrap()));
    }
    let m = Manifest::load(out.manifest.as_ref().unwrap()).unwrap();
    assert_eq!(Value::String(m.schema), s["properties"]["schema"]["const"]);
}

#[test]
fn generator_kinds_match_schema() {
    let specs = [
        GeneratorSpec::Periodic { pattern: vec![2] },
        GeneratorSpec::sturmian_golden(),
        serde_json::from_str(r#"{"kind":"nil_coding","alpha":"sqrt2","bases":[2,3]}"#).unwrap(),
        GeneratorSpec::thue_morse(2, 3),
        serde_json::from_str(r#"{"kind":"concatenation","sequence":"primes","base":10,"digit_offset":2}"#).unwrap(),
        GeneratorSpec::uniform_bernoulli(vec![2, 3], 1),
        serde_json::from_str(r#"{"kind":"non_ergodic_word"}"#).unwrap(),
        serde_json::from_str(r#"{"kind":"file","path":"q.txt"}"#).unwrap(),
    ];
    let found: BTreeSet<String> = specs.iter().map(kind_of).collect();
    assert_eq!(found, kinds(&schema("generator-spec.v1.schema.json")));
}

#[test]
fn construction_kinds_match_schema() {
    let specs: Vec<ConstructionSpec> = [
        r#"{"kind":"ex31","n":1}"#,
        r#"{"kind":"ex32","n":1}"#,
        r#"{"kind":"ex35","a":2,"b":4,"eps":"1/4","seed":0,"n":1}"#,
        r#"{"kind":"ex36i","g":2,"seed":0,"n":2}"#,
        r#"{"kind":"ex36ii","g":2,"seed":0,"n":2}"#,
        r#"{"kind":"rebase","source_base":6,"pattern":[2,3],"n":1}"#,
    ]
    .iter()
    .map(|s| serde_json::from_str(s).unwrap())
    .collect();
    let found: BTreeSet<String> = specs.iter().map(kind_of).collect();
    assert_eq!(found, kinds(&schema("construction-spec.v1.schema.json")));
}
