//! Every shipped fixture parses, serializes and parses back to the same value.

use std::fs;
use std::path::Path;

use freelin::json::{
    action_from_json, action_to_json, comm_endo_from_json, comm_endo_to_json, endo_from_json, endo_to_json,
    field_from_json, ideal_from_json, ideal_to_json, scalars_from_json, scalars_to_json,
};
use serde_json::Value;

fn load(name: &str) -> Value {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name);
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn fixtures(prefix: &str) -> Vec<String> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    let mut names: Vec<String> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .filter(|n| n.starts_with(prefix) && n.ends_with(".json"))
        .collect();
    names.sort();
    assert!(!names.is_empty(), "no fixtures with prefix {prefix}");
    names
}

#[test]
fn actions_round_trip() {
    for name in fixtures("action_") {
        let a = action_from_json(&load(&name), "").unwrap();
        let v = action_to_json(&a);
        assert_eq!(action_from_json(&v, "").unwrap(), a, "{name}");
        assert_eq!(action_to_json(&action_from_json(&v, "").unwrap()), v, "{name}");
    }
}

#[test]
fn endomorphisms_round_trip() {
    for name in fixtures("endo_") {
        let e = endo_from_json(&load(&name), "").unwrap();
        let v = endo_to_json(&e);
        assert_eq!(endo_from_json(&v, "").unwrap(), e, "{name}");
    }
}

#[test]
fn plane_maps_round_trip() {
    for name in fixtures("comm_") {
        let e = comm_endo_from_json(&load(&name), "").unwrap();
        let v = comm_endo_to_json(&e);
        assert_eq!(comm_endo_from_json(&v, "").unwrap(), e, "{name}");
    }
}

#[test]
fn ideals_round_trip() {
    let mut ideals: Vec<Value> = fixtures("ideal_").iter().map(|n| load(n)).collect();
    ideals.extend(fixtures("rees_action").iter().map(|n| load(n)["ideal"].clone()));
    for v in ideals {
        let i = ideal_from_json(&v, "").unwrap();
        assert_eq!(ideal_from_json(&ideal_to_json(&i), "").unwrap(), i);
    }
}

#[test]
fn cancellation_polynomials_round_trip() {
    for name in fixtures("cancel_pair") {
        let v = load(&name);
        let field = field_from_json(&v["field"], "/field").unwrap();
        for key in ["f", "g"] {
            let p = scalars_from_json(&v[key], field, key).unwrap();
            assert_eq!(scalars_from_json(&scalars_to_json(&p), field, key).unwrap(), p, "{name}");
        }
    }
}
