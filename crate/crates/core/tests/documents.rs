use adjacency_core::classify::classify;
use adjacency_core::maps::{
    make_degenerate_vec, tabulate, SpecDoc, StandardMapSpec, TableDoc, TabulatedMap,
};
use adjacency_core::{Field, FieldDescriptor};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

#[test]
fn spec_and_table_documents_round_trip() {
    let f = Field::with_order(3, 2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let spec = StandardMapSpec::random(&f, (2, 2), (2, 3), &mut rng).unwrap();
    let text = serde_json::to_string(&spec).unwrap();
    let doc: SpecDoc = serde_json::from_str(&text).unwrap();
    assert_eq!(StandardMapSpec::from_doc(&doc).unwrap(), spec);

    let table = tabulate(&spec).unwrap();
    let text = serde_json::to_string(&table).unwrap();
    let doc: TableDoc = serde_json::from_str(&text).unwrap();
    assert_eq!(TabulatedMap::from_doc(&doc).unwrap(), table);
}

#[test]
fn field_descriptor_layout() {
    let d = FieldDescriptor::with_default_modulus(2, 3).unwrap();
    let v: Value = serde_json::to_value(&d).unwrap();
    assert_eq!(
        v,
        serde_json::json!({"p": 2, "k": 3, "modulus": [1, 0, 1, 1]})
    );
}

#[test]
fn classification_documents() {
    let f = Field::prime(2).unwrap();
    let identity = tabulate(&StandardMapSpec::identity(&f, (2, 2)).unwrap()).unwrap();
    let v = serde_json::to_value(classify(&identity).unwrap()).unwrap();
    assert_eq!(v["verdict"], "standard");
    assert_eq!(v["case"], "i");
    assert!(v["spec"]["t"]["entries"].is_array());

    let degenerate = make_degenerate_vec(&f, 2, 2, 1).unwrap();
    let v = serde_json::to_value(classify(&degenerate).unwrap()).unwrap();
    assert_eq!(v, serde_json::json!({"verdict": "degenerate"}));
}

#[test]
fn mismatched_table_documents_are_rejected() {
    let f = Field::prime(2).unwrap();
    let table = tabulate(&StandardMapSpec::identity(&f, (2, 2)).unwrap()).unwrap();
    let mut doc = table.to_doc();
    doc.outputs.pop();
    assert!(TabulatedMap::from_doc(&doc).is_err());
    let mut doc = table.to_doc();
    doc.codomain = [2, 3];
    assert!(TabulatedMap::from_doc(&doc).is_err());
}
