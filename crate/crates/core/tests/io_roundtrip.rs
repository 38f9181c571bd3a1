use nonlocal_core::model::{BellFunctional, Behavior, Provenance, Scenario, TensorFile, TensorKind};
use nonlocal_core::Error;
use proptest::prelude::*;

fn scenario() -> impl Strategy<Value = Scenario> {
    (1usize..4, 1usize..4, any::<bool>()).prop_map(|(n, k, b)| Scenario::new(n, k, b).unwrap())
}

proptest! {
    #[test]
    fn functional_round_trip(s in scenario(), seed in prop::collection::vec(-1e6f64..1e6, 576)) {
        let m = BellFunctional::new(s, seed[..s.tensor_len()].to_vec()).unwrap();
        let text = TensorFile::from(&m).to_json();
        let back = TensorFile::parse(&text).unwrap().into_functional().unwrap();
        prop_assert_eq!(back.as_slice(), m.as_slice());
        prop_assert_eq!(back.scenario(), m.scenario());
    }

    #[test]
    fn behavior_round_trip(s in scenario(), seed in prop::collection::vec(0.0f64..1.0, 576)) {
        let p = Behavior::new(s, seed[..s.tensor_len()].to_vec(), Provenance::NonsignallingRaw).unwrap();
        let file = TensorFile::from(&p);
        prop_assert_eq!(file.kind, TensorKind::Behavior);
        let back = TensorFile::parse(&file.to_json()).unwrap().into_behavior().unwrap();
        prop_assert_eq!(back.as_slice(), p.as_slice());
    }

    #[test]
    fn wrong_length_is_a_shape_error(s in scenario(), extra in 1usize..5) {
        let json = format!(
            r#"{{"scenario":{{"inputs":{},"outputs":{},"bottom":{}}},"tensor":{:?},"kind":"functional"}}"#,
            s.inputs, s.outputs, s.bottom, vec![0.0; s.tensor_len() + extra]
        );
        prop_assert!(matches!(TensorFile::parse(&json), Err(Error::Shape(_))));
    }
}

#[test]
fn field_exact_example_parses() {
    let text = r#"{"scenario": {"inputs": 1, "outputs": 1, "bottom": true},
                   "tensor": [1.0, 0.0, 0.0, 0.0], "kind": "functional"}"#;
    let m = TensorFile::parse(text).unwrap().into_functional().unwrap();
    assert_eq!(m.get(0, 0, 0, 0), 1.0);
    assert_eq!(m.scenario().effective_outputs(), 2);
}

#[test]
fn malformed_documents_are_rejected() {
    assert!(matches!(TensorFile::parse("{"), Err(Error::Json(_))));
    let unknown = r#"{"scenario":{"inputs":1,"outputs":1,"bottom":false},"tensor":[1.0],"kind":"functional","x":1}"#;
    assert!(TensorFile::parse(unknown).is_err());
    let zero = r#"{"scenario":{"inputs":0,"outputs":1,"bottom":false},"tensor":[],"kind":"functional"}"#;
    assert!(TensorFile::parse(zero).is_err());
    let kind = r#"{"scenario":{"inputs":1,"outputs":1,"bottom":false},"tensor":[1.0],"kind":"behavior"}"#;
    assert!(TensorFile::parse(kind).unwrap().into_functional().is_err());
}
