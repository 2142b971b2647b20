mod common;

use codo_core::serialization::{
    parse_ntriples, parse_turtle, serialize_ntriples, serialize_turtle, ParseMode,
};
use codo_core::Graph;
use common::rdf::{blanks, graph, isomorphic};
use common::{read_data, set_of};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn ntriples_round_trip(g in graph()) {
        let text = serialize_ntriples(&g);
        let mut back = Graph::new();
        parse_ntriples(&text, &mut back, ParseMode::Strict).unwrap();
        prop_assert!(isomorphic(&set_of(&g), &set_of(&back)));
        if blanks(&set_of(&g)).is_empty() {
            prop_assert_eq!(serialize_ntriples(&back), text);
        }
    }

    #[test]
    fn turtle_round_trip(g in graph()) {
        let text = serialize_turtle(&g);
        let mut back = Graph::new();
        parse_turtle(&text, &mut back).unwrap();
        prop_assert!(isomorphic(&set_of(&g), &set_of(&back)));
        if blanks(&set_of(&g)).is_empty() {
            prop_assert_eq!(serialize_turtle(&back), text);
        }
    }
}

#[test]
fn vocabulary_file_is_current() {
    let vocab = codo_core::schema::build_codo_vocabulary();
    assert_eq!(read_data("codo.ttl"), serialize_turtle(&vocab.graph));
}

#[test]
fn vocabulary_file_yields_the_same_axioms() {
    let vocab = codo_core::schema::build_codo_vocabulary();
    let mut g = Graph::new();
    parse_turtle(&read_data("codo.ttl"), &mut g).unwrap();
    let extracted = codo_core::schema::extract_schema(&g).unwrap();
    assert!(extracted.warnings.is_empty(), "{:?}", extracted.warnings);
    assert_eq!(extracted.axioms, vocab.axioms);
}
