#![allow(dead_code)]

use std::path::PathBuf;

use codo_core::reasoner::{materialize, InferenceReport};
use codo_core::schema::{build_codo_vocabulary, SchemaAxioms};
use codo_core::serialization::parse_turtle;
use codo_core::{Graph, PrefixMap, Term};

pub fn data_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../data")
        .join(name)
}

pub fn read_data(name: &str) -> String {
    std::fs::read_to_string(data_path(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

/// Vocabulary plus the twelve-person fixture, not yet materialized.
pub fn fixture_graph() -> (Graph, SchemaAxioms) {
    let vocab = build_codo_vocabulary();
    let mut graph = vocab.graph;
    parse_turtle(&read_data("close_contacts.ttl"), &mut graph).expect("fixture parses");
    (graph, vocab.axioms)
}

pub fn materialized_fixture() -> (Graph, SchemaAxioms, InferenceReport) {
    let (mut graph, axioms) = fixture_graph();
    let report = materialize(&mut graph, &axioms).expect("fixture materializes");
    (graph, axioms, report)
}

/// `codo:x` for IRIs, lexical form for literals.
pub fn show(term: &Term) -> String {
    match term {
        Term::Iri(iri) => PrefixMap::default()
            .compact(iri)
            .unwrap_or_else(|| format!("<{iri}>")),
        Term::Literal(lit) => lit.lexical().to_owned(),
        Term::Blank(b) => format!("_:{b}"),
    }
}

pub fn show_rows(rows: &[Vec<Option<Term>>]) -> Vec<Vec<String>> {
    rows.iter()
        .map(|r| {
            r.iter()
                .map(|t| t.as_ref().map(show).unwrap_or_default())
                .collect()
        })
        .collect()
}

pub mod bgp;
pub mod gen;
pub mod oracle;
pub mod rdf;

pub fn graph_of(set: &oracle::Set) -> Graph {
    let mut g = Graph::new();
    for t in set {
        g.insert(t).unwrap();
    }
    g
}

pub fn set_of(graph: &Graph) -> oracle::Set {
    graph.iter().collect()
}
