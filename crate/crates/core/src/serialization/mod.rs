//! N-Triples and Turtle-subset reading and writing.

mod ntriples;
mod turtle;

use std::collections::{HashMap, HashSet};

pub use ntriples::{
    parse_ntriples, parse_ntriples_scoped, serialize_asserted, serialize_inferred,
    serialize_ntriples, serialize_split, serialize_triples,
};
pub use turtle::{parse_turtle, serialize_turtle};

use crate::graph::Graph;
use crate::term::{Term, Triple};

/// Blank-node labels are local to a document. A scope maps one document's
/// labels onto the graph's blank nodes, keeping a label unless the graph
/// already uses it, so separately parsed documents never share a node.
/// Reusing one scope across files makes them one document.
#[derive(Debug, Default)]
pub struct BlankScope {
    map: HashMap<String, Term>,
    issued: HashSet<String>,
}

impl BlankScope {
    pub fn new() -> Self {
        Self::default()
    }

    fn term(&mut self, term: Term, graph: &Graph) -> Term {
        let Term::Blank(label) = term else {
            return term;
        };
        if let Some(t) = self.map.get(&label) {
            return t.clone();
        }
        let mut candidate = label.clone();
        let mut n = 0;
        while self.issued.contains(&candidate)
            || graph.lookup(&Term::Blank(candidate.clone())).is_some()
        {
            n += 1;
            candidate = format!("{label}_{n}");
        }
        self.issued.insert(candidate.clone());
        let t = Term::Blank(candidate);
        self.map.insert(label, t.clone());
        t
    }

    pub(crate) fn triple(&mut self, t: Triple, graph: &Graph) -> Triple {
        Triple {
            subject: self.term(t.subject, graph),
            predicate: t.predicate,
            object: self.term(t.object, graph),
        }
    }
}

/// Outcome of a parse: how many new triples were added and which lines
/// were rejected (lenient mode only).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ParseReport {
    pub triple_count: usize,
    pub line_errors: Vec<(usize, String)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ParseMode {
    #[default]
    Strict,
    Lenient,
}
