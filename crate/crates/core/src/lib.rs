//! Knowledge-graph toolkit for COVID-19 case data built around the CODO
//! vocabulary: an indexed triple store, N-Triples/Turtle I/O, the
//! vocabulary itself, a forward-chaining reasoner, a spreadsheet mapping
//! language and a SPARQL-subset query engine.

pub mod error;
pub mod graph;
pub mod mapping;
pub mod query;
pub mod reasoner;
pub mod schema;
pub mod serialization;
pub mod term;
pub mod vocab;

pub use error::{Error, Result};
pub use graph::{Graph, IdTriple, IndexOrder, Origin, TermId};
pub use term::{Literal, PrefixMap, Term, Triple};
