//! SPARQL-subset queries over a (materialized) graph.

mod ast;
mod competency;
mod eval;
mod parser;
mod results;

pub use ast::{CompareOp, Expr, OrderKey, PatternTerm, Projection, QueryAst, TriplePattern};
pub use competency::{
    competency_questions, competency_suite, sub_properties_of, CompetencyAnswer, CompetencyParams,
    CompetencyQuestion, URGENT_TEST_QUERY,
};
pub use eval::{evaluate, evaluate_with, EvalDiagnostics, JoinOrder};
pub use parser::parse_query;
pub use results::{
    compare_rows, compare_terms, from_json_results, to_json_results, to_text_table, SolutionTable,
};

use crate::error::Result;
use crate::graph::Graph;

/// Parses and evaluates `text`.
pub fn run_query(text: &str, graph: &Graph) -> Result<SolutionTable> {
    evaluate(&parse_query(text)?, graph)
}
