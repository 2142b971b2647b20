use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unresolved prefix `{0}:`")]
    UnresolvedPrefix(String),

    #[error("invalid term `{0}`")]
    InvalidTerm(String),

    #[error("malformed triple: {0}")]
    MalformedTriple(String),

    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("unsupported construct `{construct}` at line {line}, column {column}")]
    UnsupportedConstruct {
        construct: String,
        line: usize,
        column: usize,
    },

    #[error("cyclic {relation}: {}", .cycle.join(" -> "))]
    SchemaCycle {
        relation: &'static str,
        cycle: Vec<String>,
    },

    #[error("unknown label `{0}`")]
    UnknownLabel(String),

    #[error("ambiguous label `{label}`: {}", .candidates.join(", "))]
    AmbiguousLabel {
        label: String,
        candidates: Vec<String>,
    },

    #[error("materialization did not converge after {iterations} iterations")]
    Divergence { iterations: usize },

    #[error("triple is not entailed: {0}")]
    NotEntailed(String),

    #[error("mapping rule syntax error at line {line}, column {column}: {message}")]
    RuleSyntax {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("unsupported coercion `{0}`")]
    UnsupportedCoercion(String),

    #[error("invalid mapping rule: {0}")]
    InvalidRule(String),

    #[error("query syntax error at position {position}: {message}")]
    QuerySyntax { position: usize, message: String },

    #[error("unsupported query feature `{0}`")]
    UnsupportedFeature(String),

    #[error("invalid query: {0}")]
    InvalidQuery(String),

    #[error("invalid results document: {0}")]
    InvalidResults(String),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
