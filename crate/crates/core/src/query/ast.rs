use std::collections::BTreeSet;

use crate::term::Term;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PatternTerm {
    Var(String),
    Term(Term),
}

impl PatternTerm {
    pub fn var(&self) -> Option<&str> {
        match self {
            PatternTerm::Var(v) => Some(v),
            PatternTerm::Term(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TriplePattern {
    pub subject: PatternTerm,
    pub predicate: PatternTerm,
    pub object: PatternTerm,
}

impl TriplePattern {
    pub fn positions(&self) -> [&PatternTerm; 3] {
        [&self.subject, &self.predicate, &self.object]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CompareOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    Var(String),
    Const(Term),
    Compare(CompareOp, Box<Expr>, Box<Expr>),
    And(Box<Expr>, Box<Expr>),
    Or(Box<Expr>, Box<Expr>),
    Not(Box<Expr>),
}

impl Expr {
    pub fn vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Expr::Var(v) => {
                out.insert(v.clone());
            }
            Expr::Const(_) => {}
            Expr::Compare(_, a, b) | Expr::And(a, b) | Expr::Or(a, b) => {
                a.vars(out);
                b.vars(out);
            }
            Expr::Not(e) => e.vars(out),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Projection {
    Var(String),
    /// `COUNT([DISTINCT] ?v|*) AS ?alias`; `var` is `None` for `*`.
    Count {
        var: Option<String>,
        distinct: bool,
        alias: String,
    },
}

impl Projection {
    pub fn name(&self) -> &str {
        match self {
            Projection::Var(v) => v,
            Projection::Count { alias, .. } => alias,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrderKey {
    pub expr: Expr,
    pub descending: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct QueryAst {
    pub prefixes: Vec<(String, String)>,
    pub distinct: bool,
    /// Empty for `SELECT *`.
    pub projection: Vec<Projection>,
    pub patterns: Vec<TriplePattern>,
    pub filters: Vec<Expr>,
    pub group_by: Vec<String>,
    pub order_by: Vec<OrderKey>,
    pub limit: Option<usize>,
    pub offset: Option<usize>,
}

impl QueryAst {
    /// Variables of the patterns in order of first appearance; blank-node
    /// placeholders are left out.
    pub fn pattern_vars(&self) -> Vec<String> {
        let mut seen = Vec::new();
        for p in &self.patterns {
            for v in p.positions().into_iter().filter_map(PatternTerm::var) {
                if !v.starts_with("_:") && !seen.iter().any(|s: &String| s == v) {
                    seen.push(v.to_owned());
                }
            }
        }
        seen
    }

    pub fn is_aggregate(&self) -> bool {
        !self.group_by.is_empty()
            || self
                .projection
                .iter()
                .any(|p| matches!(p, Projection::Count { .. }))
    }

    /// Names of the result columns.
    pub fn header(&self) -> Vec<String> {
        if self.projection.is_empty() {
            self.pattern_vars()
        } else {
            self.projection
                .iter()
                .map(|p| p.name().to_owned())
                .collect()
        }
    }
}
