use std::cmp::Ordering;

use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::term::{LiteralValue, PrefixMap, Term};
use crate::vocab::xsd;

/// Variable bindings in result order. `None` marks an unbound cell.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SolutionTable {
    pub vars: Vec<String>,
    pub rows: Vec<Vec<Option<Term>>>,
}

impl SolutionTable {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn column(&self, var: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == var)
    }

    /// Values of one column, unbound cells skipped.
    pub fn values(&self, var: &str) -> Vec<Term> {
        let Some(i) = self.column(var) else {
            return Vec::new();
        };
        self.rows.iter().filter_map(|r| r[i].clone()).collect()
    }

    /// Rows as a sorted multiset, for order-insensitive comparison.
    pub fn sorted_rows(&self) -> Vec<Vec<Option<Term>>> {
        let mut rows = self.rows.clone();
        rows.sort_by(|a, b| compare_rows(a, b));
        rows
    }
}

/// Value-aware term order: unbound < blank < IRI < literal; comparable
/// literals by value, then by lexical form and datatype.
pub fn compare_terms(a: Option<&Term>, b: Option<&Term>) -> Ordering {
    match (a, b) {
        (None, None) => Ordering::Equal,
        (None, Some(_)) => Ordering::Less,
        (Some(_), None) => Ordering::Greater,
        (Some(Term::Literal(x)), Some(Term::Literal(y))) => {
            let by_value = match (x.value(), y.value()) {
                (Some(LiteralValue::Number(m)), Some(LiteralValue::Number(n))) => m.partial_cmp(&n),
                (Some(LiteralValue::DateTime(m)), Some(LiteralValue::DateTime(n))) => {
                    Some(m.cmp(&n))
                }
                (Some(LiteralValue::Boolean(m)), Some(LiteralValue::Boolean(n))) => Some(m.cmp(&n)),
                _ => None,
            };
            by_value.unwrap_or(Ordering::Equal).then_with(|| x.cmp(y))
        }
        (Some(x), Some(y)) => x.cmp(y),
    }
}

pub fn compare_rows(a: &[Option<Term>], b: &[Option<Term>]) -> Ordering {
    a.iter()
        .zip(b)
        .map(|(x, y)| compare_terms(x.as_ref(), y.as_ref()))
        .find(|o| o.is_ne())
        .unwrap_or(Ordering::Equal)
}

fn term_json(term: &Term) -> Value {
    match term {
        Term::Iri(i) => json!({ "type": "uri", "value": i }),
        Term::Blank(b) => json!({ "type": "bnode", "value": b }),
        Term::Literal(l) if l.is_string() => json!({ "type": "literal", "value": l.lexical() }),
        Term::Literal(l) => {
            json!({ "type": "literal", "value": l.lexical(), "datatype": l.datatype() })
        }
    }
}

/// SPARQL 1.1 query results JSON. Output is compact and deterministic.
pub fn to_json_results(table: &SolutionTable) -> String {
    let bindings: Vec<Value> = table
        .rows
        .iter()
        .map(|row| {
            let mut binding = Map::new();
            for (var, cell) in table.vars.iter().zip(row) {
                if let Some(term) = cell {
                    binding.insert(var.clone(), term_json(term));
                }
            }
            Value::Object(binding)
        })
        .collect();
    json!({ "head": { "vars": table.vars }, "results": { "bindings": bindings } }).to_string()
}

fn invalid(message: impl Into<String>) -> Error {
    Error::InvalidResults(message.into())
}

fn json_term(value: &Value) -> Result<Term> {
    let field = |name: &str| value.get(name).and_then(Value::as_str);
    let text = field("value").ok_or_else(|| invalid("binding without a value"))?;
    match field("type") {
        Some("uri") => Ok(Term::iri(text)),
        Some("bnode") => Ok(Term::blank(text)),
        Some("literal" | "typed-literal") => {
            if value.get("xml:lang").is_some() {
                return Err(invalid("language-tagged literals are not supported"));
            }
            Ok(Term::literal(
                text,
                field("datatype").unwrap_or(xsd::STRING),
            ))
        }
        other => Err(invalid(format!("unknown binding type {other:?}"))),
    }
}

/// Reads a SPARQL JSON results document back into a table.
pub fn from_json_results(text: &str) -> Result<SolutionTable> {
    let doc: Value = serde_json::from_str(text).map_err(|e| invalid(e.to_string()))?;
    let vars = doc
        .pointer("/head/vars")
        .and_then(Value::as_array)
        .ok_or_else(|| invalid("missing head.vars"))?
        .iter()
        .map(|v| {
            v.as_str()
                .map(str::to_owned)
                .ok_or_else(|| invalid("non-string variable name"))
        })
        .collect::<Result<Vec<_>>>()?;
    let bindings = doc
        .pointer("/results/bindings")
        .and_then(Value::as_array)
        .ok_or_else(|| invalid("missing results.bindings"))?;
    let mut rows = Vec::with_capacity(bindings.len());
    for binding in bindings {
        let object = binding
            .as_object()
            .ok_or_else(|| invalid("binding is not an object"))?;
        if let Some(extra) = object.keys().find(|k| !vars.contains(k)) {
            return Err(invalid(format!(
                "binding for undeclared variable `{extra}`"
            )));
        }
        let row = vars
            .iter()
            .map(|v| object.get(v).map(json_term).transpose())
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    Ok(SolutionTable { vars, rows })
}

fn display_term(term: &Term, prefixes: &PrefixMap) -> String {
    match term {
        Term::Iri(i) => prefixes.compact(i).unwrap_or_else(|| format!("<{i}>")),
        Term::Literal(l) => l.lexical().to_owned(),
        Term::Blank(b) => format!("_:{b}"),
    }
}

/// Aligned plain-text rendering with prefixed IRIs and bare literal values.
pub fn to_text_table(table: &SolutionTable, prefixes: &PrefixMap) -> String {
    let header: Vec<String> = table.vars.iter().map(|v| format!("?{v}")).collect();
    let cells: Vec<Vec<String>> = table
        .rows
        .iter()
        .map(|row| {
            row.iter()
                .map(|c| {
                    c.as_ref()
                        .map_or(String::new(), |t| display_term(t, prefixes))
                })
                .collect()
        })
        .collect();
    let widths: Vec<usize> = (0..header.len())
        .map(|i| {
            cells
                .iter()
                .map(|r| r[i].chars().count())
                .chain([header[i].chars().count()])
                .max()
                .unwrap_or(0)
        })
        .collect();
    let line = |values: &[String]| {
        let padded: Vec<String> = values
            .iter()
            .zip(&widths)
            .map(|(v, w)| format!("{v:<w$}"))
            .collect();
        padded.join("  ").trim_end().to_owned()
    };
    let mut out = line(&header);
    out.push('\n');
    out.push_str(
        &widths
            .iter()
            .map(|w| "-".repeat(*w))
            .collect::<Vec<_>>()
            .join("  "),
    );
    out.push('\n');
    for row in &cells {
        out.push_str(&line(row));
        out.push('\n');
    }
    out.push_str(&format!(
        "({} row{})\n",
        table.len(),
        if table.len() == 1 { "" } else { "s" }
    ));
    out
}
