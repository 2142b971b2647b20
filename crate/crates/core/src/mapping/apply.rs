use std::collections::HashMap;
use std::fmt;

use serde::Serialize;

use super::reason::{normalize_reason_cell, ReasonParse};
use super::rule::{
    CellRef, Coercion, LabelPart, MappingRule, NameRef, RowRef, SubjectSpec, HASH_ENCODE,
};
use super::table::CaseTable;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::schema::{LabelIndex, SchemaAxioms};
use crate::term::{normalize_date_time, Literal, Term, Triple};
use crate::vocab::{codo, rdf, rdfs, xsd, CODO};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Naming {
    /// `p` + case number zero-padded to six digits.
    #[default]
    Padded,
    /// Lowercase hex FNV-1a 64 of the subject cell.
    Hash,
}

impl std::str::FromStr for Naming {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "padded" => Ok(Naming::Padded),
            "hash" => Ok(Naming::Hash),
            other => Err(format!(
                "unknown naming mode `{other}` (expected padded or hash)"
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IngestConfig {
    pub naming: Naming,
    /// Treat age `0` and date `1900-01-01` as missing.
    pub sentinel_filter: bool,
    /// Column holding the case number referenced by the parent column.
    pub case_column: String,
    pub reason_column: String,
    pub parent_column: String,
}

impl Default for IngestConfig {
    fn default() -> Self {
        IngestConfig {
            naming: Naming::Padded,
            sentinel_filter: true,
            case_column: "A".into(),
            reason_column: "H".into(),
            parent_column: "K".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SkipEntry {
    /// 1-based data row.
    pub row: usize,
    /// Column letters, empty for whole-row entries.
    pub column: String,
    pub reason: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct IngestReport {
    pub rows_processed: usize,
    pub individuals_created: usize,
    pub rows_skipped: usize,
    pub facts_emitted: usize,
    pub facts_skipped: usize,
    pub triples_added: usize,
    pub skip_log: Vec<SkipEntry>,
}

impl IngestReport {
    /// One JSON object per line: the counters, then each skip entry.
    pub fn to_json_lines(&self) -> String {
        let counters = serde_json::json!({
            "rows_processed": self.rows_processed,
            "individuals_created": self.individuals_created,
            "rows_skipped": self.rows_skipped,
            "facts_emitted": self.facts_emitted,
            "facts_skipped": self.facts_skipped,
            "triples_added": self.triples_added,
        });
        let mut out = counters.to_string();
        out.push('\n');
        for entry in &self.skip_log {
            out.push_str(&serde_json::to_string(entry).expect("skip entry serializes"));
            out.push('\n');
        }
        out
    }

    fn skip(&mut self, row: usize, column: &str, reason: impl Into<String>) {
        self.skip_log.push(SkipEntry {
            row,
            column: column.to_owned(),
            reason: reason.into(),
        });
    }
}

impl fmt::Display for IngestReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "rows processed:      {}", self.rows_processed)?;
        writeln!(f, "individuals created: {}", self.individuals_created)?;
        writeln!(f, "rows skipped:        {}", self.rows_skipped)?;
        writeln!(f, "facts emitted:       {}", self.facts_emitted)?;
        writeln!(f, "facts skipped:       {}", self.facts_skipped)?;
        write!(f, "triples added:       {}", self.triples_added)
    }
}

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

pub fn fnv1a64(bytes: &[u8]) -> u64 {
    bytes.iter().fold(FNV_OFFSET, |h, &b| {
        (h ^ u64::from(b)).wrapping_mul(FNV_PRIME)
    })
}

/// The IRI of the individual a row describes, or `None` when the subject
/// cell is empty (or not a case number in padded mode).
pub fn make_individual_iri(subject_cell: &str, naming: Naming) -> Option<Term> {
    let text = subject_cell.trim();
    if text.is_empty() {
        return None;
    }
    let local = match naming {
        Naming::Padded => format!("p{:06}", text.parse::<u64>().ok()?),
        Naming::Hash => format!("{:016x}", fnv1a64(text.as_bytes())),
    };
    Some(Term::iri(codo(&local)))
}

/// Local name for a value individual. Injective: spaces become `_`, and
/// every other character outside `[A-Za-z0-9-.~]` (including `_`) is
/// percent-encoded.
pub fn value_local_name(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.trim().chars() {
        match c {
            ' ' => out.push('_'),
            c if c.is_ascii_alphanumeric() || matches!(c, '-' | '.' | '~') => out.push(c),
            c => {
                let mut buf = [0; 4];
                for b in c.encode_utf8(&mut buf).bytes() {
                    out.push_str(&format!("%{b:02X}"));
                }
            }
        }
    }
    // A trailing dot would not survive prefixed-name serialization.
    if out.ends_with('.') {
        out.pop();
        out.push_str("%2E");
    }
    out
}

fn is_decimal(s: &str) -> bool {
    let digits = s.strip_prefix(['+', '-']).unwrap_or(s);
    let (int, frac) = digits.split_once('.').unwrap_or((digits, ""));
    (!int.is_empty() || !frac.is_empty())
        && int.bytes().all(|b| b.is_ascii_digit())
        && frac.bytes().all(|b| b.is_ascii_digit())
}

/// Coerces a cell to a literal of the requested datatype.
pub fn coerce(cell: &str, coercion: Coercion) -> std::result::Result<Literal, String> {
    let text = cell.trim();
    match coercion {
        Coercion::DateTime => normalize_date_time(text)
            .map(|lex| Literal::new(lex, xsd::DATE_TIME))
            .ok_or_else(|| format!("`{text}` is not a dateTime")),
        Coercion::Decimal if is_decimal(text) => Ok(Literal::new(text, xsd::DECIMAL)),
        Coercion::Decimal => Err(format!("`{text}` is not a decimal")),
        Coercion::Boolean => {
            let value = match text.to_ascii_lowercase().as_str() {
                "true" => true,
                "false" => false,
                // Counts: any positive number is true.
                n if is_decimal(n) => n.parse::<f64>().map_err(|e| e.to_string())? > 0.0,
                _ => return Err(format!("`{text}` is not a boolean or count")),
            };
            Ok(Literal::new(value.to_string(), xsd::BOOLEAN))
        }
    }
}

#[derive(Debug, Clone)]
struct ResolvedFact {
    property: String,
    cell: CellRef,
    kind: FactKind,
}

#[derive(Debug, Clone)]
enum FactKind {
    Literal(Option<Coercion>),
    /// Object-valued: range classes, and existing range members by label.
    Object {
        ranges: Vec<String>,
        known: HashMap<String, Term>,
    },
    Travel {
        ranges: Vec<String>,
    },
}

/// A rule validated against a vocabulary, ready to run over tables.
#[derive(Debug, Clone)]
pub struct Mapper {
    subject: SubjectSpec,
    types: Vec<Term>,
    facts: Vec<ResolvedFact>,
    config: IngestConfig,
}

fn resolve_name(
    name: &NameRef,
    graph: &Graph,
    labels: &LabelIndex,
    allowed: impl Fn(&str) -> bool,
) -> Result<String> {
    let declared = |t: &Term| t.as_iri().is_some_and(&allowed);
    match name {
        NameRef::Quoted(label) => Ok(labels
            .resolve_among(label, declared)?
            .as_iri()
            .expect("iri")
            .to_owned()),
        NameRef::Prefixed(text) => {
            let term = graph.resolve(text)?;
            match term.as_iri() {
                Some(iri) if allowed(iri) => Ok(iri.to_owned()),
                _ => Err(Error::UnknownLabel(text.clone())),
            }
        }
        NameRef::Bare(word) => match labels.resolve_among(word, declared) {
            Ok(t) => Ok(t.as_iri().expect("iri").to_owned()),
            Err(Error::UnknownLabel(_)) if allowed(&codo(word)) => Ok(codo(word)),
            Err(e) => Err(e),
        },
    }
}

impl Mapper {
    /// Validates every name in `rule` against the vocabulary in `graph`.
    pub fn new(
        rule: &MappingRule,
        graph: &Graph,
        axioms: &SchemaAxioms,
        config: IngestConfig,
    ) -> Result<Self> {
        if let Some(f) = &rule.subject.function {
            if f != HASH_ENCODE {
                return Err(Error::InvalidRule(format!(
                    "unknown subject function `{f}`"
                )));
            }
        }
        let labels = LabelIndex::build(graph);
        let types = rule
            .types
            .iter()
            .map(|t| {
                resolve_name(t, graph, &labels, |iri| axioms.classes.contains(iri)).map(Term::iri)
            })
            .collect::<Result<Vec<_>>>()?;
        let mut facts = Vec::new();
        for fact in &rule.facts {
            let property = resolve_name(&fact.property, graph, &labels, |iri| {
                axioms.is_property(iri)
            })?;
            let ranges: Vec<String> = axioms.ranges_of(&property).map(str::to_owned).collect();
            let kind = if axioms.data_properties.contains(&property) {
                FactKind::Literal(fact.coercion)
            } else if fact.coercion.is_some() {
                return Err(Error::InvalidRule(format!(
                    "datatype coercion on object property <{property}>"
                )));
            } else if property == codo("travelledFrom") {
                FactKind::Travel { ranges }
            } else {
                let known = members_by_label(graph, &ranges);
                FactKind::Object { ranges, known }
            };
            facts.push(ResolvedFact {
                property,
                cell: fact.cell.clone(),
                kind,
            });
        }
        Ok(Mapper {
            subject: rule.subject.clone(),
            types,
            facts,
            config,
        })
    }

    /// Transforms every row of `table` into `graph`.
    pub fn apply(&self, table: &CaseTable, graph: &mut Graph) -> Result<IngestReport> {
        let mut report = IngestReport::default();
        let before = graph.len();
        let type_iri = Term::iri(rdf::TYPE);
        let label_iri = Term::iri(rdfs::LABEL);
        let sheet = Sheet { table };
        for row in 0..table.len() {
            let row_no = row + 1;
            report.rows_processed += 1;
            let subject_cell = sheet.get(&self.subject.cell, row);
            let Some(subject) = make_individual_iri(subject_cell, self.config.naming) else {
                report.rows_skipped += 1;
                let reason = if subject_cell.trim().is_empty() {
                    "empty subject cell".to_owned()
                } else {
                    format!("subject `{}` is not a case number", subject_cell.trim())
                };
                report.skip(row_no, &self.subject.cell.column, reason);
                continue;
            };
            report.individuals_created += 1;
            let emit = |g: &mut Graph, p: &Term, o: Term| {
                g.insert(&Triple {
                    subject: subject.clone(),
                    predicate: p.clone(),
                    object: o,
                })
                .expect("valid triple");
            };
            for class in &self.types {
                emit(graph, &type_iri, class.clone());
            }
            if !self.subject.label.is_empty() {
                let label: Vec<&str> = self
                    .subject
                    .label
                    .iter()
                    .map(|part| match part {
                        LabelPart::Text(s) => s.trim(),
                        LabelPart::Cell(c) => sheet.get(c, row).trim(),
                    })
                    .collect();
                emit(graph, &label_iri, Term::string(label.join(" ")));
            }
            for fact in &self.facts {
                let column = &fact.cell.column;
                let cell = sheet.get(&fact.cell, row).trim();
                if cell.is_empty() {
                    report.facts_skipped += 1;
                    report.skip(row_no, column, "empty cell");
                    continue;
                }
                let property = Term::iri(&fact.property);
                match &fact.kind {
                    FactKind::Literal(coercion) => {
                        let literal = match coercion {
                            None => Literal::string(cell),
                            Some(c) => match coerce(cell, *c) {
                                Ok(l) => l,
                                Err(reason) => {
                                    report.facts_skipped += 1;
                                    report.skip(row_no, column, reason);
                                    continue;
                                }
                            },
                        };
                        if self.config.sentinel_filter && self.is_sentinel(&fact.property, &literal)
                        {
                            report.facts_skipped += 1;
                            report.skip(row_no, column, format!("sentinel value `{cell}`"));
                            continue;
                        }
                        // Counts coerced to booleans keep the raw number.
                        if fact.property == codo("hasCausedSecondaryInfections") && is_decimal(cell)
                        {
                            emit(
                                graph,
                                &Term::iri(codo("secondaryInfectionCount")),
                                Term::literal(cell, xsd::DECIMAL),
                            );
                        }
                        emit(graph, &property, Term::Literal(literal));
                    }
                    FactKind::Object { ranges, known } => {
                        let value = value_individual(graph, cell, ranges, known);
                        emit(graph, &property, value);
                    }
                    FactKind::Travel { ranges } => match normalize_reason_cell(cell) {
                        ReasonParse::Travel(places) => {
                            for place in places {
                                let value =
                                    value_individual(graph, &place, ranges, &HashMap::new());
                                emit(graph, &property, value);
                            }
                        }
                        _ => {
                            report.facts_skipped += 1;
                            report.skip(row_no, column, format!("`{cell}` is not a travel origin"));
                            continue;
                        }
                    },
                }
                report.facts_emitted += 1;
            }
        }
        report.triples_added = graph.len() - before;
        Ok(report)
    }

    fn is_sentinel(&self, property: &str, literal: &Literal) -> bool {
        match literal.datatype() {
            xsd::DATE_TIME => literal.lexical().starts_with("1900-01-01"),
            xsd::DECIMAL => property == codo("age") && literal.lexical().parse::<f64>() == Ok(0.0),
            _ => false,
        }
    }
}

struct Sheet<'a> {
    table: &'a CaseTable,
}

impl<'a> Sheet<'a> {
    /// Fixed row numbers are absolute sheet rows: row 1 is the header when
    /// the table has one.
    fn get(&self, cell: &CellRef, current: usize) -> &'a str {
        let column = cell.column_index();
        match cell.row {
            RowRef::Current => self.table.cell(current, column),
            RowRef::Fixed(n) => match &self.table.header {
                Some(h) if n == 1 => h.get(column).map_or("", String::as_str),
                Some(_) => self.table.cell(n - 2, column),
                None => self.table.cell(n - 1, column),
            },
        }
    }
}

/// Individuals already typed with one of `ranges`, keyed by label.
fn members_by_label(graph: &Graph, ranges: &[String]) -> HashMap<String, Term> {
    let mut known = HashMap::new();
    let type_iri = Term::iri(rdf::TYPE);
    for range in ranges {
        for t in graph.match_pattern(None, Some(&type_iri), Some(&Term::iri(range))) {
            for label in graph.objects(&t.subject, rdfs::LABEL) {
                if let Term::Literal(l) = label.object {
                    known
                        .entry(l.lexical().to_lowercase())
                        .or_insert_with(|| t.subject.clone());
                }
            }
        }
    }
    known
}

/// The individual named by a cell: an existing range member with that
/// label, or a fresh one in the default namespace typed with the ranges.
fn value_individual(
    graph: &mut Graph,
    text: &str,
    ranges: &[String],
    known: &HashMap<String, Term>,
) -> Term {
    if let Some(existing) = known.get(&text.to_lowercase()) {
        return existing.clone();
    }
    let individual = Term::iri(format!("{CODO}{}", value_local_name(text)));
    let type_iri = Term::iri(rdf::TYPE);
    for range in ranges {
        graph
            .insert(&Triple {
                subject: individual.clone(),
                predicate: type_iri.clone(),
                object: Term::iri(range),
            })
            .expect("valid triple");
    }
    graph
        .insert(&Triple {
            subject: individual.clone(),
            predicate: Term::iri(rdfs::LABEL),
            object: Term::string(text),
        })
        .expect("valid triple");
    individual
}

/// Validates `rule` and applies it to every row of `table`.
pub fn apply_mapping(
    rule: &MappingRule,
    table: &CaseTable,
    graph: &mut Graph,
    axioms: &SchemaAxioms,
    config: &IngestConfig,
) -> Result<IngestReport> {
    Mapper::new(rule, graph, axioms, config.clone())?.apply(table, graph)
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct LinkReport {
    pub relationships: usize,
    pub reasons: usize,
    pub travel: usize,
    pub triples_added: usize,
    pub log: Vec<SkipEntry>,
}

impl fmt::Display for LinkReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "relationships linked: {}", self.relationships)?;
        writeln!(f, "reasons recorded:     {}", self.reasons)?;
        writeln!(f, "travel origins:       {}", self.travel)?;
        write!(f, "triples added:        {}", self.triples_added)
    }
}

fn case_number(text: &str) -> Option<u64> {
    let t = text.trim();
    t.parse::<u64>().ok().or_else(|| {
        t.parse::<f64>()
            .ok()
            .filter(|f| f.fract() == 0.0 && *f >= 0.0)
            .map(|f| f as u64)
    })
}

/// Interprets the reason column of every row: kinship words link the row's
/// patient to the case in the parent column, travel reasons add origins,
/// anything else is kept as a suspected reason.
pub fn link_relationships(
    table: &CaseTable,
    graph: &mut Graph,
    config: &IngestConfig,
) -> Result<LinkReport> {
    let mut report = LinkReport::default();
    let before = graph.len();
    let case_col = CellRef::current(&config.case_column).column_index();
    let reason_col = CellRef::current(&config.reason_column).column_index();
    let parent_col = CellRef::current(&config.parent_column).column_index();
    let mut by_case: HashMap<u64, Term> = HashMap::new();
    for row in 0..table.len() {
        let cell = table.cell(row, case_col);
        if let (Some(n), Some(iri)) = (case_number(cell), make_individual_iri(cell, config.naming))
        {
            by_case.entry(n).or_insert(iri);
        }
    }
    let place_ranges = vec![crate::vocab::SCHEMA.to_owned() + "Place"];
    for row in 0..table.len() {
        let row_no = row + 1;
        let Some(patient) = make_individual_iri(table.cell(row, case_col), config.naming) else {
            continue;
        };
        match normalize_reason_cell(table.cell(row, reason_col)) {
            ReasonParse::Relationship(property) => {
                let parent = table.cell(row, parent_col).trim();
                match case_number(parent) {
                    None | Some(0) => {}
                    Some(n) => match by_case.get(&n) {
                        Some(other) => {
                            graph.insert(&Triple::new(
                                other.clone(),
                                Term::iri(property),
                                patient,
                            )?)?;
                            report.relationships += 1;
                        }
                        None => report.log.push(SkipEntry {
                            row: row_no,
                            column: config.parent_column.clone(),
                            reason: format!("dangling reference to case {n}"),
                        }),
                    },
                }
            }
            ReasonParse::Travel(places) => {
                for place in places {
                    let value = value_individual(graph, &place, &place_ranges, &HashMap::new());
                    graph.insert(&Triple::new(
                        patient.clone(),
                        Term::iri(codo("travelledFrom")),
                        value,
                    )?)?;
                }
                report.travel += 1;
            }
            ReasonParse::Opaque(text) if text.is_empty() => {}
            ReasonParse::Opaque(text) => {
                graph.insert(&Triple::new(
                    patient,
                    Term::iri(codo("suspectedReasonOfInfection")),
                    Term::string(text),
                )?)?;
                report.reasons += 1;
            }
        }
    }
    report.triples_added = graph.len() - before;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn padded_naming() {
        assert_eq!(
            make_individual_iri("1", Naming::Padded),
            Some(Term::codo("p000001"))
        );
        assert_eq!(
            make_individual_iri(" 23000 ", Naming::Padded),
            Some(Term::codo("p023000"))
        );
        assert_eq!(make_individual_iri("", Naming::Padded), None);
        assert_eq!(make_individual_iri("x", Naming::Padded), None);
    }

    #[test]
    fn fnv_known_vectors() {
        assert_eq!(fnv1a64(b""), 0xcbf29ce484222325);
        assert_eq!(fnv1a64(b"a"), 0xaf63dc4c8601ec8c);
        assert_eq!(fnv1a64(b"foobar"), 0x85944171f73967e8);
    }

    #[test]
    fn coercions() {
        assert_eq!(
            coerce("2020-03-09T", Coercion::DateTime).unwrap().lexical(),
            "2020-03-09T00:00:00"
        );
        assert_eq!(coerce("2", Coercion::Boolean).unwrap().lexical(), "true");
        assert_eq!(coerce("0", Coercion::Boolean).unwrap().lexical(), "false");
        assert!(coerce("many", Coercion::Boolean).is_err());
        assert!(coerce("4l", Coercion::Decimal).is_err());
        assert_eq!(coerce("41", Coercion::Decimal).unwrap().lexical(), "41");
    }

    #[test]
    fn value_names_are_injective_on_separators() {
        assert_eq!(value_local_name("Bangalore-Urban"), "Bangalore-Urban");
        assert_eq!(value_local_name("Middle East"), "Middle_East");
        assert_ne!(value_local_name("a b"), value_local_name("a_b"));
        assert_eq!(value_local_name("Kii/"), "Kii%2F");
    }
}
