//! Terms, triples and prefix handling.

use std::collections::BTreeMap;
use std::fmt;

use chrono::{DateTime, FixedOffset, NaiveDate, NaiveDateTime, NaiveTime};

use crate::error::{Error, Result};
use crate::vocab::{self, xsd};

/// A literal value. The datatype is always present; plain strings carry
/// `xsd:string`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    lexical: String,
    datatype: String,
}

impl Literal {
    /// Builds a literal, normalizing the lexical form of booleans and
    /// dateTimes when it is recognizable. Ill-typed input is kept verbatim.
    pub fn new(lexical: impl Into<String>, datatype: impl Into<String>) -> Self {
        let lexical = lexical.into();
        let datatype = datatype.into();
        let lexical = match datatype.as_str() {
            xsd::BOOLEAN => normalize_boolean(&lexical)
                .map(str::to_owned)
                .unwrap_or(lexical),
            xsd::DATE_TIME => normalize_date_time(&lexical).unwrap_or(lexical),
            _ => lexical,
        };
        Literal { lexical, datatype }
    }

    pub fn string(lexical: impl Into<String>) -> Self {
        Literal {
            lexical: lexical.into(),
            datatype: xsd::STRING.to_owned(),
        }
    }

    pub fn lexical(&self) -> &str {
        &self.lexical
    }

    pub fn datatype(&self) -> &str {
        &self.datatype
    }

    pub fn is_string(&self) -> bool {
        self.datatype == xsd::STRING
    }

    /// Typed value used by comparisons; `None` for ill-typed literals.
    pub fn value(&self) -> Option<LiteralValue<'_>> {
        match self.datatype.as_str() {
            xsd::STRING => Some(LiteralValue::String(&self.lexical)),
            xsd::BOOLEAN => match self.lexical.as_str() {
                "true" => Some(LiteralValue::Boolean(true)),
                "false" => Some(LiteralValue::Boolean(false)),
                _ => None,
            },
            xsd::DECIMAL | xsd::INTEGER | xsd::DOUBLE | xsd::FLOAT => {
                parse_number(&self.lexical).map(LiteralValue::Number)
            }
            xsd::DATE_TIME => parse_date_time(&self.lexical).map(LiteralValue::DateTime),
            _ => None,
        }
    }
}

/// Interpreted literal value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LiteralValue<'a> {
    String(&'a str),
    Boolean(bool),
    Number(f64),
    DateTime(DateTime<FixedOffset>),
}

/// An RDF term. Variant order gives the canonical ordering
/// blank < IRI < literal.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Blank(String),
    Iri(String),
    Literal(Literal),
}

impl Term {
    pub fn iri(iri: impl Into<String>) -> Self {
        Term::Iri(iri.into())
    }

    pub fn blank(id: impl Into<String>) -> Self {
        Term::Blank(id.into())
    }

    pub fn literal(lexical: impl Into<String>, datatype: impl Into<String>) -> Self {
        Term::Literal(Literal::new(lexical, datatype))
    }

    pub fn string(lexical: impl Into<String>) -> Self {
        Term::Literal(Literal::string(lexical))
    }

    pub fn boolean(value: bool) -> Self {
        Term::literal(if value { "true" } else { "false" }, xsd::BOOLEAN)
    }

    pub fn codo(local: &str) -> Self {
        Term::Iri(vocab::codo(local))
    }

    pub fn as_iri(&self) -> Option<&str> {
        match self {
            Term::Iri(iri) => Some(iri),
            _ => None,
        }
    }

    pub fn as_literal(&self) -> Option<&Literal> {
        match self {
            Term::Literal(lit) => Some(lit),
            _ => None,
        }
    }

    pub fn is_literal(&self) -> bool {
        matches!(self, Term::Literal(_))
    }

    pub fn is_iri(&self) -> bool {
        matches!(self, Term::Iri(_))
    }
}

/// N-Triples-like display: `<iri>`, `_:id`, `"lex"^^<dt>`.
impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Iri(iri) => write!(f, "<{iri}>"),
            Term::Blank(id) => write!(f, "_:{id}"),
            Term::Literal(lit) => {
                write!(f, "\"{}\"", escape_string(&lit.lexical))?;
                if !lit.is_string() {
                    write!(f, "^^<{}>", lit.datatype)?;
                }
                Ok(())
            }
        }
    }
}

fn escape_string(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '"' => out.push_str("\\\""),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            _ => out.push(c),
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Triple {
    pub subject: Term,
    pub predicate: Term,
    pub object: Term,
}

impl Triple {
    /// Checks the shape constraints: IRI predicate, non-literal subject.
    pub fn new(subject: Term, predicate: Term, object: Term) -> Result<Self> {
        let triple = Triple {
            subject,
            predicate,
            object,
        };
        triple.validate()?;
        Ok(triple)
    }

    pub fn validate(&self) -> Result<()> {
        if self.subject.is_literal() {
            return Err(Error::MalformedTriple(format!(
                "literal {} cannot be a subject",
                self.subject
            )));
        }
        if !self.predicate.is_iri() {
            return Err(Error::MalformedTriple(format!(
                "predicate {} must be an IRI",
                self.predicate
            )));
        }
        Ok(())
    }
}

impl fmt::Display for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {} .", self.subject, self.predicate, self.object)
    }
}

/// Prefix → namespace map.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrefixMap {
    prefixes: BTreeMap<String, String>,
}

impl Default for PrefixMap {
    fn default() -> Self {
        let prefixes = vocab::DEFAULT_PREFIXES
            .iter()
            .map(|(p, ns)| (p.to_string(), ns.to_string()))
            .collect();
        PrefixMap { prefixes }
    }
}

impl PrefixMap {
    pub fn empty() -> Self {
        PrefixMap {
            prefixes: BTreeMap::new(),
        }
    }

    pub fn insert(&mut self, prefix: impl Into<String>, namespace: impl Into<String>) {
        self.prefixes.insert(prefix.into(), namespace.into());
    }

    pub fn get(&self, prefix: &str) -> Option<&str> {
        self.prefixes.get(prefix).map(String::as_str)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.prefixes.iter().map(|(p, n)| (p.as_str(), n.as_str()))
    }

    /// Expands `prefix:local` to a full IRI.
    pub fn expand(&self, prefix: &str, local: &str) -> Result<String> {
        self.get(prefix)
            .map(|ns| format!("{ns}{local}"))
            .ok_or_else(|| Error::UnresolvedPrefix(prefix.to_owned()))
    }

    /// Shortens an IRI to `prefix:local` when a registered namespace covers
    /// it and the local part is a plain name. Longest namespace wins.
    pub fn compact(&self, iri: &str) -> Option<String> {
        self.prefixes
            .iter()
            .filter(|(_, ns)| iri.starts_with(ns.as_str()))
            .max_by_key(|(_, ns)| ns.len())
            .and_then(|(p, ns)| {
                let local = &iri[ns.len()..];
                is_simple_local(local).then(|| format!("{p}:{local}"))
            })
    }

    /// Resolves a textual term: `<iri>`, `prefix:local`, `_:id`,
    /// `"lex"`, `"lex"^^datatype`, `true`/`false`.
    pub fn resolve(&self, text: &str) -> Result<Term> {
        let text = text.trim();
        if let Some(rest) = text.strip_prefix('<') {
            let iri = rest
                .strip_suffix('>')
                .ok_or_else(|| Error::InvalidTerm(text.to_owned()))?;
            return Ok(Term::iri(iri));
        }
        if let Some(id) = text.strip_prefix("_:") {
            if id.is_empty() {
                return Err(Error::InvalidTerm(text.to_owned()));
            }
            return Ok(Term::blank(id));
        }
        if let Some(rest) = text.strip_prefix('"') {
            let close = rest
                .rfind('"')
                .ok_or_else(|| Error::InvalidTerm(text.to_owned()))?;
            let lexical = &rest[..close];
            let tail = &rest[close + 1..];
            if tail.is_empty() {
                return Ok(Term::string(lexical));
            }
            let datatype = tail
                .strip_prefix("^^")
                .ok_or_else(|| Error::InvalidTerm(text.to_owned()))?;
            let datatype = match self.resolve(datatype)? {
                Term::Iri(dt) => dt,
                _ => return Err(Error::InvalidTerm(text.to_owned())),
            };
            return Ok(Term::literal(lexical, datatype));
        }
        match text {
            "true" | "false" => return Ok(Term::literal(text, xsd::BOOLEAN)),
            _ => {}
        }
        match text.split_once(':') {
            Some((prefix, local)) => Ok(Term::iri(self.expand(prefix, local)?)),
            None => Err(Error::InvalidTerm(text.to_owned())),
        }
    }
}

fn is_simple_local(local: &str) -> bool {
    !local.is_empty()
        && !local.ends_with('.')
        && local
            .chars()
            .all(|c| c.is_alphanumeric() || c == '_' || c == '-' || c == '.')
}

pub(crate) fn normalize_boolean(lexical: &str) -> Option<&'static str> {
    match lexical.trim() {
        "true" | "1" => Some("true"),
        "false" | "0" => Some("false"),
        _ => None,
    }
}

/// Normalizes a dateTime lexical form to seconds precision. A bare date or a
/// date followed by an empty time part (`2020-03-09T`) becomes midnight.
/// Timezone designators are kept.
pub fn normalize_date_time(lexical: &str) -> Option<String> {
    let (naive, offset) = parse_date_time_parts(lexical)?;
    let mut out = naive.format("%Y-%m-%dT%H:%M:%S").to_string();
    if let Some(offset) = offset {
        if offset.local_minus_utc() == 0 {
            out.push('Z');
        } else {
            out.push_str(&offset.to_string());
        }
    }
    Some(out)
}

/// Parses a (possibly abbreviated) dateTime. Values without a timezone are
/// read as UTC.
pub fn parse_date_time(lexical: &str) -> Option<DateTime<FixedOffset>> {
    let (naive, offset) = parse_date_time_parts(lexical)?;
    let offset = offset.unwrap_or_else(|| FixedOffset::east_opt(0).expect("zero offset"));
    naive.and_local_timezone(offset).single()
}

fn parse_date_time_parts(lexical: &str) -> Option<(NaiveDateTime, Option<FixedOffset>)> {
    let s = lexical.trim();
    if s.len() < 10 {
        return None;
    }
    let date = NaiveDate::parse_from_str(s.get(..10)?, "%Y-%m-%d").ok()?;
    let rest = &s[10..];
    let rest = match rest.strip_prefix('T') {
        Some(r) => r,
        None if rest.is_empty() => rest,
        None => return None,
    };
    let (time_part, offset) = split_offset(rest)?;
    let time = if time_part.is_empty() {
        NaiveTime::MIN
    } else {
        let whole = time_part.split('.').next().unwrap_or(time_part);
        NaiveTime::parse_from_str(whole, "%H:%M:%S")
            .or_else(|_| NaiveTime::parse_from_str(whole, "%H:%M"))
            .ok()?
    };
    Some((date.and_time(time), offset))
}

fn split_offset(rest: &str) -> Option<(&str, Option<FixedOffset>)> {
    if let Some(t) = rest.strip_suffix('Z') {
        return Some((t, FixedOffset::east_opt(0)));
    }
    if rest.len() >= 6 {
        let (t, tz) = rest.split_at(rest.len() - 6);
        let bytes = tz.as_bytes();
        if (bytes[0] == b'+' || bytes[0] == b'-') && bytes[3] == b':' {
            let hours: i32 = tz[1..3].parse().ok()?;
            let minutes: i32 = tz[4..6].parse().ok()?;
            let secs = hours * 3600 + minutes * 60;
            let secs = if bytes[0] == b'-' { -secs } else { secs };
            return Some((t, Some(FixedOffset::east_opt(secs)?)));
        }
    }
    Some((rest, None))
}

pub(crate) fn parse_number(lexical: &str) -> Option<f64> {
    let s = lexical.trim();
    if s.is_empty() || s.eq_ignore_ascii_case("nan") || s.to_ascii_lowercase().contains("inf") {
        return None;
    }
    s.parse::<f64>().ok()
}
