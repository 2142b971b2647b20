use std::collections::HashMap;
use std::fmt::Write as _;

use super::{BlankScope, ParseMode, ParseReport};
use crate::error::{Error, Result};
use crate::graph::{Graph, Origin};
use crate::term::{Term, Triple};
use crate::vocab::xsd;

/// Parses N-Triples into `graph`. In [`ParseMode::Strict`] the first bad
/// line aborts; in [`ParseMode::Lenient`] bad lines are collected in the
/// report and skipped.
pub fn parse_ntriples(text: &str, graph: &mut Graph, mode: ParseMode) -> Result<ParseReport> {
    parse_ntriples_scoped(text, graph, mode, Origin::Asserted, &mut BlankScope::new())
}

/// [`parse_ntriples`] with an explicit blank-node scope, inserting triples
/// with the given origin.
pub fn parse_ntriples_scoped(
    text: &str,
    graph: &mut Graph,
    mode: ParseMode,
    origin: Origin,
    scope: &mut BlankScope,
) -> Result<ParseReport> {
    let mut report = ParseReport::default();
    for (index, line) in text.lines().enumerate() {
        let line_no = index + 1;
        match parse_line(line, line_no) {
            Ok(None) => {}
            Ok(Some(triple)) => {
                let triple = scope.triple(triple, graph);
                let added = match origin {
                    Origin::Asserted => graph.insert(&triple)?,
                    Origin::Inferred => graph.insert_inferred(&triple)?,
                };
                if added {
                    report.triple_count += 1;
                }
            }
            Err(err) => match mode {
                ParseMode::Strict => return Err(err),
                ParseMode::Lenient => report.line_errors.push((line_no, err.to_string())),
            },
        }
    }
    Ok(report)
}

fn parse_line(line: &str, line_no: usize) -> Result<Option<Triple>> {
    let mut cursor = Cursor {
        chars: line.char_indices().peekable(),
        line: line_no,
        src: line,
    };
    cursor.skip_ws();
    match cursor.peek() {
        None | Some('#') => return Ok(None),
        _ => {}
    }
    let subject = cursor.term()?;
    cursor.skip_ws();
    let predicate = cursor.term()?;
    cursor.skip_ws();
    let object = cursor.term()?;
    cursor.skip_ws();
    if cursor.next_char() != Some('.') {
        return Err(cursor.error("expected `.` at end of triple"));
    }
    cursor.skip_ws();
    match cursor.peek() {
        None | Some('#') => {}
        Some(_) => return Err(cursor.error("unexpected content after `.`")),
    }
    if subject.is_literal() {
        return Err(cursor.error("literal in subject position"));
    }
    if !predicate.is_iri() {
        return Err(cursor.error("predicate must be an IRI"));
    }
    Ok(Some(Triple {
        subject,
        predicate,
        object,
    }))
}

struct Cursor<'a> {
    chars: std::iter::Peekable<std::str::CharIndices<'a>>,
    line: usize,
    src: &'a str,
}

impl Cursor<'_> {
    fn peek(&mut self) -> Option<char> {
        self.chars.peek().map(|&(_, c)| c)
    }

    fn next_char(&mut self) -> Option<char> {
        self.chars.next().map(|(_, c)| c)
    }

    fn column(&mut self) -> usize {
        let offset = self.chars.peek().map_or(self.src.len(), |&(i, _)| i);
        self.src[..offset].chars().count() + 1
    }

    fn error(&mut self, message: &str) -> Error {
        Error::Syntax {
            line: self.line,
            column: self.column(),
            message: message.to_owned(),
        }
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(' ' | '\t' | '\r')) {
            self.next_char();
        }
    }

    fn term(&mut self) -> Result<Term> {
        match self.peek() {
            Some('<') => Ok(Term::Iri(self.iri()?)),
            Some('_') => self.blank(),
            Some('"') => self.literal(),
            Some(_) => Err(self.error("expected IRI, blank node or literal")),
            None => Err(self.error("unexpected end of line")),
        }
    }

    fn iri(&mut self) -> Result<String> {
        self.next_char();
        let mut iri = String::new();
        loop {
            match self.next_char() {
                Some('>') => break,
                Some('\\') => iri.push(self.unicode_escape()?),
                Some(c)
                    if c.is_whitespace()
                        || matches!(c, '<' | '"' | '{' | '}' | '|' | '^' | '`') =>
                {
                    return Err(self.error("invalid character in IRI"));
                }
                Some(c) => iri.push(c),
                None => return Err(self.error("unterminated IRI")),
            }
        }
        if !iri.contains(':') {
            return Err(self.error("IRI must be absolute"));
        }
        Ok(iri)
    }

    fn blank(&mut self) -> Result<Term> {
        self.next_char();
        if self.next_char() != Some(':') {
            return Err(self.error("expected `_:`"));
        }
        let mut id = String::new();
        while let Some(c) = self.peek() {
            if c.is_alphanumeric() || matches!(c, '_' | '-' | '.') {
                id.push(c);
                self.next_char();
            } else {
                break;
            }
        }
        if id.ends_with('.') {
            return Err(self.error("blank node label may not end with `.`"));
        }
        if id.is_empty() {
            return Err(self.error("empty blank node label"));
        }
        Ok(Term::Blank(id))
    }

    fn literal(&mut self) -> Result<Term> {
        self.next_char();
        let mut lexical = String::new();
        loop {
            match self.next_char() {
                Some('"') => break,
                Some('\\') => match self.peek() {
                    Some('u' | 'U') => lexical.push(self.unicode_escape()?),
                    Some(c) => {
                        self.next_char();
                        lexical.push(match c {
                            't' => '\t',
                            'b' => '\u{8}',
                            'n' => '\n',
                            'r' => '\r',
                            'f' => '\u{c}',
                            '"' => '"',
                            '\'' => '\'',
                            '\\' => '\\',
                            _ => return Err(self.error("invalid escape sequence")),
                        });
                    }
                    None => return Err(self.error("unterminated literal")),
                },
                Some(c) => lexical.push(c),
                None => return Err(self.error("unterminated literal")),
            }
        }
        match self.peek() {
            Some('^') => {
                self.next_char();
                if self.next_char() != Some('^') {
                    return Err(self.error("expected `^^`"));
                }
                if self.peek() != Some('<') {
                    return Err(self.error("expected datatype IRI"));
                }
                let datatype = self.iri()?;
                Ok(Term::literal(lexical, datatype))
            }
            Some('@') => Err(self.error("language-tagged literals are not supported")),
            _ => Ok(Term::literal(lexical, xsd::STRING)),
        }
    }

    /// Reads `uXXXX` / `UXXXXXXXX` after a consumed backslash.
    fn unicode_escape(&mut self) -> Result<char> {
        let width = match self.next_char() {
            Some('u') => 4,
            Some('U') => 8,
            _ => return Err(self.error("invalid escape sequence")),
        };
        let mut hex = String::with_capacity(width);
        for _ in 0..width {
            match self.next_char() {
                Some(c) if c.is_ascii_hexdigit() => hex.push(c),
                _ => return Err(self.error("invalid unicode escape")),
            }
        }
        u32::from_str_radix(&hex, 16)
            .ok()
            .and_then(char::from_u32)
            .ok_or_else(|| self.error("invalid unicode code point"))
    }
}

/// Canonical N-Triples: one line per triple, lines sorted, blank nodes
/// relabelled `_:b0`, `_:b1`, ... in first-encounter order, non-ASCII
/// escaped.
pub fn serialize_ntriples(graph: &Graph) -> String {
    serialize_triples(graph.iter())
}

/// Canonical N-Triples of the asserted triples only.
pub fn serialize_asserted(graph: &Graph) -> String {
    serialize_triples(
        graph
            .iter_ids()
            .filter(|ids| !graph.is_inferred_ids(*ids))
            .map(|ids| graph.resolve_ids(ids)),
    )
}

/// Canonical N-Triples of the inferred triples only.
pub fn serialize_inferred(graph: &Graph) -> String {
    serialize_triples(
        graph
            .iter_ids()
            .filter(|ids| graph.is_inferred_ids(*ids))
            .map(|ids| graph.resolve_ids(ids)),
    )
}

pub fn serialize_triples(triples: impl IntoIterator<Item = Triple>) -> String {
    let mut triples: Vec<Triple> = triples.into_iter().collect();
    triples.sort();
    let labels = blank_labels(&triples);
    render(&triples, &labels)
}

/// Canonical asserted and inferred N-Triples sharing one blank-node
/// labelling, so a node mentioned in both files stays one node.
pub fn serialize_split(graph: &Graph) -> (String, String) {
    let triples = graph.sorted_triples();
    let labels = blank_labels(&triples);
    let (inferred, asserted): (Vec<Triple>, Vec<Triple>) = triples
        .into_iter()
        .partition(|t| graph.origin(t) == Some(Origin::Inferred));
    (render(&asserted, &labels), render(&inferred, &labels))
}

fn blank_labels(sorted: &[Triple]) -> HashMap<String, String> {
    let mut labels = HashMap::new();
    for t in sorted {
        for term in [&t.subject, &t.object] {
            if let Term::Blank(id) = term {
                let next = labels.len();
                labels
                    .entry(id.clone())
                    .or_insert_with(|| format!("b{next}"));
            }
        }
    }
    labels
}

fn render(triples: &[Triple], labels: &HashMap<String, String>) -> String {
    let mut lines: Vec<String> = triples
        .iter()
        .map(|t| {
            let mut line = String::new();
            write_term(&mut line, &t.subject, labels);
            line.push(' ');
            write_term(&mut line, &t.predicate, labels);
            line.push(' ');
            write_term(&mut line, &t.object, labels);
            line.push_str(" .\n");
            line
        })
        .collect();
    lines.sort();
    lines.concat()
}

fn write_term(out: &mut String, term: &Term, labels: &HashMap<String, String>) {
    match term {
        Term::Iri(iri) => {
            out.push('<');
            for c in iri.chars() {
                push_ascii(out, c);
            }
            out.push('>');
        }
        Term::Blank(id) => {
            out.push_str("_:");
            out.push_str(&labels[id]);
        }
        Term::Literal(lit) => {
            out.push('"');
            for c in lit.lexical().chars() {
                match c {
                    '\\' => out.push_str("\\\\"),
                    '"' => out.push_str("\\\""),
                    '\n' => out.push_str("\\n"),
                    '\r' => out.push_str("\\r"),
                    '\t' => out.push_str("\\t"),
                    c => push_ascii(out, c),
                }
            }
            out.push('"');
            if !lit.is_string() {
                out.push_str("^^<");
                out.push_str(lit.datatype());
                out.push('>');
            }
        }
    }
}

fn push_ascii(out: &mut String, c: char) {
    let code = c as u32;
    if c.is_ascii() && !c.is_ascii_control() {
        out.push(c);
    } else if code <= 0xFFFF {
        let _ = write!(out, "\\u{code:04X}");
    } else {
        let _ = write!(out, "\\U{code:08X}");
    }
}
