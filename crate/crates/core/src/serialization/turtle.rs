//! A Turtle subset: `@prefix`/`PREFIX` directives, IRIs, prefixed names,
//! the `a` keyword, predicate lists (`;`), object lists (`,`), blank node
//! labels and plain/typed/numeric/boolean literals. Collections, blank node
//! property lists, `@base` and language tags are rejected.

use std::collections::{BTreeMap, HashMap};

use super::{BlankScope, ParseReport};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::term::{PrefixMap, Term, Triple};
use crate::vocab::{rdf, xsd};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    /// `true` for `@prefix`, which needs a terminating dot.
    PrefixDirective(bool),
    Iri(String),
    PName(String, String),
    /// `prefix:` inside a prefix directive.
    PrefixDecl(String),
    Blank(String),
    Str(String),
    Number(String, &'static str),
    Bool(bool),
    A,
    DataTypeMark,
    Dot,
    Semicolon,
    Comma,
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

struct Lexer {
    chars: Vec<char>,
    pos: usize,
    line: usize,
    line_start: usize,
}

impl Lexer {
    fn new(text: &str) -> Self {
        Lexer {
            chars: text.chars().collect(),
            pos: 0,
            line: 1,
            line_start: 0,
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn peek_at(&self, offset: usize) -> Option<char> {
        self.chars.get(self.pos + offset).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += 1;
        if c == '\n' {
            self.line += 1;
            self.line_start = self.pos;
        }
        Some(c)
    }

    fn column(&self) -> usize {
        self.pos - self.line_start + 1
    }

    fn syntax(&self, message: impl Into<String>) -> Error {
        Error::Syntax {
            line: self.line,
            column: self.column(),
            message: message.into(),
        }
    }

    fn unsupported(&self, construct: &str) -> Error {
        Error::UnsupportedConstruct {
            construct: construct.to_owned(),
            line: self.line,
            column: self.column(),
        }
    }

    fn skip_trivia(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.bump();
            } else if c == '#' {
                while let Some(c) = self.bump() {
                    if c == '\n' {
                        break;
                    }
                }
            } else {
                break;
            }
        }
    }

    fn tokens(mut self) -> Result<Vec<Spanned>> {
        let mut out = Vec::new();
        loop {
            self.skip_trivia();
            let (line, column) = (self.line, self.column());
            let Some(c) = self.peek() else { break };
            let tok = match c {
                '<' => Tok::Iri(self.iri()?),
                '"' | '\'' => {
                    if self.peek_at(1) == Some(c) && self.peek_at(2) == Some(c) {
                        return Err(self.unsupported("long string literal"));
                    }
                    Tok::Str(self.string(c)?)
                }
                '(' => return Err(self.unsupported("collection")),
                '[' => return Err(self.unsupported("blank node property list")),
                '{' | '}' => return Err(self.unsupported("graph block")),
                '.' if !self.peek_at(1).is_some_and(|d| d.is_ascii_digit()) => {
                    self.bump();
                    Tok::Dot
                }
                ';' => {
                    self.bump();
                    Tok::Semicolon
                }
                ',' => {
                    self.bump();
                    Tok::Comma
                }
                '^' => {
                    self.bump();
                    if self.bump() != Some('^') {
                        return Err(self.syntax("expected `^^`"));
                    }
                    Tok::DataTypeMark
                }
                '@' => {
                    self.bump();
                    let word = self.word();
                    match word.as_str() {
                        "prefix" => Tok::PrefixDirective(true),
                        "base" => return Err(self.unsupported("@base")),
                        _ => return Err(self.unsupported("language tag")),
                    }
                }
                '_' if self.peek_at(1) == Some(':') => {
                    self.bump();
                    self.bump();
                    let label = self.local_name();
                    if label.is_empty() {
                        return Err(self.syntax("empty blank node label"));
                    }
                    Tok::Blank(label)
                }
                c if c.is_ascii_digit() || c == '+' || c == '-' || c == '.' => self.number()?,
                c if c.is_alphabetic() || c == ':' => self.name()?,
                other => return Err(self.syntax(format!("unexpected character `{other}`"))),
            };
            out.push(Spanned { tok, line, column });
        }
        Ok(out)
    }

    fn word(&mut self) -> String {
        let mut w = String::new();
        while let Some(c) = self.peek() {
            if c.is_alphanumeric() || c == '_' || c == '-' {
                w.push(c);
                self.bump();
            } else {
                break;
            }
        }
        w
    }

    /// Local part of a prefixed name; a trailing `.` is left for the
    /// statement terminator.
    fn local_name(&mut self) -> String {
        let start = self.pos;
        while let Some(c) = self.peek() {
            if c.is_alphanumeric() || matches!(c, '_' | '-' | '.' | ':' | '%') {
                self.bump();
            } else {
                break;
            }
        }
        while self.pos > start && self.chars[self.pos - 1] == '.' {
            self.pos -= 1;
        }
        self.chars[start..self.pos].iter().collect()
    }

    fn name(&mut self) -> Result<Tok> {
        let prefix = if self.peek() == Some(':') {
            String::new()
        } else {
            self.word()
        };
        if self.peek() != Some(':') {
            return match prefix.as_str() {
                "a" => Ok(Tok::A),
                "true" => Ok(Tok::Bool(true)),
                "false" => Ok(Tok::Bool(false)),
                "PREFIX" | "prefix" => Ok(Tok::PrefixDirective(false)),
                "BASE" | "base" => Err(self.unsupported("BASE")),
                _ => Err(self.syntax(format!("unexpected bare word `{prefix}`"))),
            };
        }
        self.bump();
        let local = self.local_name();
        if local.is_empty() && self.peek().is_none_or(|c| c.is_whitespace()) {
            return Ok(Tok::PrefixDecl(prefix));
        }
        Ok(Tok::PName(prefix, local))
    }

    fn iri(&mut self) -> Result<String> {
        self.bump();
        let mut iri = String::new();
        loop {
            match self.bump() {
                Some('>') => return Ok(iri),
                Some('\\') => iri.push(self.unicode_escape()?),
                Some(c)
                    if c.is_whitespace()
                        || matches!(c, '<' | '"' | '{' | '}' | '|' | '^' | '`') =>
                {
                    return Err(self.syntax("invalid character in IRI"));
                }
                Some(c) => iri.push(c),
                None => return Err(self.syntax("unterminated IRI")),
            }
        }
    }

    fn string(&mut self, quote: char) -> Result<String> {
        self.bump();
        let mut s = String::new();
        loop {
            match self.bump() {
                Some(c) if c == quote => break,
                Some('\\') => match self.peek() {
                    Some('u' | 'U') => s.push(self.unicode_escape()?),
                    Some(c) => {
                        self.bump();
                        s.push(match c {
                            't' => '\t',
                            'b' => '\u{8}',
                            'n' => '\n',
                            'r' => '\r',
                            'f' => '\u{c}',
                            '"' => '"',
                            '\'' => '\'',
                            '\\' => '\\',
                            _ => return Err(self.syntax("invalid escape sequence")),
                        });
                    }
                    None => return Err(self.syntax("unterminated string")),
                },
                Some('\n') | None => return Err(self.syntax("unterminated string")),
                Some(c) => s.push(c),
            }
        }
        if self.peek() == Some('@') {
            return Err(self.unsupported("language tag"));
        }
        Ok(s)
    }

    fn unicode_escape(&mut self) -> Result<char> {
        let width = match self.bump() {
            Some('u') => 4,
            Some('U') => 8,
            _ => return Err(self.syntax("invalid escape sequence")),
        };
        let mut hex = String::new();
        for _ in 0..width {
            match self.bump() {
                Some(c) if c.is_ascii_hexdigit() => hex.push(c),
                _ => return Err(self.syntax("invalid unicode escape")),
            }
        }
        u32::from_str_radix(&hex, 16)
            .ok()
            .and_then(char::from_u32)
            .ok_or_else(|| self.syntax("invalid unicode code point"))
    }

    fn number(&mut self) -> Result<Tok> {
        let mut s = String::new();
        if let Some(sign @ ('+' | '-')) = self.peek() {
            s.push(sign);
            self.bump();
        }
        let mut datatype = xsd::INTEGER;
        let mut digits = 0;
        while let Some(c) = self.peek() {
            if c.is_ascii_digit() {
                s.push(c);
                digits += 1;
                self.bump();
            } else if c == '.'
                && datatype == xsd::INTEGER
                && self.peek_at(1).is_some_and(|d| d.is_ascii_digit())
            {
                s.push(c);
                datatype = xsd::DECIMAL;
                self.bump();
            } else if (c == 'e' || c == 'E') && digits > 0 {
                s.push(c);
                datatype = xsd::DOUBLE;
                self.bump();
                if let Some(sign @ ('+' | '-')) = self.peek() {
                    s.push(sign);
                    self.bump();
                }
            } else {
                break;
            }
        }
        if digits == 0 {
            return Err(self.syntax("malformed number"));
        }
        Ok(Tok::Number(s, datatype))
    }
}

struct Parser<'g> {
    tokens: Vec<Spanned>,
    pos: usize,
    graph: &'g mut Graph,
    prefixes: PrefixMap,
    added: usize,
    scope: BlankScope,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos).map(|s| &s.tok)
    }

    fn next(&mut self) -> Option<Tok> {
        let tok = self.tokens.get(self.pos).map(|s| s.tok.clone());
        self.pos += 1;
        tok
    }

    fn error(&self, message: impl Into<String>) -> Error {
        let (line, column) = self
            .tokens
            .get(self.pos)
            .or_else(|| self.tokens.last())
            .map_or((1, 1), |s| (s.line, s.column));
        Error::Syntax {
            line,
            column,
            message: message.into(),
        }
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<()> {
        if self.peek() == Some(&tok) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(format!("expected {what}")))
        }
    }

    fn document(&mut self) -> Result<()> {
        while let Some(tok) = self.peek() {
            if matches!(tok, Tok::PrefixDirective(_)) {
                self.directive()?;
            } else {
                self.statement()?;
            }
        }
        Ok(())
    }

    fn directive(&mut self) -> Result<()> {
        let at_form = matches!(self.next(), Some(Tok::PrefixDirective(true)));
        let prefix = match self.next() {
            Some(Tok::PrefixDecl(p)) => p,
            _ => {
                self.pos -= 1;
                return Err(self.error("expected prefix declaration `name:`"));
            }
        };
        let namespace = match self.next() {
            Some(Tok::Iri(iri)) => iri,
            _ => {
                self.pos -= 1;
                return Err(self.error("expected namespace IRI"));
            }
        };
        self.prefixes.insert(prefix.clone(), namespace.clone());
        self.graph.prefixes_mut().insert(prefix, namespace);
        if at_form {
            self.expect(Tok::Dot, "`.` after @prefix directive")?;
        }
        Ok(())
    }

    fn resolve_name(&self, prefix: &str, local: &str) -> Result<String> {
        self.prefixes
            .get(prefix)
            .map(|ns| format!("{ns}{local}"))
            .ok_or_else(|| Error::UnresolvedPrefix(prefix.to_owned()))
    }

    fn subject(&mut self) -> Result<Term> {
        match self.next() {
            Some(Tok::Iri(iri)) => Ok(Term::Iri(iri)),
            Some(Tok::PName(p, l)) => Ok(Term::Iri(self.resolve_name(&p, &l)?)),
            Some(Tok::Blank(b)) => Ok(Term::Blank(b)),
            _ => {
                self.pos -= 1;
                Err(self.error("expected subject"))
            }
        }
    }

    fn predicate(&mut self) -> Result<Term> {
        match self.next() {
            Some(Tok::Iri(iri)) => Ok(Term::Iri(iri)),
            Some(Tok::PName(p, l)) => Ok(Term::Iri(self.resolve_name(&p, &l)?)),
            Some(Tok::A) => Ok(Term::iri(rdf::TYPE)),
            _ => {
                self.pos -= 1;
                Err(self.error("expected predicate"))
            }
        }
    }

    fn object(&mut self) -> Result<Term> {
        match self.next() {
            Some(Tok::Iri(iri)) => Ok(Term::Iri(iri)),
            Some(Tok::PName(p, l)) => Ok(Term::Iri(self.resolve_name(&p, &l)?)),
            Some(Tok::Blank(b)) => Ok(Term::Blank(b)),
            Some(Tok::Bool(b)) => Ok(Term::boolean(b)),
            Some(Tok::Number(n, dt)) => Ok(Term::literal(n, dt)),
            Some(Tok::Str(s)) => {
                if self.peek() != Some(&Tok::DataTypeMark) {
                    return Ok(Term::string(s));
                }
                self.pos += 1;
                let datatype = match self.next() {
                    Some(Tok::Iri(iri)) => iri,
                    Some(Tok::PName(p, l)) => self.resolve_name(&p, &l)?,
                    _ => {
                        self.pos -= 1;
                        return Err(self.error("expected datatype IRI"));
                    }
                };
                Ok(Term::literal(s, datatype))
            }
            _ => {
                self.pos -= 1;
                Err(self.error("expected object"))
            }
        }
    }

    fn statement(&mut self) -> Result<()> {
        let subject = self.subject()?;
        loop {
            let predicate = self.predicate()?;
            loop {
                let object = self.object()?;
                let triple = Triple {
                    subject: subject.clone(),
                    predicate: predicate.clone(),
                    object,
                };
                let triple = self.scope.triple(triple, self.graph);
                if self.graph.insert(&triple)? {
                    self.added += 1;
                }
                if self.peek() == Some(&Tok::Comma) {
                    self.pos += 1;
                } else {
                    break;
                }
            }
            if self.peek() == Some(&Tok::Semicolon) {
                self.pos += 1;
                // A trailing `;` before `.` is allowed.
                if self.peek() == Some(&Tok::Dot) {
                    break;
                }
            } else {
                break;
            }
        }
        self.expect(Tok::Dot, "`.` after statement")
    }
}

/// Parses a Turtle-subset document into `graph`. Declared prefixes are also
/// registered on the graph. Parsing stops at the first error.
pub fn parse_turtle(text: &str, graph: &mut Graph) -> Result<ParseReport> {
    let tokens = Lexer::new(text).tokens()?;
    let mut parser = Parser {
        tokens,
        pos: 0,
        prefixes: graph.prefixes().clone(),
        graph,
        added: 0,
        scope: BlankScope::new(),
    };
    parser.document()?;
    Ok(ParseReport {
        triple_count: parser.added,
        line_errors: Vec::new(),
    })
}

/// Writes the graph as Turtle grouped by subject, using the graph's
/// prefixes. Output is deterministic for equal graphs.
pub fn serialize_turtle(graph: &Graph) -> String {
    let prefixes = graph.prefixes();
    let mut out = String::new();
    for (p, ns) in prefixes.iter() {
        out.push_str(&format!("@prefix {p}: <{ns}> .\n"));
    }
    let mut triples = graph.sorted_triples();
    triples.sort();
    let mut labels: HashMap<String, String> = HashMap::new();
    let mut by_subject: BTreeMap<Term, BTreeMap<Term, Vec<Term>>> = BTreeMap::new();
    for t in triples {
        by_subject
            .entry(t.subject)
            .or_default()
            .entry(t.predicate)
            .or_default()
            .push(t.object);
    }
    for (subject, predicates) in by_subject {
        out.push('\n');
        out.push_str(&write_term(&subject, prefixes, &mut labels));
        let mut preds: Vec<_> = predicates.into_iter().collect();
        // rdf:type first reads better.
        preds.sort_by_key(|(p, _)| p.as_iri() != Some(rdf::TYPE));
        for (i, (predicate, objects)) in preds.iter().enumerate() {
            out.push_str(if i == 0 { " " } else { " ;\n    " });
            if predicate.as_iri() == Some(rdf::TYPE) {
                out.push('a');
            } else {
                out.push_str(&write_term(predicate, prefixes, &mut labels));
            }
            for (j, object) in objects.iter().enumerate() {
                out.push_str(if j == 0 { " " } else { ", " });
                out.push_str(&write_term(object, prefixes, &mut labels));
            }
        }
        out.push_str(" .\n");
    }
    out
}

fn write_term(term: &Term, prefixes: &PrefixMap, labels: &mut HashMap<String, String>) -> String {
    match term {
        Term::Iri(iri) => prefixes.compact(iri).unwrap_or_else(|| format!("<{iri}>")),
        Term::Blank(id) => {
            let next = labels.len();
            format!(
                "_:{}",
                labels
                    .entry(id.clone())
                    .or_insert_with(|| format!("b{next}"))
            )
        }
        Term::Literal(lit) => {
            let mut s = String::from("\"");
            for c in lit.lexical().chars() {
                match c {
                    '\\' => s.push_str("\\\\"),
                    '"' => s.push_str("\\\""),
                    '\n' => s.push_str("\\n"),
                    '\r' => s.push_str("\\r"),
                    '\t' => s.push_str("\\t"),
                    c => s.push(c),
                }
            }
            s.push('"');
            if !lit.is_string() {
                s.push_str("^^");
                s.push_str(
                    &prefixes
                        .compact(lit.datatype())
                        .unwrap_or_else(|| format!("<{}>", lit.datatype())),
                );
            }
            s
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::serialization::{parse_ntriples, serialize_ntriples, ParseMode};

    #[test]
    fn prefixed_statement() {
        let mut g = Graph::new();
        let text = "@prefix codo: <http://www.isibang.ac.in/ns/codo#> . codo:p000001 codo:hasDaughter codo:p000007 .";
        let report = parse_turtle(text, &mut g).unwrap();
        assert_eq!(report.triple_count, 1);
        assert!(g.contains(&Triple {
            subject: Term::codo("p000001"),
            predicate: Term::codo("hasDaughter"),
            object: Term::codo("p000007"),
        }));
    }

    #[test]
    fn a_expands_to_rdf_type() {
        let mut g = Graph::new();
        parse_turtle("codo:x a foaf:Person .", &mut g).unwrap();
        let t = g.iter().next().unwrap();
        assert_eq!(t.predicate, Term::iri(rdf::TYPE));
        assert_eq!(t.object, Term::iri("http://xmlns.com/foaf/0.1/Person"));
    }

    #[test]
    fn collections_are_unsupported() {
        let mut g = Graph::new();
        let err = parse_turtle("codo:x codo:list ( 1 2 ) .", &mut g).unwrap_err();
        assert!(
            matches!(err, Error::UnsupportedConstruct { ref construct, .. } if construct == "collection")
        );
        let err = parse_turtle("( 1 2 )", &mut g).unwrap_err();
        assert!(matches!(err, Error::UnsupportedConstruct { .. }));
    }

    #[test]
    fn blank_property_lists_are_unsupported() {
        let mut g = Graph::new();
        let err = parse_turtle("codo:x codo:p [ codo:q codo:r ] .", &mut g).unwrap_err();
        assert!(
            matches!(err, Error::UnsupportedConstruct { ref construct, .. } if construct == "blank node property list")
        );
    }

    #[test]
    fn predicate_and_object_lists() {
        let mut g = Graph::new();
        let text = r#"
            @prefix ex: <http://example.org/> .
            ex:p1 a ex:Patient , ex:Person ;
                ex:age "41"^^xsd:decimal ;
                ex:tested false ;
                ex:count 2 ;
                ex:name "patient 1" .
        "#;
        let report = parse_turtle(text, &mut g).unwrap();
        assert_eq!(report.triple_count, 6);
        assert!(g.contains(&Triple {
            subject: Term::iri("http://example.org/p1"),
            predicate: Term::iri("http://example.org/tested"),
            object: Term::boolean(false),
        }));
        assert!(g.contains(&Triple {
            subject: Term::iri("http://example.org/p1"),
            predicate: Term::iri("http://example.org/count"),
            object: Term::literal("2", xsd::INTEGER),
        }));
    }

    #[test]
    fn unknown_prefix_is_an_error() {
        let mut g = Graph::new();
        assert!(matches!(
            parse_turtle("zz:a zz:b zz:c .", &mut g),
            Err(Error::UnresolvedPrefix(_))
        ));
    }

    #[test]
    fn missing_dot_is_a_syntax_error() {
        let mut g = Graph::new();
        assert!(matches!(
            parse_turtle("codo:a codo:b codo:c", &mut g),
            Err(Error::Syntax { .. })
        ));
    }

    #[test]
    fn matches_ntriples_of_same_document() {
        let ttl = "codo:p000001 codo:hasDaughter codo:p000007 ; codo:age \"41\"^^xsd:decimal .";
        let nt = "<http://www.isibang.ac.in/ns/codo#p000001> <http://www.isibang.ac.in/ns/codo#hasDaughter> <http://www.isibang.ac.in/ns/codo#p000007> .\n\
                  <http://www.isibang.ac.in/ns/codo#p000001> <http://www.isibang.ac.in/ns/codo#age> \"41\"^^<http://www.w3.org/2001/XMLSchema#decimal> .\n";
        let mut a = Graph::new();
        parse_turtle(ttl, &mut a).unwrap();
        let mut b = Graph::new();
        parse_ntriples(nt, &mut b, ParseMode::Strict).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn turtle_writer_round_trips() {
        let mut g = Graph::new();
        let text = r#"codo:p1 a codo:Patient ; rdfs:label "patient 1", "Bengaluru ಬೆಂಗಳೂರು" ; codo:age "41"^^xsd:decimal .
            _:r1 owl:onProperty codo:hasDiagnosis ."#;
        parse_turtle(text, &mut g).unwrap();
        let written = serialize_turtle(&g);
        assert!(written.contains("ಬೆಂಗಳೂರು"));
        let mut back = Graph::new();
        parse_turtle(&written, &mut back).unwrap();
        assert_eq!(serialize_ntriples(&back), serialize_ntriples(&g));
    }
}
