//! Parser for spreadsheet transformation rules:
//!
//! ```text
//! Individual: @A*(mm:hashEncode rdfs:label=("patient", @A*))
//! Types: Patient
//! Facts: 'diagnosed on' @B*(xsd:dateTime), age @C*(xsd:decimal), status @J*
//! ```

use std::fmt;

use crate::error::{Error, Result};
use crate::vocab::xsd;

/// Row part of a cell reference.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowRef {
    /// `*`: the row being transformed.
    Current,
    /// A fixed 1-based row number.
    Fixed(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CellRef {
    /// Column letters, upper case.
    pub column: String,
    pub row: RowRef,
}

impl CellRef {
    pub fn current(column: &str) -> Self {
        CellRef {
            column: column.to_ascii_uppercase(),
            row: RowRef::Current,
        }
    }

    /// Zero-based column index: A → 0, Z → 25, AA → 26.
    pub fn column_index(&self) -> usize {
        column_index(&self.column)
    }
}

pub fn column_index(letters: &str) -> usize {
    letters.bytes().fold(0, |acc, b| {
        acc * 26 + (b.to_ascii_uppercase() - b'A') as usize + 1
    }) - 1
}

pub fn column_letters(mut index: usize) -> String {
    let mut out = Vec::new();
    loop {
        out.push(b'A' + (index % 26) as u8);
        if index < 26 {
            break;
        }
        index = index / 26 - 1;
    }
    out.reverse();
    String::from_utf8(out).expect("ascii letters")
}

impl fmt::Display for CellRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.row {
            RowRef::Current => write!(f, "@{}*", self.column),
            RowRef::Fixed(n) => write!(f, "@{}{n}", self.column),
        }
    }
}

/// How a rule refers to a vocabulary entity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NameRef {
    /// `'diagnosed on'`: an `rdfs:label`.
    Quoted(String),
    /// `xsd:dateTime`, `codo:age`.
    Prefixed(String),
    /// `age`: a label, or a local name in the default namespace.
    Bare(String),
}

impl NameRef {
    pub fn text(&self) -> &str {
        match self {
            NameRef::Quoted(s) | NameRef::Prefixed(s) | NameRef::Bare(s) => s,
        }
    }
}

impl fmt::Display for NameRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NameRef::Quoted(s) => write!(f, "'{s}'"),
            NameRef::Prefixed(s) | NameRef::Bare(s) => f.write_str(s),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Coercion {
    DateTime,
    Decimal,
    Boolean,
}

impl Coercion {
    pub fn datatype(self) -> &'static str {
        match self {
            Coercion::DateTime => xsd::DATE_TIME,
            Coercion::Decimal => xsd::DECIMAL,
            Coercion::Boolean => xsd::BOOLEAN,
        }
    }

    fn from_name(name: &str) -> Result<Self> {
        match name {
            "xsd:dateTime" => Ok(Coercion::DateTime),
            "xsd:decimal" => Ok(Coercion::Decimal),
            "xsd:boolean" => Ok(Coercion::Boolean),
            other => Err(Error::UnsupportedCoercion(other.to_owned())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LabelPart {
    Text(String),
    Cell(CellRef),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubjectSpec {
    pub cell: CellRef,
    pub function: Option<String>,
    pub label: Vec<LabelPart>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactSpec {
    pub property: NameRef,
    pub cell: CellRef,
    /// `None` means the cell names an individual.
    pub coercion: Option<Coercion>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MappingRule {
    pub subject: SubjectSpec,
    pub types: Vec<NameRef>,
    pub facts: Vec<FactSpec>,
}

pub const HASH_ENCODE: &str = "mm:hashEncode";

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Keyword(&'static str),
    Cell(CellRef),
    Quoted(String),
    Name(String),
    LParen,
    RParen,
    Comma,
    Equals,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Keyword(k) => write!(f, "`{k}`"),
            Tok::Cell(c) => write!(f, "cell reference `{c}`"),
            Tok::Quoted(s) => write!(f, "string '{s}'"),
            Tok::Name(n) => write!(f, "name `{n}`"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::Comma => f.write_str("`,`"),
            Tok::Equals => f.write_str("`=`"),
        }
    }
}

const KEYWORDS: [&str; 3] = ["Individual:", "Types:", "Facts:"];

struct Lexer<'a> {
    chars: std::iter::Peekable<std::str::CharIndices<'a>>,
    text: &'a str,
}

fn position(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, column)
}

fn syntax(text: &str, offset: usize, message: impl Into<String>) -> Error {
    let (line, column) = position(text, offset);
    Error::RuleSyntax {
        line,
        column,
        message: message.into(),
    }
}

fn is_name_char(c: char) -> bool {
    c.is_alphanumeric() || matches!(c, '_' | '-' | '.' | ':' | '#' | '/')
}

impl<'a> Lexer<'a> {
    fn tokens(text: &'a str) -> Result<Vec<(usize, Tok)>> {
        let mut lexer = Lexer {
            chars: text.char_indices().peekable(),
            text,
        };
        let mut out = Vec::new();
        while let Some(tok) = lexer.next_token()? {
            out.push(tok);
        }
        Ok(out)
    }

    fn next_token(&mut self) -> Result<Option<(usize, Tok)>> {
        while self.chars.next_if(|(_, c)| c.is_whitespace()).is_some() {}
        let Some((start, c)) = self.chars.next() else {
            return Ok(None);
        };
        let tok = match c {
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            ',' => Tok::Comma,
            '=' => Tok::Equals,
            '\'' | '"' => {
                let mut s = String::new();
                loop {
                    match self.chars.next() {
                        Some((_, q)) if q == c => break,
                        Some((_, '\n')) | None => {
                            return Err(syntax(self.text, start, "unterminated string"))
                        }
                        Some((_, ch)) => s.push(ch),
                    }
                }
                Tok::Quoted(s)
            }
            '@' => {
                let mut column = String::new();
                while let Some((_, l)) = self.chars.next_if(|(_, l)| l.is_ascii_alphabetic()) {
                    column.push(l.to_ascii_uppercase());
                }
                if column.is_empty() {
                    return Err(syntax(
                        self.text,
                        start,
                        "expected column letters after `@`",
                    ));
                }
                let row = if self.chars.next_if(|(_, c)| *c == '*').is_some() {
                    RowRef::Current
                } else {
                    let mut digits = String::new();
                    while let Some((_, d)) = self.chars.next_if(|(_, d)| d.is_ascii_digit()) {
                        digits.push(d);
                    }
                    match digits.parse::<usize>() {
                        Ok(n) if n > 0 => RowRef::Fixed(n),
                        _ => {
                            return Err(syntax(
                                self.text,
                                start,
                                "expected `*` or a row number in cell reference",
                            ))
                        }
                    }
                };
                Tok::Cell(CellRef { column, row })
            }
            c if is_name_char(c) => {
                let mut name = String::from(c);
                while let Some((_, n)) = self.chars.next_if(|(_, n)| is_name_char(*n)) {
                    name.push(n);
                }
                // A trailing colon ends a section keyword.
                match KEYWORDS.iter().find(|k| **k == name) {
                    Some(k) => Tok::Keyword(k),
                    None => Tok::Name(name),
                }
            }
            other => {
                return Err(syntax(
                    self.text,
                    start,
                    format!("unexpected character `{other}`"),
                ))
            }
        };
        Ok(Some((start, tok)))
    }
}

struct Parser<'a> {
    text: &'a str,
    tokens: Vec<(usize, Tok)>,
    pos: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.tokens
            .get(self.pos)
            .map_or(self.text.len(), |(o, _)| *o)
    }

    fn error(&self, message: impl Into<String>) -> Error {
        syntax(self.text, self.offset(), message)
    }

    fn unexpected(&self, expected: &str) -> Error {
        match self.peek() {
            Some(t) => self.error(format!("expected {expected}, found {t}")),
            None => self.error(format!("expected {expected}, found end of input")),
        }
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.tokens.get(self.pos).map(|(_, t)| t.clone());
        self.pos += 1;
        t
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == Some(tok) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: Tok) -> Result<()> {
        if self.eat(&tok) {
            Ok(())
        } else {
            Err(self.unexpected(&tok.to_string()))
        }
    }

    fn cell(&mut self) -> Result<CellRef> {
        match self.peek() {
            Some(Tok::Cell(c)) => {
                let c = c.clone();
                self.pos += 1;
                Ok(c)
            }
            _ => Err(self.unexpected("cell reference")),
        }
    }

    fn name(&mut self) -> Result<NameRef> {
        match self.peek() {
            Some(Tok::Quoted(s)) => {
                let s = s.clone();
                self.pos += 1;
                Ok(NameRef::Quoted(s))
            }
            Some(Tok::Name(n)) => {
                let n = n.clone();
                self.pos += 1;
                Ok(if n.contains(':') {
                    NameRef::Prefixed(n)
                } else {
                    NameRef::Bare(n)
                })
            }
            _ => Err(self.unexpected("name")),
        }
    }

    fn subject(&mut self) -> Result<SubjectSpec> {
        let offset = self.offset();
        let cell = self.cell()?;
        if cell.row != RowRef::Current {
            return Err(syntax(
                self.text,
                offset,
                "subject cell must use the row wildcard `*`",
            ));
        }
        let mut spec = SubjectSpec {
            cell,
            function: None,
            label: Vec::new(),
        };
        if !self.eat(&Tok::LParen) {
            return Ok(spec);
        }
        match self.peek() {
            Some(Tok::Name(n)) if n != "rdfs:label" => {
                spec.function = Some(n.clone());
                self.pos += 1;
            }
            _ => {}
        }
        if matches!(self.peek(), Some(Tok::Name(n)) if n == "rdfs:label") {
            self.pos += 1;
            self.expect(Tok::Equals)?;
            self.expect(Tok::LParen)?;
            loop {
                match self.bump() {
                    Some(Tok::Quoted(s)) => spec.label.push(LabelPart::Text(s)),
                    Some(Tok::Cell(c)) => spec.label.push(LabelPart::Cell(c)),
                    _ => {
                        self.pos -= 1;
                        return Err(self.unexpected("string or cell reference in label"));
                    }
                }
                if !self.eat(&Tok::Comma) {
                    break;
                }
            }
            self.expect(Tok::RParen)?;
        }
        self.expect(Tok::RParen)?;
        Ok(spec)
    }

    fn fact(&mut self) -> Result<FactSpec> {
        let property = self.name()?;
        let cell = self.cell()?;
        let coercion = if self.eat(&Tok::LParen) {
            let offset = self.offset();
            let name = match self.bump() {
                Some(Tok::Name(n)) => n,
                _ => return Err(syntax(self.text, offset, "expected datatype")),
            };
            self.expect(Tok::RParen)?;
            Some(Coercion::from_name(&name)?)
        } else {
            None
        };
        Ok(FactSpec {
            property,
            cell,
            coercion,
        })
    }

    fn rule(&mut self) -> Result<MappingRule> {
        self.expect(Tok::Keyword("Individual:"))?;
        let subject = self.subject()?;
        self.expect(Tok::Keyword("Types:"))?;
        let mut types = vec![self.name()?];
        while self.eat(&Tok::Comma) {
            types.push(self.name()?);
        }
        self.expect(Tok::Keyword("Facts:"))?;
        let mut facts = vec![self.fact()?];
        while self.eat(&Tok::Comma) {
            facts.push(self.fact()?);
        }
        if self.peek().is_some() {
            return Err(self.unexpected("`,` or end of rule"));
        }
        Ok(MappingRule {
            subject,
            types,
            facts,
        })
    }
}

/// Parses one transformation rule.
pub fn parse_mapping_rule(text: &str) -> Result<MappingRule> {
    let tokens = Lexer::tokens(text)?;
    Parser {
        text,
        tokens,
        pos: 0,
    }
    .rule()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_rule() {
        let rule = parse_mapping_rule("Individual: @A* Types: Patient Facts: age @C*(xsd:decimal)")
            .unwrap();
        assert_eq!(rule.subject.cell, CellRef::current("A"));
        assert_eq!(rule.types, vec![NameRef::Bare("Patient".into())]);
        assert_eq!(rule.facts.len(), 1);
        assert_eq!(rule.facts[0].coercion, Some(Coercion::Decimal));
    }

    #[test]
    fn facts_before_types_is_a_syntax_error() {
        let err = parse_mapping_rule("Individual: @A* Facts: age @C* Types: Patient").unwrap_err();
        match err {
            Error::RuleSyntax {
                line,
                column,
                message,
            } => {
                assert_eq!((line, column), (1, 17));
                assert!(message.contains("Types:"), "{message}");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unknown_datatype_is_unsupported() {
        let err = parse_mapping_rule("Individual: @A* Types: Patient Facts: age @C*(xsd:integer)")
            .unwrap_err();
        assert!(matches!(err, Error::UnsupportedCoercion(ref d) if d == "xsd:integer"));
    }

    #[test]
    fn subject_needs_row_wildcard() {
        assert!(matches!(
            parse_mapping_rule("Individual: @A2 Types: Patient Facts: age @C*"),
            Err(Error::RuleSyntax { .. })
        ));
    }

    #[test]
    fn fixed_rows_in_label_template() {
        let rule = parse_mapping_rule(
            "Individual: @A*(rdfs:label=(@B1, \"x\")) Types: codo:Patient Facts: codo:age @AB*",
        )
        .unwrap();
        assert_eq!(rule.subject.function, None);
        assert_eq!(
            rule.subject.label,
            vec![
                LabelPart::Cell(CellRef {
                    column: "B".into(),
                    row: RowRef::Fixed(1)
                }),
                LabelPart::Text("x".into())
            ]
        );
        assert_eq!(rule.facts[0].cell.column_index(), 27);
        assert_eq!(rule.types, vec![NameRef::Prefixed("codo:Patient".into())]);
    }

    #[test]
    fn column_letters_round_trip() {
        for i in 0..2000 {
            assert_eq!(column_index(&column_letters(i)), i);
        }
        assert_eq!(column_letters(0), "A");
        assert_eq!(column_letters(25), "Z");
        assert_eq!(column_letters(26), "AA");
    }
}
