//! Parser for the supported SPARQL subset: `PREFIX`, `SELECT [DISTINCT]`,
//! basic graph patterns (with `;` and `,` lists), `FILTER`, `GROUP BY`,
//! `COUNT`, `ORDER BY`, `LIMIT` and `OFFSET`.

use std::collections::BTreeSet;

use super::ast::{CompareOp, Expr, OrderKey, PatternTerm, Projection, QueryAst, TriplePattern};
use crate::error::{Error, Result};
use crate::term::{PrefixMap, Term};
use crate::vocab::{rdf, xsd};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Var(String),
    Iri(String),
    PName(String, String),
    Blank(String),
    Str(String),
    Number(String, &'static str),
    Word(String),
    LBrace,
    RBrace,
    LParen,
    RParen,
    LBracket,
    Dot,
    Semicolon,
    Comma,
    Star,
    Op(&'static str),
    Eof,
}

fn describe(tok: &Tok) -> String {
    match tok {
        Tok::Var(v) => format!("variable ?{v}"),
        Tok::Iri(i) => format!("<{i}>"),
        Tok::PName(p, l) => format!("{p}:{l}"),
        Tok::Blank(b) => format!("_:{b}"),
        Tok::Str(s) => format!("string \"{s}\""),
        Tok::Number(n, _) => format!("number {n}"),
        Tok::Word(w) => format!("`{w}`"),
        Tok::LBrace => "`{`".into(),
        Tok::RBrace => "`}`".into(),
        Tok::LParen => "`(`".into(),
        Tok::RParen => "`)`".into(),
        Tok::LBracket => "`[`".into(),
        Tok::Dot => "`.`".into(),
        Tok::Semicolon => "`;`".into(),
        Tok::Comma => "`,`".into(),
        Tok::Star => "`*`".into(),
        Tok::Op(o) => format!("`{o}`"),
        Tok::Eof => "end of query".into(),
    }
}

/// Keywords outside the subset, reported by name.
const UNSUPPORTED: &[&str] = &[
    "OPTIONAL",
    "UNION",
    "MINUS",
    "CONSTRUCT",
    "ASK",
    "DESCRIBE",
    "SERVICE",
    "BIND",
    "VALUES",
    "GRAPH",
    "INSERT",
    "DELETE",
    "LOAD",
    "CLEAR",
    "DROP",
    "CREATE",
    "HAVING",
    "FROM",
    "NAMED",
    "BASE",
    "REDUCED",
    "EXISTS",
    "SUM",
    "AVG",
    "MIN",
    "MAX",
    "SAMPLE",
    "GROUP_CONCAT",
    "WITH",
    "USING",
];

/// Keywords that may be followed by `(`; any other word is a function call.
const PAREN_KEYWORDS: &[&str] = &["SELECT", "DISTINCT", "COUNT", "FILTER", "ASC", "DESC", "BY"];

struct Lexer<'a> {
    text: &'a str,
    pos: usize,
}

fn char_position(text: &str, byte: usize) -> usize {
    text[..byte.min(text.len())].chars().count()
}

fn syntax_at(text: &str, byte: usize, message: impl Into<String>) -> Error {
    Error::QuerySyntax {
        position: char_position(text, byte),
        message: message.into(),
    }
}

impl<'a> Lexer<'a> {
    fn rest(&self) -> &'a str {
        &self.text[self.pos..]
    }

    fn peek_char(&self) -> Option<char> {
        self.rest().chars().next()
    }

    fn take_while(&mut self, f: impl Fn(char) -> bool) -> &'a str {
        let start = self.pos;
        while let Some(c) = self.peek_char() {
            if !f(c) {
                break;
            }
            self.pos += c.len_utf8();
        }
        &self.text[start..self.pos]
    }

    fn skip_trivia(&mut self) {
        loop {
            self.take_while(char::is_whitespace);
            if self.peek_char() == Some('#') {
                self.take_while(|c| c != '\n');
            } else {
                break;
            }
        }
    }

    fn tokens(text: &'a str) -> Result<Vec<(usize, Tok)>> {
        let mut lexer = Lexer { text, pos: 0 };
        let mut out = Vec::new();
        loop {
            lexer.skip_trivia();
            let start = lexer.pos;
            let tok = lexer.token()?;
            let done = tok == Tok::Eof;
            out.push((start, tok));
            if done {
                return Ok(out);
            }
        }
    }

    fn token(&mut self) -> Result<Tok> {
        let start = self.pos;
        let Some(c) = self.peek_char() else {
            return Ok(Tok::Eof);
        };
        let two = self.rest().get(..2).unwrap_or("");
        let single = |lexer: &mut Self, tok: Tok| {
            lexer.pos += 1;
            Ok(tok)
        };
        match c {
            '{' => single(self, Tok::LBrace),
            '}' => single(self, Tok::RBrace),
            '(' => single(self, Tok::LParen),
            ')' => single(self, Tok::RParen),
            '[' => single(self, Tok::LBracket),
            '.' => single(self, Tok::Dot),
            ';' => single(self, Tok::Semicolon),
            ',' => single(self, Tok::Comma),
            '*' => single(self, Tok::Star),
            '?' | '$' => {
                self.pos += 1;
                let name = self.take_while(|c| c.is_alphanumeric() || c == '_');
                if name.is_empty() {
                    return Err(syntax_at(self.text, start, "empty variable name"));
                }
                Ok(Tok::Var(name.to_owned()))
            }
            '<' => {
                // An IRI reference has no whitespace before its closing `>`;
                // otherwise this is a comparison operator.
                let body: String = self.rest()[1..]
                    .chars()
                    .take_while(|c| !c.is_whitespace() && !"<>\"{}|^`\\".contains(*c))
                    .collect();
                if self.rest()[1 + body.len()..].starts_with('>') {
                    self.pos += body.len() + 2;
                    return Ok(Tok::Iri(body));
                }
                if two == "<=" {
                    self.pos += 2;
                    return Ok(Tok::Op("<="));
                }
                single(self, Tok::Op("<"))
            }
            '>' if two == ">=" => {
                self.pos += 2;
                Ok(Tok::Op(">="))
            }
            '>' => single(self, Tok::Op(">")),
            '=' => single(self, Tok::Op("=")),
            '!' if two == "!=" => {
                self.pos += 2;
                Ok(Tok::Op("!="))
            }
            '!' => single(self, Tok::Op("!")),
            '&' if two == "&&" => {
                self.pos += 2;
                Ok(Tok::Op("&&"))
            }
            '|' if two == "||" => {
                self.pos += 2;
                Ok(Tok::Op("||"))
            }
            '^' if two == "^^" => {
                self.pos += 2;
                Ok(Tok::Op("^^"))
            }
            // Only used to reject property paths and arithmetic.
            '|' => single(self, Tok::Op("|")),
            '/' => single(self, Tok::Op("/")),
            '^' => single(self, Tok::Op("^")),
            '+' => single(self, Tok::Op("+")),
            '"' | '\'' => self.string(c),
            '@' => Err(Error::UnsupportedFeature("language tag".into())),
            '_' if two == "_:" => {
                self.pos += 2;
                let label = self.take_while(|c| c.is_alphanumeric() || c == '_' || c == '-');
                if label.is_empty() {
                    return Err(syntax_at(self.text, start, "empty blank node label"));
                }
                Ok(Tok::Blank(label.to_owned()))
            }
            c if c.is_ascii_digit()
                || (c == '-' && self.rest()[1..].starts_with(|d: char| d.is_ascii_digit())) =>
            {
                self.number()
            }
            c if c.is_alphanumeric() || c == '_' || c == ':' => {
                let word = self.take_while(|c| c.is_alphanumeric() || c == '_' || c == '-');
                if self.peek_char() == Some(':') {
                    self.pos += 1;
                    let local = self.take_while(|c| {
                        c.is_alphanumeric() || matches!(c, '_' | '-' | '.' | '%' | ':')
                    });
                    // A trailing dot terminates the triple.
                    let trimmed = local.trim_end_matches('.');
                    self.pos -= local.len() - trimmed.len();
                    return Ok(Tok::PName(word.to_owned(), trimmed.to_owned()));
                }
                Ok(Tok::Word(word.to_owned()))
            }
            other => Err(syntax_at(
                self.text,
                start,
                format!("unexpected character `{other}`"),
            )),
        }
    }

    fn number(&mut self) -> Result<Tok> {
        let start = self.pos;
        if self.peek_char() == Some('-') {
            self.pos += 1;
        }
        self.take_while(|c| c.is_ascii_digit());
        let mut datatype = xsd::DECIMAL;
        if self.peek_char() == Some('.')
            && self.rest()[1..].starts_with(|c: char| c.is_ascii_digit())
        {
            self.pos += 1;
            self.take_while(|c| c.is_ascii_digit());
        }
        if matches!(self.peek_char(), Some('e' | 'E')) {
            self.pos += 1;
            if matches!(self.peek_char(), Some('+' | '-')) {
                self.pos += 1;
            }
            if self.take_while(|c| c.is_ascii_digit()).is_empty() {
                return Err(syntax_at(self.text, start, "malformed exponent"));
            }
            datatype = xsd::DOUBLE;
        }
        Ok(Tok::Number(self.text[start..self.pos].to_owned(), datatype))
    }

    fn string(&mut self, quote: char) -> Result<Tok> {
        let start = self.pos;
        let triple: String = std::iter::repeat(quote).take(3).collect();
        if self.rest().starts_with(&triple) {
            return Err(Error::UnsupportedFeature("long string".into()));
        }
        self.pos += 1;
        let mut out = String::new();
        loop {
            let Some(c) = self.peek_char() else {
                return Err(syntax_at(self.text, start, "unterminated string"));
            };
            self.pos += c.len_utf8();
            match c {
                c if c == quote => return Ok(Tok::Str(out)),
                '\n' | '\r' => return Err(syntax_at(self.text, start, "unterminated string")),
                '\\' => {
                    let Some(e) = self.peek_char() else { continue };
                    self.pos += e.len_utf8();
                    match e {
                        'n' => out.push('\n'),
                        't' => out.push('\t'),
                        'r' => out.push('\r'),
                        'b' => out.push('\u{8}'),
                        'f' => out.push('\u{c}'),
                        '"' | '\'' | '\\' => out.push(e),
                        'u' | 'U' => {
                            let len = if e == 'u' { 4 } else { 8 };
                            let hex = self.rest().get(..len).unwrap_or("");
                            let ch = u32::from_str_radix(hex, 16).ok().and_then(char::from_u32);
                            match ch {
                                Some(ch) if hex.len() == len => {
                                    out.push(ch);
                                    self.pos += len;
                                }
                                _ => {
                                    return Err(syntax_at(
                                        self.text,
                                        self.pos,
                                        "bad unicode escape",
                                    ))
                                }
                            }
                        }
                        other => {
                            return Err(syntax_at(
                                self.text,
                                self.pos,
                                format!("bad escape `\\{other}`"),
                            ))
                        }
                    }
                }
                c => out.push(c),
            }
        }
    }
}

struct Parser<'a> {
    text: &'a str,
    tokens: Vec<(usize, Tok)>,
    pos: usize,
    prefixes: PrefixMap,
    ast: QueryAst,
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.tokens[self.pos].1
    }

    fn peek_at(&self, n: usize) -> &Tok {
        self.tokens.get(self.pos + n).map_or(&Tok::Eof, |(_, t)| t)
    }

    fn bump(&mut self) -> Tok {
        let t = self.tokens[self.pos].1.clone();
        if t != Tok::Eof {
            self.pos += 1;
        }
        t
    }

    fn error(&self, message: impl Into<String>) -> Error {
        syntax_at(self.text, self.tokens[self.pos].0, message)
    }

    fn unexpected(&self, expected: &str) -> Error {
        self.error(format!(
            "expected {expected}, found {}",
            describe(self.peek())
        ))
    }

    fn is_word(&self, keyword: &str) -> bool {
        matches!(self.peek(), Tok::Word(w) if w.eq_ignore_ascii_case(keyword))
    }

    fn eat_word(&mut self, keyword: &str) -> bool {
        let hit = self.is_word(keyword);
        if hit {
            self.pos += 1;
        }
        hit
    }

    fn expect_word(&mut self, keyword: &str) -> Result<()> {
        if self.eat_word(keyword) {
            Ok(())
        } else {
            Err(self.unexpected(&format!("`{keyword}`")))
        }
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == tok {
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
            Err(self.unexpected(&describe(&tok)))
        }
    }

    /// Rejects a keyword outside the subset at the current position.
    fn check_unsupported(&self) -> Result<()> {
        match self.peek() {
            Tok::Word(w) if UNSUPPORTED.contains(&w.to_ascii_uppercase().as_str()) => {
                Err(Error::UnsupportedFeature(w.to_ascii_uppercase()))
            }
            Tok::Word(w)
                if *self.peek_at(1) == Tok::LParen
                    && !PAREN_KEYWORDS.iter().any(|k| w.eq_ignore_ascii_case(k)) =>
            {
                Err(Error::UnsupportedFeature(format!(
                    "function {}",
                    w.to_ascii_uppercase()
                )))
            }
            _ => Ok(()),
        }
    }

    fn var(&mut self) -> Result<String> {
        match self.bump() {
            Tok::Var(v) => Ok(v),
            _ => {
                self.pos -= 1;
                Err(self.unexpected("variable"))
            }
        }
    }

    fn integer(&mut self) -> Result<usize> {
        match self.peek().clone() {
            Tok::Number(n, _) => {
                let value = n
                    .parse::<usize>()
                    .map_err(|_| self.error(format!("`{n}` is not a non-negative integer")))?;
                self.pos += 1;
                Ok(value)
            }
            _ => Err(self.unexpected("non-negative integer")),
        }
    }

    fn parse(mut self) -> Result<QueryAst> {
        loop {
            self.check_unsupported()?;
            if !self.eat_word("PREFIX") {
                break;
            }
            let (prefix, local) = match self.bump() {
                Tok::PName(p, l) => (p, l),
                _ => {
                    self.pos -= 1;
                    return Err(self.unexpected("prefix declaration `name:`"));
                }
            };
            if !local.is_empty() {
                return Err(self.error("prefix declaration must end with `:`"));
            }
            let Tok::Iri(namespace) = self.bump() else {
                self.pos -= 1;
                return Err(self.unexpected("namespace IRI"));
            };
            self.prefixes.insert(prefix.clone(), namespace.clone());
            self.ast.prefixes.push((prefix, namespace));
        }
        self.check_unsupported()?;
        self.expect_word("SELECT")?;
        self.check_unsupported()?;
        self.ast.distinct = self.eat_word("DISTINCT");
        if !self.eat(&Tok::Star) {
            loop {
                match self.peek() {
                    Tok::Var(_) => {
                        let v = self.var()?;
                        self.ast.projection.push(Projection::Var(v));
                    }
                    Tok::LParen => self.aggregate()?,
                    _ => break,
                }
            }
            if self.ast.projection.is_empty() {
                return Err(self.unexpected("projection"));
            }
        }
        self.check_unsupported()?;
        self.eat_word("WHERE");
        self.expect(Tok::LBrace)?;
        self.group()?;
        self.modifiers()?;
        if *self.peek() != Tok::Eof {
            self.check_unsupported()?;
            return Err(self.unexpected("end of query"));
        }
        validate(&self.ast)?;
        Ok(self.ast)
    }

    fn aggregate(&mut self) -> Result<()> {
        self.expect(Tok::LParen)?;
        self.check_unsupported()?;
        self.expect_word("COUNT")?;
        self.expect(Tok::LParen)?;
        let distinct = self.eat_word("DISTINCT");
        let var = if self.eat(&Tok::Star) {
            None
        } else {
            Some(self.var()?)
        };
        self.expect(Tok::RParen)?;
        self.expect_word("AS")?;
        let alias = self.var()?;
        self.expect(Tok::RParen)?;
        self.ast.projection.push(Projection::Count {
            var,
            distinct,
            alias,
        });
        Ok(())
    }

    fn group(&mut self) -> Result<()> {
        loop {
            self.check_unsupported()?;
            match self.peek() {
                Tok::RBrace => {
                    self.pos += 1;
                    return Ok(());
                }
                Tok::Dot => self.pos += 1,
                Tok::LBrace => {
                    return Err(Error::UnsupportedFeature("nested group pattern".into()))
                }
                Tok::Word(w) if w.eq_ignore_ascii_case("FILTER") => {
                    self.pos += 1;
                    self.check_unsupported()?;
                    self.expect(Tok::LParen)?;
                    let e = self.expr()?;
                    self.expect(Tok::RParen)?;
                    self.ast.filters.push(e);
                }
                Tok::Eof => return Err(self.unexpected("`}`")),
                _ => self.triples()?,
            }
        }
    }

    fn triples(&mut self) -> Result<()> {
        let subject = self.node(false)?;
        loop {
            let predicate = self.predicate()?;
            loop {
                let object = self.node(true)?;
                self.ast.patterns.push(TriplePattern {
                    subject: subject.clone(),
                    predicate: predicate.clone(),
                    object,
                });
                if !self.eat(&Tok::Comma) {
                    break;
                }
            }
            if !self.eat(&Tok::Semicolon) {
                break;
            }
            // Trailing `;` before `.`, `}` or a filter.
            if matches!(self.peek(), Tok::Dot | Tok::RBrace) || self.is_word("FILTER") {
                break;
            }
        }
        match self.peek() {
            Tok::Dot | Tok::RBrace => Ok(()),
            Tok::Word(w) if w.eq_ignore_ascii_case("FILTER") => Ok(()),
            _ => {
                self.check_unsupported()?;
                Err(self.unexpected("`.`, `;`, `,` or `}`"))
            }
        }
    }

    fn iri_of(&self, prefix: &str, local: &str) -> Result<String> {
        self.prefixes.expand(prefix, local)
    }

    fn predicate(&mut self) -> Result<PatternTerm> {
        if matches!(self.peek(), Tok::Op("^" | "!")) || *self.peek() == Tok::LParen {
            return Err(Error::UnsupportedFeature("property path".into()));
        }
        let term = if self.eat_word("a") {
            PatternTerm::Term(Term::iri(rdf::TYPE))
        } else {
            match self.bump() {
                Tok::Var(v) => PatternTerm::Var(v),
                Tok::Iri(i) => PatternTerm::Term(Term::iri(i)),
                Tok::PName(p, l) => PatternTerm::Term(Term::iri(self.iri_of(&p, &l)?)),
                _ => {
                    self.pos -= 1;
                    self.check_unsupported()?;
                    return Err(self.unexpected("predicate"));
                }
            }
        };
        if matches!(self.peek(), Tok::Op("/" | "|" | "+") | Tok::Star) {
            return Err(Error::UnsupportedFeature("property path".into()));
        }
        Ok(term)
    }

    fn node(&mut self, allow_literal: bool) -> Result<PatternTerm> {
        match self.peek().clone() {
            Tok::Var(v) => {
                self.pos += 1;
                Ok(PatternTerm::Var(v))
            }
            Tok::Blank(b) => {
                self.pos += 1;
                Ok(PatternTerm::Var(format!("_:{b}")))
            }
            Tok::LBracket => Err(Error::UnsupportedFeature("blank node property list".into())),
            Tok::LParen => Err(Error::UnsupportedFeature("collection".into())),
            Tok::Iri(_) | Tok::PName(..) => Ok(PatternTerm::Term(self.constant()?)),
            Tok::Str(_) | Tok::Number(..) | Tok::Word(_) if allow_literal => {
                self.check_unsupported()?;
                Ok(PatternTerm::Term(self.constant()?))
            }
            _ => {
                self.check_unsupported()?;
                Err(self.unexpected(if allow_literal { "object" } else { "subject" }))
            }
        }
    }

    /// An IRI or literal.
    fn constant(&mut self) -> Result<Term> {
        match self.bump() {
            Tok::Iri(i) => Ok(Term::iri(i)),
            Tok::PName(p, l) => Ok(Term::iri(self.iri_of(&p, &l)?)),
            Tok::Number(n, dt) => Ok(Term::literal(n, dt)),
            Tok::Word(w) if w == "true" || w == "false" => Ok(Term::literal(w, xsd::BOOLEAN)),
            Tok::Str(s) => {
                if !self.eat(&Tok::Op("^^")) {
                    return Ok(Term::string(s));
                }
                let datatype = match self.bump() {
                    Tok::Iri(i) => i,
                    Tok::PName(p, l) => self.iri_of(&p, &l)?,
                    _ => {
                        self.pos -= 1;
                        return Err(self.unexpected("datatype IRI"));
                    }
                };
                Ok(Term::literal(s, datatype))
            }
            _ => {
                self.pos -= 1;
                Err(self.unexpected("IRI or literal"))
            }
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut left = self.and_expr()?;
        while self.eat(&Tok::Op("||")) {
            left = Expr::Or(Box::new(left), Box::new(self.and_expr()?));
        }
        Ok(left)
    }

    fn and_expr(&mut self) -> Result<Expr> {
        let mut left = self.relational()?;
        while self.eat(&Tok::Op("&&")) {
            left = Expr::And(Box::new(left), Box::new(self.relational()?));
        }
        Ok(left)
    }

    fn relational(&mut self) -> Result<Expr> {
        let left = self.unary()?;
        let op = match self.peek() {
            Tok::Op("=") => CompareOp::Eq,
            Tok::Op("!=") => CompareOp::Ne,
            Tok::Op("<") => CompareOp::Lt,
            Tok::Op("<=") => CompareOp::Le,
            Tok::Op(">") => CompareOp::Gt,
            Tok::Op(">=") => CompareOp::Ge,
            Tok::Op("+" | "/") | Tok::Star => {
                return Err(Error::UnsupportedFeature("arithmetic".into()))
            }
            _ => return Ok(left),
        };
        self.pos += 1;
        let right = self.unary()?;
        Ok(Expr::Compare(op, Box::new(left), Box::new(right)))
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.eat(&Tok::Op("!")) {
            return Ok(Expr::Not(Box::new(self.unary()?)));
        }
        self.check_unsupported()?;
        match self.peek().clone() {
            Tok::LParen => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            Tok::Var(v) => {
                self.pos += 1;
                Ok(Expr::Var(v))
            }
            Tok::Iri(_) | Tok::PName(..) | Tok::Str(_) | Tok::Number(..) => {
                Ok(Expr::Const(self.constant()?))
            }
            Tok::Word(w) if w == "true" || w == "false" => Ok(Expr::Const(self.constant()?)),
            _ => Err(self.unexpected("expression")),
        }
    }

    fn modifiers(&mut self) -> Result<()> {
        loop {
            self.check_unsupported()?;
            if self.eat_word("GROUP") {
                self.expect_word("BY")?;
                while let Tok::Var(_) = self.peek() {
                    let v = self.var()?;
                    self.ast.group_by.push(v);
                }
                if self.ast.group_by.is_empty() {
                    return Err(self.unexpected("grouping variable"));
                }
            } else if self.eat_word("ORDER") {
                self.expect_word("BY")?;
                loop {
                    self.check_unsupported()?;
                    let key = if self.is_word("ASC") || self.is_word("DESC") {
                        let descending = self.is_word("DESC");
                        self.pos += 1;
                        self.expect(Tok::LParen)?;
                        let expr = self.expr()?;
                        self.expect(Tok::RParen)?;
                        OrderKey { expr, descending }
                    } else if let Tok::Var(v) = self.peek().clone() {
                        self.pos += 1;
                        OrderKey {
                            expr: Expr::Var(v),
                            descending: false,
                        }
                    } else if *self.peek() == Tok::LParen {
                        self.pos += 1;
                        let expr = self.expr()?;
                        self.expect(Tok::RParen)?;
                        OrderKey {
                            expr,
                            descending: false,
                        }
                    } else {
                        break;
                    };
                    self.ast.order_by.push(key);
                }
                if self.ast.order_by.is_empty() {
                    return Err(self.unexpected("ordering condition"));
                }
            } else if self.eat_word("LIMIT") {
                self.ast.limit = Some(self.integer()?);
            } else if self.eat_word("OFFSET") {
                self.ast.offset = Some(self.integer()?);
            } else {
                return Ok(());
            }
        }
    }
}

fn validate(ast: &QueryAst) -> Result<()> {
    let pattern_vars: BTreeSet<String> = ast.pattern_vars().into_iter().collect();
    let mut names = BTreeSet::new();
    for p in &ast.projection {
        if !names.insert(p.name()) {
            return Err(Error::InvalidQuery(format!(
                "?{} is projected twice",
                p.name()
            )));
        }
        match p {
            Projection::Var(v) if !pattern_vars.contains(v) => {
                return Err(Error::InvalidQuery(format!(
                    "projected ?{v} does not occur in the pattern"
                )))
            }
            Projection::Var(v) if ast.is_aggregate() && !ast.group_by.contains(v) => {
                return Err(Error::InvalidQuery(format!(
                    "?{v} must be grouped to be projected with an aggregate"
                )))
            }
            Projection::Count { alias, .. } if pattern_vars.contains(alias) => {
                return Err(Error::InvalidQuery(format!(
                    "alias ?{alias} already occurs in the pattern"
                )))
            }
            Projection::Count { var: Some(v), .. } if !pattern_vars.contains(v) => {
                return Err(Error::InvalidQuery(format!(
                    "counted ?{v} does not occur in the pattern"
                )))
            }
            _ => {}
        }
    }
    if ast.projection.is_empty() && ast.is_aggregate() {
        return Err(Error::InvalidQuery(
            "SELECT * cannot be combined with GROUP BY".into(),
        ));
    }
    for v in &ast.group_by {
        if !pattern_vars.contains(v) {
            return Err(Error::InvalidQuery(format!(
                "grouping ?{v} does not occur in the pattern"
            )));
        }
    }
    Ok(())
}

/// Parses a query. Prefixes not declared in the query fall back to the
/// default prefix map.
pub fn parse_query(text: &str) -> Result<QueryAst> {
    let tokens = Lexer::tokens(text)?;
    let parser = Parser {
        text,
        tokens,
        pos: 0,
        prefixes: PrefixMap::default(),
        ast: QueryAst::default(),
    };
    parser.parse()
}
