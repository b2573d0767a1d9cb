//! Recursive-descent parsers for event expressions and conditional terms.
//!
//! Event expressions: `!e`, `e & f`, `e v f`, parentheses, `{w1, w2}` world
//! literals, `TOP`, `BOT` (also spelled `TRUE`, `FALSE`) and names of previously defined events.
//! Precedence is `!` > `&` > `v`.
//!
//! Terms: `[E1|E2]` basic conditionals over event expressions, `~t`,
//! `t & s`, `t v s`, parentheses, `TRUE`, `FALSE`. Precedence is
//! `~` > `&` > `v`; binary operators associate to the left.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::event::{Event, WorldSpace};
use crate::term::CondTerm;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    Syntax(String),
    UnknownName(String),
    UnknownWorld(String),
    BottomAntecedent,
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseErrorKind::Syntax(msg) => write!(f, "syntax error: {msg}"),
            ParseErrorKind::UnknownName(n) => write!(f, "unknown event {n:?}"),
            ParseErrorKind::UnknownWorld(n) => write!(f, "unknown world {n:?}"),
            ParseErrorKind::BottomAntecedent => write!(f, "conditional antecedent is the impossible event"),
        }
    }
}

/// A parse failure at a 1-based character column.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("column {column}: {kind}")]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub column: usize,
}

impl ParseError {
    /// Malformed input, as opposed to a well-formed reference to something invalid.
    pub fn is_syntax(&self) -> bool {
        matches!(self.kind, ParseErrorKind::Syntax(_) | ParseErrorKind::UnknownName(_) | ParseErrorKind::UnknownWorld(_))
    }
}

/// Named events visible to the parser.
#[derive(Debug, Clone)]
pub struct EventScope {
    space: WorldSpace,
    names: HashMap<String, Event>,
    order: Vec<String>,
}

impl EventScope {
    pub fn new(space: &WorldSpace) -> Self {
        EventScope { space: space.clone(), names: HashMap::new(), order: Vec::new() }
    }

    pub fn space(&self) -> &WorldSpace {
        &self.space
    }

    pub fn get(&self, name: &str) -> Option<Event> {
        self.names.get(name).copied()
    }

    /// Defines or redefines `name`.
    pub fn define(&mut self, name: &str, e: Event) {
        if self.names.insert(name.to_string(), e).is_none() {
            self.order.push(name.to_string());
        }
    }

    /// Events in definition order.
    pub fn definitions(&self) -> impl Iterator<Item = (&str, Event)> {
        self.order.iter().map(|n| (n.as_str(), self.names[n]))
    }

    /// Renders an event by its first defined name, falling back to a world literal.
    pub fn show(&self, e: &Event) -> String {
        if e.is_bottom() || *e == self.space.top() {
            return self.space.show(e);
        }
        self.definitions()
            .find(|(_, d)| d == e)
            .map(|(n, _)| n.to_string())
            .unwrap_or_else(|| self.space.show(e))
    }

    pub fn render(&self, t: &CondTerm) -> String {
        t.render(&|e| self.show(e))
    }

    pub fn parse_event(&self, text: &str) -> Result<Event, ParseError> {
        let mut p = Parser::new(text, self)?;
        let e = p.event()?;
        p.finish()?;
        Ok(e)
    }

    /// Parses a term and absorbs any constants it contains.
    pub fn parse_term(&self, text: &str) -> Result<CondTerm, ParseError> {
        let mut p = Parser::new(text, self)?;
        let t = p.term()?;
        p.finish()?;
        Ok(t.simplify())
    }
}

pub fn is_identifier(s: &str) -> bool {
    !s.is_empty() && s.chars().all(is_ident_char) && s != "v"
}

fn is_ident_char(c: char) -> bool {
    c.is_alphanumeric() || matches!(c, '_' | '\'' | '.' | '-')
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    LBracket,
    RBracket,
    Bar,
    LParen,
    RParen,
    LBrace,
    RBrace,
    Comma,
    Tilde,
    Bang,
    Amp,
    Or,
    End,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Tok::Ident(s) => return write!(f, "{s:?}"),
            Tok::LBracket => "'['",
            Tok::RBracket => "']'",
            Tok::Bar => "'|'",
            Tok::LParen => "'('",
            Tok::RParen => "')'",
            Tok::LBrace => "'{'",
            Tok::RBrace => "'}'",
            Tok::Comma => "','",
            Tok::Tilde => "'~'",
            Tok::Bang => "'!'",
            Tok::Amp => "'&'",
            Tok::Or => "'v'",
            Tok::End => "end of input",
        };
        f.write_str(s)
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let tok = match c {
            '[' => Tok::LBracket,
            ']' => Tok::RBracket,
            '|' => Tok::Bar,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            '{' => Tok::LBrace,
            '}' => Tok::RBrace,
            ',' => Tok::Comma,
            '~' => Tok::Tilde,
            '!' => Tok::Bang,
            '&' => Tok::Amp,
            c if is_ident_char(c) => {
                let start = i;
                while i < chars.len() && is_ident_char(chars[i]) {
                    i += 1;
                }
                let word: String = chars[start..i].iter().collect();
                out.push((if word == "v" { Tok::Or } else { Tok::Ident(word) }, col));
                continue;
            }
            other => {
                return Err(ParseError { kind: ParseErrorKind::Syntax(format!("unexpected character {other:?}")), column: col })
            }
        };
        out.push((tok, col));
        i += 1;
    }
    out.push((Tok::End, chars.len() + 1));
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    scope: &'a EventScope,
}

impl<'a> Parser<'a> {
    fn new(text: &str, scope: &'a EventScope) -> Result<Self, ParseError> {
        Ok(Parser { toks: lex(text)?, pos: 0, scope })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn column(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if t != Tok::End {
            self.pos += 1;
        }
        t
    }

    fn error(&self, kind: ParseErrorKind) -> ParseError {
        ParseError { kind, column: self.column() }
    }

    fn unexpected(&self, wanted: &str) -> ParseError {
        self.error(ParseErrorKind::Syntax(format!("expected {wanted}, found {}", self.peek())))
    }

    fn expect(&mut self, tok: Tok) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.unexpected(&tok.to_string()))
        }
    }

    fn finish(&self) -> Result<(), ParseError> {
        if *self.peek() == Tok::End {
            Ok(())
        } else {
            Err(self.unexpected("end of input"))
        }
    }

    fn event(&mut self) -> Result<Event, ParseError> {
        let mut e = self.event_conj()?;
        while *self.peek() == Tok::Or {
            self.bump();
            let rhs = self.event_conj()?;
            e = e.disj(&rhs).expect("same space");
        }
        Ok(e)
    }

    fn event_conj(&mut self) -> Result<Event, ParseError> {
        let mut e = self.event_unary()?;
        while *self.peek() == Tok::Amp {
            self.bump();
            let rhs = self.event_unary()?;
            e = e.conj(&rhs).expect("same space");
        }
        Ok(e)
    }

    fn event_unary(&mut self) -> Result<Event, ParseError> {
        if *self.peek() == Tok::Bang {
            self.bump();
            let e = self.event_unary()?;
            return Ok(e.neg(self.scope.space()).expect("same space"));
        }
        self.event_primary()
    }

    fn event_primary(&mut self) -> Result<Event, ParseError> {
        let space = self.scope.space();
        match self.peek().clone() {
            Tok::LParen => {
                self.bump();
                let e = self.event()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            Tok::LBrace => {
                self.bump();
                let mut bits = 0u64;
                loop {
                    match self.peek().clone() {
                        Tok::RBrace => break,
                        Tok::Comma => {
                            self.bump();
                        }
                        Tok::Ident(name) => self.world_bit(&name, &mut bits)?,
                        Tok::Or => self.world_bit("v", &mut bits)?,
                        _ => return Err(self.unexpected("a world name or '}'")),
                    }
                }
                self.bump();
                Ok(space.from_bits(bits).expect("known worlds"))
            }
            Tok::Ident(name) => {
                let e = match name.as_str() {
                    "TOP" | "TRUE" => space.top(),
                    "BOT" | "FALSE" => space.bottom(),
                    _ => self.scope.get(&name).ok_or_else(|| self.error(ParseErrorKind::UnknownName(name.clone())))?,
                };
                self.bump();
                Ok(e)
            }
            _ => Err(self.unexpected("an event")),
        }
    }

    fn world_bit(&mut self, name: &str, bits: &mut u64) -> Result<(), ParseError> {
        let w = self
            .scope
            .space()
            .world(name)
            .ok_or_else(|| self.error(ParseErrorKind::UnknownWorld(name.to_string())))?;
        *bits |= 1 << w;
        self.bump();
        Ok(())
    }

    fn term(&mut self) -> Result<CondTerm, ParseError> {
        let mut t = self.term_conj()?;
        while *self.peek() == Tok::Or {
            self.bump();
            t = t.or(self.term_conj()?);
        }
        Ok(t)
    }

    fn term_conj(&mut self) -> Result<CondTerm, ParseError> {
        let mut t = self.term_unary()?;
        while *self.peek() == Tok::Amp {
            self.bump();
            t = t.and(self.term_unary()?);
        }
        Ok(t)
    }

    fn term_unary(&mut self) -> Result<CondTerm, ParseError> {
        if *self.peek() == Tok::Tilde {
            self.bump();
            return Ok(self.term_unary()?.not());
        }
        self.term_primary()
    }

    fn term_primary(&mut self) -> Result<CondTerm, ParseError> {
        match self.peek().clone() {
            Tok::LBracket => {
                self.bump();
                let a = self.event()?;
                self.expect(Tok::Bar)?;
                let col = self.column();
                let b = self.event()?;
                self.expect(Tok::RBracket)?;
                CondTerm::basic(a, b).map_err(|_| ParseError { kind: ParseErrorKind::BottomAntecedent, column: col })
            }
            Tok::LParen => {
                self.bump();
                let t = self.term()?;
                self.expect(Tok::RParen)?;
                Ok(t)
            }
            Tok::Ident(w) if w == "TRUE" => {
                self.bump();
                Ok(CondTerm::One)
            }
            Tok::Ident(w) if w == "FALSE" => {
                self.bump();
                Ok(CondTerm::Zero)
            }
            _ => Err(self.unexpected("'[', '(', '~', TRUE or FALSE")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scope() -> EventScope {
        let space = WorldSpace::numbered(4).unwrap();
        let mut scope = EventScope::new(&space);
        for (name, worlds) in [("a", vec!["w1"]), ("b", vec!["w1", "w2"]), ("c", vec!["w3"]), ("d", vec!["w2", "w3"])] {
            scope.define(name, space.event(worlds).unwrap());
        }
        scope
    }

    fn basic(s: &EventScope, a: &str, b: &str) -> CondTerm {
        CondTerm::basic(s.get(a).unwrap(), s.get(b).unwrap()).unwrap()
    }

    #[test]
    fn event_expressions() {
        let s = scope();
        let sp = s.space();
        assert_eq!(s.parse_event("a v c").unwrap(), sp.event(["w1", "w3"]).unwrap());
        assert_eq!(s.parse_event("!a & b").unwrap(), sp.event(["w2"]).unwrap());
        assert_eq!(s.parse_event("a & !b v c").unwrap(), sp.event(["w3"]).unwrap());
        assert_eq!(s.parse_event("!(a v c)").unwrap(), sp.event(["w2", "w4"]).unwrap());
        assert_eq!(s.parse_event("{w4, w2}").unwrap(), sp.event(["w2", "w4"]).unwrap());
        assert_eq!(s.parse_event("{w1 w2}").unwrap(), s.get("b").unwrap());
        assert_eq!(s.parse_event("TOP").unwrap(), sp.top());
        assert_eq!(s.parse_event("{}").unwrap(), sp.bottom());
    }

    #[test]
    fn basic_term() {
        let s = scope();
        assert_eq!(s.parse_term("[a|b]").unwrap(), basic(&s, "a", "b"));
        assert_eq!(
            s.parse_term("[a|TOP]").unwrap(),
            CondTerm::basic(s.get("a").unwrap(), s.space().top()).unwrap()
        );
    }

    #[test]
    fn precedence() {
        let s = scope();
        let t = s.parse_term("~[a|b] & [c|d]").unwrap();
        assert_eq!(t, basic(&s, "a", "b").not().and(basic(&s, "c", "d")));
        let t = s.parse_term("[a|b] v [c|d] & [a|d]").unwrap();
        assert_eq!(t, basic(&s, "a", "b").or(basic(&s, "c", "d").and(basic(&s, "a", "d"))));
        let t = s.parse_term("[a|b] & [c|d] & [a|d]").unwrap();
        assert_eq!(t, basic(&s, "a", "b").and(basic(&s, "c", "d")).and(basic(&s, "a", "d")));
    }

    #[test]
    fn constants_are_normalized() {
        let s = scope();
        assert_eq!(s.parse_term("TRUE").unwrap(), CondTerm::One);
        assert_eq!(s.parse_term("[a|b] & TRUE").unwrap(), basic(&s, "a", "b"));
        assert_eq!(s.parse_term("~TRUE v [a|b]").unwrap(), basic(&s, "a", "b"));
        assert_eq!(s.parse_term("[a|b] & FALSE").unwrap(), CondTerm::Zero);
    }

    #[test]
    fn bottom_antecedent() {
        let s = scope();
        let err = s.parse_term("[a|FALSE]").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::BottomAntecedent);
        let err = s.parse_term("[a|BOT]").unwrap_err();
        assert_eq!(err, ParseError { kind: ParseErrorKind::BottomAntecedent, column: 4 });
        let err = s.parse_term("[a|a & c]").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::BottomAntecedent);
        assert!(!err.is_syntax());
    }

    #[test]
    fn errors_carry_columns() {
        let s = scope();
        let err = s.parse_term("[a|b] & [zz|b]").unwrap_err();
        assert_eq!(err, ParseError { kind: ParseErrorKind::UnknownName("zz".into()), column: 10 });
        let err = s.parse_term("[a|b").unwrap_err();
        assert_eq!(err.column, 5);
        let err = s.parse_term("[a|b] [c|d]").unwrap_err();
        assert_eq!(err.column, 7);
        let err = s.parse_term("[a|b] # x").unwrap_err();
        assert_eq!(err.column, 7);
        let err = s.parse_event("{w9}").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::UnknownWorld("w9".into()));
    }

    #[test]
    fn render_uses_names() {
        let s = scope();
        for text in ["[a|b] & [c|d]", "~[a|b] v [c|d] & ~([a|d] v [c|b])", "[a|TOP] & ([c|d] & [a|b])", "[{w4}|{w1,w2,w3}]"] {
            let t = s.parse_term(text).unwrap();
            assert_eq!(s.render(&t), text);
            assert_eq!(s.parse_term(&s.render(&t)).unwrap(), t);
        }
    }
}
