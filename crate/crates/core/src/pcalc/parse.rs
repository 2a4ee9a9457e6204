//! Concrete syntax for presence conditions.
//!
//! ```text
//! pc    := or ;
//! or    := and { "|" and } ;
//! and   := not { "&" not } ;
//! not   := "!" not | atom ;
//! atom  := "true" | "false" | IDENT | "(" pc ")" ;
//! ```
//!
//! Binary operators associate to the left. Rendering inserts the fewest
//! parentheses that reproduce the same tree when parsed back.

use std::fmt;
use std::sync::Arc;

use super::{Formula, PcError};

pub(crate) fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_') && s != "true" && s != "false"
}

#[derive(Debug, Clone, PartialEq)]
enum Token<'a> {
    Ident(&'a str),
    True,
    False,
    Not,
    And,
    Or,
    LParen,
    RParen,
    End,
}

impl Token<'_> {
    fn describe(&self) -> String {
        match self {
            Token::Ident(name) => format!("`{name}`"),
            Token::True => "`true`".into(),
            Token::False => "`false`".into(),
            Token::Not => "`!`".into(),
            Token::And => "`&`".into(),
            Token::Or => "`|`".into(),
            Token::LParen => "`(`".into(),
            Token::RParen => "`)`".into(),
            Token::End => "end of input".into(),
        }
    }
}

const ATOM_START: &[&str] = &["`!`", "`(`", "`true`", "`false`", "identifier"];

fn tokenize(text: &str) -> Result<Vec<(Token<'_>, usize)>, PcError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let tok = match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'!' => Token::Not,
            b'&' => Token::And,
            b'|' => Token::Or,
            b'(' => Token::LParen,
            b')' => Token::RParen,
            c if c.is_ascii_alphabetic() || c == b'_' => {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                let word = &text[start..i];
                let tok = match word {
                    "true" => Token::True,
                    "false" => Token::False,
                    _ => Token::Ident(word),
                };
                out.push((tok, start));
                continue;
            }
            _ => {
                let found = text[i..].chars().next().unwrap_or('?');
                return Err(PcError::Syntax {
                    position: i,
                    expected: ATOM_START.to_vec(),
                    found: format!("`{found}`"),
                });
            }
        };
        out.push((tok, i));
        i += 1;
    }
    out.push((Token::End, text.len()));
    Ok(out)
}

struct Parser<'a, 'k> {
    tokens: Vec<(Token<'a>, usize)>,
    pos: usize,
    known: &'k dyn Fn(&str) -> bool,
}

impl<'a> Parser<'a, '_> {
    fn peek(&self) -> &Token<'a> {
        &self.tokens[self.pos].0
    }

    fn offset(&self) -> usize {
        self.tokens[self.pos].1
    }

    fn bump(&mut self) -> (Token<'a>, usize) {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, expected: &[&'static str]) -> PcError {
        PcError::Syntax {
            position: self.offset(),
            expected: expected.to_vec(),
            found: self.peek().describe(),
        }
    }

    fn or(&mut self) -> Result<Formula, PcError> {
        let mut lhs = self.and()?;
        while *self.peek() == Token::Or {
            self.bump();
            let rhs = self.and()?;
            lhs = Formula::Or(Arc::new(lhs), Arc::new(rhs));
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<Formula, PcError> {
        let mut lhs = self.not()?;
        while *self.peek() == Token::And {
            self.bump();
            let rhs = self.not()?;
            lhs = Formula::And(Arc::new(lhs), Arc::new(rhs));
        }
        Ok(lhs)
    }

    fn not(&mut self) -> Result<Formula, PcError> {
        if *self.peek() == Token::Not {
            self.bump();
            return Ok(Formula::Not(Arc::new(self.not()?)));
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<Formula, PcError> {
        match self.peek().clone() {
            Token::True => {
                self.bump();
                Ok(Formula::True)
            }
            Token::False => {
                self.bump();
                Ok(Formula::False)
            }
            Token::Ident(name) => {
                let (_, position) = self.bump();
                if !(self.known)(name) {
                    return Err(PcError::UnknownFeature {
                        name: name.to_string(),
                        position: Some(position),
                    });
                }
                Ok(Formula::var(name))
            }
            Token::LParen => {
                self.bump();
                let inner = self.or()?;
                if *self.peek() != Token::RParen {
                    return Err(self.error(&["`&`", "`|`", "`)`"]));
                }
                self.bump();
                Ok(inner)
            }
            _ => Err(self.error(ATOM_START)),
        }
    }
}

/// Parses `text`, accepting only variables for which `known` holds.
pub fn parse_formula(text: &str, known: &dyn Fn(&str) -> bool) -> Result<Formula, PcError> {
    let mut parser = Parser {
        tokens: tokenize(text)?,
        pos: 0,
        known,
    };
    let f = parser.or()?;
    if *parser.peek() != Token::End {
        return Err(parser.error(&["`&`", "`|`", "end of input"]));
    }
    Ok(f)
}

fn precedence(f: &Formula) -> u8 {
    match f {
        Formula::Or(..) => 1,
        Formula::And(..) => 2,
        Formula::Not(_) => 3,
        _ => 4,
    }
}

fn write_prec(f: &Formula, min: u8, out: &mut fmt::Formatter<'_>) -> fmt::Result {
    let parens = precedence(f) < min;
    if parens {
        out.write_str("(")?;
    }
    match f {
        Formula::True => out.write_str("true")?,
        Formula::False => out.write_str("false")?,
        Formula::Var(name) => out.write_str(name)?,
        Formula::Not(g) => {
            out.write_str("!")?;
            write_prec(g, 3, out)?;
        }
        Formula::And(g, h) => {
            write_prec(g, 2, out)?;
            out.write_str(" & ")?;
            write_prec(h, 3, out)?;
        }
        Formula::Or(g, h) => {
            write_prec(g, 1, out)?;
            out.write_str(" | ")?;
            write_prec(h, 2, out)?;
        }
    }
    if parens {
        out.write_str(")")?;
    }
    Ok(())
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_prec(self, 0, f)
    }
}
