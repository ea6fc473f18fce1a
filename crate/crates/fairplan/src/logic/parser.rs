//! Hand-rolled recursive descent parser for the formula grammar.
//!
//! Atoms are `[a-zA-Z0-9_]+`; `true`/`false` are literals; unary operators
//! `! X F G`; binary `& | -> U` with precedence `! > X > U > & > | > ->`,
//! `U` and `->` right-associative. Operator letters (`X`, `F`, `G`, `U`)
//! must stand alone as tokens; `XXl` is an atom.

use super::{Formula, LogicError};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Atom(String),
    True,
    False,
    Not,
    Next,
    Finally,
    Globally,
    Until,
    And,
    Or,
    Implies,
    LParen,
    RParen,
}

fn tokenize(text: &str) -> Result<Vec<(usize, Tok)>, LogicError> {
    let mut out = Vec::new();
    let bytes = text.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            ' ' | '\t' | '\n' | '\r' => i += 1,
            '(' => {
                out.push((i, Tok::LParen));
                i += 1;
            }
            ')' => {
                out.push((i, Tok::RParen));
                i += 1;
            }
            '!' => {
                out.push((i, Tok::Not));
                i += 1;
            }
            '&' => {
                out.push((i, Tok::And));
                i += 1;
            }
            '|' => {
                out.push((i, Tok::Or));
                i += 1;
            }
            '-' => {
                if bytes.get(i + 1) == Some(&b'>') {
                    out.push((i, Tok::Implies));
                    i += 2;
                } else {
                    return Err(LogicError::Syntax {
                        pos: i,
                        msg: "expected '->'".into(),
                    });
                }
            }
            c if c.is_ascii_alphanumeric() || c == '_' => {
                let start = i;
                while i < bytes.len()
                    && ((bytes[i] as char).is_ascii_alphanumeric() || bytes[i] == b'_')
                {
                    i += 1;
                }
                let word = &text[start..i];
                let tok = match word {
                    "true" => Tok::True,
                    "false" => Tok::False,
                    "X" => Tok::Next,
                    "F" => Tok::Finally,
                    "G" => Tok::Globally,
                    "U" => Tok::Until,
                    _ => Tok::Atom(word.to_string()),
                };
                out.push((start, tok));
            }
            _ => {
                return Err(LogicError::Syntax {
                    pos: i,
                    msg: format!("unknown token starting with '{}'", c),
                });
            }
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn here(&self) -> usize {
        self.toks.get(self.pos).map(|(p, _)| *p).unwrap_or(self.end)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(_, t)| t.clone());
        self.pos += 1;
        t
    }

    fn err(&self, msg: &str) -> LogicError {
        LogicError::Syntax {
            pos: self.here(),
            msg: msg.into(),
        }
    }

    // implies := or ('->' implies)?
    fn implies(&mut self) -> Result<Formula, LogicError> {
        let lhs = self.or()?;
        if self.peek() == Some(&Tok::Implies) {
            self.bump();
            let rhs = self.implies()?;
            Ok(Formula::implies(lhs, rhs))
        } else {
            Ok(lhs)
        }
    }

    // or := and ('|' and)*
    fn or(&mut self) -> Result<Formula, LogicError> {
        let mut lhs = self.and()?;
        while self.peek() == Some(&Tok::Or) {
            self.bump();
            let rhs = self.and()?;
            lhs = Formula::or(lhs, rhs);
        }
        Ok(lhs)
    }

    // and := until ('&' until)*
    fn and(&mut self) -> Result<Formula, LogicError> {
        let mut lhs = self.until()?;
        while self.peek() == Some(&Tok::And) {
            self.bump();
            let rhs = self.until()?;
            lhs = Formula::and(lhs, rhs);
        }
        Ok(lhs)
    }

    // until := unary ('U' until)?   (right-associative)
    fn until(&mut self) -> Result<Formula, LogicError> {
        let lhs = self.unary()?;
        if self.peek() == Some(&Tok::Until) {
            self.bump();
            let rhs = self.until()?;
            Ok(Formula::until(lhs, rhs))
        } else {
            Ok(lhs)
        }
    }

    fn unary(&mut self) -> Result<Formula, LogicError> {
        match self.peek() {
            Some(Tok::Not) => {
                self.bump();
                Ok(Formula::not(self.unary()?))
            }
            Some(Tok::Next) => {
                self.bump();
                Ok(Formula::next(self.unary()?))
            }
            Some(Tok::Finally) => {
                self.bump();
                Ok(Formula::eventually(self.unary()?))
            }
            Some(Tok::Globally) => {
                self.bump();
                Ok(Formula::always(self.unary()?))
            }
            Some(Tok::True) => {
                self.bump();
                Ok(Formula::True)
            }
            Some(Tok::False) => {
                self.bump();
                Ok(Formula::False)
            }
            Some(Tok::Atom(_)) => {
                if let Some(Tok::Atom(a)) = self.bump() {
                    Ok(Formula::atom(&a))
                } else {
                    unreachable!()
                }
            }
            Some(Tok::LParen) => {
                self.bump();
                let inner = self.implies()?;
                if self.peek() == Some(&Tok::RParen) {
                    self.bump();
                    Ok(inner)
                } else {
                    Err(self.err("expected ')'"))
                }
            }
            _ => Err(self.err("expected a formula")),
        }
    }
}

/// Parses formula text. The dialect does not change the grammar, only how
/// the caller later interprets the formula; it is recorded by the caller,
/// never inferred.
pub fn parse_formula(text: &str) -> Result<Formula, LogicError> {
    let toks = tokenize(text)?;
    let mut p = Parser {
        toks,
        pos: 0,
        end: text.len(),
    };
    let f = p.implies()?;
    if p.pos != p.toks.len() {
        return Err(p.err("trailing input"));
    }
    Ok(f)
}
