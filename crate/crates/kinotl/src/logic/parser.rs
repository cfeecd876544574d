use std::collections::BTreeMap;

use nalgebra::DVector;

use super::formula::{Formula, Predicate};
use super::LogicError;

/// Region geometry the parser binds `in(NAME)` atoms against.
pub type RegionTable = BTreeMap<String, (DVector<f64>, DVector<f64>)>;

/// Parses a specification string into a formula in negation normal form.
///
/// Grammar (unary operators bind tightest, `&` over `|`):
///
/// ```text
/// formula := or
/// or      := and ('|' and)*
/// and     := unary ('&' unary)*
/// unary   := '!' unary | 'F' unary | 'G' unary | atom
/// atom    := 'true' | 'in' '(' NAME ')' | '(' formula ')'
/// ```
pub fn parse_formula(text: &str, regions: &RegionTable) -> Result<Formula, LogicError> {
    let tokens = tokenize(text)?;
    let mut parser = Parser { tokens, pos: 0, regions };
    let formula = parser.parse_or()?;
    if parser.pos < parser.tokens.len() {
        let tok = &parser.tokens[parser.pos];
        return Err(LogicError::Syntax {
            position: tok.start,
            message: format!("unexpected `{}` after end of formula", tok.text),
        });
    }
    Ok(formula.into_nnf())
}

#[derive(Debug)]
struct Token {
    text: String,
    start: usize,
}

fn tokenize(text: &str) -> Result<Vec<Token>, LogicError> {
    let mut tokens = Vec::new();
    let bytes = text.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            ' ' | '\t' | '\n' | '\r' => i += 1,
            '!' | '&' | '|' | '(' | ')' => {
                tokens.push(Token { text: c.to_string(), start: i });
                i += 1;
            }
            c if c.is_ascii_alphanumeric() || c == '_' => {
                let start = i;
                while i < bytes.len() {
                    let c = bytes[i] as char;
                    if c.is_ascii_alphanumeric() || c == '_' {
                        i += 1;
                    } else {
                        break;
                    }
                }
                tokens.push(Token { text: text[start..i].to_string(), start });
            }
            other => {
                return Err(LogicError::Syntax {
                    position: i,
                    message: format!("unexpected character `{other}`"),
                })
            }
        }
    }
    Ok(tokens)
}

struct Parser<'a> {
    tokens: Vec<Token>,
    pos: usize,
    regions: &'a RegionTable,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn eat(&mut self, expected: &str) -> Result<(), LogicError> {
        match self.peek() {
            Some(tok) if tok.text == expected => {
                self.pos += 1;
                Ok(())
            }
            Some(tok) => Err(LogicError::Syntax {
                position: tok.start,
                message: format!("expected `{expected}`, found `{}`", tok.text),
            }),
            None => Err(LogicError::Syntax {
                position: self.end(),
                message: format!("expected `{expected}`, found end of input"),
            }),
        }
    }

    fn end(&self) -> usize {
        self.tokens.last().map(|t| t.start + t.text.len()).unwrap_or(0)
    }

    fn parse_or(&mut self) -> Result<Formula, LogicError> {
        let mut left = self.parse_and()?;
        while matches!(self.peek(), Some(t) if t.text == "|") {
            self.pos += 1;
            let right = self.parse_and()?;
            left = Formula::Or(Box::new(left), Box::new(right));
        }
        Ok(left)
    }

    fn parse_and(&mut self) -> Result<Formula, LogicError> {
        let mut left = self.parse_unary()?;
        while matches!(self.peek(), Some(t) if t.text == "&") {
            self.pos += 1;
            let right = self.parse_unary()?;
            left = Formula::And(Box::new(left), Box::new(right));
        }
        Ok(left)
    }

    fn parse_unary(&mut self) -> Result<Formula, LogicError> {
        match self.peek() {
            Some(t) if t.text == "!" => {
                self.pos += 1;
                Ok(Formula::Not(Box::new(self.parse_unary()?)))
            }
            Some(t) if t.text == "F" => {
                self.pos += 1;
                Ok(Formula::Eventually(Box::new(self.parse_unary()?)))
            }
            Some(t) if t.text == "G" => {
                self.pos += 1;
                Ok(Formula::Always(Box::new(self.parse_unary()?)))
            }
            _ => self.parse_atom(),
        }
    }

    fn parse_atom(&mut self) -> Result<Formula, LogicError> {
        let tok = self.peek().ok_or_else(|| LogicError::Syntax {
            position: self.end(),
            message: "expected a formula, found end of input".into(),
        })?;
        match tok.text.as_str() {
            "true" => {
                self.pos += 1;
                Ok(Formula::True)
            }
            "in" => {
                self.pos += 1;
                self.eat("(")?;
                let name_tok = self.peek().ok_or_else(|| LogicError::Syntax {
                    position: self.end(),
                    message: "expected a region name".into(),
                })?;
                let name = name_tok.text.clone();
                self.pos += 1;
                self.eat(")")?;
                let (center, halfwidths) = self
                    .regions
                    .get(&name)
                    .ok_or(LogicError::UnknownRegion(name.clone()))?;
                Ok(Formula::Predicate(Predicate::inside(
                    name,
                    center.clone(),
                    halfwidths.clone(),
                )))
            }
            "(" => {
                self.pos += 1;
                let inner = self.parse_or()?;
                self.eat(")")?;
                Ok(inner)
            }
            other => Err(LogicError::Syntax {
                position: tok.start,
                message: format!("expected a formula, found `{other}`"),
            }),
        }
    }
}
