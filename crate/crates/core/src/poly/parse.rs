//! Recursive-descent parser for polynomial expressions.
//!
//! ```text
//! expr   := term (('+'|'-') term)*
//! term   := factor ('*'? factor)*
//! factor := number | 'i' | ident ('^' uint)? | '(' expr ')'
//! number := int | int '/' uint | decimal
//! ident  := letter (letter|digit)*
//! ```
//!
//! A unary minus may open an expression or a term. `i` is the imaginary unit
//! and cannot be used as a variable name.

use num_complex::Complex64;

use super::{MultiPoly, MAX_EXPONENT};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(String),
    Decimal(String),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    End,
}

fn lex(src: &str) -> Result<Vec<(Tok, usize)>> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let ch = src[i..].chars().next().unwrap();
        let start = i;
        if ch.is_whitespace() {
            i += ch.len_utf8();
            continue;
        }
        let single = match ch {
            '+' => Some(Tok::Plus),
            '-' => Some(Tok::Minus),
            '*' => Some(Tok::Star),
            '/' => Some(Tok::Slash),
            '^' => Some(Tok::Caret),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            _ => None,
        };
        if let Some(t) = single {
            out.push((t, start));
            i += 1;
            continue;
        }
        if ch.is_ascii_digit() || ch == '.' {
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            let mut is_decimal = false;
            if i < bytes.len() && bytes[i] == b'.' {
                is_decimal = true;
                i += 1;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
            }
            let text = &src[start..i];
            if text == "." {
                return Err(Error::Syntax {
                    pos: start,
                    msg: "lone '.'".into(),
                });
            }
            out.push((
                if is_decimal {
                    Tok::Decimal(text.to_string())
                } else {
                    Tok::Int(text.to_string())
                },
                start,
            ));
            continue;
        }
        if ch.is_alphabetic() {
            let mut end = i;
            for c in src[i..].chars() {
                if c.is_alphanumeric() {
                    end += c.len_utf8();
                } else {
                    break;
                }
            }
            out.push((Tok::Ident(src[start..end].to_string()), start));
            i = end;
            continue;
        }
        return Err(Error::Syntax {
            pos: start,
            msg: format!("unexpected character '{ch}'"),
        });
    }
    out.push((Tok::End, src.len()));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    vars: Vec<String>,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if t != Tok::End {
            self.pos += 1;
        }
        t
    }

    fn error<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Syntax {
            pos: self.offset(),
            msg: msg.into(),
        })
    }

    fn constant(&self, c: Complex64) -> MultiPoly {
        MultiPoly::constant(self.vars.clone(), c)
    }

    fn expr(&mut self) -> Result<MultiPoly> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    let t = self.term()?;
                    acc = &acc + &t;
                }
                Tok::Minus => {
                    self.bump();
                    let t = self.term()?;
                    acc = &acc - &t;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<MultiPoly> {
        let negate = if *self.peek() == Tok::Minus {
            self.bump();
            true
        } else {
            false
        };
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Tok::Star => {
                    self.bump();
                    let f = self.factor()?;
                    acc = &acc * &f;
                }
                Tok::Int(_) | Tok::Decimal(_) | Tok::Ident(_) | Tok::LParen => {
                    let f = self.factor()?;
                    acc = &acc * &f;
                }
                _ => break,
            }
        }
        Ok(if negate { -&acc } else { acc })
    }

    fn factor(&mut self) -> Result<MultiPoly> {
        match self.bump() {
            Tok::Int(text) => {
                let num: f64 = text.parse().expect("lexer yields digit strings");
                if *self.peek() == Tok::Slash {
                    self.bump();
                    let den = match self.bump() {
                        Tok::Int(d) => d.parse::<f64>().expect("digit string"),
                        _ => {
                            self.pos -= 1;
                            return self.error("expected unsigned integer denominator");
                        }
                    };
                    if den == 0.0 {
                        self.pos -= 1;
                        return self.error("zero denominator");
                    }
                    return Ok(self.constant(Complex64::new(num / den, 0.0)));
                }
                Ok(self.constant(Complex64::new(num, 0.0)))
            }
            Tok::Decimal(text) => {
                let v: f64 = text.parse().map_err(|_| Error::Syntax {
                    pos: self.toks[self.pos - 1].1,
                    msg: format!("malformed decimal '{text}'"),
                })?;
                Ok(self.constant(Complex64::new(v, 0.0)))
            }
            Tok::Ident(name) if name == "i" => Ok(self.constant(Complex64::new(0.0, 1.0))),
            Tok::Ident(name) => {
                let j = self
                    .vars
                    .iter()
                    .position(|v| *v == name)
                    .ok_or_else(|| Error::UnknownVariable(name.clone()))?;
                let mut exp = 1u64;
                if *self.peek() == Tok::Caret {
                    self.bump();
                    exp = match self.bump() {
                        Tok::Int(d) => match d.parse::<u64>() {
                            Ok(v) if v <= MAX_EXPONENT => v,
                            _ => {
                                return Err(Error::ExponentOverflow(d.parse().unwrap_or(u64::MAX)))
                            }
                        },
                        _ => {
                            self.pos -= 1;
                            return self.error("expected unsigned integer exponent");
                        }
                    };
                }
                let mut e = vec![0u32; self.vars.len()];
                e[j] = exp as u32;
                MultiPoly::from_terms(self.vars.clone(), [(e, Complex64::new(1.0, 0.0))])
            }
            Tok::LParen => {
                let inner = self.expr()?;
                if self.bump() != Tok::RParen {
                    self.pos -= 1;
                    return self.error("expected ')'");
                }
                Ok(inner)
            }
            Tok::End => self.error("unexpected end of input"),
            other => {
                self.pos -= 1;
                self.error(format!("unexpected token {other:?}"))
            }
        }
    }
}

/// Parses and expands `source` into canonical form.
///
/// Variables are ordered by `var_order` when given (every variable in the
/// source must appear there), otherwise by first appearance.
pub fn parse_poly(source: &str, var_order: Option<&[&str]>) -> Result<MultiPoly> {
    let toks = lex(source)?;
    let mut seen: Vec<String> = Vec::new();
    for (t, _) in &toks {
        if let Tok::Ident(name) = t {
            if name != "i" && !seen.contains(name) {
                seen.push(name.clone());
            }
        }
    }
    let vars = match var_order {
        Some(order) => {
            let order: Vec<String> = order.iter().map(|s| s.to_string()).collect();
            for (idx, v) in order.iter().enumerate() {
                if v == "i" {
                    return Err(Error::InvalidArgument(
                        "`i` is the imaginary unit, not a variable".into(),
                    ));
                }
                if order[..idx].contains(v) {
                    return Err(Error::InvalidArgument(format!("duplicate variable `{v}`")));
                }
            }
            if let Some(missing) = seen.iter().find(|v| !order.contains(v)) {
                return Err(Error::UnknownVariable(missing.clone()));
            }
            order
        }
        None => seen,
    };
    let mut parser = Parser { toks, pos: 0, vars };
    let poly = parser.expr()?;
    if *parser.peek() != Tok::End {
        return parser.error("trailing input");
    }
    Ok(poly)
}
