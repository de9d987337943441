//! Recursive-descent parser for coefficients: integers, `z`, field
//! generators, `+ - * / ^` and parentheses, evaluated to a rational
//! function over the job's field.

use std::fmt;

use mahler_core::fields::{Elem, Field};
use mahler_core::series::RationalFunction;
use num_bigint::BigInt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    /// Zero-based character offset.
    pub pos: usize,
    pub msg: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "column {}: {}", self.pos + 1, self.msg)
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(BigInt),
    Ident(String),
    Op(char),
    End,
}

fn tokenize(src: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            out.push((start, Tok::Num(s.parse().expect("digits"))));
        } else if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push((start, Tok::Ident(chars[start..i].iter().collect())));
        } else if "+-*/^()".contains(c) || c == '−' {
            out.push((i, Tok::Op(if c == '−' { '-' } else { c })));
            i += 1;
        } else {
            return Err(ParseError {
                pos: i,
                msg: format!("unexpected character '{c}'"),
            });
        }
    }
    out.push((chars.len(), Tok::End));
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    at: usize,
    field: &'a Field,
    gens: Vec<(String, Elem)>,
}

/// Names of every generator in the tower, outermost first.
fn generators(field: &Field) -> Vec<(String, Elem)> {
    let mut out = Vec::new();
    let mut cur = Some(field.clone());
    while let Some(f) = cur {
        if let (Some(name), Some(g)) = (f.generator_name(), f.generator()) {
            let g = field.embed(&g).expect("tower generator embeds");
            if f.characteristic() != 0 && f.base().is_none() {
                out.push((String::from("θ"), g.clone()));
            }
            out.push((name.to_string(), g));
        }
        cur = f.base().cloned();
    }
    out
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].1
    }

    fn pos(&self) -> usize {
        self.toks[self.at].0
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError {
            pos: self.pos(),
            msg: msg.into(),
        })
    }

    fn eat(&mut self, c: char) -> bool {
        if *self.peek() == Tok::Op(c) {
            self.at += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<RationalFunction, ParseError> {
        let mut acc = self.term()?;
        loop {
            if self.eat('+') {
                acc = acc.add(&self.term()?);
            } else if self.eat('-') {
                acc = acc.sub(&self.term()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<RationalFunction, ParseError> {
        let mut acc = self.unary()?;
        loop {
            if self.eat('*') {
                acc = acc.mul(&self.unary()?);
            } else if *self.peek() == Tok::Op('/') {
                let pos = self.pos();
                self.at += 1;
                let d = self.unary()?;
                acc = acc.div(&d).map_err(|_| ParseError {
                    pos,
                    msg: String::from("division by zero"),
                })?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<RationalFunction, ParseError> {
        if self.eat('-') {
            Ok(self.unary()?.neg())
        } else if self.eat('+') {
            self.unary()
        } else {
            self.power()
        }
    }

    fn power(&mut self) -> Result<RationalFunction, ParseError> {
        let base = self.atom()?;
        if *self.peek() != Tok::Op('^') {
            return Ok(base);
        }
        let pos = self.pos();
        self.at += 1;
        let paren = self.eat('(');
        let neg = if self.eat('-') {
            true
        } else {
            self.eat('+');
            false
        };
        let Tok::Num(n) = self.peek().clone() else {
            return self.err("expected an integer exponent");
        };
        self.at += 1;
        if paren && !self.eat(')') {
            return self.err("expected ')'");
        }
        let e = i64::try_from(&n).map_err(|_| ParseError {
            pos,
            msg: String::from("exponent too large"),
        })?;
        base.pow(if neg { -e } else { e }).map_err(|_| ParseError {
            pos,
            msg: String::from("division by zero"),
        })
    }

    fn atom(&mut self) -> Result<RationalFunction, ParseError> {
        match self.peek().clone() {
            Tok::Num(n) => {
                self.at += 1;
                Ok(RationalFunction::constant(self.field.from_bigint(&n)))
            }
            Tok::Ident(name) => {
                if name == "z" {
                    self.at += 1;
                    return Ok(RationalFunction::z_pow(self.field, 1));
                }
                match self.gens.iter().find(|(g, _)| *g == name) {
                    Some((_, g)) => {
                        self.at += 1;
                        Ok(RationalFunction::constant(g.clone()))
                    }
                    None => self.err(format!("unknown identifier '{name}'")),
                }
            }
            Tok::Op('(') => {
                self.at += 1;
                let e = self.expr()?;
                if !self.eat(')') {
                    return self.err("expected ')'");
                }
                Ok(e)
            }
            Tok::End => self.err("unexpected end of input"),
            Tok::Op(c) => self.err(format!("unexpected '{c}'")),
        }
    }
}

/// Parse a rational function of `z` over `field`.
pub fn parse_rational_function(src: &str, field: &Field) -> Result<RationalFunction, ParseError> {
    let mut p = Parser {
        toks: tokenize(src)?,
        at: 0,
        field,
        gens: generators(field),
    };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return p.err("trailing input");
    }
    Ok(e)
}

/// Parse a field element: an expression without `z`.
pub fn parse_element(src: &str, field: &Field) -> Result<Elem, ParseError> {
    let r = parse_rational_function(src, field)?;
    r.as_constant().ok_or(ParseError {
        pos: 0,
        msg: format!("'{src}' depends on z"),
    })
}
