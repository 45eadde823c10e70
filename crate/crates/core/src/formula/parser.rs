//! Recursive-descent parser for the concrete formula syntax.
//!
//! ```text
//! formula  := sel
//! sel      := bor ( ("=>" | "~>") sel )?
//! bor      := tor ( "||" tor )*
//! tor      := conj ( "|" conj )*
//! conj     := unary ( "&" unary )*
//! unary    := "-" unary | "!" unary | atom | "(" formula ")"
//! atom     := VAR "=" VAL | VAR "!=" VAL | "dep(" VAR ("," VAR)* ";" VAR ")" | probatom
//! probatom := "Pr(" formula ")" CMP ( RATIONAL | "Pr(" formula ")" )
//! CMP      := "<=" | ">=" | "=" | "<" | ">"
//! ```

use std::fmt;

use num_traits::{One, Zero};
use thiserror::Error;

use super::{Formula, Rational};
use crate::intervention::Intervention;
use crate::value::{Value, Variable};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("parse error at position {position}: expected {}, found {found}", .expected.join(" or "))]
pub struct ParseError {
    /// Byte offset into the input.
    pub position: usize,
    pub expected: Vec<String>,
    pub found: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(String),
    Eq,
    Neq,
    Le,
    Ge,
    Lt,
    Gt,
    Amp,
    Bar,
    BarBar,
    Implies,
    Squiggle,
    Minus,
    Bang,
    LParen,
    RParen,
    Comma,
    Semi,
    Slash,
    Dot,
    End,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Tok::Ident(s) => return write!(f, "identifier `{s}`"),
            Tok::Int(s) => return write!(f, "number `{s}`"),
            Tok::Eq => "`=`",
            Tok::Neq => "`!=`",
            Tok::Le => "`<=`",
            Tok::Ge => "`>=`",
            Tok::Lt => "`<`",
            Tok::Gt => "`>`",
            Tok::Amp => "`&`",
            Tok::Bar => "`|`",
            Tok::BarBar => "`||`",
            Tok::Implies => "`=>`",
            Tok::Squiggle => "`~>`",
            Tok::Minus => "`-`",
            Tok::Bang => "`!`",
            Tok::LParen => "`(`",
            Tok::RParen => "`)`",
            Tok::Comma => "`,`",
            Tok::Semi => "`;`",
            Tok::Slash => "`/`",
            Tok::Dot => "`.`",
            Tok::End => "end of input",
        };
        f.write_str(s)
    }
}

fn lex(input: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = input.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let two = |b: u8| bytes.get(i + 1) == Some(&b);
        let start = i;
        let tok = match c {
            b'=' if two(b'>') => {
                i += 2;
                Tok::Implies
            }
            b'=' => {
                i += 1;
                Tok::Eq
            }
            b'!' if two(b'=') => {
                i += 2;
                Tok::Neq
            }
            b'!' => {
                i += 1;
                Tok::Bang
            }
            b'<' if two(b'=') => {
                i += 2;
                Tok::Le
            }
            b'<' => {
                i += 1;
                Tok::Lt
            }
            b'>' if two(b'=') => {
                i += 2;
                Tok::Ge
            }
            b'>' => {
                i += 1;
                Tok::Gt
            }
            b'|' if two(b'|') => {
                i += 2;
                Tok::BarBar
            }
            b'|' => {
                i += 1;
                Tok::Bar
            }
            b'~' if two(b'>') => {
                i += 2;
                Tok::Squiggle
            }
            b'&' => {
                i += 1;
                Tok::Amp
            }
            b'-' => {
                i += 1;
                Tok::Minus
            }
            b'(' => {
                i += 1;
                Tok::LParen
            }
            b')' => {
                i += 1;
                Tok::RParen
            }
            b',' => {
                i += 1;
                Tok::Comma
            }
            b';' => {
                i += 1;
                Tok::Semi
            }
            b'/' => {
                i += 1;
                Tok::Slash
            }
            b'.' => {
                i += 1;
                Tok::Dot
            }
            c if c.is_ascii_digit() => {
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                Tok::Int(input[start..i].to_string())
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                Tok::Ident(input[start..i].to_string())
            }
            _ => {
                let ch = input[i..].chars().next().unwrap_or('?');
                return Err(ParseError {
                    position: i,
                    expected: vec!["a token".into()],
                    found: format!("character {ch:?}"),
                });
            }
        };
        out.push((tok, start));
    }
    out.push((Tok::End, input.len()));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn peek2(&self) -> &Tok {
        &self.toks[(self.pos + 1).min(self.toks.len() - 1)].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, expected: &[&str]) -> ParseError {
        ParseError {
            position: self.offset(),
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found: self.peek().to_string(),
        }
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.error(&[what]))
        }
    }

    fn sel(&mut self) -> Result<Formula, ParseError> {
        let start = self.offset();
        let left = self.bor()?;
        match self.peek() {
            Tok::Implies => {
                self.bump();
                Ok(Formula::sel(left, self.sel()?))
            }
            Tok::Squiggle => {
                self.bump();
                let iv = antecedent(left).ok_or(ParseError {
                    position: start,
                    expected: vec!["a conjunction of `X=x` atoms before `~>`".into()],
                    found: "another formula".into(),
                })?;
                Ok(Formula::cf(iv, self.sel()?))
            }
            _ => Ok(left),
        }
    }

    fn bor(&mut self) -> Result<Formula, ParseError> {
        let mut left = self.tor()?;
        while *self.peek() == Tok::BarBar {
            self.bump();
            left = Formula::bor(left, self.tor()?);
        }
        Ok(left)
    }

    fn tor(&mut self) -> Result<Formula, ParseError> {
        let mut left = self.conj()?;
        while *self.peek() == Tok::Bar {
            self.bump();
            left = Formula::or(left, self.conj()?);
        }
        Ok(left)
    }

    fn conj(&mut self) -> Result<Formula, ParseError> {
        let mut left = self.unary()?;
        while *self.peek() == Tok::Amp {
            self.bump();
            left = Formula::and(left, self.unary()?);
        }
        Ok(left)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        match self.peek() {
            Tok::Minus => {
                self.bump();
                Ok(Formula::dual_neg(self.unary()?))
            }
            Tok::Bang => {
                let at = self.offset();
                self.bump();
                let inner = self.unary()?;
                if !inner.is_probabilistic_literal() {
                    return Err(ParseError {
                        position: at,
                        expected: vec!["a probabilistic literal after `!`".into()],
                        found: inner.to_string(),
                    });
                }
                Ok(Formula::contra_neg(inner))
            }
            Tok::LParen => {
                self.bump();
                let f = self.sel()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(f)
            }
            Tok::Ident(name) if name == "Pr" && *self.peek2() == Tok::LParen => self.probatom(),
            Tok::Ident(name) if name == "dep" && *self.peek2() == Tok::LParen => self.dep(),
            Tok::Ident(_) => self.literal(),
            _ => Err(self.error(&["a variable", "`Pr(`", "`dep(`", "`-`", "`!`", "`(`"])),
        }
    }

    fn variable(&mut self) -> Result<Variable, ParseError> {
        match self.peek().clone() {
            Tok::Ident(name) => {
                self.bump();
                Ok(Variable::from(name))
            }
            _ => Err(self.error(&["a variable"])),
        }
    }

    fn value(&mut self) -> Result<Value, ParseError> {
        let negative = if *self.peek() == Tok::Minus {
            self.bump();
            true
        } else {
            false
        };
        match self.peek().clone() {
            Tok::Int(digits) => {
                let at = self.offset();
                self.bump();
                let text = if negative {
                    format!("-{digits}")
                } else {
                    digits
                };
                text.parse::<i64>().map(Value::Int).map_err(|_| ParseError {
                    position: at,
                    expected: vec!["a 64-bit integer".into()],
                    found: text,
                })
            }
            Tok::Ident(s) if !negative => {
                self.bump();
                Ok(Value::Sym(s))
            }
            _ => Err(self.error(&["a value"])),
        }
    }

    fn literal(&mut self) -> Result<Formula, ParseError> {
        let x = self.variable()?;
        match self.peek() {
            Tok::Eq => {
                self.bump();
                Ok(Formula::Eq(x, self.value()?))
            }
            Tok::Neq => {
                self.bump();
                Ok(Formula::Neq(x, self.value()?))
            }
            _ => Err(self.error(&["`=`", "`!=`"])),
        }
    }

    fn dep(&mut self) -> Result<Formula, ParseError> {
        self.bump();
        self.bump();
        let mut xs = Vec::new();
        if *self.peek() != Tok::Semi {
            xs.push(self.variable()?);
            while *self.peek() == Tok::Comma {
                self.bump();
                xs.push(self.variable()?);
            }
        }
        self.expect(Tok::Semi, "`;`")?;
        let y = self.variable()?;
        self.expect(Tok::RParen, "`)`")?;
        Ok(Formula::Dep(xs, y))
    }

    fn pr_event(&mut self) -> Result<Formula, ParseError> {
        match (self.peek(), self.peek2()) {
            (Tok::Ident(n), Tok::LParen) if n == "Pr" => {
                self.bump();
                self.bump();
                let f = self.sel()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(f)
            }
            _ => Err(self.error(&["`Pr(`"])),
        }
    }

    fn rational(&mut self) -> Result<Rational, ParseError> {
        let at = self.offset();
        let overflow = |text: String| ParseError {
            position: at,
            expected: vec!["a representable rational".into()],
            found: text,
        };
        let whole = match self.peek().clone() {
            Tok::Int(d) => {
                self.bump();
                d
            }
            _ => return Err(self.error(&["a rational in [0,1]"])),
        };
        let n: i64 = whole.parse().map_err(|_| overflow(whole.clone()))?;
        let r = match self.peek() {
            Tok::Slash => {
                self.bump();
                let den = match self.peek().clone() {
                    Tok::Int(d) => {
                        self.bump();
                        d
                    }
                    _ => return Err(self.error(&["a denominator"])),
                };
                let d: i64 = den.parse().map_err(|_| overflow(den.clone()))?;
                if d == 0 {
                    return Err(ParseError {
                        position: at,
                        expected: vec!["a non-zero denominator".into()],
                        found: "0".into(),
                    });
                }
                Rational::new(n, d)
            }
            Tok::Dot => {
                self.bump();
                let frac = match self.peek().clone() {
                    Tok::Int(d) => {
                        self.bump();
                        d
                    }
                    _ => return Err(self.error(&["decimal digits"])),
                };
                let scale = 10i64
                    .checked_pow(frac.len() as u32)
                    .ok_or_else(|| overflow(format!("{whole}.{frac}")))?;
                let f: i64 = frac.parse().map_err(|_| overflow(frac.clone()))?;
                let num = n
                    .checked_mul(scale)
                    .and_then(|m| m.checked_add(f))
                    .ok_or_else(|| overflow(format!("{whole}.{frac}")))?;
                Rational::new(num, scale)
            }
            _ => Rational::from_integer(n),
        };
        if r < Rational::zero() || r > Rational::one() {
            return Err(ParseError {
                position: at,
                expected: vec!["a probability bound in [0,1]".into()],
                found: r.to_string(),
            });
        }
        Ok(r)
    }

    fn probatom(&mut self) -> Result<Formula, ParseError> {
        let chi = self.pr_event()?;
        let cmp = self.bump();
        if !matches!(cmp, Tok::Le | Tok::Ge | Tok::Eq | Tok::Lt | Tok::Gt) {
            self.pos -= 1;
            return Err(self.error(&["`<=`", "`>=`", "`=`", "`<`", "`>`"]));
        }
        let is_pr =
            matches!((self.peek(), self.peek2()), (Tok::Ident(n), Tok::LParen) if n == "Pr");
        if is_pr {
            let theta = self.pr_event()?;
            let leq = || Formula::PrLeqPr(Box::new(chi.clone()), Box::new(theta.clone()));
            let geq = || Formula::PrGeqPr(Box::new(chi.clone()), Box::new(theta.clone()));
            Ok(match cmp {
                Tok::Le => leq(),
                Tok::Ge => geq(),
                Tok::Eq => Formula::and(leq(), geq()),
                Tok::Lt => Formula::and(leq(), Formula::contra_neg(geq())),
                _ => Formula::and(geq(), Formula::contra_neg(leq())),
            })
        } else {
            let eps = self.rational()?;
            Ok(match cmp {
                Tok::Le => Formula::pr_leq(chi, eps),
                Tok::Ge => Formula::pr_geq(chi, eps),
                Tok::Eq => Formula::pr_eq(chi, eps),
                Tok::Lt => Formula::pr_lt(chi, eps),
                _ => Formula::pr_gt(chi, eps),
            })
        }
    }
}

/// Flattens a conjunction of `X=x` atoms into an intervention.
fn antecedent(f: Formula) -> Option<Intervention> {
    fn go(f: Formula, out: &mut Vec<(Variable, Value)>) -> bool {
        match f {
            Formula::Eq(x, v) => {
                out.push((x, v));
                true
            }
            Formula::And(a, b) => go(*a, out) && go(*b, out),
            _ => false,
        }
    }
    let mut pairs = Vec::new();
    go(f, &mut pairs).then(|| Intervention::new(pairs))
}

pub fn parse(input: &str) -> Result<Formula, ParseError> {
    let mut p = Parser {
        toks: lex(input)?,
        pos: 0,
    };
    let f = p.sel()?;
    if *p.peek() != Tok::End {
        return Err(p.error(&["end of input"]));
    }
    Ok(f)
}

/// Parses `X=1 & Y=2` as an intervention.
pub fn parse_intervention(input: &str) -> Result<Intervention, ParseError> {
    let f = parse(input)?;
    antecedent(f).ok_or(ParseError {
        position: 0,
        expected: vec!["a conjunction of `X=x` atoms".into()],
        found: input.trim().to_string(),
    })
}
