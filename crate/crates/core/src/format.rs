//! Coordinate names and a small parser for printed operators such as
//! `∂1 + η1·∂3 − η2·∂4` or `∂2 + (−η2 + η1^2/2)·∂4`.
//!
//! Products are operator compositions, so `η1·∂3` multiplies and `∂3·η1`
//! expands by the Leibniz rule. Both `−` and `-`, and both `·` and `*`, are
//! accepted; juxtaposition also multiplies.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::diffop::DiffOp;
use crate::poly::MultiPoly;
use crate::rational::Rational;

/// Printing and parsing names for coordinates and their partial derivatives.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OpNames {
    pub vars: Vec<String>,
    pub partials: Vec<String>,
}

impl OpNames {
    /// `η1..ηd` with `∂1..∂d`.
    pub fn indexed(d: usize) -> Self {
        OpNames {
            vars: (1..=d).map(|i| format!("η{i}")).collect(),
            partials: (1..=d).map(|i| format!("∂{i}")).collect(),
        }
    }

    /// Named coordinates with partials `∂<name>`.
    pub fn named<S: AsRef<str>>(names: &[S]) -> Self {
        OpNames {
            vars: names.iter().map(|s| s.as_ref().to_string()).collect(),
            partials: names.iter().map(|s| format!("∂{}", s.as_ref())).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.vars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vars.is_empty()
    }

    pub fn partial_name(&self, i: usize) -> String {
        self.partials.get(i).cloned().unwrap_or_else(|| format!("∂[{i}]"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("parse error at character {pos}: {msg}")]
pub struct ParseError {
    pub pos: usize,
    pub msg: String,
}

struct Parser<'a> {
    chars: Vec<char>,
    pos: usize,
    names: &'a OpNames,
    /// `(name, is_partial, index)` sorted longest first.
    idents: Vec<(Vec<char>, bool, usize)>,
}

impl<'a> Parser<'a> {
    fn new(src: &str, names: &'a OpNames) -> Self {
        let mut idents: Vec<(Vec<char>, bool, usize)> = Vec::new();
        for (i, p) in names.partials.iter().enumerate() {
            idents.push((p.chars().collect(), true, i));
        }
        for (i, v) in names.vars.iter().enumerate() {
            idents.push((v.chars().collect(), false, i));
        }
        idents.sort_by_key(|e| core::cmp::Reverse(e.0.len()));
        Parser { chars: src.chars().collect(), pos: 0, names, idents }
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError { pos: self.pos, msg: msg.into() })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn is_minus(c: char) -> bool {
        c == '-' || c == '\u{2212}'
    }

    fn expr(&mut self) -> Result<DiffOp, ParseError> {
        let mut acc = DiffOp::zero();
        let mut sign = match self.peek() {
            Some(c) if Self::is_minus(c) => {
                self.pos += 1;
                -1
            }
            Some('+') => {
                self.pos += 1;
                1
            }
            _ => 1,
        };
        loop {
            let t = self.term()?;
            acc = if sign < 0 { &acc - &t } else { &acc + &t };
            match self.peek() {
                Some('+') => {
                    self.pos += 1;
                    sign = 1;
                }
                Some(c) if Self::is_minus(c) => {
                    self.pos += 1;
                    sign = -1;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn starts_factor(&mut self) -> bool {
        match self.peek() {
            Some(c) if c.is_ascii_digit() || c == '(' => true,
            Some(_) => self.match_ident().is_some(),
            None => false,
        }
    }

    fn term(&mut self) -> Result<DiffOp, ParseError> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Some('·') | Some('*') => {
                    self.pos += 1;
                    let f = self.factor()?;
                    acc = acc.compose(&f);
                }
                Some('/') => {
                    self.pos += 1;
                    let d = self.integer()?;
                    if d.is_zero() {
                        return self.err("division by zero");
                    }
                    acc = acc.scale(&d.recip());
                }
                _ if self.starts_factor() => {
                    let f = self.factor()?;
                    acc = acc.compose(&f);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn integer(&mut self) -> Result<Rational, ParseError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.chars.len() && self.chars[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected an integer");
        }
        let s: String = self.chars[start..self.pos].iter().collect();
        s.parse::<Rational>().or_else(|_| self.err("bad integer"))
    }

    fn exponent(&mut self) -> Result<u32, ParseError> {
        if self.peek() == Some('^') {
            self.pos += 1;
            let e = self.integer()?;
            if !e.is_integer() {
                return self.err("bad exponent");
            }
            let v: u32 = e.to_string().parse().or_else(|_| self.err("exponent too large"))?;
            return Ok(v);
        }
        Ok(1)
    }

    fn match_ident(&mut self) -> Option<(usize, bool, usize)> {
        self.skip_ws();
        let rest = &self.chars[self.pos..];
        self.idents.iter().find(|(name, _, _)| rest.starts_with(name)).map(|(name, p, i)| (name.len(), *p, *i))
    }

    fn factor(&mut self) -> Result<DiffOp, ParseError> {
        match self.peek() {
            None => self.err("unexpected end of input"),
            Some('(') => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(')') {
                    return self.err("expected ')'");
                }
                self.pos += 1;
                let k = self.exponent()?;
                let mut acc = DiffOp::identity();
                for _ in 0..k {
                    acc = acc.compose(&e);
                }
                Ok(acc)
            }
            Some(c) if c.is_ascii_digit() => {
                let n = self.integer()?;
                Ok(DiffOp::multiplication(MultiPoly::constant(n)))
            }
            Some(_) => {
                let Some((len, is_partial, idx)) = self.match_ident() else {
                    return self.err(format!("unknown symbol; known coordinates: {}", self.names.vars.join(", ")));
                };
                self.pos += len;
                let k = self.exponent()?;
                let base = if is_partial { DiffOp::partial(idx) } else { DiffOp::multiplication(MultiPoly::var(idx)) };
                let mut acc = DiffOp::identity();
                for _ in 0..k {
                    acc = acc.compose(&base);
                }
                Ok(acc)
            }
        }
    }
}

/// Parses a printed operator over the given coordinate names.
pub fn parse_op(src: &str, names: &OpNames) -> Result<DiffOp, ParseError> {
    let mut p = Parser::new(src, names);
    let op = p.expr()?;
    if p.peek().is_some() {
        return p.err("trailing input");
    }
    Ok(op)
}

/// Parses a polynomial; rejects anything containing a derivative.
pub fn parse_poly(src: &str, names: &OpNames) -> Result<MultiPoly, ParseError> {
    let op = parse_op(src, names)?;
    if op.order().unwrap_or(0) > 0 {
        return Err(ParseError { pos: 0, msg: "expected a polynomial, found a derivative".into() });
    }
    Ok(op.zeroth_order())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let names = OpNames::indexed(4);
        for s in ["∂1 + η1·∂3 − η2·∂4", "∂2 + (−η2 + 1/2·η1^2)·∂4", "∂1 + η1·∂2 + 1/2·η1^2·∂3 + (η3 − η1·η2 + 1/3·η1^3)·∂4", "1"] {
            let op = parse_op(s, &names).unwrap();
            assert_eq!(format!("{}", op.display(&names)), s);
        }
    }

    #[test]
    fn printed_style_input() {
        let names = OpNames::indexed(4);
        let a = parse_op("∂2 + η1∂3 + (-η2 + η1^2/2)∂4", &names).unwrap();
        let b = parse_op("∂2 + η1·∂3 + (−η2 + 1/2·η1^2)·∂4", &names).unwrap();
        assert_eq!(a, b);
        assert!(parse_op("∂5", &names).is_err());
        assert!(parse_op("∂1 +", &names).is_err());
    }

    #[test]
    fn named_coordinates() {
        let names = OpNames::named(&["ζ*", "η*1", "ξ*1"]);
        let op = parse_op("∂ξ*1 − 1/2·η*1·∂ζ*", &names).unwrap();
        assert_eq!(format!("{}", op.display(&names)), "−1/2·η*1·∂ζ* + ∂ξ*1");
    }
}
