//! Recursive-descent parser for the ASCII polynomial grammar.
//!
//! Grammar: integers, rationals as `p/q`, identifiers for variables, the
//! operators `+ - * ^` and parentheses. `^` binds tighter than `*`, which
//! binds tighter than `+`/`-`; implicit multiplication is not accepted.
//! `/` is only valid with a nonzero integer divisor. Whitespace is
//! insignificant. A leading `-` (or `-` after `(`) is unary negation.

use crate::monomial::Monomial;
use crate::poly::Polynomial;
use crate::{Error, Int, Poly, Rat};

pub fn parse(text: &str, variables: &[String]) -> Result<Poly, Error> {
    let mut p = Parser {
        bytes: text.as_bytes(),
        pos: 0,
        vars: variables,
    };
    p.skip_ws();
    let poly = p.expr()?;
    p.skip_ws();
    if p.pos != p.bytes.len() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(poly)
}

struct Parser<'a> {
    bytes: &'a [u8],
    pos: usize,
    vars: &'a [String],
}

impl<'a> Parser<'a> {
    fn err(&self, msg: &str) -> Error {
        Error::Parse {
            pos: self.pos,
            msg: msg.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    fn eat(&mut self, b: u8) -> bool {
        if self.peek() == Some(b) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Poly, Error> {
        self.skip_ws();
        let mut negate = false;
        if self.eat(b'-') {
            negate = true;
        } else {
            self.eat(b'+');
        }
        let mut acc = self.term()?;
        if negate {
            acc = acc.neg();
        }
        loop {
            self.skip_ws();
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    let t = self.term()?;
                    acc = acc.add(&t);
                }
                Some(b'-') => {
                    self.pos += 1;
                    let t = self.term()?;
                    acc = acc.sub(&t);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Poly, Error> {
        let mut acc = self.factor()?;
        loop {
            self.skip_ws();
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    let f = self.factor()?;
                    acc = acc.mul(&f);
                }
                Some(b'/') => {
                    self.pos += 1;
                    self.skip_ws();
                    let at = self.pos;
                    let d = self.factor()?;
                    if d.is_zero() {
                        return Err(Error::Parse {
                            pos: at,
                            msg: "zero denominator".to_string(),
                        });
                    }
                    if d.degree() != Some(0) {
                        return Err(Error::Parse {
                            pos: at,
                            msg: "divisor must be a nonzero constant".to_string(),
                        });
                    }
                    let c = d.constant_term();
                    acc = acc.scale(&(Rat::from_integer(Int::from(1)) / c));
                }
                _ => return Ok(acc),
            }
        }
    }

    fn factor(&mut self) -> Result<Poly, Error> {
        let base = self.atom()?;
        self.skip_ws();
        if self.eat(b'^') {
            self.skip_ws();
            let k = self.uint()?;
            Ok(base.pow(k))
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<Poly, Error> {
        self.skip_ws();
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                self.skip_ws();
                if !self.eat(b')') {
                    return Err(self.err("expected `)`"));
                }
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() => {
                let v = self.integer()?;
                Ok(Polynomial::constant(
                    self.vars.len(),
                    Rat::from_integer(v),
                ))
            }
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.pos;
                while self
                    .peek()
                    .map(|b| b.is_ascii_alphanumeric() || b == b'_')
                    .unwrap_or(false)
                {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.bytes[start..self.pos]).unwrap();
                match self.vars.iter().position(|v| v == name) {
                    Some(i) => Ok(Polynomial::var(self.vars.len(), i)),
                    None => Err(Error::Parse {
                        pos: start,
                        msg: format!("unknown variable `{name}`"),
                    }),
                }
            }
            _ => Err(self.err("expected a number, variable, or `(`")),
        }
    }

    fn integer(&mut self) -> Result<Int, Error> {
        let start = self.pos;
        while self.peek().map(|b| b.is_ascii_digit()).unwrap_or(false) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected digits"));
        }
        let s = std::str::from_utf8(&self.bytes[start..self.pos]).unwrap();
        s.parse::<Int>().map_err(|_| self.err("bad integer"))
    }

    fn uint(&mut self) -> Result<u32, Error> {
        let start = self.pos;
        while self.peek().map(|b| b.is_ascii_digit()).unwrap_or(false) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected a non-negative integer exponent"));
        }
        let s = std::str::from_utf8(&self.bytes[start..self.pos]).unwrap();
        s.parse::<u32>().map_err(|_| self.err("exponent too large"))
    }
}

impl Monomial {
    /// Grid key used in tests and tooling; not part of the grammar.
    pub fn exponents(&self) -> &[u32] {
        &self.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rint;

    fn xy() -> Vec<String> {
        vec!["x".into(), "y".into()]
    }

    #[test]
    fn basic_terms() {
        let p = parse("1 - x^2 - y^2", &xy()).unwrap();
        assert_eq!(p.num_terms(), 3);
        assert_eq!(p.coeff(&Monomial(vec![0, 0])), rint(1));
        assert_eq!(p.coeff(&Monomial(vec![2, 0])), rint(-1));
        assert_eq!(p.coeff(&Monomial(vec![0, 2])), rint(-1));
    }

    #[test]
    fn lifted_motzkin() {
        let p = parse("2 + x^4*y^2 + x^2*y^4 - 3*x^2*y^2", &xy()).unwrap();
        assert_eq!(p.degree(), Some(6));
        assert_eq!(p.coeff(&Monomial(vec![2, 2])), rint(-3));
    }

    #[test]
    fn zero_denominator() {
        let e = parse("x/0", &xy()).unwrap_err();
        match e {
            Error::Parse { msg, .. } => assert!(msg.contains("zero denominator"), "{msg}"),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn unknown_variable_and_syntax_errors() {
        assert!(matches!(parse("x + z", &xy()), Err(Error::Parse { .. })));
        assert!(matches!(parse("x +", &xy()), Err(Error::Parse { .. })));
        assert!(matches!(parse("2 x", &xy()), Err(Error::Parse { .. })));
        assert!(matches!(parse("x ^ -2", &xy()), Err(Error::Parse { .. })));
    }

    #[test]
    fn pow_binds_tighter_than_mul() {
        let a = parse("2*x^3", &xy()).unwrap();
        let b = parse("2*(x^3)", &xy()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn rational_literals() {
        let p = parse("1/2 + 3/4*x", &xy()).unwrap();
        assert_eq!(p.constant_term(), crate::rat(1, 2));
    }
}
