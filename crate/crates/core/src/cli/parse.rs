//! Recursive-descent parser for polynomial input.
//!
//! ```text
//! expr   := term (('+'|'-') term)*
//! term   := factor ('*' factor)*
//! factor := base ('^' nonneg-int)?
//! base   := rational | var | '(' expr ')' | '-' factor
//! var    := ('x'|'y') positive-int
//! ```
//!
//! Whitespace is ignored; there is no implicit multiplication.

use num_bigint::BigInt;
use thiserror::Error;

use crate::exactmath::{Poly, Rational, MAX_EXPONENT};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{message} at position {position}")]
pub struct ParseError {
    /// Zero-based character offset into the input.
    pub position: usize,
    pub message: String,
}

/// Parses `text` over `x1..xn`. With `two_point` the ring is `y1..yn,
/// x1..xn` (in that variable order), matching the two-point layout used by
/// connection coefficients.
pub fn parse_poly(text: &str, n: usize, two_point: bool) -> Result<Poly, ParseError> {
    let mut p = Parser {
        chars: text.chars().collect(),
        pos: 0,
        n,
        two_point,
    };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos < p.chars.len() {
        return Err(p.error(format!("unexpected `{}`", p.chars[p.pos])));
    }
    Ok(e)
}

struct Parser {
    chars: Vec<char>,
    pos: usize,
    n: usize,
    two_point: bool,
}

impl Parser {
    fn nvars(&self) -> usize {
        if self.two_point {
            2 * self.n
        } else {
            self.n
        }
    }

    fn error(&self, message: impl Into<String>) -> ParseError {
        ParseError {
            position: self.pos,
            message: message.into(),
        }
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

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Poly, ParseError> {
        let mut acc = self.term()?;
        loop {
            if self.eat('+') {
                acc = &acc + &self.term()?;
            } else if self.eat('-') {
                acc = &acc - &self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Poly, ParseError> {
        let mut acc = self.factor()?;
        while self.eat('*') {
            acc = &acc * &self.factor()?;
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Poly, ParseError> {
        let b = self.base()?;
        if !self.eat('^') {
            return Ok(b);
        }
        self.skip_ws();
        let at = self.pos;
        let digits = self.digits().ok_or_else(|| self.error("expected exponent"))?;
        let exp: u32 = digits
            .parse()
            .ok()
            .filter(|e| *e <= u32::from(MAX_EXPONENT))
            .ok_or(ParseError {
                position: at,
                message: format!("exponent `{digits}` exceeds {MAX_EXPONENT}"),
            })?;
        Ok(b.pow(exp))
    }

    fn base(&mut self) -> Result<Poly, ParseError> {
        match self.peek() {
            None => Err(self.error("unexpected end of input")),
            Some('(') => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(')') {
                    return Err(self.error("expected `)`"));
                }
                Ok(e)
            }
            Some('-') => {
                self.pos += 1;
                Ok(self.factor()?.scale(&Rational::from(-1)))
            }
            Some(c) if c.is_ascii_digit() => self.rational(),
            Some(c @ ('x' | 'y')) => self.variable(c),
            Some(c) => Err(self.error(format!("unexpected `{c}`"))),
        }
    }

    fn digits(&mut self) -> Option<String> {
        let start = self.pos;
        while self.pos < self.chars.len() && self.chars[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        (self.pos > start).then(|| self.chars[start..self.pos].iter().collect())
    }

    fn rational(&mut self) -> Result<Poly, ParseError> {
        let num: BigInt = self.digits().expect("starts with a digit").parse().expect("digits");
        let mut den = BigInt::from(1);
        if self.eat('/') {
            self.skip_ws();
            let at = self.pos;
            let d: BigInt = self
                .digits()
                .ok_or_else(|| self.error("expected denominator"))?
                .parse()
                .expect("digits");
            if d == BigInt::from(0) {
                return Err(ParseError {
                    position: at,
                    message: "zero denominator".into(),
                });
            }
            den = d;
        }
        Ok(Poly::constant(self.nvars(), Rational::from_bigints(num, den)))
    }

    fn variable(&mut self, letter: char) -> Result<Poly, ParseError> {
        let start = self.pos;
        self.pos += 1;
        let digits = self
            .digits()
            .ok_or_else(|| self.error(format!("expected an index after `{letter}`")))?;
        let err = |message: String| ParseError {
            position: start,
            message,
        };
        let index: usize = digits
            .parse()
            .ok()
            .filter(|i| (1..=self.n).contains(i))
            .ok_or_else(|| err(format!("variable {letter}{digits} out of range 1..{}", self.n)))?;
        let var = match (letter, self.two_point) {
            ('x', false) => index - 1,
            ('x', true) => self.n + index - 1,
            ('y', true) => index - 1,
            _ => return Err(err(format!("`{letter}{digits}` needs a two-point expression"))),
        };
        Poly::var(self.nvars(), var).map_err(|e| err(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmath::Monomial;

    fn q(a: i64, b: i64) -> Rational {
        Rational::new(a, b)
    }

    #[test]
    fn two_term_polynomial() {
        let p = parse_poly("x1^2*x2 + 3/2*x2", 2, false).unwrap();
        let expected = Poly::from_terms(2, vec![(Monomial::from_exponents(&[2, 1]), q(1, 1)), (Monomial::from_exponents(&[0, 1]), q(3, 2))]).unwrap();
        assert_eq!(p, expected);
        assert_eq!(p.len(), 2);
    }

    #[test]
    fn sign_distribution() {
        let p = parse_poly("-(x1 - 1)", 1, false).unwrap();
        assert_eq!(p.to_string(), "-x1 + 1");
    }

    #[test]
    fn out_of_range_variable() {
        let e = parse_poly("x3", 2, false).unwrap_err();
        assert_eq!(e.position, 0);
        assert!(e.message.contains("out of range"), "{e}");
        let e = parse_poly("1 + y1", 2, false).unwrap_err();
        assert_eq!(e.position, 4);
    }

    #[test]
    fn two_point_variable_order() {
        let p = parse_poly("y2 - x1", 2, true).unwrap();
        assert_eq!(p.nvars(), 4);
        let names = Poly::point_names(2, 2);
        assert_eq!(p.display_with(&names).to_string(), "y2 - x1");
    }

    #[test]
    fn syntax_errors_carry_positions() {
        assert_eq!(parse_poly("2 x1", 1, false).unwrap_err().position, 2);
        assert_eq!(parse_poly("(x1 + 1", 1, false).unwrap_err().position, 7);
        assert_eq!(parse_poly("x1^", 1, false).unwrap_err().position, 3);
        assert_eq!(parse_poly("1/0", 1, false).unwrap_err().position, 2);
        assert!(parse_poly("", 1, false).is_err());
    }

    #[test]
    fn precedence_and_powers() {
        let p = parse_poly("2*x1^2 - -x1*3 + (x1+1)^2", 1, false).unwrap();
        let expected = Poly::from_terms(1, vec![(Monomial::from_exponents(&[2]), q(3, 1)), (Monomial::from_exponents(&[1]), q(5, 1)), (Monomial::one(), q(1, 1))]).unwrap();
        assert_eq!(p, expected);
    }
}
