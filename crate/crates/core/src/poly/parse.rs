//! Text grammar for polynomials.
//!
//! ```text
//! poly   := ['-'] term (('+' | '-') term)*
//! term   := factor ('*' factor)*
//! factor := coeff | var ['^' int]
//! coeff  := int ['/' int]
//! var    := ident ('[' int ']')*
//! ```
//!
//! A term holds at most one coefficient factor, in any position.

use num_bigint::BigInt;

use super::PolyError;
use crate::arith::Rational;

pub(super) type ParsedTerm = (Rational, Vec<(String, u16)>);

struct Cursor<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn err<T>(&self, msg: impl Into<String>) -> Result<T, PolyError> {
        Err(PolyError::Parse { pos: self.pos, msg: msg.into() })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn digits(&mut self) -> Result<&'a str, PolyError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected digits");
        }
        Ok(std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits"))
    }

    fn coefficient(&mut self) -> Result<Rational, PolyError> {
        let n: BigInt = self.digits()?.parse().expect("digits parse");
        if self.eat(b'/') {
            let at = self.pos;
            let d: BigInt = self.digits()?.parse().expect("digits parse");
            return Rational::new(n, d).map_err(|_| PolyError::Parse { pos: at, msg: "zero denominator".into() });
        }
        Ok(Rational::from_integer(n))
    }

    fn variable(&mut self) -> Result<String, PolyError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_') {
            self.pos += 1;
        }
        let mut name = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii").to_string();
        while self.src.get(self.pos) == Some(&b'[') {
            self.pos += 1;
            let idx = self.digits()?;
            name.push('[');
            name.push_str(idx);
            name.push(']');
            if !self.eat(b']') {
                return self.err("expected ']'");
            }
        }
        Ok(name)
    }

    fn term(&mut self) -> Result<ParsedTerm, PolyError> {
        let mut coeff: Option<Rational> = None;
        let mut factors: Vec<(String, u16)> = Vec::new();
        loop {
            match self.peek() {
                Some(c) if c.is_ascii_digit() => {
                    if coeff.is_some() {
                        return self.err("more than one coefficient in a term");
                    }
                    coeff = Some(self.coefficient()?);
                }
                Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                    let name = self.variable()?;
                    let mut e = 1u16;
                    if self.eat(b'^') {
                        let at = self.pos;
                        e = self.digits()?.parse().map_err(|_| PolyError::Parse { pos: at, msg: "exponent too large".into() })?;
                    }
                    if e > 0 {
                        match factors.iter_mut().find(|(n, _)| *n == name) {
                            Some(f) => f.1 += e,
                            None => factors.push((name, e)),
                        }
                    }
                }
                Some(_) => return self.err("expected a coefficient or a variable"),
                None => return self.err("unexpected end of input"),
            }
            if !self.eat(b'*') {
                break;
            }
        }
        Ok((coeff.unwrap_or_else(Rational::one), factors))
    }
}

/// Parses into a list of (coefficient, [(variable, exponent)]) terms,
/// without merging like terms.
pub(super) fn parse_polynomial(text: &str) -> Result<Vec<ParsedTerm>, PolyError> {
    let mut cur = Cursor { src: text.as_bytes(), pos: 0 };
    let mut out = Vec::new();
    let mut negate = cur.eat(b'-');
    if !negate {
        cur.eat(b'+');
    }
    loop {
        let (c, f) = cur.term()?;
        out.push((if negate { c.neg() } else { c }, f));
        if cur.eat(b'+') {
            negate = false;
        } else if cur.eat(b'-') {
            negate = true;
        } else {
            break;
        }
    }
    if cur.peek().is_some() {
        return cur.err("trailing input");
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_indexed_variables() {
        let t = parse_polynomial("2*x[3][1]*x[4][1] + 2*x[6][1]").unwrap();
        assert_eq!(t.len(), 2);
        assert_eq!(t[0].0, Rational::from(2));
        assert_eq!(t[0].1, vec![("x[3][1]".to_string(), 1), ("x[4][1]".to_string(), 1)]);
    }

    #[test]
    fn parses_fractions_signs_and_powers() {
        let t = parse_polynomial("-1/2*x[1][1]^2 - pi + 3").unwrap();
        assert_eq!(t[0].0, Rational::new(-1, 2).unwrap());
        assert_eq!(t[0].1, vec![("x[1][1]".to_string(), 2)]);
        assert_eq!(t[1].0, Rational::from(-1));
        assert_eq!(t[2], (Rational::from(3), vec![]));
    }

    #[test]
    fn rejects_malformed_input() {
        for bad in ["", "x +", "2*", "x[1", "1/0*x", "x y", "2*3*x", "x^"] {
            assert!(matches!(parse_polynomial(bad), Err(PolyError::Parse { .. })), "{bad}");
        }
    }
}
