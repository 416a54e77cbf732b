//! A small reader for differential polynomials written in conventional notation.
//!
//! Accepted syntax: `+ - * / ^`, juxtaposition as multiplication, parentheses or
//! brackets, integers, `i`, `tau`, `tau0`, the variables `q r qbar u w v s`,
//! derivatives as primes (`q''`), subscripts (`w_xx`) or `q^(4)`, and the functions
//! `d(·)` (total derivative), `conj(·)`, `re(·)`, `im(·)` and `abs2(·)`.
//! `conj` swaps `q` and `qbar` and conjugates coefficients.

use super::coeff::Param;
use super::monomial::Var;
use super::poly::DiffPolynomial;
use super::rational::{rat, GaussianRational};
use crate::error::AlgebraError;

/// Involution used by `conj`: `q ↔ q̄`, every other variable real.
pub fn nls_involution(v: Var) -> Var {
    match v {
        Var::Q => Var::QBar,
        Var::QBar => Var::Q,
        other => other,
    }
}

/// Parses an expression into a polynomial.
pub fn parse_poly(src: &str) -> Result<DiffPolynomial, AlgebraError> {
    let mut p = Parser { s: src.as_bytes(), pos: 0 };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos != p.s.len() {
        return Err(p.err("trailing input"));
    }
    Ok(e)
}

struct Parser<'a> {
    s: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err(&self, msg: &str) -> AlgebraError {
        AlgebraError::Parse { pos: self.pos, msg: msg.to_string() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && (self.s[self.pos] as char).is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.s.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<DiffPolynomial, AlgebraError> {
        let mut acc = if self.eat(b'-') { -self.term()? } else {
            self.eat(b'+');
            self.term()?
        };
        loop {
            if self.eat(b'+') {
                acc = &acc + &self.term()?;
            } else if self.eat(b'-') {
                acc = &acc - &self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn starts_factor(&mut self) -> bool {
        matches!(self.peek(), Some(c) if c.is_ascii_alphanumeric() || c == b'(' || c == b'[')
    }

    fn term(&mut self) -> Result<DiffPolynomial, AlgebraError> {
        let mut acc = self.power()?;
        loop {
            if self.eat(b'*') {
                acc = &acc * &self.power()?;
            } else if self.eat(b'/') {
                let d = self.number()?;
                acc = acc.scale(&GaussianRational::from_ratio(1, d));
            } else if self.starts_factor() {
                acc = &acc * &self.power()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn power(&mut self) -> Result<DiffPolynomial, AlgebraError> {
        let base = self.atom()?;
        if self.eat(b'^') {
            let k = self.number()?;
            return Ok(base.pow(k as u32));
        }
        Ok(base)
    }

    fn number(&mut self) -> Result<i64, AlgebraError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected integer"));
        }
        std::str::from_utf8(&self.s[start..self.pos]).unwrap().parse().map_err(|_| self.err("integer overflow"))
    }

    fn ident(&mut self) -> String {
        let start = self.pos;
        while self.pos < self.s.len() && (self.s[self.pos].is_ascii_alphanumeric()) {
            self.pos += 1;
        }
        std::str::from_utf8(&self.s[start..self.pos]).unwrap().to_string()
    }

    fn derivative_suffix(&mut self) -> Result<u16, AlgebraError> {
        let mut k = 0u16;
        if self.pos < self.s.len() && self.s[self.pos] == b'_' {
            self.pos += 1;
            while self.pos < self.s.len() && self.s[self.pos] == b'x' {
                k += 1;
                self.pos += 1;
            }
            if k == 0 {
                return Err(self.err("expected x after _"));
            }
            return Ok(k);
        }
        while self.pos < self.s.len() && self.s[self.pos] == b'\'' {
            k += 1;
            self.pos += 1;
        }
        // q^(4)
        if k == 0 && self.s[self.pos..].starts_with(b"^(") {
            self.pos += 2;
            let n = self.number()?;
            if !self.eat(b')') {
                return Err(self.err("expected )"));
            }
            k = n as u16;
        }
        Ok(k)
    }

    fn paren(&mut self) -> Result<DiffPolynomial, AlgebraError> {
        let close = if self.eat(b'(') {
            b')'
        } else if self.eat(b'[') {
            b']'
        } else {
            return Err(self.err("expected ( or ["));
        };
        let e = self.expr()?;
        if !self.eat(close) {
            return Err(self.err("unbalanced parenthesis"));
        }
        Ok(e)
    }

    fn atom(&mut self) -> Result<DiffPolynomial, AlgebraError> {
        let c = self.peek().ok_or_else(|| self.err("unexpected end"))?;
        if c == b'(' || c == b'[' {
            let e = self.paren()?;
            let k = self.derivative_suffix()?;
            return Ok(e.x_derivative_n(k as usize));
        }
        if c.is_ascii_digit() {
            let n = self.number()?;
            return Ok(DiffPolynomial::constant(GaussianRational::real(rat(n, 1))));
        }
        if !c.is_ascii_alphabetic() {
            return Err(self.err("unexpected character"));
        }
        let id = self.ident();
        match id.as_str() {
            "i" => Ok(DiffPolynomial::constant(GaussianRational::i())),
            "tau" => Ok(DiffPolynomial::param(Param::Tau)),
            "tau0" => Ok(DiffPolynomial::param(Param::Tau0)),
            "d" => Ok(self.paren()?.x_derivative()),
            "conj" => Ok(self.paren()?.conjugate_with(nls_involution)),
            "re" => {
                let e = self.paren()?;
                Ok((&e + &e.conjugate_with(nls_involution)).scale(&GaussianRational::from_ratio(1, 2)))
            }
            "im" => {
                let e = self.paren()?;
                let diff = &e - &e.conjugate_with(nls_involution);
                Ok(diff.scale(&GaussianRational::new(rat(0, 1), rat(-1, 2))))
            }
            "abs2" => {
                let e = self.paren()?;
                Ok(&e * &e.conjugate_with(nls_involution))
            }
            name => {
                let v = Var::from_name(name).ok_or_else(|| self.err(&format!("unknown identifier {name}")))?;
                let k = self.derivative_suffix()?;
                if v == Var::S && k > 0 {
                    return Ok(DiffPolynomial::var(Var::S).x_derivative_n(k as usize));
                }
                Ok(DiffPolynomial::deriv_var(v, k))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_tabulated_notation() {
        let a = parse_poly("i q'' - 2 i q^2 r").unwrap();
        let b = parse_poly("i*q_xx - 2*i*q*q*r").unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 2);
    }

    #[test]
    fn derivative_notations_agree() {
        assert_eq!(parse_poly("q^(4)").unwrap(), parse_poly("q''''").unwrap());
        assert_eq!(parse_poly("d(q r)").unwrap(), parse_poly("q' r + q r'").unwrap());
        assert_eq!(parse_poly("(q r)'").unwrap(), parse_poly("q' r + q r'").unwrap());
    }

    #[test]
    fn rationals_and_params() {
        let p = parse_poly("3/2 tau0 w^2 - tau^2/4").unwrap();
        assert_eq!(p.len(), 2);
    }

    #[test]
    fn real_and_imaginary_parts() {
        // im(q qbar') + im(qbar q') = 0.
        let p = parse_poly("im(q qbar') + im(qbar q')").unwrap();
        assert!(p.is_zero());
        let a = parse_poly("abs2(q)").unwrap();
        assert_eq!(a, parse_poly("q qbar").unwrap());
    }
}
