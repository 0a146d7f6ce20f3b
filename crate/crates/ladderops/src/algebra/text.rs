//! Plain-text round-trip syntax for operator expressions.
//!
//! Grammar (whitespace allowed between tokens):
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := factor ('*' factor)*
//! factor  := complex | real | xfactor | tfactor
//! complex := '(' real ('+' | '-') real 'i' ')'
//! xfactor := 'x' uint ('^' uint)?
//! tfactor := 'T' uint ('^' int)?
//! ```
//!
//! `x1` is the position operator of mode 1, `T3^-2` a translation power.
//! Canonical output always spells the coefficient in the parenthesized
//! complex form and omits unit exponents, e.g. `(2+0i)*x1*T1^-1*T3`, and
//! parses back to the identical expression.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use super::{ModeIndex, NormalTerm, OperatorExpr, ShiftWord, XMonomial};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("parse error at byte {at}: {msg}")]
pub struct ParseError {
    pub at: usize,
    pub msg: String,
}

impl fmt::Display for OperatorExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms().is_empty() {
            return write!(f, "0");
        }
        for (i, term) in self.terms().iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            let (re, im) = (term.coeff.re, term.coeff.im);
            if im >= 0.0 {
                write!(f, "({re}+{im}i)")?;
            } else {
                write!(f, "({re}-{}i)", -im)?;
            }
            for (mode, n) in term.xpart.powers() {
                if n == 1 {
                    write!(f, "*x{mode}")?;
                } else {
                    write!(f, "*x{mode}^{n}")?;
                }
            }
            for (mode, m) in term.shift.exponents() {
                if m == 1 {
                    write!(f, "*T{mode}")?;
                } else {
                    write!(f, "*T{mode}^{m}")?;
                }
            }
        }
        Ok(())
    }
}

impl FromStr for OperatorExpr {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Parser::new(s).expr()
    }
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Self {
        Self { src, pos: 0 }
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError { at: self.pos, msg: msg.into() })
    }

    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn skip_ws(&mut self) {
        let trimmed = self.rest().trim_start();
        self.pos = self.src.len() - trimmed.len();
    }

    fn eat(&mut self, token: char) -> bool {
        self.skip_ws();
        if self.rest().starts_with(token) {
            self.pos += token.len_utf8();
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<OperatorExpr, ParseError> {
        let mut acc = OperatorExpr::zero();
        let mut sign = 1.0;
        if self.eat('-') {
            sign = -1.0;
        } else {
            let _ = self.eat('+');
        }
        loop {
            let term = self.term()?.scale(Complex64::new(sign, 0.0));
            acc = &acc + &term;
            self.skip_ws();
            if self.eat('+') {
                sign = 1.0;
            } else if self.eat('-') {
                sign = -1.0;
            } else {
                break;
            }
        }
        self.skip_ws();
        if !self.rest().is_empty() {
            return self.err("trailing input");
        }
        Ok(acc)
    }

    // Factors multiply as written, so `T1*x1` really is the reordered
    // `x1*T1 + T1`, not a normal term with the factors swapped.
    fn term(&mut self) -> Result<OperatorExpr, ParseError> {
        let mut acc = OperatorExpr::identity();
        loop {
            self.skip_ws();
            match self.rest().chars().next() {
                Some('(') => {
                    let c = self.complex()?;
                    acc = acc.scale(c);
                }
                Some('x') => {
                    let (mode, n) = self.indexed('x')?;
                    if n < 0 {
                        return self.err("negative power on x");
                    }
                    let f = OperatorExpr::from_terms([NormalTerm::new(
                        Complex64::new(1.0, 0.0),
                        XMonomial::single(mode, n as u32),
                        ShiftWord::identity(),
                    )]);
                    acc = acc.mul(&f);
                }
                Some('T') => {
                    let (mode, m) = self.indexed('T')?;
                    acc = acc.mul(&super::shift_op(mode, m));
                }
                Some(ch) if ch.is_ascii_digit() || ch == '.' => {
                    let v = self.real()?;
                    acc = acc.scale(Complex64::new(v, 0.0));
                }
                _ => return self.err("expected a coefficient, xJ, or TJ factor"),
            }
            if !self.eat('*') {
                break;
            }
        }
        Ok(acc)
    }

    fn complex(&mut self) -> Result<Complex64, ParseError> {
        if !self.eat('(') {
            return self.err("expected '('");
        }
        self.skip_ws();
        let re = self.signed_real()?;
        self.skip_ws();
        let im_sign = if self.eat('+') {
            1.0
        } else if self.eat('-') {
            -1.0
        } else {
            return self.err("expected '+' or '-' before imaginary part");
        };
        self.skip_ws();
        let im = self.real()?;
        if !self.eat('i') {
            return self.err("expected 'i'");
        }
        if !self.eat(')') {
            return self.err("expected ')'");
        }
        Ok(Complex64::new(re, im_sign * im))
    }

    fn signed_real(&mut self) -> Result<f64, ParseError> {
        let neg = self.eat('-');
        let v = self.real()?;
        Ok(if neg { -v } else { v })
    }

    fn real(&mut self) -> Result<f64, ParseError> {
        self.skip_ws();
        let rest = self.rest();
        let mut len = 0;
        let bytes = rest.as_bytes();
        while len < bytes.len() && (bytes[len].is_ascii_digit() || bytes[len] == b'.') {
            len += 1;
        }
        // optional exponent
        if len < bytes.len() && (bytes[len] == b'e' || bytes[len] == b'E') {
            let mut e = len + 1;
            if e < bytes.len() && (bytes[e] == b'+' || bytes[e] == b'-') {
                e += 1;
            }
            let digits = bytes[e..].iter().take_while(|b| b.is_ascii_digit()).count();
            if digits > 0 {
                len = e + digits;
            }
        }
        if len == 0 {
            return self.err("expected a number");
        }
        match rest[..len].parse::<f64>() {
            Ok(v) => {
                self.pos += len;
                Ok(v)
            }
            Err(_) => self.err(format!("invalid number `{}`", &rest[..len])),
        }
    }

    fn indexed(&mut self, head: char) -> Result<(ModeIndex, i32), ParseError> {
        if !self.eat(head) {
            return self.err(format!("expected '{head}'"));
        }
        let mode = self.uint()?;
        let exp = if self.eat('^') {
            self.skip_ws();
            let neg = self.eat('-');
            let v = self.uint()? as i64;
            let v = if neg { -v } else { v };
            i32::try_from(v).map_err(|_| ParseError {
                at: self.pos,
                msg: "exponent out of range".into(),
            })?
        } else {
            1
        };
        Ok((ModeIndex(mode), exp))
    }

    fn uint(&mut self) -> Result<u32, ParseError> {
        self.skip_ws();
        let digits: String = self.rest().chars().take_while(|c| c.is_ascii_digit()).collect();
        if digits.is_empty() {
            return self.err("expected digits");
        }
        self.pos += digits.len();
        digits
            .parse::<u32>()
            .map_err(|_| ParseError { at: self.pos, msg: "index out of range".into() })
    }
}
