//! Parser for the function grammar used by scenarios and the CLI.
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := '-' unary | primary
//! primary := number ['i'] | 'i' | 'z' | '(' expr ')'
//!          | const(c) | poly(c0,c1,...) | sigma(a) | testfn(j,a)
//!          | compose(f,g) | dilate(r,f) | deriv(m,f)
//! ```
//!
//! Complex literals inside `const`, `poly`, `sigma` and `testfn` take the form
//! `x`, `yi` or `x+yi` (with optional signs).

use num_complex::Complex;

use super::expr::{AnalyticFn, Expr, C64};
use crate::error::{Error, Result};

/// Parses an expression such as `compose(sigma(0.5), dilate(0.5,z)) + 2*z`.
pub fn parse_fn(src: &str) -> Result<AnalyticFn> {
    let mut p = Parser { src, pos: 0 };
    let f = p.expr()?;
    p.skip_ws();
    if p.pos != src.len() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(f)
}

/// Parses a standalone complex literal.
pub fn parse_complex(src: &str) -> Result<C64> {
    let mut p = Parser { src, pos: 0 };
    let c = p.complex_literal()?;
    p.skip_ws();
    if p.pos != src.len() {
        return Err(p.err("unexpected trailing input after complex literal"));
    }
    Ok(c)
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err(&self, msg: impl Into<String>) -> Error {
        Error::Parse {
            pos: self.pos,
            msg: msg.into(),
        }
    }

    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn peek(&self) -> Option<char> {
        self.rest().chars().next()
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn eat(&mut self, ch: char) -> bool {
        self.skip_ws();
        if self.peek() == Some(ch) {
            self.pos += ch.len_utf8();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, ch: char) -> Result<()> {
        if self.eat(ch) {
            Ok(())
        } else {
            Err(self.err(format!("expected `{ch}`")))
        }
    }

    fn expr(&mut self) -> Result<AnalyticFn> {
        let mut lhs = self.term()?;
        loop {
            if self.eat('+') {
                let rhs = self.term()?;
                lhs = fold_sum(lhs, rhs, 1.0);
            } else if self.eat('-') {
                let rhs = self.term()?;
                lhs = fold_sum(lhs, rhs, -1.0);
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<AnalyticFn> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat('*') {
                let rhs = self.unary()?;
                lhs = match (lhs.expr(), rhs.expr()) {
                    (Expr::Const(a), Expr::Const(b)) => AnalyticFn::constant(a * b),
                    _ => lhs * rhs,
                };
            } else if self.eat('/') {
                let rhs = self.unary()?;
                lhs = lhs / rhs;
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<AnalyticFn> {
        if self.eat('-') {
            let inner = self.unary()?;
            return Ok(match inner.expr() {
                Expr::Const(c) => AnalyticFn::constant(-c),
                _ => -inner,
            });
        }
        self.primary()
    }

    fn ident(&mut self) -> &'a str {
        self.skip_ws();
        let start = self.pos;
        while let Some(c) = self.peek() {
            if c.is_ascii_alphanumeric() || c == '_' {
                self.pos += 1;
            } else {
                break;
            }
        }
        &self.src[start..self.pos]
    }

    fn primary(&mut self) -> Result<AnalyticFn> {
        self.skip_ws();
        match self.peek() {
            None => Err(self.err("unexpected end of input")),
            Some('(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == '.' => {
                let x = self.number()?;
                if self.peek() == Some('i') && !self.ident_continues_after(1) {
                    self.pos += 1;
                    Ok(AnalyticFn::constant(Complex::new(0.0, x)))
                } else {
                    Ok(AnalyticFn::real(x))
                }
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                let name = self.ident();
                match name {
                    "z" => Ok(AnalyticFn::var()),
                    "i" => Ok(AnalyticFn::constant(Complex::new(0.0, 1.0))),
                    _ => self.call(name, start),
                }
            }
            Some(c) => Err(self.err(format!("unexpected character `{c}`"))),
        }
    }

    fn ident_continues_after(&self, n: usize) -> bool {
        self.rest()[n..]
            .chars()
            .next()
            .is_some_and(|c| c.is_ascii_alphanumeric() || c == '_')
    }

    fn call(&mut self, name: &str, start: usize) -> Result<AnalyticFn> {
        if !self.eat('(') {
            self.pos = start;
            return Err(self.err(format!("unknown identifier `{name}`")));
        }
        let f = match name {
            "const" => AnalyticFn::constant(self.complex_literal()?),
            "poly" => {
                let mut cs = vec![self.complex_literal()?];
                while self.eat(',') {
                    cs.push(self.complex_literal()?);
                }
                AnalyticFn::poly(cs)?
            }
            "sigma" => {
                let at = self.pos;
                let a = self.complex_literal()?;
                AnalyticFn::sigma(a).map_err(|e| Error::Parse {
                    pos: at,
                    msg: e.to_string(),
                })?
            }
            "testfn" => {
                let j = self.integer()?;
                self.expect(',')?;
                let at = self.pos;
                let a = self.complex_literal()?;
                AnalyticFn::test_fn(j, a).map_err(|e| Error::Parse {
                    pos: at,
                    msg: e.to_string(),
                })?
            }
            "compose" => {
                let outer = self.expr()?;
                self.expect(',')?;
                let inner = self.expr()?;
                AnalyticFn::compose(outer, inner)
            }
            "dilate" => {
                let at = self.pos;
                let r = self.signed_number()?;
                self.expect(',')?;
                let f = self.expr()?;
                AnalyticFn::dilate(r, f).map_err(|e| Error::Parse {
                    pos: at,
                    msg: e.to_string(),
                })?
            }
            "deriv" => {
                let m = self.integer()?;
                self.expect(',')?;
                AnalyticFn::derivative(m, self.expr()?)
            }
            other => {
                self.pos = start;
                return Err(self.err(format!("unknown function `{other}`")));
            }
        };
        self.expect(')')?;
        Ok(f)
    }

    fn integer(&mut self) -> Result<u32> {
        self.skip_ws();
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        self.src[start..self.pos].parse().map_err(|_| Error::Parse {
            pos: start,
            msg: "expected a non-negative integer".into(),
        })
    }

    fn number(&mut self) -> Result<f64> {
        self.skip_ws();
        let start = self.pos;
        let bytes = self.src.as_bytes();
        let mut i = self.pos;
        while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
            i += 1;
        }
        if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
            let mut k = i + 1;
            if k < bytes.len() && (bytes[k] == b'+' || bytes[k] == b'-') {
                k += 1;
            }
            if k < bytes.len() && bytes[k].is_ascii_digit() {
                while k < bytes.len() && bytes[k].is_ascii_digit() {
                    k += 1;
                }
                i = k;
            }
        }
        self.pos = i;
        self.src[start..i].parse().map_err(|_| Error::Parse {
            pos: start,
            msg: "expected a number".into(),
        })
    }

    fn signed_number(&mut self) -> Result<f64> {
        let neg = if self.eat('-') {
            true
        } else {
            self.eat('+');
            false
        };
        let x = self.number()?;
        Ok(if neg { -x } else { x })
    }

    /// `x`, `yi`, `i`, `x+yi`, `x-yi`, each with an optional leading sign.
    fn complex_literal(&mut self) -> Result<C64> {
        self.skip_ws();
        let neg = if self.eat('-') {
            true
        } else {
            self.eat('+');
            false
        };
        let sign = if neg { -1.0 } else { 1.0 };
        self.skip_ws();
        if self.peek() == Some('i') {
            self.pos += 1;
            return Ok(Complex::new(0.0, sign));
        }
        let x = sign * self.number()?;
        if self.peek() == Some('i') {
            self.pos += 1;
            return Ok(Complex::new(0.0, x));
        }
        let save = self.pos;
        self.skip_ws();
        let im_sign = match self.peek() {
            Some('+') => 1.0,
            Some('-') => -1.0,
            _ => {
                self.pos = save;
                return Ok(Complex::new(x, 0.0));
            }
        };
        self.pos += 1;
        self.skip_ws();
        let y = if self.peek() == Some('i') {
            1.0
        } else {
            match self.number() {
                Ok(y) => y,
                Err(_) => {
                    self.pos = save;
                    return Ok(Complex::new(x, 0.0));
                }
            }
        };
        if self.peek() != Some('i') {
            return Err(self.err("expected `i` to close the imaginary part"));
        }
        self.pos += 1;
        Ok(Complex::new(x, im_sign * y))
    }
}

fn fold_sum(lhs: AnalyticFn, rhs: AnalyticFn, sign: f64) -> AnalyticFn {
    match (lhs.expr(), rhs.expr()) {
        (Expr::Const(a), Expr::Const(b)) => AnalyticFn::constant(a + b * sign),
        _ if sign > 0.0 => lhs + rhs,
        _ => lhs - rhs,
    }
}
