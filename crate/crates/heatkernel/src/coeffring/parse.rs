//! Text format for coefficient-ring values.
//!
//! The machine format is what `Display` on `ParamScalar` emits and what the
//! golden-value files store:
//!
//! ```text
//! poly        := ['-'] term (('+'|'-') term)*
//! term        := factor ('*' factor)*
//! factor      := rational | ('a'|'n') ['^' uint] | '(' poly ')'
//! rational    := uint ['/' uint]
//! ratfn       := '(' poly ')' '/' '(' poly ')'
//! paramscalar := psitem ('+' psitem)*
//! psitem      := 'pw[' int ',' int ']' ratfn | ratfn
//! n4scalar    := n4item ('+' n4item)*
//! n4item      := 'L*' ratfn | ratfn
//! ```
//!
//! Whitespace is permitted between any two tokens. Signs of rational-function
//! values ride inside the numerator polynomial.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::error::{CoeffError, Result};
use super::n4::N4Scalar;
use super::param::ParamScalar;
use super::poly::{Poly2, Q};
use super::ratfn::RationalFn;

pub fn parse_poly(s: &str) -> Result<Poly2> {
    let mut c = Cursor::new(s);
    let p = c.poly()?;
    c.finish()?;
    Ok(p)
}

pub fn parse_ratfn(s: &str) -> Result<RationalFn> {
    let mut c = Cursor::new(s);
    let r = c.ratfn()?;
    c.finish()?;
    Ok(r)
}

pub fn parse_param_scalar(s: &str) -> Result<ParamScalar> {
    let mut c = Cursor::new(s);
    let mut out = c.ps_item()?;
    loop {
        c.skip_ws();
        if c.eat('+') {
            let item = c.ps_item()?;
            out = out.add(&item);
        } else {
            break;
        }
    }
    c.finish()?;
    Ok(out)
}

pub fn parse_n4(s: &str) -> Result<N4Scalar> {
    let mut c = Cursor::new(s);
    let mut out = N4Scalar::zero();
    loop {
        c.skip_ws();
        let item = if c.eat_str("L*") {
            N4Scalar::new(RationalFn::zero(), c.ratfn()?)
        } else {
            N4Scalar::new(c.ratfn()?, RationalFn::zero())
        };
        out = out.add(&item);
        c.skip_ws();
        if !c.eat('+') {
            break;
        }
    }
    c.finish()?;
    Ok(out)
}

/// Machine rendering of an n = 4 limit value; inverse of [`parse_n4`].
pub fn n4_to_machine(v: &N4Scalar) -> String {
    let rat = v.rational_part();
    let log = v.log_part();
    if log.is_zero() {
        return format!("({})/({})", rat.num(), rat.den());
    }
    let log_s = format!("L*({})/({})", log.num(), log.den());
    if rat.is_zero() {
        log_s
    } else {
        format!("({})/({}) + {}", rat.num(), rat.den(), log_s)
    }
}

struct Cursor<'a> {
    s: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn new(s: &'a str) -> Self {
        Cursor { s, pos: 0 }
    }

    fn rest(&self) -> &'a str {
        &self.s[self.pos..]
    }

    fn err(&self, msg: &str) -> CoeffError {
        let at: String = self.rest().chars().take(24).collect();
        CoeffError::Parse {
            at: if at.is_empty() { "<end>".into() } else { at },
            msg: msg.into(),
        }
    }

    fn finish(&mut self) -> Result<()> {
        self.skip_ws();
        if self.pos != self.s.len() {
            return Err(self.err("trailing input"));
        }
        Ok(())
    }

    fn skip_ws(&mut self) {
        while self
            .rest()
            .chars()
            .next()
            .map(|c| c.is_whitespace())
            .unwrap_or(false)
        {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<char> {
        self.rest().chars().next()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn eat_str(&mut self, t: &str) -> bool {
        if self.rest().starts_with(t) {
            self.pos += t.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.err(&format!("expected `{}`", c)))
        }
    }

    fn uint_big(&mut self) -> Result<BigInt> {
        let start = self.pos;
        while self.peek().map(|c| c.is_ascii_digit()).unwrap_or(false) {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(self.err("expected a digit"));
        }
        self.s[start..self.pos]
            .parse::<BigInt>()
            .map_err(|e| self.err(&format!("bad integer: {e}")))
    }

    fn int_i64(&mut self) -> Result<i64> {
        self.skip_ws();
        let neg = self.eat('-');
        let v = self.uint_big()?;
        let v: i64 = i64::try_from(v).map_err(|_| self.err("integer out of range"))?;
        Ok(if neg { -v } else { v })
    }

    /// rational := uint ['/' uint]  (sign handled by the caller)
    fn rational(&mut self) -> Result<Q> {
        let num = self.uint_big()?;
        if self.eat('/') {
            let den = self.uint_big()?;
            if den.is_zero() {
                return Err(self.err("zero denominator"));
            }
            Ok(Q::new(num, den))
        } else {
            Ok(Q::from_integer(num))
        }
    }

    fn varpow(&mut self) -> Result<Poly2> {
        let var = match self.peek() {
            Some('a') => {
                self.pos += 1;
                true
            }
            Some('n') => {
                self.pos += 1;
                false
            }
            _ => return Err(self.err("expected `a` or `n`")),
        };
        let exp = if self.eat('^') {
            let e = self.uint_big()?;
            u32::try_from(e).map_err(|_| self.err("exponent out of range"))?
        } else {
            1
        };
        Ok(if var {
            Poly2::monomial(Q::one(), exp, 0)
        } else {
            Poly2::monomial(Q::one(), 0, exp)
        })
    }

    fn factor(&mut self) -> Result<Poly2> {
        self.skip_ws();
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let p = self.poly()?;
                self.skip_ws();
                self.expect(')')?;
                if self.eat('^') {
                    let e = self.uint_big()?;
                    let e = u32::try_from(e)
                        .map_err(|_| self.err("exponent out of range"))?;
                    Ok(p.pow(e))
                } else {
                    Ok(p)
                }
            }
            Some(c) if c.is_ascii_digit() => Ok(Poly2::constant(self.rational()?)),
            _ => self.varpow(),
        }
    }

    fn term(&mut self) -> Result<Poly2> {
        let mut p = self.factor()?;
        loop {
            self.skip_ws();
            if self.eat('*') {
                let f = self.factor()?;
                p = p.mul(&f);
            } else {
                break;
            }
        }
        Ok(p)
    }

    fn poly(&mut self) -> Result<Poly2> {
        self.skip_ws();
        let mut neg = self.eat('-');
        let mut acc = Poly2::zero();
        loop {
            let t = self.term()?;
            acc = if neg { acc.sub(&t) } else { acc.add(&t) };
            self.skip_ws();
            if self.eat('+') {
                neg = false;
            } else if self.peek() == Some('-') {
                // subtraction separator only; a ')' or end stops the loop
                self.pos += 1;
                neg = true;
            } else {
                break;
            }
        }
        Ok(acc)
    }

    fn ratfn(&mut self) -> Result<RationalFn> {
        self.skip_ws();
        self.expect('(')?;
        let num = self.poly()?;
        self.skip_ws();
        self.expect(')')?;
        self.skip_ws();
        self.expect('/')?;
        self.skip_ws();
        self.expect('(')?;
        let den = self.poly()?;
        self.skip_ws();
        self.expect(')')?;
        RationalFn::new(num, den)
    }

    fn ps_item(&mut self) -> Result<ParamScalar> {
        self.skip_ws();
        if self.eat_str("pw[") {
            let q = self.int_i64()?;
            self.skip_ws();
            self.expect(',')?;
            let c = self.int_i64()?;
            self.skip_ws();
            self.expect(']')?;
            let r = self.ratfn()?;
            Ok(ParamScalar::sector(r, q, c))
        } else {
            Ok(ParamScalar::from_ratfn(self.ratfn()?))
        }
    }
}
