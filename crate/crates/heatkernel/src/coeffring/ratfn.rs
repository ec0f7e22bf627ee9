//! Rational functions in the gauge parameter `a` and the dimension `n`.
//!
//! Canonical form: numerator and denominator share no polynomial factor, the
//! denominator has coprime integer coefficients, and its leading coefficient
//! (graded lex, a ≺ n) is positive. Equality of canonical forms is therefore
//! equality of rational functions.

use std::fmt;

use num_traits::{One, Zero};

use super::error::{CoeffError, Result};
use super::poly::{q, qi, Poly2, Q};

#[derive(Clone, PartialEq, Eq)]
pub struct RationalFn {
    num: Poly2,
    den: Poly2,
}

impl RationalFn {
    pub fn new(num: Poly2, den: Poly2) -> Result<Self> {
        if den.is_zero() {
            return Err(CoeffError::DivisionByZero);
        }
        let mut r = RationalFn { num, den };
        r.reduce();
        Ok(r)
    }

    pub fn from_poly(p: Poly2) -> Self {
        RationalFn {
            num: p,
            den: Poly2::one(),
        }
    }

    pub fn zero() -> Self {
        Self::from_poly(Poly2::zero())
    }

    pub fn one() -> Self {
        Self::from_poly(Poly2::one())
    }

    pub fn from_q(c: Q) -> Self {
        Self::from_poly(Poly2::constant(c))
    }

    pub fn from_int_ratio(num: i64, den: i64) -> Self {
        Self::from_q(q(num, den))
    }

    pub fn num(&self) -> &Poly2 {
        &self.num
    }

    pub fn den(&self) -> &Poly2 {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    /// True when neither `a` nor `n` occurs.
    pub fn is_constant(&self) -> bool {
        self.num.is_constant() && self.den.is_constant()
    }

    pub fn as_q(&self) -> Option<Q> {
        match (self.num.as_constant(), self.den.as_constant()) {
            (Some(n), Some(d)) => Some(n / d),
            _ => None,
        }
    }

    /// True when the variable `a` does not occur.
    pub fn is_a_free(&self) -> bool {
        self.num.deg_a() == 0 && self.den.deg_a() == 0
    }

    fn reduce(&mut self) {
        if self.num.is_zero() {
            self.den = Poly2::one();
            return;
        }
        let g = self.num.gcd(&self.den);
        if !g.is_one() {
            self.num = self.num.exact_div(&g).expect("gcd divides numerator");
            self.den = self.den.exact_div(&g).expect("gcd divides denominator");
        }
        let (scale, prim) = self.den.primitive();
        self.den = prim;
        self.num = self.num.scale(&(Q::one() / scale));
    }

    pub fn add(&self, other: &RationalFn) -> RationalFn {
        let num = self
            .num
            .mul(&other.den)
            .add(&other.num.mul(&self.den));
        let den = self.den.mul(&other.den);
        RationalFn::new(num, den).expect("nonzero denominators")
    }

    pub fn sub(&self, other: &RationalFn) -> RationalFn {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> RationalFn {
        RationalFn {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn mul(&self, other: &RationalFn) -> RationalFn {
        RationalFn::new(self.num.mul(&other.num), self.den.mul(&other.den))
            .expect("nonzero denominators")
    }

    pub fn scale(&self, c: &Q) -> RationalFn {
        RationalFn {
            num: self.num.scale(c),
            den: if c.is_zero() {
                Poly2::one()
            } else {
                self.den.clone()
            },
        }
    }

    pub fn inv(&self) -> Result<RationalFn> {
        RationalFn::new(self.den.clone(), self.num.clone())
    }

    pub fn div(&self, other: &RationalFn) -> Result<RationalFn> {
        if other.is_zero() {
            return Err(CoeffError::DivisionByZero);
        }
        RationalFn::new(self.num.mul(&other.den), self.den.mul(&other.num))
    }

    pub fn mul_poly(&self, p: &Poly2) -> RationalFn {
        RationalFn::new(self.num.mul(p), self.den.clone()).expect("nonzero denominator")
    }

    pub fn div_poly(&self, p: &Poly2) -> Result<RationalFn> {
        RationalFn::new(self.num.clone(), self.den.mul(p))
    }

    pub fn pow(&self, k: u32) -> RationalFn {
        RationalFn {
            num: self.num.pow(k),
            den: self.den.pow(k),
        }
    }

    pub fn eval(&self, a: &Q, n: &Q) -> Result<Q> {
        let d = self.den.eval(a, n);
        if d.is_zero() {
            return Err(CoeffError::EvalAtPole {
                a: a.to_string(),
                n: n.to_string(),
            });
        }
        Ok(self.num.eval(a, n) / d)
    }

    /// Substitutes a concrete rational for `n`, leaving a rational function
    /// of `a` alone. Errors if the denominator vanishes identically there.
    pub fn subst_n(&self, n: &Q) -> Result<RationalFn> {
        RationalFn::new(self.num.subst_n(n), self.den.subst_n(n))
    }

    /// Laurent data at n = 4: writes self(a, 4+u) = res(a)/u + val(a) + O(u).
    ///
    /// Only poles of order at most one in u are supported; anything deeper is
    /// reported as an error. The returned functions involve `a` only.
    pub fn laurent_n4(&self) -> Result<(RationalFn, RationalFn)> {
        if self.is_zero() {
            return Ok((RationalFn::zero(), RationalFn::zero()));
        }
        let four = qi(4);
        let num_u = self.num.shift_n(&four);
        let den_u = self.den.shift_n(&four);
        let (nv, num_parts) = u_valuation_series(&num_u, 2);
        let (dv, den_parts) = u_valuation_series(&den_u, 2);
        let v = dv as i64 - nv as i64;
        if v > 1 {
            return Err(CoeffError::PoleTooDeep { order: v as u32 });
        }
        let n0 = &num_parts[0];
        let n1 = &num_parts[1];
        let d0 = &den_parts[0];
        let d1 = &den_parts[1];
        match v {
            1 => {
                // N(a,u) / (u D(a,u)) = N0/(u D0) + (N1 D0 - N0 D1)/D0^2 + O(u)
                let res = RationalFn::new(n0.clone(), d0.clone())?;
                let val = RationalFn::new(
                    n1.mul(d0).sub(&n0.mul(d1)),
                    d0.mul(d0),
                )?;
                Ok((res, val))
            }
            0 => {
                let val = RationalFn::new(n0.clone(), d0.clone())?;
                Ok((RationalFn::zero(), val))
            }
            _ => Ok((RationalFn::zero(), RationalFn::zero())),
        }
    }

    /// Power-series expansion around a = 0 with rational-function-in-n
    /// coefficients: self = Σ_j coeff_j · a^j for j from the a-valuation up
    /// to `max_order` inclusive. Returned as (exponent, coefficient) pairs in
    /// increasing exponent order; exponents may be negative when the
    /// denominator vanishes at a = 0.
    pub fn series_in_a(&self, max_order: i64) -> Result<Vec<(i64, RationalFn)>> {
        if self.is_zero() {
            return Ok(Vec::new());
        }
        let (nv, num_c) = a_coeff_list(&self.num);
        let (dv, den_c) = a_coeff_list(&self.den);
        let lead = nv as i64 - dv as i64;
        if lead > max_order {
            return Ok(Vec::new());
        }
        let len = (max_order - lead + 1) as usize;
        // Power-series division of num by den, both now with nonzero
        // constant term d0 in ℚ[n].
        let d0 = &den_c[0];
        let mut out: Vec<(i64, RationalFn)> = Vec::with_capacity(len);
        let mut quots: Vec<RationalFn> = Vec::with_capacity(len);
        for k in 0..len {
            let mut acc = if k < num_c.len() {
                RationalFn::from_poly(num_c[k].clone())
            } else {
                RationalFn::zero()
            };
            for j in 1..=k.min(den_c.len() - 1) {
                acc = acc.sub(&quots[k - j].mul_poly(&den_c[j]));
            }
            let qk = acc.div_poly(d0)?;
            quots.push(qk.clone());
            out.push((lead + k as i64, qk));
        }
        Ok(out)
    }

    /// The multiplicity of (1-a) in the denominator minus its multiplicity in
    /// the numerator (positive means a pole at a = 1).
    pub fn pole_order_at_a1(&self) -> i64 {
        let oma = Poly2::one_minus_a();
        let (kn, _) = self.num.factor_multiplicity(&oma);
        let (kd, _) = self.den.factor_multiplicity(&oma);
        kd as i64 - kn as i64
    }

    /// Multiplies by (1-a)^k for k of either sign, exactly.
    pub fn mul_one_minus_a_pow(&self, k: i64) -> RationalFn {
        if k == 0 || self.is_zero() {
            return self.clone();
        }
        let oma = Poly2::one_minus_a().pow(k.unsigned_abs() as u32);
        if k > 0 {
            self.mul_poly(&oma)
        } else {
            self.div_poly(&oma).expect("nonzero")
        }
    }
}

/// Strips the u-valuation (second exponent) and returns the first `parts`
/// coefficients of the remaining series in u: p = u^v (c0 + c1 u + ...),
/// with c0 a nonzero polynomial in a. Requires p nonzero.
fn u_valuation_series(p: &Poly2, parts: usize) -> (u32, Vec<Poly2>) {
    let v = p.terms().map(|(e, _)| e.1).min().expect("nonzero polynomial");
    let mut out = vec![Poly2::zero(); parts];
    for (e, c) in p.terms() {
        let k = (e.1 - v) as usize;
        if k < parts {
            out[k] = out[k].add(&Poly2::monomial(c.clone(), e.0, 0));
        }
    }
    (v, out)
}

/// Strips the a-valuation and returns ALL remaining coefficients as
/// polynomials in n: p = a^v (c0 + c1 a + ...), c0 ≠ 0. Requires p nonzero.
fn a_coeff_list(p: &Poly2) -> (u32, Vec<Poly2>) {
    let v = p.terms().map(|(e, _)| e.0).min().expect("nonzero polynomial");
    let top = p.deg_a() - v;
    let mut out = vec![Poly2::zero(); (top + 1) as usize];
    for (e, c) in p.terms() {
        let k = (e.0 - v) as usize;
        out[k] = out[k].add(&Poly2::monomial(c.clone(), 0, e.1));
    }
    (v, out)
}

impl fmt::Display for RationalFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            if self.num.num_terms() > 1 {
                write!(f, "({})", self.num)
            } else {
                write!(f, "{}", self.num)
            }
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}

impl fmt::Debug for RationalFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
