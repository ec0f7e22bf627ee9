//! Scalars of the form Σ_q r_q(a, n) · (1-a)^(c_q - q·n/2).
//!
//! Every closed-form coefficient produced by the momentum integrals lives in
//! this ring: rational functions of the gauge parameter `a` and dimension `n`
//! mixed with powers of (1-a) whose exponents are affine in n. The integer
//! `q` indexes the n-dependent part of the exponent and the integer `c` its
//! constant part.
//!
//! Canonical form (enforced by every constructor and operation):
//! - sectors are keyed by q; a vanishing sector is absent;
//! - the q = 0 sector absorbs its (1-a)^c into the rational function
//!   (stored with c = 0);
//! - for q ≠ 0 the rational function carries no factor of (1-a) in either
//!   numerator or denominator — all such factors are moved into c.
//!
//! Distinct q-sectors are linearly independent over the rational functions,
//! so canonical forms are equal exactly when the scalars are equal.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use super::error::{CoeffError, Result};
use super::n4::N4Scalar;
use super::poly::{q as qq, qi, Poly2, Q};
use super::ratfn::RationalFn;

/// One sector: r(a, n) · (1-a)^(c - q·n/2) for the owning key q.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Sector {
    pub r: RationalFn,
    pub c: i64,
}

/// Element of the coefficient ring. See the module docs for the canonical
/// form invariants.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct ParamScalar {
    sectors: BTreeMap<i64, Sector>,
}

impl ParamScalar {
    pub fn zero() -> Self {
        ParamScalar::default()
    }

    pub fn one() -> Self {
        ParamScalar::from_ratfn(RationalFn::one())
    }

    pub fn from_q(c: Q) -> Self {
        ParamScalar::from_ratfn(RationalFn::from_q(c))
    }

    pub fn from_int_ratio(num: i64, den: i64) -> Self {
        ParamScalar::from_q(qq(num, den))
    }

    pub fn from_poly(p: Poly2) -> Self {
        ParamScalar::from_ratfn(RationalFn::from_poly(p))
    }

    pub fn from_ratfn(r: RationalFn) -> Self {
        ParamScalar::sector(r, 0, 0)
    }

    /// Builds r · (1-a)^(c - q·n/2) in canonical form.
    pub fn sector(r: RationalFn, q: i64, c: i64) -> Self {
        let mut out = ParamScalar::zero();
        out.insert_sector(q, Sector { r, c });
        out
    }

    /// The bare power (1-a)^(c - q·n/2).
    pub fn pw(q: i64, c: i64) -> Self {
        ParamScalar::sector(RationalFn::one(), q, c)
    }

    fn insert_sector(&mut self, q: i64, sec: Sector) {
        if sec.r.is_zero() {
            return;
        }
        let sec = normalize_sector(q, sec);
        match self.sectors.get_mut(&q) {
            Some(existing) => {
                let merged = merge_same_q(q, existing.clone(), sec);
                match merged {
                    Some(m) => *existing = m,
                    None => {
                        self.sectors.remove(&q);
                    }
                }
            }
            None => {
                self.sectors.insert(q, sec);
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.sectors.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.sectors.len() == 1
            && self
                .sectors
                .get(&0)
                .map(|s| s.r.is_one())
                .unwrap_or(false)
    }

    /// True when only the q = 0 sector is present (no n-dependent powers of
    /// (1-a)).
    pub fn is_plain(&self) -> bool {
        self.sectors.keys().all(|&q| q == 0)
    }

    /// The scalar as a plain rational function, when no q ≠ 0 sector exists.
    pub fn as_ratfn(&self) -> Option<RationalFn> {
        if self.is_zero() {
            return Some(RationalFn::zero());
        }
        if !self.is_plain() {
            return None;
        }
        Some(self.sectors[&0].r.clone())
    }

    /// True when the gauge parameter `a` occurs nowhere: all sectors are
    /// a-free rational functions and no genuine (1-a) power survives.
    pub fn is_a_free(&self) -> bool {
        self.sectors
            .iter()
            .all(|(&q, s)| q == 0 && s.r.is_a_free())
    }

    pub fn sectors(&self) -> impl Iterator<Item = (i64, &Sector)> {
        self.sectors.iter().map(|(&q, s)| (q, s))
    }

    pub fn num_sectors(&self) -> usize {
        self.sectors.len()
    }

    pub fn add(&self, other: &ParamScalar) -> ParamScalar {
        let mut out = self.clone();
        for (&q, s) in &other.sectors {
            out.insert_sector(q, s.clone());
        }
        out
    }

    pub fn sub(&self, other: &ParamScalar) -> ParamScalar {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> ParamScalar {
        ParamScalar {
            sectors: self
                .sectors
                .iter()
                .map(|(&q, s)| {
                    (
                        q,
                        Sector {
                            r: s.r.neg(),
                            c: s.c,
                        },
                    )
                })
                .collect(),
        }
    }

    pub fn mul(&self, other: &ParamScalar) -> ParamScalar {
        let mut out = ParamScalar::zero();
        for (&q1, s1) in &self.sectors {
            for (&q2, s2) in &other.sectors {
                out.insert_sector(
                    q1 + q2,
                    Sector {
                        r: s1.r.mul(&s2.r),
                        c: s1.c + s2.c,
                    },
                );
            }
        }
        out
    }

    pub fn mul_ratfn(&self, r: &RationalFn) -> ParamScalar {
        self.mul(&ParamScalar::from_ratfn(r.clone()))
    }

    pub fn scale(&self, c: &Q) -> ParamScalar {
        if c.is_zero() {
            return ParamScalar::zero();
        }
        ParamScalar {
            sectors: self
                .sectors
                .iter()
                .map(|(&q, s)| {
                    (
                        q,
                        Sector {
                            r: s.r.scale(c),
                            c: s.c,
                        },
                    )
                })
                .collect(),
        }
    }

    /// Division, supported when the divisor consists of exactly one sector.
    /// (General division would need a sector-deconvolution; every divisor the
    /// pipeline produces — normalization prefactors, single golden entries —
    /// is single-sector.)
    pub fn div(&self, other: &ParamScalar) -> Result<ParamScalar> {
        if other.is_zero() {
            return Err(CoeffError::DivisionByZero);
        }
        if other.sectors.len() != 1 {
            return Err(CoeffError::NonSingleTermDivisor(other.to_string()));
        }
        let (&qd, sd) = other.sectors.iter().next().unwrap();
        let mut out = ParamScalar::zero();
        for (&q, s) in &self.sectors {
            out.insert_sector(
                q - qd,
                Sector {
                    r: s.r.div(&sd.r)?,
                    c: s.c - sd.c,
                },
            );
        }
        Ok(out)
    }

    /// Exact evaluation at rational (a, n). Requires q·n/2 to be an integer
    /// for every occupied sector (always true at even integer n) and a ≠ 1
    /// whenever a negative power of (1-a) appears.
    pub fn eval(&self, a: &Q, n: &Q) -> Result<Q> {
        let one_minus_a = Q::one() - a;
        let mut acc = Q::zero();
        for (&q, s) in &self.sectors {
            let shift = Q::from_integer(q.into()) * n / qi(2);
            if !shift.is_integer() {
                return Err(CoeffError::EvalAtPole {
                    a: a.to_string(),
                    n: format!("{} (fractional exponent of (1-a))", n),
                });
            }
            let e: i64 = s.c
                - i64::try_from(shift.to_integer()).map_err(|_| CoeffError::EvalAtPole {
                    a: a.to_string(),
                    n: n.to_string(),
                })?;
            acc += s.r.eval(a, n)? * q_pow(&one_minus_a, e, a, n)?;
        }
        Ok(acc)
    }

    /// Laurent data of the n -> 4 limit. The simple poles the sectors carry
    /// in (n - 4) must cancel in total; the surviving finite part is a
    /// rational function of `a` plus a rational multiple of ln(1-a)
    /// generated by expanding (1-a)^(-q·u/2) around u = n - 4 = 0.
    pub fn limit_n4(&self) -> Result<N4Scalar> {
        let mut residue = RationalFn::zero();
        let mut rat = RationalFn::zero();
        let mut log = RationalFn::zero();
        for (&q, s) in &self.sectors {
            let (res, val) = s.r.laurent_n4()?;
            let e = s.c - 2 * q;
            let res_e = res.mul_one_minus_a_pow(e);
            let val_e = val.mul_one_minus_a_pow(e);
            residue = residue.add(&res_e);
            rat = rat.add(&val_e);
            // (1-a)^(-q u/2) = 1 - (q/2) ln(1-a) u + O(u^2): the residue of
            // this sector feeds the log coefficient at order u^0.
            log = log.sub(&res_e.scale(&qq(q, 2)));
        }
        if !residue.is_zero() {
            return Err(CoeffError::DivergentAtN4 {
                residue: residue.to_string(),
            });
        }
        Ok(N4Scalar::new(rat, log))
    }

    /// Power-series expansion around a = 0. Coefficients are rational
    /// functions of n alone; exponents can start negative when sectors carry
    /// poles at a = 0 (the series of the full scalar is their sum, where such
    /// poles may cancel). Returns (exponent, coefficient) pairs in increasing
    /// exponent order covering every exponent from the lowest occurring up to
    /// `max_order`; absent orders in between are reported as zero.
    pub fn series_at_a0(&self, max_order: i64) -> Result<Vec<(i64, RationalFn)>> {
        let mut acc: BTreeMap<i64, RationalFn> = BTreeMap::new();
        for (&q, s) in &self.sectors {
            let r_series = s.r.series_in_a(max_order)?;
            if r_series.is_empty() {
                continue;
            }
            let min_exp = r_series[0].0;
            // binomial series of (1-a)^E with E = c - q n/2, affine in n
            let e_poly = Poly2::constant(qi(s.c)).sub(&Poly2::var_n().scale(&qq(q, 2)));
            let b_len = (max_order - min_exp + 1).max(0) as usize;
            let mut binom: Vec<Poly2> = Vec::with_capacity(b_len);
            binom.push(Poly2::one());
            for m in 1..b_len {
                // t_m = t_{m-1} · (m - 1 - E) / m
                let fac = Poly2::constant(qi(m as i64 - 1)).sub(&e_poly);
                let prev = binom[m - 1].mul(&fac).scale(&qq(1, m as i64));
                binom.push(prev);
            }
            for (j, rj) in &r_series {
                if rj.is_zero() {
                    continue;
                }
                for (m, bm) in binom.iter().enumerate() {
                    let total = j + m as i64;
                    if total > max_order {
                        break;
                    }
                    if bm.is_zero() {
                        continue;
                    }
                    let term = rj.mul_poly(bm);
                    acc.entry(total)
                        .and_modify(|v| *v = v.add(&term))
                        .or_insert(term);
                }
            }
        }
        let min = match acc.keys().next() {
            Some(&m) => m.min(0),
            None => return Ok(Vec::new()),
        };
        let mut out = Vec::new();
        for e in min..=max_order {
            let c = acc.remove(&e).unwrap_or_else(RationalFn::zero);
            out.push((e, c));
        }
        Ok(out)
    }
}

/// Rising factorial with half-dimension base: (n/2 + offset)(n/2 + offset + 1)
/// ··· over `len` consecutive factors, as a polynomial in n. `len` = 0 gives 1.
pub fn pochhammer_half_n(offset: Q, len: u32) -> Poly2 {
    let half_n = Poly2::var_n().scale(&qq(1, 2));
    let mut out = Poly2::one();
    for i in 0..len {
        let shift = offset.clone() + qi(i as i64);
        out = out.mul(&half_n.add(&Poly2::constant(shift)));
    }
    out
}

/// Integer-argument rising factorial (x)_k as an exact rational.
pub fn pochhammer_q(x: &Q, len: u32) -> Q {
    let mut out = Q::one();
    for i in 0..len {
        out *= x + qi(i as i64);
    }
    out
}

fn normalize_sector(q: i64, mut sec: Sector) -> Sector {
    if q == 0 {
        // fold the constant power into the rational function
        if sec.c != 0 {
            sec.r = sec.r.mul_one_minus_a_pow(sec.c);
            sec.c = 0;
        }
    } else {
        // pull every (1-a) factor out of the rational function
        let p = sec.r.pole_order_at_a1();
        if p != 0 {
            sec.r = sec.r.mul_one_minus_a_pow(p);
            sec.c -= p;
        }
    }
    sec
}

/// Adds two already-normalized sectors with the same q. Returns None when the
/// sum vanishes.
fn merge_same_q(q: i64, x: Sector, y: Sector) -> Option<Sector> {
    let c = x.c.min(y.c);
    let r = x
        .r
        .mul_one_minus_a_pow(x.c - c)
        .add(&y.r.mul_one_minus_a_pow(y.c - c));
    if r.is_zero() {
        return None;
    }
    Some(normalize_sector(q, Sector { r, c }))
}

/// base^e for rational base and signed integer exponent, with pole reporting.
fn q_pow(base: &Q, e: i64, a: &Q, n: &Q) -> Result<Q> {
    if e == 0 {
        return Ok(Q::one());
    }
    if base.is_zero() && e < 0 {
        return Err(CoeffError::EvalAtPole {
            a: a.to_string(),
            n: n.to_string(),
        });
    }
    let mut out = Q::one();
    for _ in 0..e.unsigned_abs() {
        out *= base;
    }
    if e < 0 {
        out = Q::one() / out;
    }
    Ok(out)
}

impl fmt::Display for ParamScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "(0)/(1)");
        }
        let mut first = true;
        for (&q, s) in &self.sectors {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if q == 0 {
                write!(f, "({})/({})", s.r.num(), s.r.den())?;
            } else {
                write!(f, "pw[{},{}]({})/({})", q, s.c, s.r.num(), s.r.den())?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for ParamScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
