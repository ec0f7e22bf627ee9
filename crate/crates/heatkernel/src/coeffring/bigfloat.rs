//! Fixed-point high-precision reals for the numeric cross-checks.
//!
//! Values are stored as integer multiples of 2^-PREC with PREC = 320 bits of
//! fraction (≈ 96 decimal digits), enough to verify closed forms against
//! quadrature at the 10^-20 relative level with a wide safety margin. Only
//! the operations the verification actually needs are provided: field
//! arithmetic, exp/ln/pow, and the constants ln 2 and π.
//!
//! Rounding is truncation toward minus infinity at the last stored bit; the
//! final bits of any computed value are therefore not certified, which is
//! harmless at this margin.

use std::cmp::Ordering;
use std::fmt;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

use super::poly::Q;

/// Fraction bits.
const PREC: u32 = 320;

#[derive(Clone, PartialEq, Eq)]
pub struct BigFloat {
    /// value = mant / 2^PREC
    mant: BigInt,
}

impl BigFloat {
    pub fn zero() -> Self {
        BigFloat { mant: BigInt::zero() }
    }

    pub fn one() -> Self {
        BigFloat {
            mant: BigInt::from(1) << PREC,
        }
    }

    pub fn from_i64(v: i64) -> Self {
        BigFloat {
            mant: BigInt::from(v) << PREC,
        }
    }

    pub fn from_q(v: &Q) -> Self {
        BigFloat {
            mant: (v.numer() << PREC) / v.denom(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.mant.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.mant.is_negative()
    }

    pub fn abs(&self) -> Self {
        BigFloat {
            mant: self.mant.abs(),
        }
    }

    pub fn neg(&self) -> Self {
        BigFloat { mant: -&self.mant }
    }

    pub fn add(&self, o: &Self) -> Self {
        BigFloat {
            mant: &self.mant + &o.mant,
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        BigFloat {
            mant: &self.mant - &o.mant,
        }
    }

    pub fn mul(&self, o: &Self) -> Self {
        BigFloat {
            mant: (&self.mant * &o.mant) >> PREC,
        }
    }

    pub fn div(&self, o: &Self) -> Self {
        assert!(!o.mant.is_zero(), "BigFloat division by zero");
        BigFloat {
            mant: (&self.mant << PREC) / &o.mant,
        }
    }

    /// Multiplies by 2^k (exact).
    pub fn mul_pow2(&self, k: i64) -> Self {
        let mant = if k >= 0 {
            &self.mant << (k as u64)
        } else {
            &self.mant >> ((-k) as u64)
        };
        BigFloat { mant }
    }

    pub fn cmp_val(&self, o: &Self) -> Ordering {
        self.mant.cmp(&o.mant)
    }

    pub fn to_f64(&self) -> f64 {
        // split to avoid overflow for large magnitudes
        let bits = self.mant.bits() as i64;
        if bits <= 1000 {
            self.mant.to_f64().unwrap_or(f64::NAN) / 2f64.powi(PREC as i32)
        } else {
            let shift = bits - 64;
            let top = (&self.mant >> (shift as u64)).to_f64().unwrap_or(f64::NAN);
            top * 2f64.powi((shift - PREC as i64) as i32)
        }
    }

    /// e^self via range reduction to |r| ≤ (ln 2)/2 and Taylor summation.
    pub fn exp(&self) -> Self {
        let ln2 = ln2();
        // k = nearest integer to self/ln2
        let ratio = self.div(ln2);
        let k = ratio.round_to_i64();
        let r = self.sub(&BigFloat::from_i64(k).mul(ln2));
        // Taylor: sum r^j / j!
        let mut term = BigFloat::one();
        let mut sum = BigFloat::one();
        let mut j: i64 = 1;
        loop {
            term = term.mul(&r).div(&BigFloat::from_i64(j));
            if term.mant.is_zero() {
                break;
            }
            sum = sum.add(&term);
            j += 1;
            if j > 500 {
                break; // |r| ≤ 0.35 converges long before this
            }
        }
        sum.mul_pow2(k)
    }

    /// Natural log of a positive value: scale into [1, 2), then
    /// ln y = 2·atanh((y-1)/(y+1)).
    pub fn ln(&self) -> Self {
        assert!(
            self.mant.is_positive(),
            "BigFloat ln of non-positive value"
        );
        let bits = self.mant.bits() as i64;
        let k = bits - 1 - PREC as i64;
        let y = self.mul_pow2(-k);
        let num = y.sub(&BigFloat::one());
        let den = y.add(&BigFloat::one());
        let t = num.div(&den);
        let t2 = t.mul(&t);
        let mut term = t.clone();
        let mut sum = t;
        let mut j: i64 = 1;
        loop {
            term = term.mul(&t2);
            let inc = term.div(&BigFloat::from_i64(2 * j + 1));
            if inc.mant.is_zero() {
                break;
            }
            sum = sum.add(&inc);
            j += 1;
            if j > 2000 {
                break;
            }
        }
        sum.mul_pow2(1).add(&BigFloat::from_i64(k).mul(ln2()))
    }

    /// self^e for positive self and real e: exp(e·ln self).
    pub fn pow(&self, e: &Self) -> Self {
        if e.is_zero() {
            return BigFloat::one();
        }
        self.ln().mul(e).exp()
    }

    /// self^k for integer k of either sign (self ≠ 0 when k < 0).
    pub fn powi(&self, k: i64) -> Self {
        if k == 0 {
            return BigFloat::one();
        }
        let mut base = if k < 0 {
            BigFloat::one().div(self)
        } else {
            self.clone()
        };
        let mut rem = k.unsigned_abs();
        let mut acc = BigFloat::one();
        while rem > 0 {
            if rem & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            rem >>= 1;
        }
        acc
    }

    fn round_to_i64(&self) -> i64 {
        let half = BigInt::from(1) << (PREC - 1);
        let shifted = (&self.mant + half) >> PREC;
        shifted.to_i64().expect("exponent fits i64")
    }

    /// Decimal rendering with the requested number of fractional digits
    /// (truncated), for diagnostics.
    pub fn to_decimal(&self, digits: u32) -> String {
        let neg = self.mant.is_negative();
        let a = self.mant.abs();
        let scaled = (&a * BigInt::from(10).pow(digits)) >> PREC;
        let s = scaled.to_string();
        let (int_part, frac_part) = if s.len() > digits as usize {
            let cut = s.len() - digits as usize;
            (s[..cut].to_string(), s[cut..].to_string())
        } else {
            ("0".to_string(), format!("{:0>width$}", s, width = digits as usize))
        };
        format!("{}{}.{}", if neg { "-" } else { "" }, int_part, frac_part)
    }
}

impl fmt::Debug for BigFloat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_decimal(40))
    }
}

impl fmt::Display for BigFloat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_decimal(40))
    }
}

/// ln 2 = 2·atanh(1/3), cached.
pub fn ln2() -> &'static BigFloat {
    static LN2: OnceLock<BigFloat> = OnceLock::new();
    LN2.get_or_init(|| {
        // 2 * sum_{j>=0} (1/3)^(2j+1) / (2j+1)
        let one = BigInt::from(1) << PREC;
        let mut sum = BigInt::zero();
        let mut p = BigInt::from(3); // 3^(2j+1)
        let mut j: u64 = 0;
        loop {
            let term = &one / (&p * BigInt::from(2 * j + 1));
            if term.is_zero() {
                break;
            }
            sum += term;
            p *= 9;
            j += 1;
        }
        BigFloat { mant: sum << 1 }
    })
}

/// π from the Machin formula 16·atan(1/5) − 4·atan(1/239), cached.
pub fn pi() -> &'static BigFloat {
    static PI: OnceLock<BigFloat> = OnceLock::new();
    PI.get_or_init(|| {
        let a5 = atan_inv(5);
        let a239 = atan_inv(239);
        BigFloat {
            mant: (a5.mant << 4) - (a239.mant << 2),
        }
    })
}

/// atan(1/m) for integer m ≥ 2 by the alternating power series.
fn atan_inv(m: u64) -> BigFloat {
    let one = BigInt::from(1) << PREC;
    let m2 = BigInt::from(m * m);
    let mut p = BigInt::from(m); // m^(2j+1)
    let mut sum = BigInt::zero();
    let mut j: u64 = 0;
    loop {
        let term = &one / (&p * BigInt::from(2 * j + 1));
        if term.is_zero() {
            break;
        }
        if j % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
        p *= &m2;
        j += 1;
    }
    BigFloat { mant: sum }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeffring::poly::q;

    fn close(x: &BigFloat, y: &BigFloat, tol_pow2: i64) {
        let d = x.sub(y).abs();
        let bound = BigFloat::one().mul_pow2(tol_pow2);
        assert!(
            d.cmp_val(&bound) == Ordering::Less,
            "difference {} exceeds 2^{}",
            d.to_decimal(50),
            tol_pow2
        );
    }

    #[test]
    fn arithmetic_identities() {
        let x = BigFloat::from_q(&q(355, 113));
        let y = BigFloat::from_q(&q(-7, 3));
        let z = x.mul(&y).div(&y);
        close(&z, &x, -300);
        assert!(x.sub(&x).is_zero());
    }

    #[test]
    fn exp_ln_roundtrip() {
        for v in [q(1, 1), q(1, 7), q(12, 5), q(1, 1000), q(99, 10)] {
            let x = BigFloat::from_q(&v);
            close(&x.ln().exp(), &x, -290);
            close(&x.exp().ln(), &x, -290);
        }
    }

    #[test]
    fn exp_of_negative_is_reciprocal() {
        let x = BigFloat::from_q(&q(17, 4));
        let p = x.exp().mul(&x.neg().exp());
        close(&p, &BigFloat::one(), -290);
    }

    #[test]
    fn ln2_matches_ln_of_two() {
        close(ln2(), &BigFloat::from_i64(2).ln(), -300);
    }

    #[test]
    fn pi_digits() {
        // π to 40 digits
        let want = "3.1415926535897932384626433832795028841971";
        assert_eq!(&pi().to_decimal(40)[..42], want);
    }

    #[test]
    fn pow_consistency() {
        let x = BigFloat::from_q(&q(5, 2));
        close(&x.pow(&BigFloat::from_i64(3)), &x.powi(3), -280);
        let half = BigFloat::from_q(&q(1, 2));
        let root = x.pow(&half);
        close(&root.mul(&root), &x, -280);
    }

    #[test]
    fn powi_negative() {
        let x = BigFloat::from_i64(4);
        close(&x.powi(-2), &BigFloat::from_q(&q(1, 16)), -300);
    }

    #[test]
    fn decimal_rendering() {
        assert_eq!(
            BigFloat::from_q(&q(-5, 4)).to_decimal(3),
            "-1.250"
        );
        assert_eq!(BigFloat::from_q(&q(1, 8)).to_decimal(3), "0.125");
    }
}
