//! Values of coefficients in the dimensional limit n -> 4.
//!
//! Sectors (1-a)^(c - q·n/2) expanded around n = 4 leave behind a rational
//! function of `a` plus a rational multiple of ln(1-a); nothing deeper occurs
//! when the limit exists. The carrier is therefore the pair
//! rat(a) + log(a)·ln(1-a).

use std::fmt;

use super::error::{CoeffError, Result};
use super::poly::Q;
use super::ratfn::RationalFn;

#[derive(Clone, PartialEq, Eq)]
pub struct N4Scalar {
    rat: RationalFn,
    log: RationalFn,
}

impl N4Scalar {
    pub fn new(rat: RationalFn, log: RationalFn) -> Self {
        N4Scalar { rat, log }
    }

    pub fn zero() -> Self {
        N4Scalar::new(RationalFn::zero(), RationalFn::zero())
    }

    pub fn from_ratfn(rat: RationalFn) -> Self {
        N4Scalar::new(rat, RationalFn::zero())
    }

    pub fn from_q(c: Q) -> Self {
        N4Scalar::from_ratfn(RationalFn::from_q(c))
    }

    pub fn rational_part(&self) -> &RationalFn {
        &self.rat
    }

    pub fn log_part(&self) -> &RationalFn {
        &self.log
    }

    pub fn is_zero(&self) -> bool {
        self.rat.is_zero() && self.log.is_zero()
    }

    pub fn add(&self, other: &N4Scalar) -> N4Scalar {
        N4Scalar::new(self.rat.add(&other.rat), self.log.add(&other.log))
    }

    pub fn sub(&self, other: &N4Scalar) -> N4Scalar {
        N4Scalar::new(self.rat.sub(&other.rat), self.log.sub(&other.log))
    }

    pub fn neg(&self) -> N4Scalar {
        N4Scalar::new(self.rat.neg(), self.log.neg())
    }

    pub fn scale(&self, c: &Q) -> N4Scalar {
        N4Scalar::new(self.rat.scale(c), self.log.scale(c))
    }

    pub fn mul_ratfn(&self, r: &RationalFn) -> N4Scalar {
        N4Scalar::new(self.rat.mul(r), self.log.mul(r))
    }

    /// Product of two limit values. A log·log cross term cannot be
    /// represented; it only arises when both factors carry a log part, which
    /// is reported as an error.
    pub fn mul(&self, other: &N4Scalar) -> Result<N4Scalar> {
        if !self.log.is_zero() && !other.log.is_zero() {
            return Err(CoeffError::LogSquared);
        }
        Ok(N4Scalar::new(
            self.rat.mul(&other.rat),
            self.rat.mul(&other.log).add(&self.log.mul(&other.rat)),
        ))
    }
}

impl fmt::Display for N4Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.log.is_zero() {
            return write!(f, "{}", self.rat);
        }
        if self.rat.is_zero() {
            return write!(f, "L*{}", self.log);
        }
        write!(f, "{} + L*{}", self.rat, self.log)
    }
}

impl fmt::Debug for N4Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
