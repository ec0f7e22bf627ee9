//! Exact coefficient arithmetic.
//!
//! Everything the rest of the engine treats as a "number" lives here:
//!
//! - [`Poly2`]: sparse polynomials over ℚ in the gauge parameter `a` and the
//!   dimension `n`;
//! - [`RationalFn`]: reduced ratios of such polynomials;
//! - [`ParamScalar`]: sums Σ_q r_q(a,n)·(1-a)^(c_q - q·n/2), the closed-form
//!   shape every momentum integral produces;
//! - [`N4Scalar`]: the n -> 4 limit of a `ParamScalar` — a rational function
//!   of `a` plus a rational multiple of ln(1-a);
//! - [`BigFloat`]: fixed-point high-precision reals for numeric cross-checks.
//!
//! All symbolic arithmetic is exact; `BigFloat` appears only in verification
//! paths, never in derivations.

pub mod bigfloat;
pub mod error;
pub mod n4;
pub mod param;
pub mod parse;
pub mod poly;
pub mod ratfn;

pub use bigfloat::{ln2, pi, BigFloat};
pub use error::{CoeffError, Result};
pub use n4::N4Scalar;
pub use param::{pochhammer_half_n, pochhammer_q, ParamScalar, Sector};
pub use parse::{n4_to_machine, parse_n4, parse_param_scalar, parse_poly, parse_ratfn};
pub use poly::{q, qi, Poly2, Q};
pub use ratfn::RationalFn;
