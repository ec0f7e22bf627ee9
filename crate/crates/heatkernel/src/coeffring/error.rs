//! Error type for coefficient-ring arithmetic.

use thiserror::Error;

/// Failures surfaced by exact coefficient arithmetic.
///
/// These are all *mathematical* conditions (poles, divergences, unsupported
/// divisors) rather than programming errors; callers decide whether a given
/// condition is fatal for their computation.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CoeffError {
    /// Division of ring elements by zero.
    #[error("division by zero")]
    DivisionByZero,

    /// Numeric evaluation hit a zero of a denominator.
    #[error("evaluation point lies on a pole (a = {a}, n = {n})")]
    EvalAtPole { a: String, n: String },

    /// A Laurent expansion around n = 4 met a pole of order two or more,
    /// which the dimensional-limit machinery does not support.
    #[error("pole of order {order} at n = 4; only simple poles are supported")]
    PoleTooDeep { order: u32 },

    /// The residues of the simple poles at n = 4 failed to cancel across
    /// sectors, so the n -> 4 limit does not exist.
    #[error("n -> 4 limit divergent: residue sum {residue} does not vanish")]
    DivergentAtN4 { residue: String },

    /// A product of two dimension-limited values would need a log^2 term,
    /// which the carrier type does not represent.
    #[error("product would produce a log^2(1-a) term")]
    LogSquared,

    /// Parameter-scalar division only supports single-sector divisors whose
    /// rational part is a single term ratio.
    #[error("divisor must consist of a single sector: {0}")]
    NonSingleTermDivisor(String),

    /// Text could not be parsed as a coefficient-ring element.
    #[error("parse error at `{at}`: {msg}")]
    Parse { at: String, msg: String },
}

pub type Result<T> = std::result::Result<T, CoeffError>;
