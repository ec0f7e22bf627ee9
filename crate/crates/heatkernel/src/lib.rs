//! Exact heat-kernel expansion coefficients E_m for second-order operators
//! on curved manifolds with gauge connections.
//!
//! The engine derives the diagonal coefficients of the short-time expansion
//! ⟨x|e^{−tA}|x⟩ ∼ (4π)^{−n/2} Σ_m E_m t^{(m−n)/2} for operators of the two
//! shapes
//!
//! ```text
//! minimal     A = −□ + X
//! nonminimal  A^{ab} = −g^{ab}□ + a D^a D^b + X^{ab}      (elliptic for a < 1)
//! ```
//!
//! entirely symbolically: coefficients are exact rational functions of the
//! gauge parameter `a` and the manifold dimension `n`, tensor structure is
//! kept in abstract indices, and every intermediate step (intrinsic symbol
//! recursion, coincidence limits, momentum integrals, hypergeometric
//! reduction) is exact.
//!
//! Module map:
//!
//! * [`coeffring`] — the coefficient field: rational functions of (a, n)
//!   extended by powers (1−a)^(c − q·n/2), their n→4 limits and numerics.
//! * [`tensor`] — abstract-index tensor monomials and canonical forms.
//! * [`identities`] — Ricci/Bianchi/cyclic rewriting to a fixed basis.
//! * [`colim`] — coincidence limits of the phase and transport functions.
//! * [`symbolcalc`] — the symbol recursion for the resolvent amplitude.
//! * [`momentumint`] — momentum/λ integrals and hypergeometric reduction.
//! * [`pipeline`] — end-to-end runs, reference comparison, emission.

pub mod coeffring;
pub mod colim;
pub mod identities;
pub mod tensor;
