//! Abstract-index tensor algebra.
//!
//! Monomials are ordered products of atoms (curvatures, the operator's
//! endomorphism, the gauge-bundle curvature, metric factors, momentum
//! covectors, and the two-point phase/transport functions), each carrying a
//! covariant-derivative prefix and index slots. Scalar-valued atoms commute;
//! bundle-valued atoms multiply as matrices and keep their order.
//!
//! [`TensorMonomial::canonicalize`] maps every presentation of the same
//! tensor to one representative: it minimizes over per-atom slot symmetries,
//! permutations of commuting atoms, and dummy-index renaming, tracking the
//! sign and detecting monomials that vanish by antisymmetry. Derivative
//! prefixes are rigid here — reordering them costs curvature terms and is
//! the job of the identities layer.

pub mod atom;
pub mod index;
pub mod monomial;
pub mod poly;

pub use atom::{Atom, AtomKind};
pub use index::Index;
pub use monomial::{CanonResult, TensorMonomial};
pub use poly::{sym_metric_product, CoeffRing, TensorPoly};
