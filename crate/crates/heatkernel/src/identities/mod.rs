//! Rewriting tensor expressions modulo the identities that relate them.
//!
//! Symbolic heat-kernel computations produce tensor polynomials whose terms
//! are equal on every manifold without being equal atom-for-atom: covariant
//! derivatives commute up to curvature, the Riemann tensor satisfies its two
//! Bianchi identities, and the gauge field strength satisfies its own. This
//! module drives every term to a deterministic normal form:
//!
//! * [`commute_to_canonical_order`] reorders derivative prefixes into the
//!   presentation with the smallest canonical key, emitting the curvature
//!   and field-strength correction terms the Ricci identity demands.
//! * [`apply_bianchi_and_cyclic`] additionally eliminates, per atom, the
//!   strict-maximum orientation of each three-term identity (first Bianchi,
//!   second Bianchi, gauge Bianchi), iterated to a fixed point.
//! * [`normalize`] is the common engine with a rule-set switch.
//!
//! Confluence across presentations of the same tensor is exercised by the
//! property suite; termination is by a strictly decreasing lexicographic
//! measure (derivative count, canonical key) on every rewrite product.

mod reduce;
mod ricci;

pub use reduce::{apply_bianchi_and_cyclic, commute_to_canonical_order, normalize, RuleSet};
pub use ricci::{fresh_dummy_id, swap_derivs};

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeffring::ParamScalar;
    use crate::tensor::{Atom, AtomKind, Index, TensorMonomial, TensorPoly};

    fn one_term(s: &str) -> TensorPoly<ParamScalar> {
        TensorPoly::from_term(ParamScalar::one(), TensorMonomial::parse(s).unwrap())
    }

    fn normalized(s: &str) -> TensorPoly<ParamScalar> {
        normalize(&one_term(s), RuleSet::Full)
    }

    #[test]
    fn free_derivatives_sort_ascending() {
        // Scalar curvature carries no slots, so reordering costs nothing.
        let p = normalized("D(b) D(a) Rs");
        let q = one_term("D(a) D(b) Rs");
        assert!(p.sub(&q).is_zero(), "got:\n{p}");
    }

    #[test]
    fn double_divergence_on_first_pair_vanishes() {
        // ∇^i∇^jR(i,j,a,b) is identically zero: by first-pair antisymmetry
        // it equals half its own commutator, whose four correction terms
        // cancel in pairs. The divergence rules reach that zero through the
        // Bianchi images and the Ricci-divergence collapse.
        let p = normalized("D(i) D(j) R(i,j,a,b)");
        assert!(p.is_zero(), "got:\n{p}");
    }

    #[test]
    fn divergence_of_ricci_collapses_to_scalar_gradient() {
        // ∇^iRic(i,a) = ½∇_aRs, the twice-contracted second Bianchi identity.
        let p = normalized("D(i) Ric(i,a)");
        let mut q: TensorPoly<ParamScalar> = TensorPoly::zero();
        q.add_term(
            ParamScalar::from_int_ratio(1, 2),
            TensorMonomial::parse("D(a) Rs").unwrap(),
        );
        assert!(p.sub(&q).is_zero(), "got:\n{p}");
    }

    #[test]
    fn outer_contracted_ricci_divergences_agree() {
        // ∇^i∇_aRic(i,b) and ∇^i∇_bRic(i,a) are the same tensor: both
        // collapse onto ½∇_a∇_bRs plus identical curvature squares.
        let p = normalized("D(i) D(a) Ric(i,b)");
        let q = normalized("D(i) D(b) Ric(i,a)");
        assert!(!p.is_zero(), "collapse lost the term entirely");
        assert!(p.sub(&q).is_zero(), "got:\n{p}\nvs:\n{q}");
    }

    #[test]
    fn double_divergence_on_split_pairs_reduces() {
        // ∇^i∇^jR(i,a,j,b) = □Ric(a,b) − ½∇_a∇_bRs − Ric(i,a)Ric(i,b)
        //                    + Ric(i,j)R(i,a,j,b).
        let p = normalized("D(i) D(j) R(i,a,j,b)");
        let mut expected: TensorPoly<ParamScalar> = TensorPoly::zero();
        expected.add_term(
            ParamScalar::one(),
            TensorMonomial::parse("D(i) D(i) Ric(a,b)").unwrap(),
        );
        expected.add_term(
            ParamScalar::from_int_ratio(-1, 2),
            TensorMonomial::parse("D(a) D(b) Rs").unwrap(),
        );
        expected.add_term(
            ParamScalar::one().neg(),
            TensorMonomial::parse("Ric(i,a) Ric(i,b)").unwrap(),
        );
        expected.add_term(
            ParamScalar::one(),
            TensorMonomial::parse("Ric(i,j) R(i,a,j,b)").unwrap(),
        );
        let expected = normalize(&expected, RuleSet::Full);
        assert!(!p.is_zero(), "split-pair divergence must not vanish");
        assert!(
            p.sub(&expected).is_zero(),
            "got:\n{p}\nexpected:\n{expected}"
        );
    }

    #[test]
    fn split_pair_divergence_is_symmetric() {
        // Every constituent of the reduced form is symmetric under a ↔ b.
        let p = normalized("D(i) D(j) R(i,a,j,b)");
        let q = normalized("D(i) D(j) R(i,b,j,a)");
        assert!(p.sub(&q).is_zero(), "got:\n{p}\nvs:\n{q}");
    }

    #[test]
    fn scalar_hessian_riemann_contraction_vanishes() {
        // The phase's second derivatives commute (scalar section, no bundle
        // action), so contracting them into the Riemann's antisymmetric
        // pair yields a monomial equal to minus itself.
        assert!(normalized("R(i,j,p,q) D(i) D(j) l W(p,q)").is_zero());
        assert!(!normalized("R(a,i,b,j) D(i) D(j) l").is_zero());
    }

    #[test]
    fn cyclic_sum_vanishes() {
        let mut p = one_term("R(a,b,c,d)");
        p = p.add(&one_term("R(a,c,d,b)"));
        p = p.add(&one_term("R(a,d,b,c)"));
        assert!(normalize(&p, RuleSet::Full).is_zero());
    }

    #[test]
    fn second_bianchi_sum_vanishes() {
        let mut p = one_term("D(e) R(a,b,c,d)");
        p = p.add(&one_term("D(c) R(a,b,d,e)"));
        p = p.add(&one_term("D(d) R(a,b,e,c)"));
        assert!(normalize(&p, RuleSet::Full).is_zero());
    }

    #[test]
    fn gauge_bianchi_sum_vanishes() {
        let mut p = one_term("D(a) W(b,c)");
        p = p.add(&one_term("D(b) W(c,a)"));
        p = p.add(&one_term("D(c) W(a,b)"));
        assert!(normalize(&p, RuleSet::Full).is_zero());
    }

    #[test]
    fn transport_exchange_yields_curvatures() {
        // Swapping the two derivatives on the transport bitensor costs the
        // gauge curvature acting on the left plus a Riemann correction on
        // the unprimed slot only.
        let swapped = normalized("D(b) D(a) I(c,d)");

        let mut expected: TensorPoly<ParamScalar> = TensorPoly::zero();
        expected.add_term(
            ParamScalar::one(),
            TensorMonomial::parse("D(a) D(b) I(c,d)").unwrap(),
        );
        // +W(b,a)·I(c,d): the gauge curvature acts from the left.
        expected.add_term(
            ParamScalar::one(),
            TensorMonomial::new(vec![
                Atom::bare(AtomKind::W, vec![Index::free(1), Index::free(0)]),
                Atom::bare(AtomKind::TransportI, vec![Index::free(2), Index::free(3)]),
            ]),
        );
        // −R(u,c,b,a)·I(u,d): only the unprimed slot sees the holonomy.
        expected.add_term(
            ParamScalar::one().neg(),
            TensorMonomial::new(vec![
                Atom::bare(
                    AtomKind::Riemann,
                    vec![Index::dummy(0), Index::free(2), Index::free(1), Index::free(0)],
                ),
                Atom::bare(AtomKind::TransportI, vec![Index::dummy(0), Index::free(3)]),
            ]),
        );
        let expected = normalize(&expected, RuleSet::Full);
        assert!(swapped.sub(&expected).is_zero(), "got:\n{swapped}\nexpected:\n{expected}");
    }

    #[test]
    fn endomorphism_exchange_is_two_sided() {
        // On an endomorphism-valued atom the gauge curvature enters as a
        // commutator: both orders of the product appear, with opposite signs.
        let p = normalized("D(b) D(a) X(c,d)");
        let w_left = TensorMonomial::new(vec![
            Atom::bare(AtomKind::W, vec![Index::free(0), Index::free(1)]),
            Atom::bare(AtomKind::X, vec![Index::free(2), Index::free(3)]),
        ]);
        let w_right = TensorMonomial::new(vec![
            Atom::bare(AtomKind::X, vec![Index::free(2), Index::free(3)]),
            Atom::bare(AtomKind::W, vec![Index::free(0), Index::free(1)]),
        ]);
        let cl = w_left.canonicalize();
        let cr = w_right.canonicalize();
        let get = |m: &TensorMonomial| p.terms().find(|(t, _)| *t == m).map(|(_, c)| c.clone());
        let lhs = get(&cl.mono).expect("left product missing");
        let rhs = get(&cr.mono).expect("right product missing");
        // W(b,a) = −W(a,b), so relative to the canonical W(a,b) the two
        // commutator halves carry −1 and +1.
        assert_eq!(lhs, ParamScalar::from_q(crate::coeffring::qi(-(cl.sign as i64))));
        assert_eq!(rhs, ParamScalar::from_q(crate::coeffring::qi(cr.sign as i64)));
    }

    #[test]
    fn normalize_is_idempotent_on_mixed_poly() {
        let mut p = one_term("D(i) D(j) R(i,b,j,a)");
        p = p.add(&one_term("D(j) D(i) D(j) D(i) l"));
        p = p.add(&one_term("Ric(i,j) R(i,a,j,b)"));
        let n1 = normalize(&p, RuleSet::Full);
        let n2 = normalize(&n1, RuleSet::Full);
        assert!(n1.sub(&n2).is_zero());
    }
}
