//! Derivative-prefix reordering via the Ricci identity.
//!
//! Swapping two adjacent covariant derivatives costs curvature corrections:
//!
//! ```text
//! D_x D_y φ = D_y D_x φ + [D_x, D_y] φ
//! [D_x, D_y] φ = − Σ_ι R(u, ι, x, y) · φ(ι→u)  + bundle term
//! ```
//!
//! where ι runs over the tangent indices φ carries below the swap (its
//! remaining inner derivatives and its slots) and the bundle term depends on
//! how the atom is valued: scalar atoms get none, endomorphism-valued atoms
//! (X, W) get the two-sided commutator with the gauge curvature, and the
//! transport function gets a left action only — its second slot lives at the
//! other point and is inert, as are two-point scalars entirely.

use crate::tensor::{Atom, AtomKind, Index, TensorMonomial};

/// The tangent indices of a prefixed atom that receive Ricci corrections
/// when a commutator acts above `depth` inner derivatives: positions are
/// returned as (region, position) with region 0 = prefix, 1 = slots.
fn correction_targets(atom: &Atom, inner_start: usize) -> Vec<(u8, usize)> {
    let mut targets: Vec<(u8, usize)> = (inner_start..atom.derivs.len()).map(|p| (0, p)).collect();
    match atom.kind {
        // Two-point scalar: no slots at this point.
        AtomKind::PhaseL => {}
        // Transport: only the first slot lives at the derivative point.
        AtomKind::TransportI => targets.push((1, 0)),
        _ => targets.extend((0..atom.slots.len()).map(|p| (1, p))),
    }
    targets
}

/// How the gauge curvature acts in the commutator on this atom:
/// (left W term, right −W term).
fn bundle_action(kind: AtomKind) -> (bool, bool) {
    match kind {
        AtomKind::X | AtomKind::W => (true, true),
        AtomKind::TransportI => (true, false),
        _ => (false, false),
    }
}

/// Rewrites `atoms` by swapping the derivatives of `atoms[ai]` at positions
/// (p, p+1). Mutates `atoms` to the swapped main term and returns the
/// correction terms (each a full atom list with a rational sign) that must
/// be added: original = swapped + corrections.
pub fn swap_derivs(atoms: &mut Vec<Atom>, ai: usize, p: usize, fresh_dummy: &mut u32) -> Vec<(i64, Vec<Atom>)> {
    let atom = atoms[ai].clone();
    let x = atom.derivs[p];
    let y = atom.derivs[p + 1];
    let outer: Vec<Index> = atom.derivs[..p].to_vec();
    let inner: Vec<Index> = atom.derivs[p + 2..].to_vec();

    let mut corrections: Vec<(i64, Vec<Atom>)> = Vec::new();

    // φ is the atom stripped to its inner prefix.
    let phi = Atom::new(atom.kind, inner, atom.slots.clone());

    // Riemann corrections: −R(u, ι, x, y) · φ(ι→u).
    for (region, pos) in correction_targets(&phi, 0) {
        let mut phi2 = phi.clone();
        let ix = if region == 0 { phi2.derivs[pos] } else { phi2.slots[pos] };
        let u = Index::dummy(*fresh_dummy);
        *fresh_dummy += 1;
        if region == 0 {
            phi2.derivs[pos] = u;
        } else {
            phi2.slots[pos] = u;
        }
        let r = Atom::bare(AtomKind::Riemann, vec![u, ix, x, y]);
        corrections.push((-1, vec![r, phi2]));
    }

    // Bundle corrections: order inside the product is semantic.
    let (left, right) = bundle_action(phi.kind);
    let w = Atom::bare(AtomKind::W, vec![x, y]);
    if left {
        corrections.push((1, vec![w.clone(), phi.clone()]));
    }
    if right {
        corrections.push((-1, vec![phi.clone(), w.clone()]));
    }

    // Apply the outer derivatives by the product rule, innermost first, then
    // splice each correction product into the full atom list.
    let mut expanded: Vec<(i64, Vec<Atom>)> = Vec::new();
    for (sign, product) in corrections {
        for distributed in distribute_derivs(product, &outer) {
            expanded.push((sign, distributed));
        }
    }
    let mut out: Vec<(i64, Vec<Atom>)> = Vec::new();
    for (sign, product) in expanded {
        let mut full = atoms.clone();
        // Replace the carrying atom by the correction product, in place, so
        // bundle order relative to the other atoms is preserved.
        full.splice(ai..=ai, product);
        out.push((sign, full));
    }

    // The main term: same atom with the two derivatives swapped.
    atoms[ai].derivs.swap(p, p + 1);
    out
}

/// Applies a derivative chain to a product of atoms by the Leibniz rule.
/// `outer[len-1]` is innermost and is applied first. Metric factors are
/// covariantly constant, so terms differentiating them are dropped.
fn distribute_derivs(product: Vec<Atom>, outer: &[Index]) -> Vec<Vec<Atom>> {
    let mut terms = vec![product];
    for d in outer.iter().rev() {
        let mut next: Vec<Vec<Atom>> = Vec::new();
        for term in &terms {
            for target in 0..term.len() {
                match term[target].kind {
                    AtomKind::Metric => continue,
                    AtomKind::Momentum | AtomKind::Proj1 | AtomKind::Proj2 => {
                        unreachable!("momentum-stage atoms must not appear under derivatives")
                    }
                    _ => {}
                }
                let mut t = term.clone();
                t[target].derivs.insert(0, *d);
                next.push(t);
            }
        }
        terms = next;
    }
    terms
}

/// The smallest dummy id not used in the monomial.
pub fn fresh_dummy_id(mono: &TensorMonomial) -> u32 {
    mono.max_dummy_id().map_or(0, |d| d + 1)
}
