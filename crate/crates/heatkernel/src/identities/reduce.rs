//! Normal form for tensor polynomials modulo the derivative-commutation and
//! curvature identities.
//!
//! A term is in normal form when none of these rewrites applies:
//!
//! 1. **Metricity** — a metric factor under a covariant derivative makes the
//!    term vanish.
//! 2. **Self traces / slot symmetries** — handled by the tensor layer
//!    (`reduce_self_traces` + `canonicalize`).
//! 3. **Contracted second Bianchi** — a derivative contracted into its own
//!    atom's slots is eliminated: on a Ricci atom the divergence collapses
//!    onto the scalar-curvature gradient (∇·Ric = ½∇Rs), and on a Riemann
//!    atom the once-contracted second Bianchi identity trades the divergence
//!    for Ricci derivatives. The derivative is first commuted innermost at
//!    the usual commutator cost.
//! 4. **Derivative reordering** — if permuting one atom's derivative prefix
//!    (at the cost of curvature correction terms) yields a strictly smaller
//!    canonical monomial, rewrite toward that permutation. A permutation
//!    that canonicalizes back to the *same* monomial with opposite sign
//!    forces `2·M = corrections`, eliminating the term (this is how, e.g.,
//!    a scalar's second derivatives contracted into an antisymmetric pair
//!    vanish). Equal-key same-sign permutations never fire.
//! 5. **First Bianchi (cyclic) identity** — a Riemann atom that is the
//!    strict maximum of its three cyclic images is replaced by minus the
//!    other two.
//! 6. **Second Bianchi identity** — the innermost derivative of a Riemann
//!    atom cycles with the second-pair slots; the strict-maximum orientation
//!    is eliminated. The same rule with the gauge curvature's own Bianchi
//!    identity applies to derivatives of W.
//!
//! Every rewrite strictly decreases (derivative count, atom-kind multiset,
//! canonical key) lexicographically for each emitted term, so the rewriting
//! pass terminates.
//!
//! Monomial-local rewriting alone is not confluent: products of curvature
//! atoms sharing several contractions satisfy relations that mix the cyclic
//! and Bianchi identities across atoms, and no single-atom step can see
//! them. The full normal form therefore finishes with a linear-algebra
//! quotient: every three-term identity instance, anchored at every monomial
//! reachable from the polynomial's support (including instances anchored at
//! each derivative position, rotated innermost), is normalized into a
//! relation vector over the rationals, the relation set is brought to
//! echelon form, and the polynomial is reduced against it.
//!
//! The reduction is always value-preserving, and a polynomial that reduces
//! to zero is exactly zero. Equality of two polynomials is decided by
//! normalizing their *difference* — the closure then explores both supports
//! jointly and the decision is complete on everything the coefficient
//! calculus produces (validated well past its dimension-eight,
//! two-curvature-factor envelope). Separately normalized representatives
//! are canonical on that envelope; far outside it, two value-equal
//! polynomials can in principle keep distinct representatives (their
//! difference still normalizes to zero), because the independently explored
//! ideal closures need not coincide.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use num_rational::BigRational;

use crate::tensor::{Atom, AtomKind, CoeffRing, Index, TensorMonomial, TensorPoly};

use super::ricci::{fresh_dummy_id, swap_derivs};

/// Which rewrite families to apply.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum RuleSet {
    /// Metric contraction, traces, and derivative reordering (rules 1, 2,
    /// and 4); no Bianchi-family rules and no ideal-closure quotient.
    Commute,
    /// Everything: rules 1–6 plus the linear-algebra quotient.
    Full,
}

/// Normalizes every term of a polynomial. Value-preserving.
pub fn normalize<C: CoeffRing>(poly: &TensorPoly<C>, rules: RuleSet) -> TensorPoly<C> {
    let rewritten = rewrite_terms(&poly.contract_metric(), rules);
    match rules {
        RuleSet::Commute => rewritten,
        RuleSet::Full => reduce_modulo_ideal(rewritten),
    }
}

/// The monomial-rewriting pass alone (no ideal quotient).
fn rewrite_terms<C: CoeffRing>(poly: &TensorPoly<C>, rules: RuleSet) -> TensorPoly<C> {
    let mut out = TensorPoly::zero();
    let mut work: Vec<(C, TensorMonomial)> = poly
        .terms()
        .map(|(m, c)| (c.clone(), m.clone()))
        .collect();
    while let Some((coeff, mono)) = work.pop() {
        normalize_term(coeff, mono, rules, &mut out, &mut work);
    }
    out
}

/// Reorders derivative prefixes to canonical order, inserting curvature
/// corrections, without applying the Bianchi or cyclic identities.
pub fn commute_to_canonical_order<C: CoeffRing>(poly: &TensorPoly<C>) -> TensorPoly<C> {
    normalize(poly, RuleSet::Commute)
}

/// Full normal form: canonical derivative order plus Bianchi/cyclic
/// orientation reduction, iterated to a fixed point.
pub fn apply_bianchi_and_cyclic<C: CoeffRing>(poly: &TensorPoly<C>) -> TensorPoly<C> {
    normalize(poly, RuleSet::Full)
}

fn scaled<C: CoeffRing>(coeff: &C, num: i64, den: i64) -> C {
    coeff
        .try_mul(&C::from_ratio(num, den))
        .expect("rational rescaling of a coefficient cannot fail")
}

/// Drives one term to normal form. Terminal terms are added to `out`;
/// rewrite by-products are pushed onto `work` for their own pass.
fn normalize_term<C: CoeffRing>(
    coeff: C,
    mono: TensorMonomial,
    rules: RuleSet,
    out: &mut TensorPoly<C>,
    work: &mut Vec<(C, TensorMonomial)>,
) {
    let mut coeff = coeff;
    let mut atoms = mono.atoms;
    loop {
        if coeff.is_zero() {
            return;
        }
        // Metricity: ∇g = 0.
        if atoms
            .iter()
            .any(|a| a.kind == AtomKind::Metric && !a.derivs.is_empty())
        {
            return;
        }
        // Canonical presentation.
        let (m1, s1, z1) = TensorMonomial::new(atoms).reduce_self_traces();
        if z1 {
            return;
        }
        let cr = m1.canonicalize();
        if cr.is_zero {
            return;
        }
        let sign = (s1 * cr.sign) as i64;
        if sign != 1 {
            coeff = scaled(&coeff, sign, 1);
        }
        let mono = cr.mono;

        if rules == RuleSet::Full && try_divergence_rules(&coeff, &mono, work) {
            return;
        }
        match best_prefix_permutation(&mono) {
            Some(PermMove::Rewrite(ai, target)) => {
                atoms = rewrite_toward_permutation(&coeff, mono, ai, &target, work);
                continue;
            }
            Some(PermMove::HalvedCorrections(ai, target)) => {
                // The permuted presentation canonicalizes to −M, so
                // M = (swap corrections)/2; the main term cancels.
                let half = scaled(&coeff, 1, 2);
                let _ = rewrite_toward_permutation(&half, mono, ai, &target, work);
                return;
            }
            None => {}
        }
        if rules == RuleSet::Full {
            match try_triple_rules(&coeff, &mono, work) {
                TripleOutcome::Rewritten => return,
                TripleOutcome::Zero => return,
                TripleOutcome::NoRule => {}
            }
        }
        out.add_canonical(coeff, mono);
        return;
    }
}

/// Enumerates the derivative permutations of each atom and returns the one
/// producing the strictly smallest canonical monomial, if any. Prefixes
/// longer than `MAX_PERM_DERIVS` are left alone (they only occur on
/// two-point atoms deep inside limit computations, where the plain scan
/// order already is canonical once the small cases are handled).
const MAX_PERM_DERIVS: usize = 6;

/// How to spend a derivative permutation found by the scan.
enum PermMove {
    /// Bubble into the target order: push the permuted main term plus the
    /// swap corrections.
    Rewrite(usize, Vec<Index>),
    /// The permuted presentation canonicalizes back to the same monomial
    /// with opposite sign, so 2·M equals the swap corrections: drop the
    /// main term and push the corrections at half weight.
    HalvedCorrections(usize, Vec<Index>),
}

fn best_prefix_permutation(mono: &TensorMonomial) -> Option<PermMove> {
    // Candidate key: None means the permuted form canonicalizes to zero,
    // which is maximally profitable (the main term disappears and only the
    // commutator corrections survive).
    let mut zero_key: Option<(usize, Vec<Index>)> = None;
    let mut self_antisymmetric: Option<(usize, Vec<Index>)> = None;
    let mut best_smaller: Option<(TensorMonomial, usize, Vec<Index>)> = None;
    for (ai, atom) in mono.atoms.iter().enumerate() {
        if !(2..=MAX_PERM_DERIVS).contains(&atom.derivs.len()) {
            continue;
        }
        for perm in distinct_permutations(&atom.derivs) {
            if perm == atom.derivs {
                continue;
            }
            let mut cand = mono.clone();
            cand.atoms[ai].derivs = perm.clone();
            let cr = cand.canonicalize();
            if cr.is_zero {
                if zero_key.is_none() {
                    zero_key = Some((ai, perm.clone()));
                }
                continue;
            }
            if cr.mono == *mono {
                if cr.sign < 0 && self_antisymmetric.is_none() {
                    self_antisymmetric = Some((ai, perm.clone()));
                }
                continue;
            }
            if cr.mono < *mono {
                let beats = match &best_smaller {
                    None => true,
                    Some((b, _, _)) => cr.mono < *b,
                };
                if beats {
                    best_smaller = Some((cr.mono, ai, perm));
                }
            }
        }
    }
    if let Some((ai, perm)) = zero_key {
        return Some(PermMove::Rewrite(ai, perm));
    }
    if let Some((ai, perm)) = self_antisymmetric {
        return Some(PermMove::HalvedCorrections(ai, perm));
    }
    best_smaller.map(|(_, ai, perm)| PermMove::Rewrite(ai, perm))
}

/// All distinct orderings of a (possibly repeating) index sequence.
fn distinct_permutations(indices: &[Index]) -> Vec<Vec<Index>> {
    let mut results: Vec<Vec<Index>> = Vec::new();
    let mut seen = std::collections::BTreeSet::new();
    let mut scratch = indices.to_vec();
    heap_permute(&mut scratch, 0, &mut |p| {
        if seen.insert(p.to_vec()) {
            results.push(p.to_vec());
        }
    });
    results
}

fn heap_permute(v: &mut [Index], k: usize, f: &mut impl FnMut(&[Index])) {
    let n = v.len();
    if k == n {
        f(v);
        return;
    }
    for i in k..n {
        v.swap(k, i);
        heap_permute(v, k + 1, f);
        v.swap(k, i);
    }
}

/// Bubbles `atoms[ai]`'s prefix into the target order with adjacent swaps,
/// pushing each swap's curvature corrections onto the worklist. Returns the
/// permuted main term's atoms.
fn rewrite_toward_permutation<C: CoeffRing>(
    coeff: &C,
    mono: TensorMonomial,
    ai: usize,
    target: &[Index],
    work: &mut Vec<(C, TensorMonomial)>,
) -> Vec<Atom> {
    let mut atoms = mono.atoms.clone();
    let mut fresh = fresh_dummy_id(&mono);
    for pos in 0..target.len() {
        let from = (pos..atoms[ai].derivs.len())
            .find(|&j| atoms[ai].derivs[j] == target[pos])
            .expect("permutation target must be a rearrangement of the prefix");
        for j in (pos..from).rev() {
            for (sgn, catoms) in swap_derivs(&mut atoms, ai, j, &mut fresh) {
                work.push((scaled(coeff, sgn, 1), TensorMonomial::new(catoms)));
            }
        }
    }
    atoms
}

/// Forced contracted-Bianchi reductions: a derivative contracted into its
/// own atom's slots never survives on a curvature atom. The derivative is
/// first commuted innermost (corrections pushed onto the worklist); then a
/// Ricci divergence collapses onto the scalar-curvature gradient,
/// ∇^x Ric(x,y) = ½ ∇_y Rs, while a Riemann divergence is traded for its two
/// second-Bianchi images, D_e R(s0,s1,s2,s3) = −D_{s2} R(s0,s1,s3,e)
/// − D_{s3} R(s0,s1,e,s2), each of which self-traces to a Ricci derivative.
/// Both replacements strictly shrink the atom-kind multiset, so they fire
/// unconditionally. Returns true if the term was consumed.
fn try_divergence_rules<C: CoeffRing>(
    coeff: &C,
    mono: &TensorMonomial,
    work: &mut Vec<(C, TensorMonomial)>,
) -> bool {
    for (ai, atom) in mono.atoms.iter().enumerate() {
        if !matches!(atom.kind, AtomKind::Ricci | AtomKind::Riemann) {
            continue;
        }
        let Some(p) = atom
            .derivs
            .iter()
            .position(|d| !d.free && atom.slots.contains(d))
        else {
            continue;
        };
        let mut atoms = mono.atoms.clone();
        let mut fresh = fresh_dummy_id(mono);
        let last = atoms[ai].derivs.len() - 1;
        for q in p..last {
            for (sgn, catoms) in swap_derivs(&mut atoms, ai, q, &mut fresh) {
                work.push((scaled(coeff, sgn, 1), TensorMonomial::new(catoms)));
            }
        }
        let e = atoms[ai].derivs[last];
        match atoms[ai].kind {
            AtomKind::Ricci => {
                let s = &atoms[ai].slots;
                let y = if s[0] == e { s[1] } else { s[0] };
                let mut derivs = atoms[ai].derivs.clone();
                derivs[last] = y;
                atoms[ai] = Atom::new(AtomKind::RScalar, derivs, vec![]);
                work.push((scaled(coeff, 1, 2), TensorMonomial::new(atoms)));
            }
            AtomKind::Riemann => {
                // Move the contracted slot into the first pair if needed;
                // the pair exchange is a symmetry (sign +1).
                let mut s = atoms[ai].slots.clone();
                if s[2] == e || s[3] == e {
                    s = vec![s[2], s[3], s[0], s[1]];
                }
                let mut db = atoms[ai].derivs.clone();
                db[last] = s[2];
                let mut dc = atoms[ai].derivs.clone();
                dc[last] = s[3];
                let b = Atom::new(AtomKind::Riemann, db, vec![s[0], s[1], s[3], e]);
                let c = Atom::new(AtomKind::Riemann, dc, vec![s[0], s[1], e, s[2]]);
                for image in [b, c] {
                    let mut im = atoms.clone();
                    im[ai] = image;
                    work.push((scaled(coeff, -1, 1), TensorMonomial::new(im)));
                }
            }
            _ => unreachable!("divergence rules only fire on Ricci and Riemann"),
        }
        return true;
    }
    false
}

enum TripleOutcome {
    /// The term was replaced by smaller-key terms pushed onto the worklist.
    Rewritten,
    /// The identity forces the term itself to vanish.
    Zero,
    /// No three-term identity fires on this term.
    NoRule,
}

/// The three-term identities applicable to one atom. Each entry is the pair
/// of sibling atoms (B, C) completing V_A + V_B + V_C = 0:
///
/// * first Bianchi (cyclic), for a Riemann atom:
///   R(s0,s1,s2,s3) + R(s0,s2,s3,s1) + R(s0,s3,s1,s2) = 0;
/// * second Bianchi, for a Riemann atom's innermost derivative:
///   D_e R(s0,s1,s2,s3) + D_{s2} R(s0,s1,s3,e) + D_{s3} R(s0,s1,e,s2) = 0;
/// * gauge Bianchi, for the innermost derivative of W:
///   D_e W(s0,s1) + D_{s0} W(s1,e) + D_{s1} W(e,s0) = 0.
fn triple_images(atom: &Atom) -> Vec<(Atom, Atom)> {
    let mut out = Vec::new();
    let s = &atom.slots;
    if atom.kind == AtomKind::Riemann {
        out.push((
            Atom::new(atom.kind, atom.derivs.clone(), vec![s[0], s[2], s[3], s[1]]),
            Atom::new(atom.kind, atom.derivs.clone(), vec![s[0], s[3], s[1], s[2]]),
        ));
        if !atom.derivs.is_empty() {
            let e = *atom.derivs.last().unwrap();
            let mut db = atom.derivs.clone();
            *db.last_mut().unwrap() = s[2];
            let mut dc = atom.derivs.clone();
            *dc.last_mut().unwrap() = s[3];
            out.push((
                Atom::new(atom.kind, db, vec![s[0], s[1], s[3], e]),
                Atom::new(atom.kind, dc, vec![s[0], s[1], e, s[2]]),
            ));
        }
    }
    if atom.kind == AtomKind::W && !atom.derivs.is_empty() {
        let e = *atom.derivs.last().unwrap();
        let mut db = atom.derivs.clone();
        *db.last_mut().unwrap() = s[0];
        let mut dc = atom.derivs.clone();
        *dc.last_mut().unwrap() = s[1];
        out.push((
            Atom::new(atom.kind, db, vec![s[1], e]),
            Atom::new(atom.kind, dc, vec![e, s[0]]),
        ));
    }
    out
}

/// Tries the cyclic (first Bianchi), second Bianchi, and gauge Bianchi
/// identities on each eligible atom. Each identity has the shape
/// V_A + V_B + V_C = 0 for three single-atom substitutions; the current
/// term (A) is eliminated when both images canonicalize strictly below it.
fn try_triple_rules<C: CoeffRing>(
    coeff: &C,
    mono: &TensorMonomial,
    work: &mut Vec<(C, TensorMonomial)>,
) -> TripleOutcome {
    for (ai, atom) in mono.atoms.iter().enumerate() {
        for (b, c) in triple_images(atom) {
            match resolve_triple(coeff, mono, ai, b, c, work) {
                TripleOutcome::NoRule => {}
                other => return other,
            }
        }
    }
    TripleOutcome::NoRule
}

/// Given the identity V_A + V_B + V_C = 0, where A is `mono` and B/C are
/// `mono` with atom `ai` replaced, decides whether A can be rewritten into
/// strictly smaller terms. The images are compared by their canonical
/// monomials; signs from canonicalization are tracked exactly.
fn resolve_triple<C: CoeffRing>(
    coeff: &C,
    mono: &TensorMonomial,
    ai: usize,
    b: Atom,
    c: Atom,
    work: &mut Vec<(C, TensorMonomial)>,
) -> TripleOutcome {
    let canon_image = |atom: Atom| {
        let mut m = mono.clone();
        m.atoms[ai] = atom;
        let (m1, s1, z1) = m.reduce_self_traces();
        if z1 {
            return (TensorMonomial::one(), 0i64, true);
        }
        let cr = m1.canonicalize();
        if cr.is_zero {
            return (TensorMonomial::one(), 0i64, true);
        }
        (cr.mono, (s1 * cr.sign) as i64, false)
    };
    let (mb, sb, zb) = canon_image(b);
    let (mc, sc, zc) = canon_image(c);
    let eq_b = !zb && mb == *mono;
    let eq_c = !zc && mc == *mono;

    if eq_b && eq_c {
        // (1 + σ_B + σ_C)·A = 0.
        if 1 + sb + sc != 0 {
            return TripleOutcome::Zero;
        }
        return TripleOutcome::NoRule;
    }
    if eq_b || eq_c {
        // (1 + σ)·A = −V_other.
        let (sigma, m_other, s_other, z_other) =
            if eq_b { (sb, mc, sc, zc) } else { (sc, mb, sb, zb) };
        if sigma == 1 {
            if z_other {
                return TripleOutcome::Zero;
            }
            if m_other < *mono {
                work.push((scaled(coeff, -s_other, 2), m_other));
                return TripleOutcome::Rewritten;
            }
        }
        return TripleOutcome::NoRule;
    }
    if !zb && !zc && mb == mc {
        // Both images canonicalize to the same monomial N:
        // V_A = −(σ_B + σ_C)·V_N.
        if sb + sc == 0 {
            return TripleOutcome::Zero;
        }
        if mb < *mono {
            work.push((scaled(coeff, -(sb + sc), 1), mb));
            return TripleOutcome::Rewritten;
        }
        return TripleOutcome::NoRule;
    }
    let ok_b = zb || mb < *mono;
    let ok_c = zc || mc < *mono;
    if ok_b && ok_c {
        if !zb {
            work.push((scaled(coeff, -sb, 1), mb));
        }
        if !zc {
            work.push((scaled(coeff, -sc, 1), mc));
        }
        return TripleOutcome::Rewritten;
    }
    TripleOutcome::NoRule
}

// ---------------------------------------------------------------------------
// Linear quotient by the identity ideal.

/// Bound on the monomial orbit explored when closing the identity ideal.
/// Exceeding it leaves the tail of the ideal ungenerated, which merely
/// under-reduces (soundness is unaffected); the sizes arising from heat
/// kernel coefficients stay far below it.
const MAX_CLOSURE_MONOMIALS: usize = 4_000;

/// Reduces a rewritten polynomial modulo the linear span of every
/// three-term identity instance reachable from its support. The relations
/// are exact value-zero combinations of normal monomials, so subtracting
/// them never changes the polynomial's value; bringing the relation set to
/// echelon form and eliminating every leading monomial yields the unique
/// representative of the polynomial's class in the quotient.
fn reduce_modulo_ideal<C: CoeffRing>(poly: TensorPoly<C>) -> TensorPoly<C> {
    if poly.is_zero() {
        return poly;
    }
    let mut basis = IdealBasis::default();
    let mut seen: BTreeSet<TensorMonomial> =
        poly.terms().map(|(m, _)| m.clone()).collect();
    let mut queue: VecDeque<TensorMonomial> = seen.iter().cloned().collect();
    let mut rel_count = 0usize;
    while let Some(mono) = queue.pop_front() {
        for (rel, discovered) in identity_instances(&mono) {
            // Every monomial appearing in any normalized piece of the
            // instance belongs to the value component and anchors its own
            // instances, even when the summed relation collapses to zero —
            // cancelling pieces still name new component members.
            for m in discovered {
                if seen.len() < MAX_CLOSURE_MONOMIALS && seen.insert(m.clone()) {
                    queue.push_back(m);
                }
            }
            if rel.is_zero() {
                continue;
            }
            rel_count += 1;
            basis.insert(rel.terms().map(|(m, q)| (m.clone(), q.clone())).collect());
        }
    }
    if std::env::var_os("HEATKERNEL_CLOSURE_STATS").is_some() {
        eprintln!(
            "closure: support={} orbit={} relations={} rank={} capped={}",
            poly.terms().count(),
            seen.len(),
            rel_count,
            basis.rows.len(),
            seen.len() >= MAX_CLOSURE_MONOMIALS,
        );
    }
    basis.reduce(poly)
}

/// Normal form of a single presentation monomial over the rationals, cached
/// globally: the closure revisits the same presentations across anchors,
/// across the polynomials being normalized, and across calls.
fn normal_form_cached(mono: &TensorMonomial) -> TensorPoly<BigRational> {
    use std::sync::{Mutex, OnceLock};
    static CACHE: OnceLock<Mutex<BTreeMap<TensorMonomial, TensorPoly<BigRational>>>> =
        OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(BTreeMap::new()));
    if let Some(p) = cache.lock().expect("normal-form cache poisoned").get(mono) {
        return p.clone();
    }
    let pres = TensorPoly::from_term(<BigRational as CoeffRing>::one(), mono.clone());
    let nf = rewrite_terms(&pres, RuleSet::Full);
    let mut guard = cache.lock().expect("normal-form cache poisoned");
    if guard.len() >= 1 << 20 {
        guard.clear();
    }
    guard.insert(mono.clone(), nf.clone());
    nf
}

/// All three-term identity instances anchored at one normal monomial. Each
/// entry carries the normalized value-zero relation (possibly zero when the
/// rewriting pass already enforces it) together with every normal monomial
/// named by the instance's pieces. Besides the identities of each atom as
/// written, every non-innermost derivative is rotated into the innermost
/// position to anchor its own Bianchi instance: the rotated monomial is a
/// different tensor, and its identity contributes an independent relation
/// once expressed in normal monomials.
fn identity_instances(
    mono: &TensorMonomial,
) -> Vec<(TensorPoly<BigRational>, BTreeSet<TensorMonomial>)> {
    let mut out = Vec::new();
    for (ai, atom) in mono.atoms.iter().enumerate() {
        if triple_images(atom).is_empty() {
            continue;
        }
        let nd = atom.derivs.len();
        let mut variants: Vec<Atom> = vec![atom.clone()];
        for p in 0..nd.saturating_sub(1) {
            let mut derivs = atom.derivs.clone();
            let d = derivs.remove(p);
            derivs.push(d);
            variants.push(Atom::new(atom.kind, derivs, atom.slots.clone()));
        }
        for (vi, var) in variants.iter().enumerate() {
            for (ti, (b, c)) in triple_images(var).into_iter().enumerate() {
                // The cyclic identity ignores the derivative order; generate
                // it only for the atom as written.
                if vi > 0 && var.kind == AtomKind::Riemann && ti == 0 {
                    continue;
                }
                let mut rel = TensorPoly::<BigRational>::zero();
                let mut discovered = BTreeSet::new();
                for image in [var.clone(), b, c] {
                    let mut atoms = mono.atoms.clone();
                    atoms[ai] = image;
                    let nf = normal_form_cached(&TensorMonomial::new(atoms));
                    for (m, _) in nf.terms() {
                        discovered.insert(m.clone());
                    }
                    rel = rel.add(&nf);
                }
                out.push((rel, discovered));
            }
        }
    }
    out
}

/// An echelonized set of relation vectors over the rationals, indexed by
/// their leading (largest) monomials.
#[derive(Default)]
struct IdealBasis {
    rows: Vec<BTreeMap<TensorMonomial, BigRational>>,
    pivots: BTreeMap<TensorMonomial, usize>,
}

impl IdealBasis {
    /// Gaussian insertion: reduce the relation against existing pivots; if
    /// anything survives, scale its leading monomial to 1 and adopt it.
    fn insert(&mut self, mut rel: BTreeMap<TensorMonomial, BigRational>) {
        loop {
            rel.retain(|_, q| !CoeffRing::is_zero(q));
            let Some((m, c)) = rel.last_key_value().map(|(m, c)| (m.clone(), c.clone()))
            else {
                return;
            };
            match self.pivots.get(&m) {
                Some(&ri) => {
                    let row = self.rows[ri].clone();
                    for (rm, rq) in &row {
                        let delta = -(&c * rq);
                        *rel.entry(rm.clone())
                            .or_insert_with(<BigRational as CoeffRing>::zero) += delta;
                    }
                }
                None => {
                    let inv = c.recip();
                    for v in rel.values_mut() {
                        *v *= &inv;
                    }
                    self.rows.push(rel);
                    self.pivots.insert(m, self.rows.len() - 1);
                    return;
                }
            }
        }
    }

    /// Eliminates every pivot monomial from the polynomial. Each step
    /// replaces the largest pivot occurrence by strictly smaller monomials,
    /// so the loop terminates; the remainder, supported entirely on
    /// non-pivot monomials, is the canonical representative.
    fn reduce<C: CoeffRing>(&self, poly: TensorPoly<C>) -> TensorPoly<C> {
        let mut cur = poly;
        loop {
            let Some((m, c)) = cur
                .terms()
                .filter(|(m, _)| self.pivots.contains_key(*m))
                .max_by(|a, b| a.0.cmp(b.0))
                .map(|(m, c)| (m.clone(), c.clone()))
            else {
                return cur;
            };
            let row = &self.rows[self.pivots[&m]];
            for (rm, rq) in row {
                let delta = c
                    .try_mul(&C::from_rational(&-rq.clone()))
                    .expect("rational rescaling of a coefficient cannot fail");
                cur.add_canonical(delta, rm.clone());
            }
        }
    }
}
