//! Polynomials over tensor monomials with generic scalar coefficients.

use std::collections::BTreeMap;
use std::fmt;

use num_rational::BigRational;

use crate::coeffring::error::Result;
use crate::coeffring::n4::N4Scalar;
use crate::coeffring::param::ParamScalar;
use crate::coeffring::poly::Poly2;
use crate::coeffring::ratfn::RationalFn;

use super::atom::{Atom, AtomKind};
use super::index::Index;
use super::monomial::TensorMonomial;

/// The scalar coefficients a tensor polynomial can carry. Multiplication is
/// fallible because the dimension-4 value ring rejects log² products.
pub trait CoeffRing: Clone + PartialEq + fmt::Display {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    fn try_mul(&self, other: &Self) -> Result<Self>;
    fn from_ratio(num: i64, den: i64) -> Self;
    /// Embeds an exact rational.
    fn from_rational(q: &BigRational) -> Self;
    /// Multiplies by the dimension symbol n (metric traces).
    fn mul_n(&self) -> Self;
}

/// Plain rationals are the minimal coefficient ring. They cannot carry the
/// dimension symbol, so metric traces must be eliminated before computing
/// over them; identity-relation arithmetic only ever sees trace-free normal
/// monomials, which is why the embedding is safe there.
impl CoeffRing for BigRational {
    fn zero() -> Self {
        BigRational::from_integer(0.into())
    }
    fn one() -> Self {
        BigRational::from_integer(1.into())
    }
    fn is_zero(&self) -> bool {
        self.numer() == &num_bigint::BigInt::from(0)
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn neg(&self) -> Self {
        -self.clone()
    }
    fn try_mul(&self, other: &Self) -> Result<Self> {
        Ok(self * other)
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        BigRational::new(num.into(), den.into())
    }
    fn from_rational(q: &BigRational) -> Self {
        q.clone()
    }
    fn mul_n(&self) -> Self {
        unreachable!("dimension factors cannot arise over plain rationals")
    }
}

impl CoeffRing for ParamScalar {
    fn zero() -> Self {
        ParamScalar::zero()
    }
    fn one() -> Self {
        ParamScalar::one()
    }
    fn is_zero(&self) -> bool {
        self.is_zero()
    }
    fn add(&self, other: &Self) -> Self {
        self.add(other)
    }
    fn neg(&self) -> Self {
        self.neg()
    }
    fn try_mul(&self, other: &Self) -> Result<Self> {
        Ok(self.mul(other))
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        ParamScalar::from_int_ratio(num, den)
    }
    fn from_rational(q: &BigRational) -> Self {
        ParamScalar::from_q(q.clone())
    }
    fn mul_n(&self) -> Self {
        self.mul_ratfn(&RationalFn::from_poly(Poly2::var_n()))
    }
}

impl CoeffRing for N4Scalar {
    fn zero() -> Self {
        N4Scalar::zero()
    }
    fn one() -> Self {
        N4Scalar::from_q(BigRational::from_integer(1.into()))
    }
    fn is_zero(&self) -> bool {
        self.is_zero()
    }
    fn add(&self, other: &Self) -> Self {
        self.add(other)
    }
    fn neg(&self) -> Self {
        self.neg()
    }
    fn try_mul(&self, other: &Self) -> Result<Self> {
        self.mul(other)
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        N4Scalar::from_q(BigRational::new(num.into(), den.into()))
    }
    fn from_rational(q: &BigRational) -> Self {
        N4Scalar::from_q(q.clone())
    }
    fn mul_n(&self) -> Self {
        self.scale(&BigRational::from_integer(4.into()))
    }
}

/// A sum of canonicalized tensor monomials with scalar coefficients.
#[derive(Clone, PartialEq)]
pub struct TensorPoly<C: CoeffRing> {
    terms: BTreeMap<TensorMonomial, C>,
}

impl<C: CoeffRing> Default for TensorPoly<C> {
    fn default() -> Self {
        TensorPoly { terms: BTreeMap::new() }
    }
}

impl<C: CoeffRing> TensorPoly<C> {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        let mut p = Self::zero();
        p.add_term(C::one(), TensorMonomial::one());
        p
    }

    pub fn from_term(coeff: C, mono: TensorMonomial) -> Self {
        let mut p = Self::zero();
        p.add_term(coeff, mono);
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&TensorMonomial, &C)> {
        self.terms.iter()
    }

    /// Reduces curvature self-traces, canonicalizes, and folds the term in
    /// (dropping zeros).
    pub fn add_term(&mut self, coeff: C, mono: TensorMonomial) {
        if coeff.is_zero() {
            return;
        }
        let (reduced, rsign, rzero) = mono.reduce_self_traces();
        if rzero {
            return;
        }
        let canon = reduced.canonicalize();
        if canon.is_zero {
            return;
        }
        let coeff = if rsign * canon.sign < 0 { coeff.neg() } else { coeff };
        self.add_canonical(coeff, canon.mono);
    }

    /// Folds in a term whose monomial is already canonical.
    pub fn add_canonical(&mut self, coeff: C, mono: TensorMonomial) {
        if coeff.is_zero() {
            return;
        }
        let entry = self.terms.entry(mono);
        match entry {
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let sum = o.get().add(&coeff);
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(coeff);
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in other.terms() {
            out.add_canonical(c.clone(), m.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in other.terms() {
            out.add_canonical(c.neg(), m.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        let mut out = Self::zero();
        for (m, c) in self.terms() {
            out.add_canonical(c.neg(), m.clone());
        }
        out
    }

    pub fn scale(&self, k: &C) -> Result<Self> {
        let mut out = Self::zero();
        for (m, c) in self.terms() {
            out.add_canonical(c.try_mul(k)?, m.clone());
        }
        Ok(out)
    }

    /// Product; bundle-valued atoms of `self` precede those of `other`.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        let mut out = Self::zero();
        for (ma, ca) in self.terms() {
            let shift = ma.max_dummy_id().map_or(0, |d| d + 1);
            for (mb, cb) in other.terms() {
                let mb = mb.shift_dummies(shift);
                let mut atoms = ma.atoms.clone();
                atoms.extend(mb.atoms);
                out.add_term(ca.try_mul(cb)?, TensorMonomial::new(atoms));
            }
        }
        Ok(out)
    }

    pub fn map_coeffs<D: CoeffRing>(&self, f: impl Fn(&C) -> Result<D>) -> Result<TensorPoly<D>> {
        let mut out = TensorPoly::<D>::zero();
        for (m, c) in self.terms() {
            out.add_canonical(f(c)?, m.clone());
        }
        Ok(out)
    }

    /// Eliminates bare metric atoms that have at least one contracted slot:
    /// full traces contribute a factor n, mixed slots relabel the partner.
    pub fn contract_metric(&self) -> Self {
        let mut out = Self::zero();
        for (m, c) in self.terms() {
            let (mono, n_power, vanished) = contract_metric_mono(m);
            if vanished {
                continue;
            }
            let mut coeff = c.clone();
            for _ in 0..n_power {
                coeff = coeff.mul_n();
            }
            out.add_term(coeff, mono);
        }
        out
    }

    /// Contracts the two free indices `a`, `b` with an inverse metric.
    pub fn lorentz_trace(&self, a: Index, b: Index) -> Self {
        assert!(a.free && b.free);
        let mut out = Self::zero();
        for (m, c) in self.terms() {
            let fresh = m.max_dummy_id().map_or(0, |d| d + 1);
            let tr = m.map_indices(|ix| {
                if ix.free && (ix.id == a.id || ix.id == b.id) {
                    Index::dummy(fresh)
                } else {
                    ix
                }
            });
            let (mono, n_power, vanished) = contract_metric_mono(&tr);
            if vanished {
                continue;
            }
            let mut coeff = c.clone();
            for _ in 0..n_power {
                coeff = coeff.mul_n();
            }
            out.add_term(coeff, mono);
        }
        out
    }

    /// Averages over all k! permutations of the listed free indices.
    pub fn symmetrized(&self, frees: &[Index]) -> Self {
        let k = frees.len();
        if k < 2 {
            return self.clone();
        }
        let mut result = Self::zero();
        let mut count: i64 = 0;
        let ids: Vec<u32> = frees.iter().map(|f| f.id).collect();
        for_each_permutation(k, &mut |perm| {
            count += 1;
            for (m, c) in self.terms() {
                let pm = m.map_indices(|ix| {
                    if ix.free {
                        if let Some(pos) = ids.iter().position(|&id| id == ix.id) {
                            return Index::free(ids[perm[pos]]);
                        }
                    }
                    ix
                });
                result.add_term(c.clone(), pm);
            }
        });
        result
            .scale(&C::from_ratio(1, count))
            .expect("scaling by a rational cannot fail")
    }
}

/// Contracts metric atoms inside one monomial. Returns the reduced monomial,
/// the count of full traces (factors of n), and whether it vanished (a
/// derivative-bearing metric atom is zero by metric compatibility).
fn contract_metric_mono(m: &TensorMonomial) -> (TensorMonomial, u32, bool) {
    let mut atoms = m.atoms.clone();
    let mut n_power = 0u32;
    loop {
        let mut acted = false;
        for i in 0..atoms.len() {
            if atoms[i].kind != AtomKind::Metric {
                continue;
            }
            if !atoms[i].derivs.is_empty() {
                return (TensorMonomial::one(), 0, true);
            }
            let s0 = atoms[i].slots[0];
            let s1 = atoms[i].slots[1];
            if !s0.free && s0 == s1 {
                atoms.remove(i);
                n_power += 1;
                acted = true;
                break;
            }
            // Pick a contracted slot whose partner lives outside this atom.
            let (dummy, other) = if !s0.free {
                (s0, s1)
            } else if !s1.free {
                (s1, s0)
            } else {
                continue;
            };
            let mut replaced = false;
            for (j, atom) in atoms.iter_mut().enumerate() {
                if j == i {
                    continue;
                }
                for ix in atom.indices_mut() {
                    if *ix == dummy {
                        *ix = other;
                        replaced = true;
                        break;
                    }
                }
                if replaced {
                    break;
                }
            }
            debug_assert!(replaced, "dummy {dummy} lost its partner");
            atoms.remove(i);
            acted = true;
            break;
        }
        if !acted {
            break;
        }
    }
    (TensorMonomial::new(atoms), n_power, false)
}

/// Visits every permutation of 0..k (as an image table).
fn for_each_permutation(k: usize, visit: &mut impl FnMut(&[usize])) {
    let mut perm: Vec<usize> = (0..k).collect();
    heap_permute(&mut perm, k, visit);
}

fn heap_permute(perm: &mut Vec<usize>, m: usize, visit: &mut impl FnMut(&[usize])) {
    if m == 1 {
        visit(perm);
        return;
    }
    for i in 0..m {
        heap_permute(perm, m - 1, visit);
        if m % 2 == 0 {
            perm.swap(i, m - 1);
        } else {
            perm.swap(0, m - 1);
        }
    }
}

/// All pairings of the given indices into products of metric atoms:
/// (len-1)!! monomials with unit coefficients.
pub fn sym_metric_product(indices: &[Index]) -> Vec<TensorMonomial> {
    assert!(indices.len() % 2 == 0, "pairing needs an even index count");
    let mut out = Vec::new();
    let mut current: Vec<Atom> = Vec::new();
    pairings(&mut indices.to_vec(), &mut current, &mut out);
    out
}

fn pairings(rest: &mut Vec<Index>, current: &mut Vec<Atom>, out: &mut Vec<TensorMonomial>) {
    if rest.is_empty() {
        out.push(TensorMonomial::new(current.clone()));
        return;
    }
    let first = rest.remove(0);
    for j in 0..rest.len() {
        let partner = rest.remove(j);
        current.push(Atom::bare(AtomKind::Metric, vec![first, partner]));
        pairings(rest, current, out);
        current.pop();
        rest.insert(j, partner);
    }
    rest.insert(0, first);
}

impl<C: CoeffRing> fmt::Display for TensorPoly<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let mut first = true;
        for (m, c) in &self.terms {
            if !first {
                f.write_str("\n")?;
            }
            first = false;
            write!(f, "{c} | {m}")?;
        }
        Ok(())
    }
}

impl<C: CoeffRing> fmt::Debug for TensorPoly<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type P = TensorPoly<ParamScalar>;

    fn term(s: &str) -> P {
        P::from_term(ParamScalar::one(), TensorMonomial::parse(s).unwrap())
    }

    #[test]
    fn trace_of_metric_is_n() {
        let g = term("g(a,b)");
        let traced = g.lorentz_trace(Index::free(0), Index::free(1));
        let expected = P::from_term(ParamScalar::one().mul_n(), TensorMonomial::one());
        assert_eq!(traced, expected);
    }

    #[test]
    fn metric_contraction_relabels() {
        // g^{ij} Ric_{ja} -> Ric_{ia} with a fresh pairing.
        let p = term("g(i,j) Ric(j,a) X(i,b)");
        let q = p.contract_metric();
        assert_eq!(q, term("Ric(i,a) X(i,b)"));
        // Full trace of the metric against itself.
        let p = term("g(i,j) g(i,j)");
        assert_eq!(p.contract_metric(), P::from_term(ParamScalar::one().mul_n(), TensorMonomial::one()));
    }

    #[test]
    fn trace_distinguishes_riemann_contractions() {
        let a = Index::free(0);
        let b = Index::free(1);
        // g^{ab} R_{iajb} X^{ij} = Ric_{ij} X^{ij}.
        let p = term("R(i,a,j,b) X(i,j)").lorentz_trace(a, b);
        assert_eq!(p, term("Ric(i,j) X(i,j)"));
        // g^{ab} R_{ijab} X^{ij} = 0 (antisymmetric pair trace).
        let p = term("R(i,j,a,b) X(i,j)").lorentz_trace(a, b);
        assert!(p.is_zero());
        // Double self-trace collapses to the curvature scalar.
        let p = term("R(i,j,i,j)");
        assert_eq!(p, term("Rs"));
    }

    #[test]
    fn symmetrization_of_antisymmetric_pair_vanishes() {
        let p = term("W(a,b)").symmetrized(&[Index::free(0), Index::free(1)]);
        assert!(p.is_zero());
        let q = term("Ric(a,b)").symmetrized(&[Index::free(0), Index::free(1)]);
        assert_eq!(q, term("Ric(a,b)"));
    }

    #[test]
    fn pairings_count_is_double_factorial() {
        let idx: Vec<Index> = (0..6).map(Index::free).collect();
        let monos = sym_metric_product(&idx);
        assert_eq!(monos.len(), 15);
        for m in &monos {
            assert_eq!(m.atoms.len(), 3);
            m.audit().unwrap();
        }
    }

    #[test]
    fn product_keeps_bundle_order_and_separates_dummies() {
        let x = term("X(i,a) k(i)");
        let w = term("W(i,b) k(i)");
        let p = x.mul(&w).unwrap();
        assert_eq!(p.len(), 1);
        let (m, _) = p.terms().next().unwrap();
        m.audit().unwrap();
        // X precedes W; the two k-contractions stay distinct.
        let s = m.to_string();
        assert!(s.contains("X(") && s.contains("W("), "{s}");
        let xi = s.find("X(").unwrap();
        let wi = s.find("W(").unwrap();
        assert!(xi < wi, "{s}");
    }
}
