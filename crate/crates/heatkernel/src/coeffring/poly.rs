//! Sparse bivariate polynomials over ℚ in the variables `a` (gauge parameter)
//! and `n` (manifold dimension).
//!
//! Monomials are ordered graded-lexicographically with a ≺ n: higher total
//! degree first, ties broken by the exponent of `n`. All normalization in
//! the crate (leading coefficients, gcd signs, display order) refers to this
//! order.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Exact rational scalar used throughout the coefficient ring.
pub type Q = BigRational;

/// Builds a rational from an integer pair. Panics on zero denominator.
pub fn q(num: i64, den: i64) -> Q {
    Q::new(BigInt::from(num), BigInt::from(den))
}

/// Shorthand for an integer rational.
pub fn qi(num: i64) -> Q {
    Q::from_integer(BigInt::from(num))
}

/// Compares exponent pairs (deg_a, deg_n) in graded lex order with a ≺ n.
pub fn grlex_cmp(x: (u32, u32), y: (u32, u32)) -> Ordering {
    let (xa, xn) = x;
    let (ya, yn) = y;
    (xa + xn).cmp(&(ya + yn)).then(xn.cmp(&yn))
}

/// A sparse polynomial in ℚ[a, n].
///
/// Invariant: no explicitly stored zero coefficients; the zero polynomial is
/// the empty term map.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct Poly2 {
    terms: BTreeMap<(u32, u32), Q>,
}

impl Poly2 {
    pub fn zero() -> Self {
        Poly2::default()
    }

    pub fn one() -> Self {
        Poly2::constant(Q::one())
    }

    pub fn constant(c: Q) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert((0, 0), c);
        }
        Poly2 { terms }
    }

    /// The variable `a`.
    pub fn var_a() -> Self {
        Poly2::monomial(Q::one(), 1, 0)
    }

    /// The variable `n`.
    pub fn var_n() -> Self {
        Poly2::monomial(Q::one(), 0, 1)
    }

    /// The polynomial 1 − a.
    pub fn one_minus_a() -> Self {
        Poly2::one().sub(&Poly2::var_a())
    }

    pub fn monomial(c: Q, deg_a: u32, deg_n: u32) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert((deg_a, deg_n), c);
        }
        Poly2 { terms }
    }

    pub fn from_terms(it: impl IntoIterator<Item = ((u32, u32), Q)>) -> Self {
        let mut p = Poly2::zero();
        for (e, c) in it {
            p.add_term(e, c);
        }
        p
    }

    fn add_term(&mut self, e: (u32, u32), c: Q) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&e) {
            Some(old) => {
                *old += c;
                if old.is_zero() {
                    self.terms.remove(&e);
                }
            }
            None => {
                self.terms.insert(e, c);
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|&e| e == (0, 0))
    }

    pub fn as_constant(&self) -> Option<Q> {
        if self.is_zero() {
            return Some(Q::zero());
        }
        if self.is_constant() {
            return self.terms.get(&(0, 0)).cloned();
        }
        None
    }

    pub fn is_one(&self) -> bool {
        self.as_constant().map(|c| c.is_one()).unwrap_or(false)
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(u32, u32), &Q)> {
        self.terms.iter()
    }

    pub fn deg_a(&self) -> u32 {
        self.terms.keys().map(|e| e.0).max().unwrap_or(0)
    }

    pub fn deg_n(&self) -> u32 {
        self.terms.keys().map(|e| e.1).max().unwrap_or(0)
    }

    /// Leading exponent under grlex (a ≺ n). None for the zero polynomial.
    pub fn leading_exp(&self) -> Option<(u32, u32)> {
        self.terms.keys().copied().max_by(|&x, &y| grlex_cmp(x, y))
    }

    pub fn leading_coeff(&self) -> Q {
        match self.leading_exp() {
            Some(e) => self.terms[&e].clone(),
            None => Q::zero(),
        }
    }

    pub fn add(&self, other: &Poly2) -> Poly2 {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(*e, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Poly2) -> Poly2 {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(*e, -c.clone());
        }
        out
    }

    pub fn neg(&self) -> Poly2 {
        Poly2 {
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (*e, -c.clone()))
                .collect(),
        }
    }

    pub fn mul(&self, other: &Poly2) -> Poly2 {
        let mut out = Poly2::zero();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                out.add_term((e1.0 + e2.0, e1.1 + e2.1), c1 * c2);
            }
        }
        out
    }

    pub fn scale(&self, c: &Q) -> Poly2 {
        if c.is_zero() {
            return Poly2::zero();
        }
        Poly2 {
            terms: self
                .terms
                .iter()
                .map(|(e, k)| (*e, k * c))
                .collect(),
        }
    }

    pub fn pow(&self, k: u32) -> Poly2 {
        let mut out = Poly2::one();
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }

    pub fn eval(&self, a: &Q, n: &Q) -> Q {
        let mut acc = Q::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for _ in 0..e.0 {
                t *= a;
            }
            for _ in 0..e.1 {
                t *= n;
            }
            acc += t;
        }
        acc
    }

    /// Substitutes a concrete rational for `n`, leaving a polynomial in `a`.
    pub fn subst_n(&self, n: &Q) -> Poly2 {
        let mut out = Poly2::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for _ in 0..e.1 {
                t *= n;
            }
            out.add_term((e.0, 0), t);
        }
        out
    }

    /// Substitutes a concrete rational for `a`, leaving a polynomial in `n`.
    pub fn subst_a(&self, a: &Q) -> Poly2 {
        let mut out = Poly2::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for _ in 0..e.0 {
                t *= a;
            }
            out.add_term((0, e.1), t);
        }
        out
    }

    /// Rewrites the polynomial in the shifted variable u = n − s, i.e. returns
    /// p(a, s + u) with the second exponent now counting powers of u.
    pub fn shift_n(&self, s: &Q) -> Poly2 {
        let mut out = Poly2::zero();
        for (e, c) in &self.terms {
            // (s + u)^dn expanded binomially
            let dn = e.1;
            let mut binom = Q::one();
            let mut spow = vec![Q::one()];
            for _ in 0..dn {
                let last = spow.last().unwrap().clone();
                spow.push(last * s);
            }
            for j in 0..=dn {
                // C(dn, j) * s^(dn-j) * u^j
                if j > 0 {
                    binom = binom * qi((dn - j + 1) as i64) / qi(j as i64);
                }
                out.add_term((e.0, j), c * &binom * &spow[(dn - j) as usize]);
            }
        }
        out
    }

    pub fn deriv_n(&self) -> Poly2 {
        let mut out = Poly2::zero();
        for (e, c) in &self.terms {
            if e.1 > 0 {
                out.add_term((e.0, e.1 - 1), c * qi(e.1 as i64));
            }
        }
        out
    }

    pub fn deriv_a(&self) -> Poly2 {
        let mut out = Poly2::zero();
        for (e, c) in &self.terms {
            if e.0 > 0 {
                out.add_term((e.0 - 1, e.1), c * qi(e.0 as i64));
            }
        }
        out
    }

    /// Exact multivariate division: returns Some(q) with self = q·d when the
    /// division leaves no remainder, None otherwise.
    pub fn exact_div(&self, d: &Poly2) -> Option<Poly2> {
        if d.is_zero() {
            return None;
        }
        if let Some(c) = d.as_constant() {
            return Some(self.scale(&(Q::one() / c)));
        }
        let dl = d.leading_exp().unwrap();
        let dc = d.terms[&dl].clone();
        let mut rem = self.clone();
        let mut quot = Poly2::zero();
        while !rem.is_zero() {
            let rl = rem.leading_exp().unwrap();
            if rl.0 < dl.0 || rl.1 < dl.1 {
                return None;
            }
            let e = (rl.0 - dl.0, rl.1 - dl.1);
            let c = &rem.terms[&rl] / &dc;
            let t = Poly2::monomial(c, e.0, e.1);
            quot = quot.add(&t);
            rem = rem.sub(&t.mul(d));
        }
        Some(quot)
    }

    pub fn divides(&self, other: &Poly2) -> bool {
        other.exact_div(self).is_some()
    }

    /// Writes self = scale · prim where prim has coprime integer coefficients
    /// and positive leading coefficient (grlex). Zero maps to (1, 0).
    pub fn primitive(&self) -> (Q, Poly2) {
        if self.is_zero() {
            return (Q::one(), Poly2::zero());
        }
        let mut den_lcm = BigInt::one();
        for c in self.terms.values() {
            den_lcm = den_lcm.lcm(c.denom());
        }
        let mut num_gcd = BigInt::zero();
        for c in self.terms.values() {
            num_gcd = num_gcd.gcd(&(c.numer() * &den_lcm / c.denom()));
        }
        let mut scale = Q::new(num_gcd, den_lcm);
        let lead = self.leading_coeff();
        if lead.is_negative() {
            scale = -scale;
        }
        let inv = Q::one() / scale.clone();
        (scale, self.scale(&inv))
    }

    /// Greatest common divisor, returned primitive with positive leading
    /// coefficient. gcd(0, p) = primitive(p); gcd of two nonzero constants
    /// is 1.
    pub fn gcd(&self, other: &Poly2) -> Poly2 {
        if self.is_zero() {
            return other.primitive().1;
        }
        if other.is_zero() {
            return self.primitive().1;
        }
        if self.is_constant() || other.is_constant() {
            return Poly2::one();
        }
        if self.deg_a() == 0 && other.deg_a() == 0 {
            return gcd_uni(self, other, Var::N);
        }
        if self.deg_n() == 0 && other.deg_n() == 0 {
            return gcd_uni(self, other, Var::A);
        }
        gcd_bivar(self, other)
    }

    /// The multiplicity of the factor `f` in self (largest k with f^k | self).
    pub fn factor_multiplicity(&self, f: &Poly2) -> (u32, Poly2) {
        let mut k = 0;
        let mut cur = self.clone();
        if self.is_zero() {
            return (0, cur);
        }
        while let Some(q) = cur.exact_div(f) {
            cur = q;
            k += 1;
        }
        (k, cur)
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Var {
    A,
    N,
}

/// Univariate view: coefficient list indexed by the degree in `v`, with
/// coefficients polynomials in the other variable.
fn uni_coeffs(p: &Poly2, v: Var) -> Vec<Poly2> {
    let deg = match v {
        Var::A => p.deg_a(),
        Var::N => p.deg_n(),
    } as usize;
    let mut out = vec![Poly2::zero(); deg + 1];
    for (e, c) in &p.terms {
        let (d, rest) = match v {
            Var::A => (e.0, (0, e.1)),
            Var::N => (e.1, (e.0, 0)),
        };
        out[d as usize] = out[d as usize].add(&Poly2::monomial(c.clone(), rest.0, rest.1));
    }
    out
}

fn from_uni_coeffs(cs: &[Poly2], v: Var) -> Poly2 {
    let mut out = Poly2::zero();
    for (d, c) in cs.iter().enumerate() {
        let shift = match v {
            Var::A => Poly2::monomial(Q::one(), d as u32, 0),
            Var::N => Poly2::monomial(Q::one(), 0, d as u32),
        };
        out = out.add(&c.mul(&shift));
    }
    out
}

fn uni_degree(cs: &[Poly2]) -> Option<usize> {
    cs.iter().rposition(|c| !c.is_zero())
}

/// Euclidean gcd for polynomials that are univariate in `v` (the other
/// variable does not occur). Result is primitive with positive lead.
fn gcd_uni(p: &Poly2, q: &Poly2, v: Var) -> Poly2 {
    let mut f = uni_coeffs(p, v);
    let mut g = uni_coeffs(q, v);
    loop {
        let dg = match uni_degree(&g) {
            None => break,
            Some(d) => d,
        };
        let df = match uni_degree(&f) {
            None => {
                f = g;
                break;
            }
            Some(d) => d,
        };
        if df < dg {
            std::mem::swap(&mut f, &mut g);
            continue;
        }
        // f mod g, both with rational constant coefficients
        let glc = g[dg].as_constant().expect("univariate coeff");
        for k in (dg..=df).rev() {
            let flc = match f[k].as_constant() {
                Some(c) => c,
                None => unreachable!("univariate coeff"),
            };
            if flc.is_zero() {
                continue;
            }
            let ratio = flc / glc.clone();
            for j in 0..=dg {
                let t = g[j].scale(&ratio);
                f[k - dg + j] = f[k - dg + j].sub(&t);
            }
        }
        std::mem::swap(&mut f, &mut g);
    }
    from_uni_coeffs(&f, v).primitive().1
}

/// Content of p viewed as a polynomial in `a` with coefficients in ℚ[n].
fn content_in_a(p: &Poly2) -> Poly2 {
    let cs = uni_coeffs(p, Var::A);
    let mut g = Poly2::zero();
    for c in cs.iter().filter(|c| !c.is_zero()) {
        g = if g.is_zero() {
            c.primitive().1
        } else if g.is_one() {
            break;
        } else {
            g.gcd(c)
        };
    }
    g
}

/// Primitive-PRS gcd for genuinely bivariate inputs, main variable `a`.
fn gcd_bivar(p: &Poly2, q: &Poly2) -> Poly2 {
    let cont_p = content_in_a(p);
    let cont_q = content_in_a(q);
    let cont_gcd = cont_p.gcd(&cont_q);
    let mut f = p.exact_div(&cont_p).expect("content divides");
    let mut g = q.exact_div(&cont_q).expect("content divides");
    if f.deg_a() < g.deg_a() {
        std::mem::swap(&mut f, &mut g);
    }
    loop {
        if g.is_zero() {
            break;
        }
        let r = pseudo_rem_a(&f, &g);
        f = g;
        g = match r {
            Some(r) if !r.is_zero() => {
                let c = content_in_a(&r);
                r.exact_div(&c).expect("content divides")
            }
            _ => Poly2::zero(),
        };
    }
    let (_, prim) = f.primitive();
    // The PRS runs on contents removed, so prim is the gcd of the primitive
    // parts; reattach the content gcd.
    cont_gcd.mul(&prim).primitive().1
}

/// Pseudo-remainder of f by g in the variable `a`. Returns None when
/// deg_a f < deg_a g.
fn pseudo_rem_a(f: &Poly2, g: &Poly2) -> Option<Poly2> {
    let df = f.deg_a();
    let dg = g.deg_a();
    if df < dg {
        return None;
    }
    let mut fc = uni_coeffs(f, Var::A);
    let gc = uni_coeffs(g, Var::A);
    let glc = gc[dg as usize].clone();
    for k in (dg..=df).rev() {
        let k = k as usize;
        let flc = fc[k].clone();
        if flc.is_zero() {
            continue;
        }
        // multiply the whole remainder by lc(g), then cancel the top term
        for c in fc.iter_mut().take(k + 1) {
            *c = c.mul(&glc);
        }
        for j in 0..=(dg as usize) {
            let t = gc[j].mul(&flc);
            fc[k - dg as usize + j] = fc[k - dg as usize + j].sub(&t);
        }
        debug_assert!(fc[k].is_zero());
    }
    Some(from_uni_coeffs(&fc[..dg as usize], Var::A))
}

fn fmt_term(c: &Q, e: (u32, u32), first: bool, out: &mut String) {
    use std::fmt::Write;
    let neg = c.is_negative();
    let mag = c.abs();
    if first {
        if neg {
            out.push('-');
        }
    } else if neg {
        out.push_str(" - ");
    } else {
        out.push_str(" + ");
    }
    let mut vars = String::new();
    if e.0 > 0 {
        vars.push('a');
        if e.0 > 1 {
            write!(vars, "^{}", e.0).unwrap();
        }
    }
    if e.1 > 0 {
        if !vars.is_empty() {
            vars.push('*');
        }
        vars.push('n');
        if e.1 > 1 {
            write!(vars, "^{}", e.1).unwrap();
        }
    }
    if vars.is_empty() {
        write!(out, "{}", mag).unwrap();
    } else if mag.is_one() {
        out.push_str(&vars);
    } else {
        write!(out, "{}*{}", mag, vars).unwrap();
    }
}

impl fmt::Display for Poly2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut exps: Vec<(u32, u32)> = self.terms.keys().copied().collect();
        exps.sort_by(|&x, &y| grlex_cmp(y, x));
        let mut s = String::new();
        for (i, e) in exps.iter().enumerate() {
            fmt_term(&self.terms[e], *e, i == 0, &mut s);
        }
        write!(f, "{}", s)
    }
}

impl fmt::Debug for Poly2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pa() -> Poly2 {
        Poly2::var_a()
    }
    fn pn() -> Poly2 {
        Poly2::var_n()
    }

    #[test]
    fn grlex_order_a_precedes_n() {
        // total degree dominates; ties broken by n-degree
        assert_eq!(grlex_cmp((2, 0), (0, 1)), Ordering::Greater);
        assert_eq!(grlex_cmp((1, 1), (2, 0)), Ordering::Greater);
        assert_eq!(grlex_cmp((0, 2), (1, 1)), Ordering::Greater);
        let p = pa().pow(2).add(&pn().mul(&pa())).add(&pn().pow(2));
        assert_eq!(p.leading_exp(), Some((0, 2)));
    }

    #[test]
    fn arithmetic_roundtrip() {
        let p = pa().add(&pn()).pow(3);
        let q = pa().add(&pn());
        let r = p.exact_div(&q).unwrap();
        assert_eq!(r, pa().add(&pn()).pow(2));
        assert!(q.mul(&r).sub(&p).is_zero());
    }

    #[test]
    fn exact_div_detects_nondivisible() {
        let p = pa().pow(2).add(&Poly2::one());
        assert!(p.exact_div(&pa()).is_none());
    }

    #[test]
    fn shift_n_expands_binomially() {
        // (n)^2 at n = 4+u gives 16 + 8u + u^2
        let p = pn().pow(2);
        let s = p.shift_n(&qi(4));
        assert_eq!(s.eval(&qi(0), &qi(0)), qi(16));
        assert_eq!(s.eval(&qi(0), &qi(1)), qi(25));
    }

    #[test]
    fn gcd_bivariate_common_factor() {
        let f = pa().add(&pn()); // a + n
        let g = pa().sub(&Poly2::one()); // a - 1
        let p = f.mul(&g).mul(&f); // (a+n)^2 (a-1)
        let q = f.mul(&pn()); // (a+n) n
        let d = p.gcd(&q);
        assert_eq!(d, f);
    }

    #[test]
    fn gcd_of_coprime_is_one() {
        let p = pa().mul(&pn()).add(&Poly2::one());
        let q = pa().sub(&pn());
        assert!(p.gcd(&q).is_one());
    }

    #[test]
    fn primitive_normalizes_sign_and_content() {
        let p = pa().scale(&q(-4, 6)).add(&pn().scale(&q(-2, 3)));
        // -2/3 a - 2/3 n  ->  scale -2/3, primitive a + n
        let (s, prim) = p.primitive();
        assert_eq!(s, q(-2, 3));
        assert_eq!(prim, pa().add(&pn()));
        assert!(prim.leading_coeff().is_positive());
    }

    #[test]
    fn display_is_grlex_descending() {
        let p = pa()
            .pow(2)
            .scale(&qi(3))
            .add(&pn())
            .sub(&Poly2::constant(q(1, 2)));
        assert_eq!(p.to_string(), "3*a^2 + n - 1/2");
    }

    #[test]
    fn factor_multiplicity_counts() {
        let oma = Poly2::one_minus_a();
        let p = oma.pow(3).mul(&pn());
        let (k, rest) = p.factor_multiplicity(&oma);
        assert_eq!(k, 3);
        assert_eq!(rest, pn());
    }
}
