//! Tensor atoms: a kind, an ordered derivative prefix, and index slots.

use std::fmt;

use super::index::Index;

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum AtomKind {
    /// Metric / Kronecker delta (variance is formal), 2 slots, symmetric.
    Metric,
    /// Momentum covector k, 1 slot.
    Momentum,
    /// Scalar curvature, 0 slots.
    RScalar,
    /// Ricci tensor, 2 slots, symmetric.
    Ricci,
    /// Riemann tensor, 4 slots; antisymmetric in each pair, symmetric under
    /// pair exchange.
    Riemann,
    /// Transverse projector g_ab − k_a k_b / k², 2 slots, symmetric.
    Proj1,
    /// Longitudinal projector k_a k_b / k², 2 slots, symmetric.
    Proj2,
    /// Phase function (two-point scalar); carries only a derivative prefix.
    PhaseL,
    /// Torsion (reserved in the data model; the pipeline rejects it),
    /// 3 slots, antisymmetric in the last two.
    Torsion,
    /// Gauge-bundle curvature, 2 slots, antisymmetric; matrix-valued on the
    /// bundle (noncommuting).
    W,
    /// The operator's endomorphism, 2 slots, NO symmetry; matrix-valued on
    /// the bundle (noncommuting).
    X,
    /// Transport function (two-point bundle+tangent bitensor): slot 0 lives
    /// at the derivative point, slot 1 at the other point and is inert under
    /// derivatives; matrix-valued on the bundle (noncommuting).
    TransportI,
    /// Inverse of the principal symbol, kept opaque until coincidence;
    /// 2 slots, symmetric, gauge-scalar. Derivatives never rest on it — the
    /// symbol calculus expands them immediately by the inverse rule.
    AInv,
}

/// A slot permutation with its sign, e.g. Riemann first-pair antisymmetry.
pub type SlotMove = (&'static [usize], i8);

const ID0: &[usize] = &[];
const ID1: &[usize] = &[0];
const ID2: &[usize] = &[0, 1];
const SWAP2: &[usize] = &[1, 0];
const ID3: &[usize] = &[0, 1, 2];
const SWAP3_12: &[usize] = &[0, 2, 1];
const ID4: &[usize] = &[0, 1, 2, 3];
const R_A: &[usize] = &[1, 0, 2, 3];
const R_B: &[usize] = &[0, 1, 3, 2];
const R_AB: &[usize] = &[1, 0, 3, 2];
const R_P: &[usize] = &[2, 3, 0, 1];
const R_PA: &[usize] = &[3, 2, 0, 1];
const R_PB: &[usize] = &[2, 3, 1, 0];
const R_PAB: &[usize] = &[3, 2, 1, 0];

impl AtomKind {
    pub fn arity(self) -> usize {
        match self {
            AtomKind::RScalar | AtomKind::PhaseL => 0,
            AtomKind::Momentum => 1,
            AtomKind::Metric
            | AtomKind::Ricci
            | AtomKind::Proj1
            | AtomKind::Proj2
            | AtomKind::W
            | AtomKind::X
            | AtomKind::TransportI
            | AtomKind::AInv => 2,
            AtomKind::Torsion => 3,
            AtomKind::Riemann => 4,
        }
    }

    /// Matrix-valued on the bundle: relative order with other such atoms is
    /// part of the monomial's identity.
    pub fn is_bundle(self) -> bool {
        matches!(self, AtomKind::W | AtomKind::X | AtomKind::TransportI)
    }

    /// Curvature-type mass dimension (derivative prefix adds 1 per index).
    pub fn mass_dim(self) -> u32 {
        match self {
            AtomKind::Riemann | AtomKind::Ricci | AtomKind::RScalar | AtomKind::W | AtomKind::X => 2,
            _ => 0,
        }
    }

    /// All slot presentations reachable by the atom's symmetries, with signs.
    pub fn slot_moves(self) -> &'static [SlotMove] {
        match self {
            AtomKind::RScalar | AtomKind::PhaseL => &[(ID0, 1)],
            AtomKind::Momentum => &[(ID1, 1)],
            AtomKind::Metric
            | AtomKind::Ricci
            | AtomKind::Proj1
            | AtomKind::Proj2
            | AtomKind::AInv => &[(ID2, 1), (SWAP2, 1)],
            AtomKind::W => &[(ID2, 1), (SWAP2, -1)],
            AtomKind::X | AtomKind::TransportI => &[(ID2, 1)],
            AtomKind::Torsion => &[(ID3, 1), (SWAP3_12, -1)],
            AtomKind::Riemann => &[
                (ID4, 1),
                (R_A, -1),
                (R_B, -1),
                (R_AB, 1),
                (R_P, 1),
                (R_PA, -1),
                (R_PB, -1),
                (R_PAB, 1),
            ],
        }
    }

    pub fn display_name(self) -> &'static str {
        match self {
            AtomKind::Metric => "g",
            AtomKind::Momentum => "k",
            AtomKind::RScalar => "Rs",
            AtomKind::Ricci => "Ric",
            AtomKind::Riemann => "R",
            AtomKind::Proj1 => "P1",
            AtomKind::Proj2 => "P2",
            AtomKind::PhaseL => "l",
            AtomKind::Torsion => "T",
            AtomKind::W => "W",
            AtomKind::X => "X",
            AtomKind::TransportI => "I",
        }
    }

    pub fn from_name(s: &str) -> Option<AtomKind> {
        Some(match s {
            "g" => AtomKind::Metric,
            "k" => AtomKind::Momentum,
            "Rs" => AtomKind::RScalar,
            "Ric" => AtomKind::Ricci,
            "R" => AtomKind::Riemann,
            "P1" => AtomKind::Proj1,
            "P2" => AtomKind::Proj2,
            "l" => AtomKind::PhaseL,
            "T" => AtomKind::Torsion,
            "W" => AtomKind::W,
            "X" => AtomKind::X,
            "I" => AtomKind::TransportI,
            _ => return None,
        })
    }
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Atom {
    pub kind: AtomKind,
    /// Covariant derivatives applied to the atom; element 0 is outermost.
    pub derivs: Vec<Index>,
    pub slots: Vec<Index>,
}

impl Atom {
    pub fn new(kind: AtomKind, derivs: Vec<Index>, slots: Vec<Index>) -> Self {
        assert_eq!(slots.len(), kind.arity(), "slot count for {kind:?}");
        Atom { kind, derivs, slots }
    }

    pub fn bare(kind: AtomKind, slots: Vec<Index>) -> Self {
        Atom::new(kind, Vec::new(), slots)
    }

    pub fn mass_dim(&self) -> u32 {
        self.kind.mass_dim() + self.derivs.len() as u32
    }

    /// All indices in a fixed scan order: derivatives (outermost first),
    /// then slots.
    pub fn indices(&self) -> impl Iterator<Item = &Index> {
        self.derivs.iter().chain(self.slots.iter())
    }

    pub fn indices_mut(&mut self) -> impl Iterator<Item = &mut Index> {
        self.derivs.iter_mut().chain(self.slots.iter_mut())
    }

    /// The atom with one of its symmetry presentations applied.
    pub fn with_slot_move(&self, mv: &SlotMove) -> Atom {
        let slots = mv.0.iter().map(|&p| self.slots[p]).collect();
        Atom { kind: self.kind, derivs: self.derivs.clone(), slots }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for d in &self.derivs {
            write!(f, "D({d}) ")?;
        }
        f.write_str(self.kind.display_name())?;
        if !self.slots.is_empty() {
            let names: Vec<String> = self.slots.iter().map(|s| s.display_name()).collect();
            write!(f, "({})", names.join(","))?;
        }
        Ok(())
    }
}

impl fmt::Debug for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arities_and_moves_are_consistent() {
        use AtomKind::*;
        for kind in [Metric, Momentum, RScalar, Ricci, Riemann, Proj1, Proj2, PhaseL, Torsion, W, X, TransportI] {
            for (perm, sign) in kind.slot_moves() {
                assert_eq!(perm.len(), kind.arity());
                assert!(*sign == 1 || *sign == -1);
                let mut seen = vec![false; perm.len()];
                for &p in *perm {
                    assert!(!seen[p]);
                    seen[p] = true;
                }
            }
            assert_eq!(kind.from_name_round_trip(), kind);
        }
    }

    impl AtomKind {
        fn from_name_round_trip(self) -> AtomKind {
            AtomKind::from_name(self.display_name()).unwrap()
        }
    }

    #[test]
    fn riemann_has_eight_presentations() {
        assert_eq!(AtomKind::Riemann.slot_moves().len(), 8);
    }

    #[test]
    fn display_shapes() {
        let a = Atom::new(
            AtomKind::X,
            vec![Index::dummy(0)],
            vec![Index::free(0), Index::free(1)],
        );
        assert_eq!(a.to_string(), "D(i) X(a,b)");
        let rs = Atom::bare(AtomKind::RScalar, vec![]);
        assert_eq!(rs.to_string(), "Rs");
    }
}
