//! Shared random-tensor machinery for the property suites.

#![allow(dead_code)]

use heatkernel::tensor::{Atom, AtomKind, Index, TensorMonomial};

/// Deterministic generator used to wire indices and scramble presentations.
pub struct Mix(pub u64);

impl Mix {
    pub fn next(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    pub fn below(&mut self, n: usize) -> usize {
        (self.next() % n as u64) as usize
    }

    pub fn shuffle<T>(&mut self, v: &mut [T]) {
        for i in (1..v.len()).rev() {
            v.swap(i, self.below(i + 1));
        }
    }
}

pub const GEN_KINDS: [AtomKind; 9] = [
    AtomKind::Metric,
    AtomKind::RScalar,
    AtomKind::Ricci,
    AtomKind::Riemann,
    AtomKind::W,
    AtomKind::X,
    AtomKind::Momentum,
    AtomKind::TransportI,
    AtomKind::PhaseL,
];

/// Builds a random well-formed monomial: every dummy paired, frees unique.
pub fn build_monomial(kind_picks: &[usize], deriv_counts: &[usize], seed: u64) -> TensorMonomial {
    let mut rng = Mix(seed);
    let mut kinds: Vec<AtomKind> = kind_picks.iter().map(|&k| GEN_KINDS[k]).collect();
    // Cap Riemann multiplicity to keep the canonical orbit small.
    let mut riemanns = 0;
    for k in &mut kinds {
        if *k == AtomKind::Riemann {
            riemanns += 1;
            if riemanns > 2 {
                *k = AtomKind::Ricci;
            }
        }
    }
    let shapes: Vec<(AtomKind, usize)> = kinds
        .iter()
        .zip(deriv_counts)
        .map(|(&k, &d)| {
            // Bare momentum factors never carry derivative prefixes.
            let d = if k == AtomKind::Momentum { 0 } else { d };
            (k, d)
        })
        .collect();
    let total: usize = shapes.iter().map(|&(k, d)| k.arity() + d).sum();
    // Choose how many dummy pairs to create.
    let pairs = if total < 2 { 0 } else { rng.below(total / 2 + 1) };
    let mut positions: Vec<usize> = (0..total).collect();
    rng.shuffle(&mut positions);
    let mut assignment: Vec<Option<Index>> = vec![None; total];
    for p in 0..pairs {
        let ix = Index::dummy(p as u32);
        assignment[positions[2 * p]] = Some(ix);
        assignment[positions[2 * p + 1]] = Some(ix);
    }
    let mut free_id = 0;
    for slot in assignment.iter_mut() {
        if slot.is_none() {
            *slot = Some(Index::free(free_id));
            free_id += 1;
        }
    }
    let mut it = assignment.into_iter().map(Option::unwrap);
    let atoms = shapes
        .iter()
        .map(|&(k, d)| {
            let derivs: Vec<Index> = (0..d).map(|_| it.next().unwrap()).collect();
            let slots: Vec<Index> = (0..k.arity()).map(|_| it.next().unwrap()).collect();
            Atom::new(k, derivs, slots)
        })
        .collect();
    TensorMonomial::new(atoms)
}

/// Rewrites the monomial by a random chain of legal moves; returns the new
/// presentation and the sign it carries relative to the original.
pub fn scramble(mono: &TensorMonomial, seed: u64) -> (TensorMonomial, i8) {
    let mut rng = Mix(seed);
    let mut sign = 1i8;
    // Random slot symmetry per atom.
    let mut atoms: Vec<Atom> = mono
        .atoms
        .iter()
        .map(|atom| {
            let moves = atom.kind.slot_moves();
            let mv = &moves[rng.below(moves.len())];
            sign *= mv.1;
            atom.with_slot_move(mv)
        })
        .collect();
    // Random reorder that preserves the relative order of bundle atoms.
    let bundle: Vec<Atom> = atoms.iter().filter(|a| a.kind.is_bundle()).cloned().collect();
    rng.shuffle(&mut atoms);
    let mut bi = 0;
    for slot in atoms.iter_mut() {
        if slot.kind.is_bundle() {
            *slot = bundle[bi].clone();
            bi += 1;
        }
    }
    // Random dummy relabeling.
    let max = atoms
        .iter()
        .flat_map(|a| a.indices())
        .filter(|i| !i.free)
        .map(|i| i.id)
        .max();
    if let Some(max) = max {
        let mut relabel: Vec<u32> = (0..=max).collect();
        rng.shuffle(&mut relabel);
        for atom in atoms.iter_mut() {
            for ix in atom.indices_mut() {
                if !ix.free {
                    *ix = Index::dummy(relabel[ix.id as usize]);
                }
            }
        }
    }
    (TensorMonomial::new(atoms), sign)
}
