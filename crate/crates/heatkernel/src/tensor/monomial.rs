//! Tensor monomials and their canonical form.
//!
//! A monomial is an ordered product of atoms. Scalar-valued atoms commute;
//! bundle-valued atoms (X, W, I) are matrix-valued and keep their relative
//! order. The canonical form is the lexicographically minimal presentation
//! over all symmetry moves: per-atom slot symmetries, permutations of
//! commuting atoms within each kind group, and renaming of contracted
//! (dummy) indices by first appearance.

use std::collections::HashMap;
use std::fmt;

use super::atom::{Atom, AtomKind};
use super::index::Index;

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct TensorMonomial {
    pub atoms: Vec<Atom>,
}

/// Result of canonicalization: the canonical representative, the sign picked
/// up from slot symmetries, and whether the monomial is identically zero
/// (the minimal form is reachable with both signs).
#[derive(Clone, Debug)]
pub struct CanonResult {
    pub mono: TensorMonomial,
    pub sign: i8,
    pub is_zero: bool,
}

/// Index encoding used for key comparison: dummies (renamed 0,1,2,...) sort
/// before all free indices.
const FREE_BASE: u32 = 1 << 20;

fn enc_free(id: u32) -> u32 {
    FREE_BASE + id
}

/// Canonical ordering rank of an atom kind. Commuting atoms are sorted into
/// ascending rank; bundle atoms keep their relative order and follow them;
/// bare momentum factors are placed last (their position is forced once
/// everything else is named).
fn kind_rank(kind: AtomKind) -> u32 {
    match kind {
        AtomKind::Metric => 0,
        AtomKind::RScalar => 1,
        AtomKind::Ricci => 2,
        AtomKind::Riemann => 3,
        AtomKind::Proj1 => 4,
        AtomKind::Proj2 => 5,
        AtomKind::PhaseL => 6,
        AtomKind::Torsion => 7,
        AtomKind::Momentum => 8,
        AtomKind::X => 20,
        AtomKind::W => 21,
        AtomKind::TransportI => 22,
    }
}

impl TensorMonomial {
    pub fn one() -> Self {
        TensorMonomial { atoms: Vec::new() }
    }

    pub fn new(atoms: Vec<Atom>) -> Self {
        TensorMonomial { atoms }
    }

    pub fn is_one(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn mass_dim(&self) -> u32 {
        self.atoms.iter().map(|a| a.mass_dim()).sum()
    }

    pub fn indices(&self) -> impl Iterator<Item = &Index> {
        self.atoms.iter().flat_map(|a| a.indices())
    }

    /// Checks index bookkeeping: every dummy id appears exactly twice, every
    /// free id exactly once.
    pub fn audit(&self) -> Result<(), String> {
        let mut dummies: HashMap<u32, u32> = HashMap::new();
        let mut frees: HashMap<u32, u32> = HashMap::new();
        for ix in self.indices() {
            *if ix.free { &mut frees } else { &mut dummies }
                .entry(ix.id)
                .or_insert(0) += 1;
        }
        for (id, count) in &dummies {
            if *count != 2 {
                return Err(format!(
                    "dummy {} appears {count} times in `{self}`",
                    Index::dummy(*id)
                ));
            }
        }
        for (id, count) in &frees {
            if *count != 1 {
                return Err(format!(
                    "free index {} appears {count} times in `{self}`",
                    Index::free(*id)
                ));
            }
        }
        Ok(())
    }

    /// Sorted ids of the free indices.
    pub fn free_ids(&self) -> Vec<u32> {
        let mut out: Vec<u32> = self.indices().filter(|i| i.free).map(|i| i.id).collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    pub fn max_dummy_id(&self) -> Option<u32> {
        self.indices().filter(|i| !i.free).map(|i| i.id).max()
    }

    /// Applies an index substitution to every occurrence.
    pub fn map_indices(&self, f: impl Fn(Index) -> Index) -> TensorMonomial {
        let mut out = self.clone();
        for atom in &mut out.atoms {
            for ix in atom.indices_mut() {
                *ix = f(*ix);
            }
        }
        out
    }

    /// Shifts all dummy ids by `offset` (used to keep products collision-free).
    pub fn shift_dummies(&self, offset: u32) -> TensorMonomial {
        self.map_indices(|ix| if ix.free { ix } else { Index { id: ix.id + offset, ..ix } })
    }

    /// Reduces curvature atoms whose own slots form a contracted pair:
    /// a Riemann self-pair becomes a signed Ricci (or vanishes on an
    /// antisymmetric pair), a Ricci self-pair becomes the curvature scalar.
    /// Derivative prefixes carry over. Returns (reduced, sign, is_zero).
    pub fn reduce_self_traces(&self) -> (TensorMonomial, i8, bool) {
        let mut atoms = self.atoms.clone();
        let mut sign = 1i8;
        loop {
            let mut acted = false;
            for i in 0..atoms.len() {
                let a = &atoms[i];
                match a.kind {
                    AtomKind::Riemann => {
                        let s = &a.slots;
                        let pair = (0..4)
                            .flat_map(|x| (x + 1..4).map(move |y| (x, y)))
                            .find(|&(x, y)| !s[x].free && s[x] == s[y]);
                        if let Some((x, y)) = pair {
                            if (x, y) == (0, 1) || (x, y) == (2, 3) {
                                return (TensorMonomial::one(), 1, true);
                            }
                            let (slots, sgn) = match (x, y) {
                                (0, 2) => (vec![s[1], s[3]], 1),
                                (0, 3) => (vec![s[1], s[2]], -1),
                                (1, 2) => (vec![s[0], s[3]], -1),
                                (1, 3) => (vec![s[0], s[2]], 1),
                                _ => unreachable!(),
                            };
                            sign *= sgn;
                            atoms[i] = Atom::new(AtomKind::Ricci, atoms[i].derivs.clone(), slots);
                            acted = true;
                            break;
                        }
                    }
                    AtomKind::Ricci => {
                        if !a.slots[0].free && a.slots[0] == a.slots[1] {
                            atoms[i] = Atom::new(AtomKind::RScalar, atoms[i].derivs.clone(), vec![]);
                            acted = true;
                            break;
                        }
                    }
                    _ => {}
                }
            }
            if !acted {
                break;
            }
        }
        (TensorMonomial::new(atoms), sign, false)
    }

    /// Canonicalizes by minimizing over slot symmetries, commuting-atom
    /// permutations within each kind, and dummy renaming.
    pub fn canonicalize(&self) -> CanonResult {
        debug_assert!(self.audit().is_ok(), "{:?}", self.audit());

        let mut commuting: Vec<&Atom> = Vec::new();
        let mut bundle: Vec<&Atom> = Vec::new();
        let mut momenta: Vec<&Atom> = Vec::new();
        for atom in &self.atoms {
            if atom.kind == AtomKind::Momentum && atom.derivs.is_empty() {
                momenta.push(atom);
            } else if atom.kind.is_bundle() {
                bundle.push(atom);
            } else {
                commuting.push(atom);
            }
        }
        commuting.sort_by_key(|a| kind_rank(a.kind));
        let groups: Vec<Vec<&Atom>> = group_by_rank(&commuting);

        let mut best: Option<(Vec<u32>, Vec<Atom>)> = None;
        let mut best_signs = (false, false);

        let mut arrangement: Vec<&Atom> = Vec::with_capacity(commuting.len());
        enumerate_group_orders(&groups, 0, &mut arrangement, &mut |arr| {
            let seq: Vec<&Atom> = arr.iter().chain(bundle.iter()).copied().collect();
            enumerate_slot_moves(&seq, &momenta, &mut best, &mut best_signs);
        });

        let (_, atoms) = best.expect("canonicalization produced no candidate");
        let is_zero = best_signs.0 && best_signs.1;
        let sign = if best_signs.0 { 1 } else { -1 };
        CanonResult { mono: TensorMonomial { atoms }, sign, is_zero }
    }

    pub fn parse(s: &str) -> Result<TensorMonomial, String> {
        let s = s.trim();
        if s == "1" || s.is_empty() {
            return Ok(TensorMonomial::one());
        }
        let mut atoms = Vec::new();
        let mut derivs: Vec<Index> = Vec::new();
        for token in s.split_whitespace() {
            if let Some(rest) = token.strip_prefix("D(") {
                let name = rest.strip_suffix(')').ok_or_else(|| bad_token(token))?;
                derivs.push(parse_index(name)?);
                continue;
            }
            let (head, args) = match token.find('(') {
                Some(p) => {
                    let inner = token[p + 1..].strip_suffix(')').ok_or_else(|| bad_token(token))?;
                    (&token[..p], inner.split(',').map(str::trim).collect::<Vec<_>>())
                }
                None => (token, Vec::new()),
            };
            let kind = AtomKind::from_name(head).ok_or_else(|| bad_token(token))?;
            let slots = args.iter().map(|a| parse_index(a)).collect::<Result<Vec<_>, _>>()?;
            if slots.len() != kind.arity() {
                return Err(format!("`{token}`: expected {} slots", kind.arity()));
            }
            atoms.push(Atom::new(kind, std::mem::take(&mut derivs), slots));
        }
        if !derivs.is_empty() {
            return Err(format!("trailing derivative prefix in `{s}`"));
        }
        let mono = TensorMonomial { atoms };
        mono.audit()?;
        Ok(mono)
    }
}

fn bad_token(token: &str) -> String {
    format!("unrecognized monomial token `{token}`")
}

fn parse_index(name: &str) -> Result<Index, String> {
    Index::parse_name(name).ok_or_else(|| format!("unrecognized index name `{name}`"))
}

fn group_by_rank<'a>(sorted: &[&'a Atom]) -> Vec<Vec<&'a Atom>> {
    let mut groups: Vec<Vec<&'a Atom>> = Vec::new();
    for atom in sorted {
        match groups.last_mut() {
            Some(g) if kind_rank(g[0].kind) == kind_rank(atom.kind) => g.push(atom),
            _ => groups.push(vec![atom]),
        }
    }
    groups
}

/// Visits every ordering of commuting atoms that keeps kind groups in rank
/// order, permuting atoms freely within each group.
fn enumerate_group_orders<'a>(
    groups: &[Vec<&'a Atom>],
    gi: usize,
    arrangement: &mut Vec<&'a Atom>,
    visit: &mut impl FnMut(&[&'a Atom]),
) {
    if gi == groups.len() {
        visit(arrangement);
        return;
    }
    let group = &groups[gi];
    permute(group, &mut Vec::new(), &mut vec![false; group.len()], &mut |perm| {
        let len_before = arrangement.len();
        arrangement.extend_from_slice(perm);
        enumerate_group_orders(groups, gi + 1, arrangement, visit);
        arrangement.truncate(len_before);
    });
}

fn permute<'a>(
    items: &[&'a Atom],
    current: &mut Vec<&'a Atom>,
    used: &mut Vec<bool>,
    visit: &mut impl FnMut(&[&'a Atom]),
) {
    if current.len() == items.len() {
        visit(current);
        return;
    }
    for i in 0..items.len() {
        if used[i] {
            continue;
        }
        // Skip equal atoms at the same position: permuting identical atoms
        // yields identical candidates.
        if items[..i].iter().zip(&used[..i]).any(|(a, u)| !*u && **a == *items[i]) {
            continue;
        }
        used[i] = true;
        current.push(items[i]);
        permute(items, current, used, visit);
        current.pop();
        used[i] = false;
    }
}

/// For a fixed atom arrangement, tries every combination of per-atom slot
/// symmetries, scores each candidate, and folds it into the running minimum.
fn enumerate_slot_moves(
    seq: &[&Atom],
    momenta: &[&Atom],
    best: &mut Option<(Vec<u32>, Vec<Atom>)>,
    best_signs: &mut (bool, bool),
) {
    let mut choices: Vec<usize> = vec![0; seq.len()];
    loop {
        let mut candidate: Vec<Atom> = Vec::with_capacity(seq.len() + momenta.len());
        let mut sign: i8 = 1;
        for (atom, &c) in seq.iter().zip(&choices) {
            let mv = &atom.kind.slot_moves()[c];
            sign *= mv.1;
            candidate.push(atom.with_slot_move(mv));
        }
        score_candidate(&mut candidate, momenta, sign, best, best_signs);

        // Odometer increment over the per-atom move choices.
        let mut pos = 0;
        loop {
            if pos == seq.len() {
                return;
            }
            choices[pos] += 1;
            if choices[pos] < seq[pos].kind.slot_moves().len() {
                break;
            }
            choices[pos] = 0;
            pos += 1;
        }
    }
}

/// Renames dummies by first appearance, appends momentum atoms in forced
/// order, builds the comparison key, and updates the minimum.
fn score_candidate(
    candidate: &mut Vec<Atom>,
    momenta: &[&Atom],
    sign: i8,
    best: &mut Option<(Vec<u32>, Vec<Atom>)>,
    best_signs: &mut (bool, bool),
) {
    let mut rename: HashMap<u32, u32> = HashMap::new();
    let mut key: Vec<u32> = Vec::with_capacity(candidate.len() * 6);
    for atom in candidate.iter_mut() {
        key.push(kind_rank(atom.kind));
        key.push(atom.derivs.len() as u32);
        for ix in atom.indices_mut() {
            if ix.free {
                key.push(enc_free(ix.id));
                *ix = Index::free(ix.id);
            } else {
                let next = rename.len() as u32;
                let id = *rename.entry(ix.id).or_insert(next);
                key.push(id);
                *ix = Index::dummy(id);
            }
        }
    }

    // Momentum atoms: their order is forced once everything else is named.
    // Sort by the assigned name of the slot partner; self-contracted pairs
    // (k·k factors) come last and receive fresh names pair by pair.
    let mut tail: Vec<(u32, Index)> = Vec::with_capacity(momenta.len());
    let mut unnamed_pairs: HashMap<u32, u32> = HashMap::new();
    for m in momenta {
        let slot = m.slots[0];
        if slot.free {
            tail.push((enc_free(slot.id), Index::free(slot.id)));
        } else if let Some(&new_id) = rename.get(&slot.id) {
            tail.push((new_id, Index::dummy(new_id)));
        } else {
            *unnamed_pairs.entry(slot.id).or_insert(0) += 1;
        }
    }
    tail.sort_unstable_by_key(|(e, _)| *e);
    let mut next_id = rename.len() as u32;
    let mut pair_ids: Vec<u32> = unnamed_pairs.keys().copied().collect();
    pair_ids.sort_unstable();
    for old in pair_ids {
        debug_assert_eq!(unnamed_pairs[&old], 2, "momentum dummy must pair with something");
        for _ in 0..2 {
            tail.push((next_id, Index::dummy(next_id)));
        }
        next_id += 1;
    }
    for (e, ix) in tail {
        key.push(kind_rank(AtomKind::Momentum));
        key.push(0);
        key.push(e);
        candidate.push(Atom::bare(AtomKind::Momentum, vec![ix]));
    }

    match best {
        Some((bkey, _)) => match key.cmp(bkey) {
            std::cmp::Ordering::Less => {
                *best = Some((key, std::mem::take(candidate)));
                *best_signs = (sign > 0, sign < 0);
            }
            std::cmp::Ordering::Equal => {
                if sign > 0 {
                    best_signs.0 = true;
                } else {
                    best_signs.1 = true;
                }
            }
            std::cmp::Ordering::Greater => {}
        },
        None => {
            *best = Some((key, std::mem::take(candidate)));
            *best_signs = (sign > 0, sign < 0);
        }
    }
}

impl fmt::Display for TensorMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.atoms.is_empty() {
            return f.write_str("1");
        }
        let parts: Vec<String> = self.atoms.iter().map(|a| a.to_string()).collect();
        f.write_str(&parts.join(" "))
    }
}

impl fmt::Debug for TensorMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
