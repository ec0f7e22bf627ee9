//! Coincidence limits of the phase and transport functions.
//!
//! The intrinsic symbol calculus is built from two two-point objects: a
//! phase function l(x, x'; k) and a transport function I(x, x'). Neither has
//! a closed form, but the calculus only ever needs the coincidence limits
//! [D_{a_1}…D_{a_m} f] — derivatives at x evaluated at x' = x — and those
//! are fixed order by order by symmetrization conditions with initial data
//!
//! ```text
//! [l] = 0,   [D_a l] = k_a,   symmetrized [D…D l] = 0   (two or more derivatives)
//! [I] = identity transport,   symmetrized [D…D I] = 0   (one or more derivatives)
//! ```
//!
//! The fully symmetrized derivative of each function vanishes at
//! coincidence; expanding the symmetrization over all orderings and
//! commuting every ordering into a fixed canonical one (at the usual Ricci
//! curvature cost) leaves `m!` copies of the canonical-order limit plus
//! correction terms whose function factors carry fewer derivatives — already
//! known. Each order is therefore a unit-coefficient solve:
//!
//! ```text
//! [D_{a_1}…D_{a_m} f] = −(1/m!) Σ_π [corrections(π)]
//! ```
//!
//! A stored entry is a polynomial in curvature, gauge-curvature, and (for
//! the phase) momentum atoms, with exact rational coefficients. It is a
//! tensorial formula in its index list: the limit of *any* derivative
//! ordering, with any index assignment (including contractions), is the
//! entry with the host atom's indices substituted positionally. Commuting
//! derivatives on the host and substituting afterwards reaches the same
//! value — the property suite replays both routes against each other.
//!
//! Entries are universal: they never depend on the operator (no gauge
//! parameter, no endomorphism), so one table serves every pipeline run.
//! Tables are built order by order (order m needs only orders below it),
//! are immutable afterwards, and can be persisted to a versioned,
//! hash-checked cache file (see [`store`]).

mod store;

use std::collections::VecDeque;
use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};

use num_rational::BigRational;

use crate::coeffring::error::CoeffError;
use crate::identities::{normalize, swap_derivs, RuleSet};
use crate::tensor::{Atom, AtomKind, CoeffRing, Index, TensorMonomial, TensorPoly};

/// No table is ever built past this order; the full fourth coefficient
/// needs the phase to order six and the transport to order four.
pub const HARD_ORDER_CAP: usize = 8;

/// Which two-point function a table describes.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum LimitFn {
    /// The phase l: scalar-valued, linear in the momentum covector.
    Phase,
    /// The transport I: one tangent slot at the derivative point, one inert
    /// slot at the other point, matrix-valued on the gauge bundle.
    Transport,
}

impl LimitFn {
    pub fn name(self) -> &'static str {
        match self {
            LimitFn::Phase => "l",
            LimitFn::Transport => "I",
        }
    }

    pub fn from_name(s: &str) -> Option<LimitFn> {
        match s {
            "l" => Some(LimitFn::Phase),
            "I" => Some(LimitFn::Transport),
            _ => None,
        }
    }

    fn atom_kind(self) -> AtomKind {
        match self {
            LimitFn::Phase => AtomKind::PhaseL,
            LimitFn::Transport => AtomKind::TransportI,
        }
    }

    /// The lowest order whose entry is fixed by a symmetrization solve
    /// rather than by initial data.
    fn first_solved_order(self) -> usize {
        match self {
            LimitFn::Phase => 2,
            LimitFn::Transport => 1,
        }
    }
}

impl std::fmt::Display for LimitFn {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Failures of table construction, persistence, or consumption.
#[derive(Debug, thiserror::Error)]
pub enum ColimError {
    #[error("requested order {requested} exceeds the hard cap {cap}")]
    OrderCap { requested: usize, cap: usize },

    #[error("table for {fn_name} holds orders up to {max_order}, but order {requested} was requested")]
    OrderNotBuilt { fn_name: &'static str, max_order: usize, requested: usize },

    #[error("coefficient arithmetic failed during limit substitution")]
    Coeff(#[from] CoeffError),

    #[error("cache io: {0}")]
    Io(#[from] std::io::Error),

    #[error("cache file {path}: expected format `{expected}`, found `{found}`")]
    Incompatible { path: String, expected: String, found: String },

    #[error("cache file {path} line {line}: {msg}")]
    Malformed { path: String, line: usize, msg: String },

    #[error("cache file {path}: content hash mismatch (file corrupted or hand-edited)")]
    HashMismatch { path: String },
}

static BUILD_CALLS: AtomicUsize = AtomicUsize::new(0);

/// How many times a table has been built from scratch in this process —
/// cache-effectiveness instrumentation: a warm-cache run must not add to it.
pub fn build_calls() -> usize {
    BUILD_CALLS.load(Ordering::Relaxed)
}

/// One function's coincidence limits, orders 0..=max_order.
///
/// The entry for order m is stored over the canonical index list: derivative
/// indices are the free indices 0..m (outermost first), and for the
/// transport the two slots follow as free indices m and m+1.
#[derive(Clone, PartialEq, Debug)]
pub struct CoinLimitTable {
    fn_kind: LimitFn,
    max_order: usize,
    entries: Vec<TensorPoly<BigRational>>,
}

impl CoinLimitTable {
    pub fn fn_kind(&self) -> LimitFn {
        self.fn_kind
    }

    pub fn max_order(&self) -> usize {
        self.max_order
    }

    /// The stored limit for `order` derivatives, over the canonical index
    /// list, or None past the built range.
    pub fn entry(&self, order: usize) -> Option<&TensorPoly<BigRational>> {
        self.entries.get(order)
    }

    /// The canonical index list of the order-m entry: derivative indices,
    /// then (for the transport) the two slots.
    pub fn entry_indices(fn_kind: LimitFn, order: usize) -> (Vec<Index>, Vec<Index>) {
        let derivs: Vec<Index> = (0..order as u32).map(Index::free).collect();
        let slots = match fn_kind {
            LimitFn::Phase => Vec::new(),
            LimitFn::Transport => vec![Index::free(order as u32), Index::free(order as u32 + 1)],
        };
        (derivs, slots)
    }

    /// Builds the table from the initial data and the symmetrization solves,
    /// order by order.
    pub fn build(fn_kind: LimitFn, max_order: usize) -> Result<CoinLimitTable, ColimError> {
        if max_order > HARD_ORDER_CAP {
            return Err(ColimError::OrderCap { requested: max_order, cap: HARD_ORDER_CAP });
        }
        BUILD_CALLS.fetch_add(1, Ordering::Relaxed);

        let mut table =
            CoinLimitTable { fn_kind, max_order, entries: Vec::with_capacity(max_order + 1) };

        for order in 0..=max_order {
            let entry = if order < fn_kind.first_solved_order() {
                initial_entry(fn_kind, order)
            } else {
                solve_order(&table, order)?
            };
            table.entries.push(entry);
        }
        Ok(table)
    }

    pub fn save(&self, path: &Path) -> Result<(), ColimError> {
        store::save(self, path)
    }

    pub fn load(path: &Path) -> Result<CoinLimitTable, ColimError> {
        store::load(path)
    }

    pub(crate) fn from_parts(
        fn_kind: LimitFn,
        max_order: usize,
        entries: Vec<TensorPoly<BigRational>>,
    ) -> CoinLimitTable {
        CoinLimitTable { fn_kind, max_order, entries }
    }
}

/// The entries fixed by initial data rather than by a solve.
fn initial_entry(fn_kind: LimitFn, order: usize) -> TensorPoly<BigRational> {
    match (fn_kind, order) {
        // [l] = 0.
        (LimitFn::Phase, 0) => TensorPoly::zero(),
        // [D_a l] = k_a.
        (LimitFn::Phase, 1) => TensorPoly::from_term(
            CoeffRing::one(),
            TensorMonomial::new(vec![Atom::bare(AtomKind::Momentum, vec![Index::free(0)])]),
        ),
        // [I] = E, the identity transport: the metric on the tangent slots
        // times the implicit identity on the gauge bundle.
        (LimitFn::Transport, 0) => TensorPoly::from_term(
            CoeffRing::one(),
            TensorMonomial::new(vec![Atom::bare(
                AtomKind::Metric,
                vec![Index::free(0), Index::free(1)],
            )]),
        ),
        _ => unreachable!("order {order} of {fn_kind} is produced by a solve"),
    }
}

/// Solves the order-m symmetrization condition for the canonical-order
/// entry, using the already-built lower orders of `table`.
fn solve_order(
    table: &CoinLimitTable,
    order: usize,
) -> Result<TensorPoly<BigRational>, ColimError> {
    let fn_kind = table.fn_kind;
    let (derivs, slots) = CoinLimitTable::entry_indices(fn_kind, order);

    // Sum, over every non-identity ordering of the derivative prefix, the
    // correction terms produced by commuting that ordering back to canonical
    // order. The orderings' limits sum to zero, and each equals the
    // canonical entry plus its corrections' limits, so
    //   m! · entry = − Σ_π corrections(π).
    let mut corrections: TensorPoly<BigRational> = TensorPoly::zero();
    for_each_permutation(order, &mut |perm| {
        let permuted: Vec<Index> = perm.iter().map(|&p| derivs[p]).collect();
        if permuted == derivs {
            return;
        }
        let mut atoms = vec![Atom::new(fn_kind.atom_kind(), permuted, slots.clone())];
        let mut fresh = 0u32;
        // Bubble the prefix into ascending order; every swap of an adjacent
        // descent emits its Ricci-identity correction terms.
        loop {
            let pos = (0..atoms[0].derivs.len().saturating_sub(1))
                .find(|&p| atoms[0].derivs[p] > atoms[0].derivs[p + 1]);
            let Some(p) = pos else { break };
            for (sign, product) in swap_derivs(&mut atoms, 0, p, &mut fresh) {
                corrections
                    .add_term(BigRational::from_integer(sign.into()), TensorMonomial::new(product));
            }
        }
        debug_assert_eq!(atoms[0].derivs, derivs);
    });
    let mut factorial: i64 = 1;
    for m in 1..=order as i64 {
        factorial *= m;
    }

    // Corrections carry the function with at most order−2 derivatives:
    // their limits come from the lower entries.
    let limited = take_limits_with(&corrections, |kind, o| {
        debug_assert!(o + 2 <= order);
        lookup(table, kind, o)
    })?;
    let scaled = limited
        .scale(&BigRational::new((-1).into(), factorial.into()))
        .expect("rational scaling cannot fail");
    Ok(normalize(&scaled, RuleSet::Full))
}

fn for_each_permutation(k: usize, visit: &mut impl FnMut(&[usize])) {
    let mut perm: Vec<usize> = (0..k).collect();
    heap_permute(&mut perm, k, visit);
}

fn heap_permute(perm: &mut Vec<usize>, m: usize, visit: &mut impl FnMut(&[usize])) {
    if m <= 1 {
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

/// Both functions' tables, as the pipeline consumes them.
#[derive(Clone, Debug)]
pub struct LimitTables {
    pub phase: CoinLimitTable,
    pub transport: CoinLimitTable,
}

impl LimitTables {
    pub fn build(phase_order: usize, transport_order: usize) -> Result<LimitTables, ColimError> {
        Ok(LimitTables {
            phase: CoinLimitTable::build(LimitFn::Phase, phase_order)?,
            transport: CoinLimitTable::build(LimitFn::Transport, transport_order)?,
        })
    }

    /// Loads each table from `cache_dir` when a file for its exact order is
    /// present, building and persisting it otherwise. A present-but-invalid
    /// file is an error, never a silent rebuild. With no cache directory the
    /// tables are built in memory.
    pub fn load_or_build(
        cache_dir: Option<&Path>,
        phase_order: usize,
        transport_order: usize,
    ) -> Result<LimitTables, ColimError> {
        let Some(dir) = cache_dir else {
            return LimitTables::build(phase_order, transport_order);
        };
        Ok(LimitTables {
            phase: load_or_build_one(dir, LimitFn::Phase, phase_order)?,
            transport: load_or_build_one(dir, LimitFn::Transport, transport_order)?,
        })
    }

    /// The cache file name for one table.
    pub fn cache_file_name(fn_kind: LimitFn, order: usize) -> String {
        format!("limits-{}-{order}.colim", fn_kind.name())
    }

    /// Replaces every phase/transport atom by its coincidence limit, with
    /// the host atom's indices substituted positionally into the stored
    /// entry and the entry's atoms spliced into the host's bundle order.
    pub fn take_limits<C: CoeffRing>(
        &self,
        poly: &TensorPoly<C>,
    ) -> Result<TensorPoly<C>, ColimError> {
        take_limits_with(poly, |kind, order| {
            let table = match kind {
                LimitFn::Phase => &self.phase,
                LimitFn::Transport => &self.transport,
            };
            lookup(table, kind, order)
        })
    }
}

fn lookup(
    table: &CoinLimitTable,
    kind: LimitFn,
    order: usize,
) -> Result<&TensorPoly<BigRational>, ColimError> {
    debug_assert_eq!(table.fn_kind, kind);
    table.entry(order).ok_or(ColimError::OrderNotBuilt {
        fn_name: kind.name(),
        max_order: table.max_order,
        requested: order,
    })
}

fn load_or_build_one(
    dir: &Path,
    fn_kind: LimitFn,
    order: usize,
) -> Result<CoinLimitTable, ColimError> {
    let path = dir.join(LimitTables::cache_file_name(fn_kind, order));
    if path.exists() {
        return CoinLimitTable::load(&path);
    }
    let table = CoinLimitTable::build(fn_kind, order)?;
    std::fs::create_dir_all(dir)?;
    table.save(&path)?;
    Ok(table)
}

/// The substitution engine shared by table construction and consumption:
/// entries are fetched through `entry_for`, so construction can use the
/// partially built table.
fn take_limits_with<'t, C: CoeffRing>(
    poly: &TensorPoly<C>,
    entry_for: impl Fn(LimitFn, usize) -> Result<&'t TensorPoly<BigRational>, ColimError>,
) -> Result<TensorPoly<C>, ColimError> {
    let mut out = TensorPoly::zero();
    let mut work: VecDeque<(C, TensorMonomial)> =
        poly.terms().map(|(m, c)| (c.clone(), m.clone())).collect();

    while let Some((coeff, mono)) = work.pop_front() {
        let target = mono.atoms.iter().position(|a| {
            matches!(a.kind, AtomKind::PhaseL | AtomKind::TransportI)
        });
        let Some(ai) = target else {
            out.add_term(coeff, mono);
            continue;
        };

        let host = &mono.atoms[ai];
        let kind = match host.kind {
            AtomKind::PhaseL => LimitFn::Phase,
            AtomKind::TransportI => LimitFn::Transport,
            _ => unreachable!(),
        };
        let order = host.derivs.len();
        let entry = entry_for(kind, order)?;

        // Positional index map: entry free i < order is the host's i-th
        // derivative index; the next two (transport only) are its slots.
        let mut assignment: Vec<Index> = host.derivs.clone();
        assignment.extend(host.slots.iter().copied());
        let shift = mono.max_dummy_id().map_or(0, |d| d + 1);

        for (tmono, tcoeff) in entry.terms() {
            let mapped = tmono.shift_dummies(shift).map_indices(|ix| {
                if ix.free {
                    assignment[ix.id as usize]
                } else {
                    ix
                }
            });
            let mut atoms = mono.atoms.clone();
            atoms.splice(ai..=ai, mapped.atoms);
            let c = coeff.try_mul(&C::from_rational(tcoeff))?;
            work.push_back((c, TensorMonomial::new(atoms)));
        }
    }
    Ok(out)
}
