//! Property suites for the coincidence-limit tables: stored entries satisfy
//! the defining symmetrization conditions, carry exactly the structure the
//! two-point functions allow, and give the same limit for a permuted
//! derivative ordering whether the permutation is substituted positionally
//! into the stored formula or commuted away at curvature cost first.

mod common;

use std::sync::OnceLock;

use common::Mix;
use heatkernel::colim::{CoinLimitTable, LimitFn, LimitTables};
use heatkernel::identities::{normalize, swap_derivs, RuleSet};
use heatkernel::tensor::{Atom, AtomKind, CoeffRing, Index, TensorMonomial, TensorPoly};
use num_rational::BigRational;
use proptest::prelude::*;

const PHASE_ORDER: usize = 5;
const TRANSPORT_ORDER: usize = 4;

fn tables() -> &'static LimitTables {
    static TABLES: OnceLock<LimitTables> = OnceLock::new();
    TABLES.get_or_init(|| {
        LimitTables::build(PHASE_ORDER, TRANSPORT_ORDER).expect("orders under the cap")
    })
}

fn table_for(fn_kind: LimitFn) -> &'static CoinLimitTable {
    match fn_kind {
        LimitFn::Phase => &tables().phase,
        LimitFn::Transport => &tables().transport,
    }
}

fn host_atom(fn_kind: LimitFn, derivs: Vec<Index>) -> Atom {
    let order = derivs.len();
    let (_, slots) = CoinLimitTable::entry_indices(fn_kind, order);
    let kind = match fn_kind {
        LimitFn::Phase => AtomKind::PhaseL,
        LimitFn::Transport => AtomKind::TransportI,
    };
    Atom::new(kind, derivs, slots)
}

fn unit(mono: TensorMonomial) -> TensorPoly<BigRational> {
    TensorPoly::from_term(CoeffRing::one(), mono)
}

/// The curvature-counting physical dimension: curvature and gauge-curvature
/// atoms weigh two, a momentum factor one, each derivative one.
fn physical_dim(mono: &TensorMonomial) -> usize {
    mono.atoms
        .iter()
        .map(|a| {
            let base = match a.kind {
                AtomKind::RScalar
                | AtomKind::Ricci
                | AtomKind::Riemann
                | AtomKind::W
                | AtomKind::X => 2,
                AtomKind::Momentum => 1,
                _ => 0,
            };
            base + a.derivs.len()
        })
        .sum()
}

fn is_curvature(kind: AtomKind) -> bool {
    matches!(kind, AtomKind::RScalar | AtomKind::Ricci | AtomKind::Riemann | AtomKind::W)
}

/// Commutes the host prefix into ascending order at curvature cost, then
/// takes limits of the main term and every correction.
fn limit_by_commutation(fn_kind: LimitFn, derivs: &[Index]) -> TensorPoly<BigRational> {
    let mut atoms = vec![host_atom(fn_kind, derivs.to_vec())];
    let mut corrections: TensorPoly<BigRational> = TensorPoly::zero();
    let mut fresh = derivs.iter().filter(|d| !d.free).map(|d| d.id + 1).max().unwrap_or(0);
    loop {
        let descent = (0..atoms[0].derivs.len().saturating_sub(1))
            .find(|&p| atoms[0].derivs[p] > atoms[0].derivs[p + 1]);
        let Some(p) = descent else { break };
        for (sign, product) in swap_derivs(&mut atoms, 0, p, &mut fresh) {
            corrections
                .add_term(BigRational::from_integer(sign.into()), TensorMonomial::new(product));
        }
    }
    let main = unit(TensorMonomial::new(atoms));
    tables().take_limits(&main.add(&corrections)).expect("orders in range")
}

/// Route agreement: substituting a permuted prefix positionally into the
/// stored formula equals commuting the prefix into canonical order first.
fn assert_routes_agree(fn_kind: LimitFn, order: usize, seed: u64) {
    let (mut derivs, _) = CoinLimitTable::entry_indices(fn_kind, order);
    Mix(seed).shuffle(&mut derivs);

    let positional = tables()
        .take_limits(&unit(TensorMonomial::new(vec![host_atom(fn_kind, derivs.clone())])))
        .expect("orders in range");
    let commuted = limit_by_commutation(fn_kind, &derivs);

    let diff = normalize(&positional.sub(&commuted), RuleSet::Full);
    assert!(
        diff.is_zero(),
        "routes disagree for {fn_kind:?} order {order} prefix {derivs:?}:\n{diff}"
    );
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, ..ProptestConfig::default() })]

    #[test]
    fn permuted_prefix_routes_agree(
        which in 0usize..2,
        order in 2usize..=4,
        seed in any::<u64>(),
    ) {
        let fn_kind = [LimitFn::Phase, LimitFn::Transport][which];
        assert_routes_agree(fn_kind, order, seed);
    }
}

#[test]
fn routes_agree_at_the_top_phase_order() {
    assert_routes_agree(LimitFn::Phase, PHASE_ORDER, 0x5eed);
}

#[test]
fn symmetrized_entries_vanish() {
    for fn_kind in [LimitFn::Phase, LimitFn::Transport] {
        let table = table_for(fn_kind);
        let start = match fn_kind {
            LimitFn::Phase => 2,
            LimitFn::Transport => 1,
        };
        for order in start..=table.max_order() {
            let (derivs, _) = CoinLimitTable::entry_indices(fn_kind, order);
            let sym = table.entry(order).unwrap().symmetrized(&derivs);
            let reduced = normalize(&sym, RuleSet::Full);
            assert!(
                reduced.is_zero(),
                "symmetrization of {fn_kind:?} order {order} left:\n{reduced}"
            );
        }
    }
}

#[test]
fn entries_carry_exactly_the_allowed_structure() {
    for fn_kind in [LimitFn::Phase, LimitFn::Transport] {
        let table = table_for(fn_kind);
        for order in 0..=table.max_order() {
            let entry = table.entry(order).unwrap();
            let (derivs, slots) = CoinLimitTable::entry_indices(fn_kind, order);
            let expected_frees: Vec<u32> =
                derivs.iter().chain(slots.iter()).map(|ix| ix.id).collect();
            for (mono, _) in entry.terms() {
                mono.audit().unwrap_or_else(|e| panic!("{fn_kind:?} order {order}: {e}"));
                assert_eq!(
                    mono.free_ids(),
                    expected_frees,
                    "{fn_kind:?} order {order} term {mono} misnames its open indices"
                );
                assert_eq!(
                    physical_dim(mono),
                    order,
                    "{fn_kind:?} order {order} term {mono} has the wrong dimension"
                );
                let momenta =
                    mono.atoms.iter().filter(|a| a.kind == AtomKind::Momentum).count();
                match fn_kind {
                    // The phase is scalar and linear in the momentum: one k
                    // per term, never a bundle-valued atom.
                    LimitFn::Phase => {
                        assert_eq!(momenta, 1, "phase term {mono} is not linear in k");
                        assert!(
                            mono.atoms.iter().all(|a| !a.kind.is_bundle()),
                            "phase term {mono} grew a bundle atom"
                        );
                    }
                    // The transport is momentum-independent.
                    LimitFn::Transport => {
                        assert_eq!(momenta, 0, "transport term {mono} grew a momentum");
                    }
                }
                // Entries never mention the operator or the two-point
                // functions themselves.
                assert!(
                    mono.atoms.iter().all(|a| !matches!(
                        a.kind,
                        AtomKind::X | AtomKind::PhaseL | AtomKind::TransportI
                    )),
                    "{fn_kind:?} order {order} term {mono} has a leftover two-point atom"
                );
                // Flat space: every solved entry vanishes when curvature and
                // gauge curvature are switched off.
                if order >= 2 || (fn_kind == LimitFn::Transport && order >= 1) {
                    assert!(
                        mono.atoms.iter().any(|a| is_curvature(a.kind)),
                        "{fn_kind:?} order {order} term {mono} survives the flat limit"
                    );
                }
            }
        }
    }
}

#[test]
fn builds_are_deterministic() {
    let again = CoinLimitTable::build(LimitFn::Transport, 3).expect("under the cap");
    for order in 0..=3 {
        assert_eq!(
            again.entry(order).unwrap(),
            tables().transport.entry(order).unwrap(),
            "transport order {order} differs between builds"
        );
    }
}
