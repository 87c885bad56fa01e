#![allow(dead_code)]

use std::path::PathBuf;

use freecore::algebra::{AlgebraSpec, Summand};
use freecore::amalg::partition::Adjacency;
use freecore::amalg::StructureExpr as E;
use freecore::exact::{q, Extended, MultGroup, Rational};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn data_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../data")
        .join(name)
}

pub fn skewed() -> AlgebraSpec {
    AlgebraSpec::single("A", Summand::matrix(vec![q(2, 3), q(1, 3)]))
}

pub fn hyper() -> AlgebraSpec {
    AlgebraSpec::single("R", Summand::hyperfinite(q(1, 1)))
}

/// Atomic algebra with a non-tracial state: one to three blocks, the first
/// of size two with distinct eigenvalues. Eigenvalues are small integers
/// over their sum, so ratios only involve the primes 2, 3, 5.
pub fn random_atomic(rng: &mut ChaCha8Rng) -> AlgebraSpec {
    let nblocks = rng.random_range(1..=3);
    let mut ints: Vec<Vec<i64>> = Vec::new();
    for k in 0..nblocks {
        let size = if k == 0 { 2 } else { rng.random_range(1..=3) };
        let mut block: Vec<i64> = (0..size).map(|_| rng.random_range(1..=6)).collect();
        if k == 0 && block[0] == block[1] {
            block[1] = if block[0] == 6 { 5 } else { block[0] + 1 };
        }
        ints.push(block);
    }
    let total: i64 = ints.iter().flatten().sum();
    let summands = ints
        .iter()
        .map(|b| Summand::matrix(b.iter().map(|&a| q(a, total)).collect()))
        .collect();
    AlgebraSpec::new("A", summands)
}

/// Tracial partner without one-dimensional summands.
pub fn random_tracial_partner(rng: &mut ChaCha8Rng) -> AlgebraSpec {
    match rng.random_range(0..4) {
        0 => AlgebraSpec::tracial_matrix("B", rng.random_range(2..=3)),
        1 => hyper(),
        2 => AlgebraSpec::single(
            "F",
            Summand::free_group(Extended::Finite(q(rng.random_range(2..=5), 1)), q(1, 1)),
        ),
        _ => AlgebraSpec::new(
            "B",
            vec![
                Summand::tracial_matrix(2, q(1, 2)),
                Summand::hyperfinite(q(1, 2)),
            ],
        ),
    }
}

/// Tracial finite algebra of scalars, tracial matrix blocks, hyperfinite
/// and free group summands with weights `k/12`.
pub fn random_tracial_finite(rng: &mut ChaCha8Rng) -> AlgebraSpec {
    let parts = rng.random_range(1..=3);
    let mut cuts: Vec<i64> = (0..parts - 1).map(|_| rng.random_range(1..12)).collect();
    cuts.sort();
    cuts.dedup();
    let mut bounds = vec![0];
    bounds.extend(cuts);
    bounds.push(12);
    let summands = bounds
        .windows(2)
        .map(|w| {
            let weight = q(w[1] - w[0], 12);
            match rng.random_range(0..4) {
                0 => Summand::scalar(weight),
                1 => Summand::tracial_matrix(rng.random_range(2..=3), weight),
                2 => Summand::hyperfinite(weight),
                _ => Summand::free_group(Extended::Finite(q(rng.random_range(2..=4), 1)), weight),
            }
        })
        .collect();
    AlgebraSpec::new("T", summands)
}

/// Random connected symmetric relation on `n` indices: a random spanning
/// tree plus extra edges.
pub fn random_connected(rng: &mut ChaCha8Rng, n: usize) -> Adjacency {
    let mut a = Adjacency::new(n);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    for i in 1..n {
        let parent = order[rng.random_range(0..i)];
        a.connect(order[i], parent);
    }
    let extra = rng.random_range(0..=n);
    for _ in 0..extra {
        let (x, y) = (rng.random_range(0..n), rng.random_range(0..n));
        a.connect(x, y);
    }
    a
}

/// Layers of `γ*^0, …, γ*^{len-1}`: `0` for the identity, `1` for `γ*`,
/// anything in `1..=max_layer` afterwards.
pub fn random_power_layers(rng: &mut ChaCha8Rng, len: usize, max_layer: usize) -> Vec<usize> {
    (0..len)
        .map(|m| match m {
            0 => 0,
            1 => 1,
            _ => rng.random_range(1..=max_layer),
        })
        .collect()
}

fn arb_positive() -> impl Strategy<Value = Rational> {
    (1i64..=12, 1i64..=6).prop_map(|(n, d)| q(n, d))
}

fn arb_param() -> impl Strategy<Value = Extended> {
    prop_oneof![
        4 => (1i64..=12, 1i64..=4).prop_map(|(n, d)| Extended::Finite(q(n, d))),
        1 => Just(Extended::Infinite),
    ]
}

fn arb_group() -> impl Strategy<Value = MultGroup> {
    prop_oneof![
        Just(MultGroup::trivial()),
        Just(MultGroup::from_ratios(&[q(2, 1)]).unwrap()),
        Just(MultGroup::from_ratios(&[q(2, 1), q(3, 1)]).unwrap()),
    ]
}

fn arb_leaf() -> impl Strategy<Value = E> {
    prop_oneof![
        Just(E::Scalar),
        (1usize..=4).prop_map(|size| E::Matrix { size }),
        any::<bool>().prop_map(|semifinite| E::Hyperfinite { semifinite }),
        arb_param().prop_map(|param| E::FreeGroup { param }),
        prop_oneof![Just("N"), Just("P")].prop_map(E::abstract_factor),
        Just(E::FullIIICentralizer {
            label: "M".into(),
            sd: MultGroup::from_ratios(&[q(2, 1)]).unwrap(),
        }),
    ]
}

/// Well-formed structure terms: positive traces, direct-sum weights
/// summing to one, no amalgamated products.
pub fn arb_expr() -> impl Strategy<Value = E> {
    arb_leaf().prop_recursive(4, 24, 3, |inner| {
        prop_oneof![
            prop::collection::vec((1i64..=4, inner.clone()), 2..=3).prop_map(|parts| {
                let total: i64 = parts.iter().map(|(w, _)| w).sum();
                E::DirectSum {
                    parts: parts
                        .into_iter()
                        .map(|(w, x)| (Extended::Finite(q(w, total)), x))
                        .collect(),
                }
            }),
            prop::collection::vec(inner.clone(), 1..=3).prop_map(E::free_product),
            (
                prop_oneof![
                    4 => arb_positive().prop_map(Extended::Finite),
                    1 => Just(Extended::Infinite),
                ],
                inner.clone()
            )
                .prop_map(|(by, x)| E::amplify(by, x)),
            ((1i64..=8, 1i64..=4), arb_positive(), inner.clone()).prop_map(|((n, d), a, x)| {
                E::CompressedPiece {
                    trace: q(n, d),
                    amplification: a,
                    inner: Box::new(x),
                }
            }),
            (arb_group(), inner).prop_map(|(group, x)| E::GammaFreeProduct {
                group,
                inner: Box::new(x),
            }),
        ]
    })
}
