//! Strategies for random normal-form data, shared by the property and
//! acceptance suites.

#![allow(dead_code)]

use geoindex::interval::rat;
use geoindex::iteration::GeodesicRecord;
use geoindex::morse::SphereConfiguration;
use geoindex::symplectic::{NormalFormDescriptor, RotationNumber, DEFAULT_RESOLUTION_LIMIT};
use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

/// Exact `p/q` with `q <= 12`, never `1/2`.
pub fn exact_rotation() -> impl Strategy<Value = RotationNumber> {
    (3i64..=12)
        .prop_flat_map(|q| (1..q, Just(q)))
        .prop_filter_map("1/2 is excluded", |(p, q)| RotationNumber::ratio(p, q).ok())
}

/// Fifteen-digit decimal with error `1e-13`, far from small denominators.
pub fn decimal_rotation() -> impl Strategy<Value = RotationNumber> {
    (1u64..1_000_000_000_000_000).prop_filter_map("too close to a small rational", |d| {
        let value = BigRational::new(BigInt::from(d), BigInt::from(10u64.pow(15)));
        let err = BigRational::new(BigInt::from(1), BigInt::from(10u64.pow(13)));
        let r = RotationNumber::decimal(value, err).ok()?;
        r.check_resolution(DEFAULT_RESOLUTION_LIMIT).ok()?;
        Some(r)
    })
}

pub fn rotation() -> impl Strategy<Value = RotationNumber> {
    prop_oneof![3 => exact_rotation(), 1 => decimal_rotation()]
}

#[derive(Clone, Debug)]
enum Block {
    PMinus,
    PZero,
    PPlus,
    QMinus,
    QZero,
    QPlus,
    Theta(RotationNumber),
    Alpha(RotationNumber),
    Beta(RotationNumber),
    Hyperbolic,
}

fn block(bumpy: bool) -> BoxedStrategy<Block> {
    let elliptic = prop_oneof![
        4 => rotation().prop_map(Block::Theta),
        1 => rotation().prop_map(Block::Alpha),
        1 => rotation().prop_map(Block::Beta),
        2 => Just(Block::Hyperbolic),
    ];
    if bumpy {
        return elliptic.boxed();
    }
    prop_oneof![
        6 => elliptic,
        1 => prop_oneof![
            Just(Block::PMinus),
            Just(Block::PZero),
            Just(Block::PPlus),
            Just(Block::QMinus),
            Just(Block::QZero),
            Just(Block::QPlus),
        ],
    ]
    .boxed()
}

/// Assembles `k` two-dimensional slots; four-dimensional blocks take two
/// and fall back to a rotation when only one is left.
fn assemble(blocks: Vec<Block>) -> NormalFormDescriptor {
    let k = blocks.len();
    let mut d = NormalFormDescriptor::default();
    let mut used = 0;
    let mut it = blocks.into_iter();
    while used < k {
        let b = it.next().expect("one block per slot");
        used += 1;
        match b {
            Block::PMinus => d.p_minus += 1,
            Block::PZero => d.p_zero += 1,
            Block::PPlus => d.p_plus += 1,
            Block::QMinus => d.q_minus += 1,
            Block::QZero => d.q_zero += 1,
            Block::QPlus => d.q_plus += 1,
            Block::Theta(r) => d.thetas.push(r),
            Block::Hyperbolic => d.hyperbolic_dim += 2,
            Block::Alpha(r) | Block::Beta(r) if used == k => d.thetas.push(r),
            Block::Alpha(r) => {
                it.next();
                used += 1;
                d.alphas.push(r);
            }
            Block::Beta(r) => {
                it.next();
                used += 1;
                d.betas.push(r);
            }
        }
    }
    d
}

/// Descriptor for `Sⁿ` (dimension `2(n-1)`).
pub fn descriptor(n: u32, bumpy: bool) -> impl Strategy<Value = NormalFormDescriptor> {
    prop::collection::vec(block(bumpy), (n - 1) as usize).prop_map(assemble)
}

/// A valid record on `Sⁿ` with `i(c) >= min_index`; the parity rule is
/// met by nudging the index up.
pub fn record(n: u32, bumpy: bool, min_index: i64) -> impl Strategy<Value = GeodesicRecord> {
    (descriptor(n, bumpy), 0i64..12).prop_map(move |(d, extra)| {
        let mut i = min_index + extra;
        if d.hyperbolic_dim == 0 && i.rem_euclid(2) != (d.odd_block_count() % 2) as i64 {
            i += 1;
        }
        GeodesicRecord::new("g", i, d).expect("generated record is valid")
    })
}

/// `(n, record)` with `n` in `2..=max_n`.
pub fn any_record(max_n: u32, bumpy: bool, min_index_is_n_minus_1: bool) -> impl Strategy<Value = (u32, GeodesicRecord)> {
    (2..=max_n).prop_flat_map(move |n| {
        let min = if min_index_is_n_minus_1 { n as i64 - 1 } else { 0 };
        (Just(n), record(n, bumpy, min))
    })
}

/// Bumpy configuration with up to `max_geodesics` geodesics.
pub fn bumpy_configuration(max_n: u32, max_geodesics: usize) -> impl Strategy<Value = SphereConfiguration> {
    (2..=max_n).prop_flat_map(move |n| {
        prop::collection::vec(record(n, true, 0), 1..=max_geodesics).prop_map(move |records| {
            let geodesics = records
                .into_iter()
                .enumerate()
                .map(|(j, g)| GeodesicRecord { label: format!("c{j}"), ..g })
                .collect();
            SphereConfiguration::bumpy(n, geodesics).expect("generated configuration is valid")
        })
    })
}

/// Boundary configurations for the top-degree contradiction: pure
/// hyperbolic geodesics of index `i_j | N` with `Σ χ̂/i_j = B(n,1)`, listed
/// as `(n, s, N, index multisets)`.
pub const BOUNDARY_CASES: &[(u32, i64, i64, &[&[i64]])] = &[
    (3, 1, 2, &[&[2, 2]]),
    (3, 2, 4, &[&[2, 2], &[2, 4, 4], &[4, 4, 4, 4]]),
    (4, 1, 3, &[&[3, 3, 3, 3]]),
    (5, 1, 4, &[&[4, 4, 4]]),
];

/// `1/k` for `k` in `lo..=hi`.
pub fn unit_fraction(lo: i64, hi: i64) -> impl Strategy<Value = BigRational> {
    (lo..=hi).prop_map(|k| rat(1, k))
}
