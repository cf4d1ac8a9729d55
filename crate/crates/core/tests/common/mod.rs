//! Seeded random corpus shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeMap;
use std::sync::Arc;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use torlog::equivariant::{direct_sum, divisor_weights, EquivariantData};
use torlog::laurent::rat;
use torlog::transitions::{split_bundle, TransitionData};
use torlog::vfield::VField;
use torlog::{CharacterVector, ConeId, Fan, LatticeVector, LaurentMatrix, LaurentPoly, Rational};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn p1() -> Arc<Fan> {
    Arc::new(Fan::projective_space(1))
}

pub fn p2() -> Arc<Fan> {
    Arc::new(Fan::projective_space(2))
}

pub fn p1xp1() -> Arc<Fan> {
    Arc::new(Fan::p1_times_p1())
}

/// Smooth complete surfaces: P2, P1xP1 and the Hirzebruch surfaces F1, F2.
pub fn surface_fans() -> Vec<Arc<Fan>> {
    vec![p2(), p1xp1(), Arc::new(Fan::hirzebruch(1)), Arc::new(Fan::hirzebruch(2))]
}

/// Fans the transition corpus is drawn from.
pub fn transition_fans() -> Vec<Arc<Fan>> {
    vec![p1(), p2(), p1xp1()]
}

pub fn rational<R: Rng>(rng: &mut R) -> Rational {
    let mut num = 0;
    while num == 0 {
        num = rng.gen_range(-4..=4);
    }
    rat(num, rng.gen_range(1..=3))
}

pub fn character<R: Rng>(rng: &mut R, n: usize, bound: i64) -> CharacterVector {
    CharacterVector::new((0..n).map(|_| rng.gen_range(-bound..=bound)).collect())
}

pub fn lattice_vector<R: Rng>(rng: &mut R, n: usize, bound: i64) -> LatticeVector {
    LatticeVector::new((0..n).map(|_| rng.gen_range(-bound..=bound)).collect())
}

pub fn laurent<R: Rng>(rng: &mut R, n: usize, max_terms: usize) -> LaurentPoly {
    let terms = rng.gen_range(0..=max_terms);
    LaurentPoly::from_terms((0..terms).map(|_| (character(rng, n, 3), rational(rng))))
}

/// A random element of the chart ring `K[S_sigma]`.
pub fn chart_poly<R: Rng>(rng: &mut R, fan: &Fan, sigma: ConeId, max_terms: usize) -> LaurentPoly {
    let n = fan.rank();
    let rays: Vec<LatticeVector> = fan.generators(sigma).unwrap().into_iter().cloned().collect();
    let terms = rng.gen_range(0..=max_terms);
    let mut p = LaurentPoly::zero();
    for _ in 0..terms {
        let m = loop {
            let m = character(rng, n, 2);
            if rays.iter().all(|v| m.pair(v) >= 0) {
                break m;
            }
        };
        p.add_term(m, rational(rng));
    }
    p
}

pub fn vfield<R: Rng>(rng: &mut R, n: usize, max_terms: usize) -> VField {
    let pairs: Vec<(LaurentPoly, LatticeVector)> = (0..rng.gen_range(0..=2))
        .map(|_| (laurent(rng, n, max_terms), lattice_vector(rng, n, 2)))
        .collect();
    VField::from_pairs(n, pairs).unwrap()
}

pub fn divisor<R: Rng>(rng: &mut R, fan: &Fan, bound: i64) -> Vec<i64> {
    (0..fan.rays().len()).map(|_| rng.gen_range(-bound..=bound)).collect()
}

pub fn summands<R: Rng>(rng: &mut R, fan: &Fan, rank: usize) -> Vec<BTreeMap<ConeId, CharacterVector>> {
    (0..rank)
        .map(|_| divisor_weights(fan, &divisor(rng, fan, 3)).unwrap())
        .collect()
}

/// A direct sum of random line bundles, with its monomial transitions.
pub fn split<R: Rng>(rng: &mut R, fan: &Arc<Fan>, rank: usize) -> (EquivariantData, TransitionData) {
    split_bundle(fan.clone(), &summands(rng, fan, rank)).unwrap()
}

/// Weight data of a random direct sum of line bundles.
pub fn equivariant<R: Rng>(rng: &mut R, fan: &Arc<Fan>, rank: usize) -> EquivariantData {
    direct_sum(fan.clone(), &summands(rng, fan, rank)).unwrap()
}

/// Arbitrary per-cone weights; not compatible across faces in general.
pub fn loose_weights<R: Rng>(rng: &mut R, fan: &Arc<Fan>, rank: usize) -> EquivariantData {
    let n = fan.rank();
    let weights = fan
        .maximal_cones()
        .iter()
        .map(|&s| (s, (0..rank).map(|_| character(rng, n, 4)).collect()))
        .collect();
    EquivariantData::new(fan.clone(), rank, weights).unwrap()
}

/// Unitriangular with chart-ring entries, times a constant invertible diagonal.
pub fn frame<R: Rng>(rng: &mut R, fan: &Fan, sigma: ConeId, rank: usize) -> LaurentMatrix {
    let n = fan.rank();
    let mut u = LaurentMatrix::identity(rank, n);
    for i in 0..rank {
        for j in i + 1..rank {
            u.set(i, j, chart_poly(rng, fan, sigma, 2));
        }
    }
    let d = LaurentMatrix::diagonal((0..rank).map(|_| LaurentPoly::constant(n, rational(rng))).collect());
    u.mul(&d).unwrap()
}

/// Monomial transitions of a split bundle, conjugated by random chart frames.
pub fn transitions<R: Rng>(rng: &mut R, fan: &Arc<Fan>, rank: usize) -> TransitionData {
    let (_, data) = split(rng, fan, rank);
    let frames: BTreeMap<ConeId, LaurentMatrix> = fan
        .maximal_cones()
        .iter()
        .map(|&s| (s, frame(rng, fan, s, rank)))
        .collect();
    data.gauge(&frames).unwrap()
}

/// The acceptance corpus of transition data: ranks 1 to 3 over every
/// transition fan, `count` instances in total.
pub fn transition_corpus(seed: u64, count: usize) -> Vec<TransitionData> {
    let mut rng = rng(seed);
    let fans = transition_fans();
    (0..count)
        .map(|i| {
            let fan = &fans[i % fans.len()];
            let rank = 1 + (i / fans.len()) % 3;
            transitions(&mut rng, fan, rank)
        })
        .collect()
}

/// Transition data on P2 only.
pub fn p2_corpus(seed: u64, count: usize) -> Vec<TransitionData> {
    let mut rng = rng(seed);
    let fan = p2();
    (0..count).map(|i| transitions(&mut rng, &fan, 1 + i % 3)).collect()
}

/// Equivariant data on smooth complete surfaces: direct sums of line bundles.
pub fn equivariant_corpus(seed: u64, count: usize) -> Vec<EquivariantData> {
    let mut rng = rng(seed);
    let fans = surface_fans();
    (0..count)
        .map(|i| equivariant(&mut rng, &fans[i % fans.len()], 1 + (i / fans.len()) % 3))
        .collect()
}
