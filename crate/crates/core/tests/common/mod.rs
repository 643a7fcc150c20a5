#![allow(dead_code)]

use andovar::generate::{generate_pair_with, random_in_disc, PairKind};
use andovar::vn::BivariatePolynomial;
use andovar::{ComplexMatrix, ContractionPair, C64};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `count` pairs cycling through the generator kinds and dimensions in `dims`.
pub fn suite(count: usize, dims: std::ops::RangeInclusive<usize>, seed: u64) -> Vec<ContractionPair> {
    let mut r = rng(seed);
    let dims: Vec<usize> = dims.collect();
    (0..count)
        .map(|i| {
            let kind = PairKind::ALL[i % 3];
            let dim = dims[(i / 3) % dims.len()];
            let (a, b) = generate_pair_with(kind, dim, &mut r).unwrap();
            ContractionPair::with_defaults(a, b).unwrap()
        })
        .collect()
}

/// Diagonal pure pairs.
pub fn diagonal_suite(count: usize, seed: u64) -> Vec<ContractionPair> {
    let mut r = rng(seed);
    (0..count)
        .map(|i| {
            let (a, b) = generate_pair_with(PairKind::Diag, 2 + i % 4, &mut r).unwrap();
            ContractionPair::with_defaults(a, b).unwrap()
        })
        .collect()
}

/// Diagonal pairs with a pure `T1` and a `T2` carrying unimodular entries.
pub fn non_pure_t2_suite(count: usize, seed: u64) -> Vec<ContractionPair> {
    let mut r = rng(seed);
    (0..count)
        .map(|i| {
            let n = 2 + i % 3;
            let a: Vec<C64> = (0..n).map(|_| random_in_disc(&mut r, 0.9)).collect();
            let b: Vec<C64> = (0..n)
                .map(|j| {
                    if j == 0 {
                        C64::from_polar(1.0, r.gen_range(0.0..std::f64::consts::TAU))
                    } else {
                        random_in_disc(&mut r, 0.9)
                    }
                })
                .collect();
            ContractionPair::with_defaults(ComplexMatrix::from_diag(&a), ComplexMatrix::from_diag(&b)).unwrap()
        })
        .collect()
}

/// Random polynomial of total degree at most `max_deg`.
pub fn random_poly(r: &mut impl Rng, max_deg: usize) -> BivariatePolynomial {
    let deg = r.gen_range(1..=max_deg);
    let coeffs = (0..=deg)
        .map(|j| {
            (0..=deg - j)
                .map(|_| {
                    if r.gen_bool(0.7) {
                        C64::new(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0))
                    } else {
                        C64::new(0.0, 0.0)
                    }
                })
                .collect()
        })
        .collect();
    BivariatePolynomial::new(coeffs).unwrap()
}

pub fn random_vector(r: &mut impl Rng, n: usize) -> Vec<C64> {
    (0..n).map(|_| C64::new(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0))).collect()
}
