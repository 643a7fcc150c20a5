//! Seeded generators of exactly commuting contractive pairs.

use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg;
use crate::matrix::{ComplexMatrix, C64, ZERO};

/// Every generated matrix has norm at most `1 - MARGIN`.
pub const MARGIN: f64 = 0.05;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PairKind {
    /// Two random diagonal matrices.
    Diag,
    /// `T1 = λ I + α J` with `J` the nilpotent Jordan cell, `T2 = q(T1)`.
    JordanPoly,
    /// `Q (R, q(R)) Q*` with `R` upper triangular and `Q` unitary.
    TriangularCommuting,
}

impl PairKind {
    pub const ALL: [PairKind; 3] = [PairKind::Diag, PairKind::JordanPoly, PairKind::TriangularCommuting];

    pub fn name(self) -> &'static str {
        match self {
            PairKind::Diag => "diag",
            PairKind::JordanPoly => "jordan-poly",
            PairKind::TriangularCommuting => "triangular-commuting",
        }
    }
}

impl FromStr for PairKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Input(format!("unknown pair kind {s:?}; expected diag, jordan-poly or triangular-commuting")))
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform point of the disc of radius `r`.
pub fn random_in_disc(rng: &mut impl Rng, r: f64) -> C64 {
    C64::from_polar(r * rng.gen::<f64>().sqrt(), rng.gen_range(0.0..std::f64::consts::TAU))
}

/// Entries with independent standard normal real and imaginary parts.
pub fn random_gaussian(rng: &mut impl Rng, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| C64::new(normal(rng), normal(rng)))
}

/// Unit vector in `C^n`.
pub fn random_unit_vector(rng: &mut impl Rng, n: usize) -> Vec<C64> {
    let v: Vec<C64> = (0..n).map(|_| C64::new(normal(rng), normal(rng))).collect();
    let s = crate::matrix::vec_norm(&v);
    v.into_iter().map(|x| x / s).collect()
}

/// Haar-distributed unitary (polar factor of a Gaussian matrix).
pub fn random_unitary(rng: &mut impl Rng, n: usize) -> ComplexMatrix {
    let g = random_gaussian(rng, n, n);
    let d = linalg::svd(&g).expect("svd of a finite matrix");
    d.u.matmul(&d.v.adjoint())
}

fn normal(rng: &mut impl Rng) -> f64 {
    // Box-Muller
    let u: f64 = 1.0 - rng.gen::<f64>();
    let v: f64 = rng.gen();
    (-2.0 * u.ln()).sqrt() * (std::f64::consts::TAU * v).cos()
}

fn rescale(m: ComplexMatrix, target: f64) -> ComplexMatrix {
    let nrm = linalg::norm(&m);
    if nrm > target {
        m.scale_real(target / nrm)
    } else {
        m
    }
}

/// `c0 I + c1 T + c2 T² + c3 T³` with random coefficients.
fn random_poly_of(rng: &mut impl Rng, t: &ComplexMatrix) -> ComplexMatrix {
    let n = t.rows();
    let coeffs: Vec<C64> = (0..4).map(|_| random_in_disc(rng, 0.8)).collect();
    let mut acc = ComplexMatrix::zeros(n, n);
    for c in coeffs.iter().rev() {
        acc = &acc.matmul(t) + &ComplexMatrix::identity(n).scale(*c);
    }
    acc
}

/// A commuting pair with both norms at most `1 - MARGIN`.
pub fn generate_pair(kind: PairKind, dim: usize, seed: u64) -> Result<(ComplexMatrix, ComplexMatrix)> {
    let mut r = rng(seed);
    generate_pair_with(kind, dim, &mut r)
}

pub fn generate_pair_with(kind: PairKind, dim: usize, rng: &mut impl Rng) -> Result<(ComplexMatrix, ComplexMatrix)> {
    if dim == 0 {
        return Err(Error::Input("dimension must be positive".into()));
    }
    let cap = 1.0 - MARGIN;
    let pair = match kind {
        PairKind::Diag => {
            let a: Vec<C64> = (0..dim).map(|_| random_in_disc(rng, cap)).collect();
            let b: Vec<C64> = (0..dim).map(|_| random_in_disc(rng, cap)).collect();
            (ComplexMatrix::from_diag(&a), ComplexMatrix::from_diag(&b))
        }
        PairKind::JordanPoly => {
            let lambda = random_in_disc(rng, 0.6);
            let alpha = rng.gen_range(0.05..(cap - lambda.norm()).max(0.06));
            let t1 = ComplexMatrix::from_fn(dim, dim, |i, j| {
                if i == j {
                    lambda
                } else if j == i + 1 {
                    C64::new(alpha, 0.0)
                } else {
                    ZERO
                }
            });
            let t1 = rescale(t1, cap);
            let t2 = rescale(random_poly_of(rng, &t1), cap);
            (t1, t2)
        }
        PairKind::TriangularCommuting => {
            let r = ComplexMatrix::from_fn(dim, dim, |i, j| {
                if i == j {
                    random_in_disc(rng, 0.7)
                } else if j > i {
                    C64::new(normal(rng), normal(rng)).scale(0.3)
                } else {
                    ZERO
                }
            });
            let r = rescale(r, cap);
            let s = rescale(random_poly_of(rng, &r), cap);
            let q = random_unitary(rng, dim);
            let qs = q.adjoint();
            (q.matmul(&r).matmul(&qs), q.matmul(&s).matmul(&qs))
        }
    };
    Ok(pair)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generated_pairs_commute_and_contract() {
        for kind in PairKind::ALL {
            for dim in 1..=6 {
                let (a, b) = generate_pair(kind, dim, 7 + dim as u64).unwrap();
                let c = &a.matmul(&b) - &b.matmul(&a);
                assert!(linalg::norm(&c) < 1e-13, "{kind:?} {dim}");
                assert!(linalg::norm(&a) <= 1.0 - MARGIN + 1e-12);
                assert!(linalg::norm(&b) <= 1.0 - MARGIN + 1e-12);
            }
        }
    }

    #[test]
    fn seeded_determinism() {
        let x = generate_pair(PairKind::TriangularCommuting, 4, 42).unwrap();
        let y = generate_pair(PairKind::TriangularCommuting, 4, 42).unwrap();
        assert_eq!(x, y);
    }

    #[test]
    fn kind_names_round_trip() {
        for k in PairKind::ALL {
            assert_eq!(k.name().parse::<PairKind>().unwrap(), k);
        }
        assert!("spiral".parse::<PairKind>().is_err());
    }
}
