mod common;

use andovar::colligation::colligation_for;
use andovar::generate::{generate_pair, random_gaussian, random_in_disc, random_unitary, PairKind};
use andovar::linalg::{self, herm_eig, psd_sqrt};
use andovar::matrix::vec_norm;
use andovar::pair::defect_identity_gap;
use andovar::variety::Variety;
use andovar::vn::{eval_poly_pair, vn_report_with, VnOptions};
use andovar::{ComplexMatrix, ContractionPair, Direction, TransferFunction, C64};
use common::{random_poly, random_vector, rng};
use proptest::prelude::*;

fn kind() -> impl Strategy<Value = PairKind> {
    prop::sample::select(PairKind::ALL.to_vec())
}

fn pair(kind: PairKind, dim: usize, seed: u64) -> ContractionPair {
    let (a, b) = generate_pair(kind, dim, seed).unwrap();
    ContractionPair::with_defaults(a, b).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn herm_eig_reconstructs(n in 1usize..7, seed in any::<u64>()) {
        let g = random_gaussian(&mut rng(seed), n, n);
        let h = &g + &g.adjoint();
        let e = herm_eig(&h).unwrap();
        let d: Vec<C64> = e.values.iter().map(|&x| C64::new(x, 0.0)).collect();
        let back = e.vectors.matmul(&ComplexMatrix::from_diag(&d)).matmul(&e.vectors.adjoint());
        prop_assert!((&back - &h).max_abs() <= 1e-12 * (1.0 + h.max_abs()));
        prop_assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
        prop_assert!(linalg::unitarity_defect(&e.vectors) <= 1e-12);
    }

    #[test]
    fn psd_sqrt_squares_back(n in 1usize..7, seed in any::<u64>()) {
        let g = random_gaussian(&mut rng(seed), n, n);
        let p = g.matmul(&g.adjoint());
        let s = psd_sqrt(&p, 1e-12).unwrap();
        prop_assert!((&s.matmul(&s) - &p).max_abs() <= 1e-10 * (1.0 + p.max_abs()));
        prop_assert!((&s - &s.adjoint()).max_abs() <= 1e-12 * (1.0 + s.max_abs()));
    }

    #[test]
    fn norm_is_unitarily_invariant(n in 1usize..7, seed in any::<u64>()) {
        let mut r = rng(seed);
        let m = random_gaussian(&mut r, n, n);
        let u = random_unitary(&mut r, n);
        let v = random_unitary(&mut r, n);
        let a = linalg::norm(&m);
        let b = linalg::norm(&u.matmul(&m).matmul(&v));
        prop_assert!((a - b).abs() <= 1e-12 * a.max(1.0));
        // |m|² = largest eigenvalue of m* m
        let e = herm_eig(&m.adjoint().matmul(&m)).unwrap();
        prop_assert!((a * a - e.values[n - 1]).abs() <= 1e-10 * a.max(1.0).powi(2));
    }

    #[test]
    fn defect_identity_holds(k in kind(), dim in 1usize..7, seed in any::<u64>()) {
        let p = pair(k, dim, seed);
        let (d1, d2) = p.defects().unwrap();
        let h = random_vector(&mut rng(seed ^ 1), dim);
        let gap = defect_identity_gap(&p, &d1, &d2, &h);
        prop_assert!(gap.abs() <= 1e-12 * vec_norm(&h).powi(2).max(1.0));
    }

    #[test]
    fn colligation_is_unitary_and_acts(k in kind(), dim in 1usize..7, seed in any::<u64>()) {
        let p = pair(k, dim, seed);
        let c = colligation_for(&p).unwrap();
        prop_assert!(c.unitarity_defect() <= 1e-10);
        let u = c.unitary();
        let gram = &u.adjoint().matmul(&u) - &ComplexMatrix::identity(u.rows());
        prop_assert!(gram.max_abs() <= 1e-10);
        let h = random_vector(&mut rng(seed ^ 2), dim);
        prop_assert!(c.action_residual(&p, &h) <= 1e-10 * vec_norm(&h).max(1.0));
    }

    #[test]
    fn transfer_function_is_schur(k in kind(), dim in 1usize..6, seed in any::<u64>()) {
        let p = pair(k, dim, seed);
        let c = colligation_for(&p).unwrap();
        let mut r = rng(seed ^ 3);
        for dir in [Direction::Forward, Direction::Adjoint] {
            let tf = TransferFunction::new(&c, dir);
            for _ in 0..5 {
                let z = random_in_disc(&mut r, 0.98);
                let v = tf.eval(z).unwrap();
                prop_assert!(linalg::norm(&v) <= 1.0 + 1e-10);
                // I - Ψ*Ψ is positive semidefinite
                let d = &ComplexMatrix::identity(v.cols()) - &v.adjoint().matmul(&v);
                let e = herm_eig(&d).unwrap();
                prop_assert!(e.values.iter().all(|&x| x >= -1e-10));
            }
        }
    }

    #[test]
    fn von_neumann_chain(k in kind(), dim in 1usize..6, seed in any::<u64>()) {
        let p = pair(k, dim, seed);
        let poly = random_poly(&mut rng(seed ^ 4), 3);
        let v = Variety::for_pair(&p).unwrap();
        let opts = VnOptions { n_theta: 360, torus_grid: 128 };
        let rep = vn_report_with(&p, &v, &poly, &opts).unwrap();
        prop_assert!(rep.chain_holds());
        let direct = linalg::norm(&eval_poly_pair(&poly, p.t1(), p.t2()));
        prop_assert!((direct - rep.lhs).abs() <= 1e-12 * direct.max(1.0));
    }
}

#[test]
fn poly_pair_matches_naive_powers() {
    let p = pair(PairKind::TriangularCommuting, 4, 9);
    let poly = random_poly(&mut rng(10), 4);
    let mut naive = ComplexMatrix::zeros(4, 4);
    for (j, row) in poly.coeffs().iter().enumerate() {
        for (k, &c) in row.iter().enumerate() {
            let term = p.t1().pow(j).matmul(&p.t2().pow(k));
            naive = &naive + &term.scale(c);
        }
    }
    let fast = eval_poly_pair(&poly, p.t1(), p.t2());
    assert!((&fast - &naive).max_abs() < 1e-12);
}
