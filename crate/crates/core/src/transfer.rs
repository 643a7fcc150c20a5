//! Transfer functions of a colligation and the canonical split of `A*`.
//!
//! For a block unitary `[[a, b], [c, d]]` the transfer function is
//! `τ(z) = a + z b (I - z d)^{-1} c`. The forward direction uses the blocks
//! of `U`; the adjoint direction uses those of `U* = [[A*, C*], [B*, D*]]` and
//! gives the inner multiplier `Ψ(z) = A* + z C* (I - z D*)^{-1} B*`.

use serde::Serialize;

use crate::colligation::Colligation;
use crate::error::{Error, Result};
use crate::linalg::{self, condition_number, eig, eigenvalues, orthonormal_complement, range_basis, solve};
use crate::matrix::{cis, ComplexMatrix, C64};
use crate::parallel::map_indexed;

/// Resolvent condition number above which `I - z d` counts as singular.
pub const POLE_CONDITION: f64 = 1e14;

/// Largest `|z|` accepted by evaluation.
pub const MAX_RADIUS: f64 = 1.0 + 1e-12;

/// Bound on the leakage between the two parts of a canonical split.
pub const SPLIT_LEAKAGE_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    /// `τ_U`
    Forward,
    /// `τ_{U*} = Ψ`
    Adjoint,
}

/// The four blocks of a realization `a + z b (I - z d)^{-1} c`.
#[derive(Clone, Debug)]
pub struct Realization {
    pub a: ComplexMatrix,
    pub b: ComplexMatrix,
    pub c: ComplexMatrix,
    pub d: ComplexMatrix,
}

impl Realization {
    pub fn from_colligation(coll: &Colligation, direction: Direction) -> Self {
        match direction {
            Direction::Forward => Self {
                a: coll.a.clone(),
                b: coll.b.clone(),
                c: coll.c.clone(),
                d: coll.d.clone(),
            },
            Direction::Adjoint => Self {
                a: coll.a.adjoint(),
                b: coll.c.adjoint(),
                c: coll.b.adjoint(),
                d: coll.d.adjoint(),
            },
        }
    }

    /// Dimension of the input/output space.
    pub fn dim(&self) -> usize {
        self.a.rows()
    }

    /// Dimension of the state space.
    pub fn state_dim(&self) -> usize {
        self.d.rows()
    }

    fn check_z(z: C64) -> Result<()> {
        if !z.is_finite() || z.norm() > MAX_RADIUS {
            return Err(Error::Input(format!(
                "transfer function evaluated at |z| = {} > 1",
                z.norm()
            )));
        }
        Ok(())
    }

    /// `(I - z d)^{-1} c`, with pole detection.
    fn resolvent_times_c(&self, z: C64) -> Result<ComplexMatrix> {
        let s = self.state_dim();
        let m = &ComplexMatrix::identity(s) - &self.d.scale(z);
        let cond = condition_number(&m)?;
        if cond > POLE_CONDITION {
            return Err(Error::BoundaryPole { z, condition: cond });
        }
        solve(&m, &self.c)
    }

    pub fn eval(&self, z: C64) -> Result<ComplexMatrix> {
        Self::check_z(z)?;
        if self.state_dim() == 0 || self.dim() == 0 {
            return Ok(self.a.clone());
        }
        let x = self.resolvent_times_c(z)?;
        Ok(&self.a + &self.b.matmul(&x).scale(z))
    }

    /// `|(I - τ*τ) - (1 - |z|²) c* (I - z̄ d*)^{-1} (I - z d)^{-1} c|`.
    pub fn schur_identity_residual(&self, z: C64) -> Result<f64> {
        Self::check_z(z)?;
        let tau = self.eval(z)?;
        let n = self.dim();
        let lhs = &ComplexMatrix::identity(n) - &tau.adjoint().matmul(&tau);
        let rhs = if self.state_dim() == 0 {
            ComplexMatrix::zeros(n, n)
        } else {
            let r = self.resolvent_times_c(z)?;
            r.adjoint().matmul(&r).scale_real(1.0 - z.norm_sqr())
        };
        Ok(linalg::norm(&(&lhs - &rhs)))
    }

    /// Taylor coefficients `a, b c, b d c, b d² c, ...` (`count` of them).
    pub fn taylor_coefficients(&self, count: usize) -> Vec<ComplexMatrix> {
        let mut out = Vec::with_capacity(count);
        if count == 0 {
            return out;
        }
        out.push(self.a.clone());
        let mut dc = self.c.clone();
        for _ in 1..count {
            out.push(self.b.matmul(&dc));
            dc = self.d.matmul(&dc);
        }
        out
    }

    /// Realization of the completely non-unitary part: `a` replaced by the
    /// c.n.u. block of `split`, `b` compressed to `H1`, `c` restricted to `H1`.
    pub fn cnu_part(&self, split: &CanonicalSplit) -> Realization {
        Realization {
            a: split.e_cnu.clone(),
            b: split.h1.adjoint().matmul(&self.b),
            c: self.c.matmul(&split.h1),
            d: self.d.clone(),
        }
    }

    /// `max(|H0* b|, |c H0|)`: how far `H0` is from being decoupled from the
    /// state space.
    pub fn split_decoupling_residual(&self, split: &CanonicalSplit) -> f64 {
        if split.k() == 0 || self.state_dim() == 0 {
            return 0.0;
        }
        let x = linalg::norm(&split.h0.adjoint().matmul(&self.b));
        let y = linalg::norm(&self.c.matmul(&split.h0));
        x.max(y)
    }
}

/// Transfer function of a colligation in a chosen direction.
#[derive(Clone, Debug)]
pub struct TransferFunction {
    realization: Realization,
    direction: Direction,
}

impl TransferFunction {
    pub fn new(coll: &Colligation, direction: Direction) -> Self {
        Self {
            realization: Realization::from_colligation(coll, direction),
            direction,
        }
    }

    /// `Ψ = τ_{U*}`.
    pub fn psi(coll: &Colligation) -> Self {
        Self::new(coll, Direction::Adjoint)
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    pub fn realization(&self) -> &Realization {
        &self.realization
    }

    pub fn eval(&self, z: C64) -> Result<ComplexMatrix> {
        self.realization.eval(z)
    }

    pub fn schur_identity_residual(&self, z: C64) -> Result<f64> {
        self.realization.schur_identity_residual(z)
    }

    pub fn taylor_coefficients(&self, count: usize) -> Vec<ComplexMatrix> {
        self.realization.taylor_coefficients(count)
    }

    /// Canonical split of this direction's `a` block.
    pub fn split(&self, tol_pure: f64) -> Result<CanonicalSplit> {
        canonical_split(&self.realization.a, tol_pure)
    }
}

/// `a = H0 W H0* + H1 E H1*` with `W` unitary and `E` completely non-unitary.
#[derive(Clone, Debug)]
pub struct CanonicalSplit {
    /// `r x k`, spans the unitary part.
    pub h0: ComplexMatrix,
    /// `r x (r - k)`, spans the c.n.u. part.
    pub h1: ComplexMatrix,
    /// Unitary part in `H0` coordinates.
    pub w: ComplexMatrix,
    /// Completely non-unitary part in `H1` coordinates.
    pub e_cnu: ComplexMatrix,
    /// `σ(W)`, all unimodular.
    pub lambda: Vec<C64>,
    /// Off-diagonal residual of the split.
    pub leakage: f64,
}

impl CanonicalSplit {
    pub fn k(&self) -> usize {
        self.h0.cols()
    }

    /// `[H0 | H1]`.
    pub fn frame(&self) -> ComplexMatrix {
        ComplexMatrix::hstack(&[&self.h0, &self.h1])
    }

    /// `|a - (H0 W H0* + H1 E H1*)|`.
    pub fn reconstruction_residual(&self, a: &ComplexMatrix) -> f64 {
        let recon = &self.h0.matmul(&self.w).matmul(&self.h0.adjoint())
            + &self.h1.matmul(&self.e_cnu).matmul(&self.h1.adjoint());
        linalg::norm(&(a - &recon))
    }
}

/// Splits a contraction into its unitary and completely non-unitary parts.
///
/// `H0` is spanned by the eigenvectors whose eigenvalues have modulus at least
/// `1 - tol_pure`; for a contraction these eigenspaces reduce the operator,
/// which is verified (leakage above [`SPLIT_LEAKAGE_TOL`] is an error).
pub fn canonical_split(a: &ComplexMatrix, tol_pure: f64) -> Result<CanonicalSplit> {
    if !a.is_square() {
        return Err(Error::Dimension("canonical split of a non-square matrix".into()));
    }
    let r = a.rows();
    let dec = eig(a)?;
    let unimodular: Vec<usize> = (0..r)
        .filter(|&i| dec.values[i].norm() >= 1.0 - tol_pure)
        .collect();
    let h0 = if unimodular.is_empty() {
        ComplexMatrix::zeros(r, 0)
    } else {
        range_basis(&dec.vectors.select_cols(&unimodular), 1e-8)?
    };
    let h1 = orthonormal_complement(&h0);
    let w = h0.adjoint().matmul(a).matmul(&h0);
    let e_cnu = h1.adjoint().matmul(a).matmul(&h1);
    let leakage = if h0.cols() == 0 || h1.cols() == 0 {
        0.0
    } else {
        let x = linalg::norm(&h0.adjoint().matmul(a).matmul(&h1));
        let y = linalg::norm(&h1.adjoint().matmul(a).matmul(&h0));
        x.max(y)
    };
    if leakage > SPLIT_LEAKAGE_TOL {
        return Err(Error::SplitLeakage {
            residual: leakage,
            tol: SPLIT_LEAKAGE_TOL,
        });
    }
    let e_rho = linalg::spectral_radius(&e_cnu)?;
    if e_rho >= 1.0 - tol_pure {
        return Err(Error::Numeric(format!(
            "completely non-unitary part has spectral radius {e_rho}"
        )));
    }
    let lambda = eigenvalues(&w)?;
    Ok(CanonicalSplit {
        h0,
        h1,
        w,
        e_cnu,
        lambda,
        leakage,
    })
}

/// `|F* τ(z) F - (W ⊕ τ'(z))|` with `F = [H0 | H1]` and `τ'` the transfer
/// function of the c.n.u. sub-colligation.
pub fn split_transfer_residual(
    realization: &Realization,
    split: &CanonicalSplit,
    z: C64,
) -> Result<f64> {
    let tau = realization.eval(z)?;
    let f = split.frame();
    let lhs = f.adjoint().matmul(&tau).matmul(&f);
    let sub = realization.cnu_part(split).eval(z)?;
    let rhs = ComplexMatrix::direct_sum(&split.w, &sub);
    Ok(linalg::norm(&(&lhs - &rhs)))
}

#[derive(Clone, Debug, Serialize)]
pub struct UnimodularCheck {
    pub holds: bool,
    pub max_modulus: f64,
}

/// Whether every eigenvalue of `τ(z)` stays at modulus `<= 1 - tol`.
pub fn check_no_unimodular_eigs(realization: &Realization, z: C64, tol: f64) -> Result<UnimodularCheck> {
    let tau = realization.eval(z)?;
    let max_modulus = eigenvalues(&tau)?
        .iter()
        .map(|l| l.norm())
        .fold(0.0, f64::max);
    Ok(UnimodularCheck {
        holds: max_modulus <= 1.0 - tol,
        max_modulus,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundaryScan {
    pub samples: usize,
    /// Angles where `I - e^{iθ} d` was numerically singular.
    pub skipped: Vec<f64>,
    /// `max |σ_j(τ(e^{iθ})) - 1|` over the evaluated angles.
    pub max_deviation: f64,
}

impl BoundaryScan {
    pub fn skip_rate(&self) -> f64 {
        if self.samples == 0 {
            0.0
        } else {
            self.skipped.len() as f64 / self.samples as f64
        }
    }
}

/// Singular values of `τ` on a uniform grid of the unit circle.
pub fn boundary_scan(realization: &Realization, n_theta: usize) -> Result<BoundaryScan> {
    let per_theta = map_indexed(n_theta, |j| {
        let theta = 2.0 * std::f64::consts::PI * j as f64 / n_theta as f64;
        match realization.eval(cis(theta)) {
            Ok(tau) => linalg::singular_values(&tau).map(|s| {
                Some(s.iter().map(|x| (x - 1.0).abs()).fold(0.0, f64::max))
            }),
            Err(Error::BoundaryPole { .. }) => Ok(None),
            Err(e) => Err(e),
        }
    });
    let mut skipped = Vec::new();
    let mut max_deviation: f64 = 0.0;
    for (j, res) in per_theta.into_iter().enumerate() {
        match res? {
            Some(dev) => max_deviation = max_deviation.max(dev),
            None => skipped.push(2.0 * std::f64::consts::PI * j as f64 / n_theta as f64),
        }
    }
    Ok(BoundaryScan {
        samples: n_theta,
        skipped,
        max_deviation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::colligation::colligation_for;
    use crate::matrix::{ONE, ZERO};
    use crate::pair::{ContractionPair, Tolerances};

    fn zero_coll(m: usize) -> Colligation {
        let z = ComplexMatrix::zeros(m, m);
        colligation_for(&ContractionPair::new(z.clone(), z, Tolerances::for_dim(m)).unwrap()).unwrap()
    }

    #[test]
    fn eval_at_origin_is_a_block() {
        let coll = zero_coll(2);
        let f = TransferFunction::new(&coll, Direction::Forward);
        assert_eq!(f.eval(ZERO).unwrap(), coll.a);
        let g = TransferFunction::psi(&coll);
        assert_eq!(g.eval(ZERO).unwrap(), coll.a.adjoint());
    }

    #[test]
    fn shift_example_psi_is_z() {
        let psi = TransferFunction::psi(&zero_coll(2));
        for z in [C64::new(0.3, 0.1), C64::new(-0.5, 0.7), C64::new(0.0, -0.99)] {
            let v = psi.eval(z).unwrap();
            assert!((&v - &ComplexMatrix::identity(2).scale(z)).max_abs() < 1e-15);
        }
    }

    #[test]
    fn scalar_half_psi_matches_formula() {
        let t = ComplexMatrix::from_real_diag(&[0.5]);
        let coll = colligation_for(&ContractionPair::new(t.clone(), t, Tolerances::default()).unwrap()).unwrap();
        let (a, b, c, d) = (coll.a[(0, 0)], coll.b[(0, 0)], coll.c[(0, 0)], coll.d[(0, 0)]);
        let z = C64::new(0.5, 0.0);
        let oracle = a.conj() + z * c.conj() * b.conj() / (ONE - z * d.conj());
        let got = TransferFunction::psi(&coll).eval(z).unwrap()[(0, 0)];
        assert!((got - oracle).norm() < 1e-15);
        assert!((got - z).norm() < 1e-14);
    }

    #[test]
    fn schur_identity_at_origin() {
        let coll = zero_coll(3);
        for dir in [Direction::Forward, Direction::Adjoint] {
            let r = TransferFunction::new(&coll, dir).schur_identity_residual(ZERO).unwrap();
            assert!(r < 1e-12);
        }
    }

    #[test]
    fn rejects_points_outside_disc() {
        let psi = TransferFunction::psi(&zero_coll(1));
        assert!(matches!(psi.eval(C64::new(1.1, 0.0)), Err(Error::Input(_))));
    }

    #[test]
    fn boundary_pole_detected() {
        let r = Realization {
            a: ComplexMatrix::zeros(1, 1),
            b: ComplexMatrix::identity(1),
            c: ComplexMatrix::identity(1),
            d: ComplexMatrix::identity(1),
        };
        assert!(matches!(r.eval(ONE), Err(Error::BoundaryPole { .. })));
        let scan = boundary_scan(&r, 8).unwrap();
        assert_eq!(scan.skipped, vec![0.0]);
    }

    #[test]
    fn split_examples() {
        let w = C64::from_polar(1.0, std::f64::consts::FRAC_PI_4);
        let s = canonical_split(&ComplexMatrix::from_diag(&[w, C64::new(0.5, 0.0)]), 1e-8).unwrap();
        assert_eq!(s.k(), 1);
        assert!((s.w[(0, 0)] - w).norm() < 1e-14);
        assert!((s.e_cnu[(0, 0)].re - 0.5).abs() < 1e-14);

        let strict = ComplexMatrix::from_real_rows(&[&[0.2, 0.3], &[0.0, 0.4]]);
        let s = canonical_split(&strict, 1e-8).unwrap();
        assert_eq!(s.k(), 0);
        assert!((&s.h1.matmul(&s.e_cnu).matmul(&s.h1.adjoint()) - &strict).max_abs() < 1e-14);

        let rot = ComplexMatrix::from_real_rows(&[&[0.0, -1.0], &[1.0, 0.0]]);
        let s = canonical_split(&rot, 1e-8).unwrap();
        assert_eq!(s.k(), 2);
        assert_eq!(s.e_cnu.shape(), (0, 0));
        assert!(s.reconstruction_residual(&rot) < 1e-14);
    }

    #[test]
    fn unimodular_check_on_shift_example() {
        let coll = zero_coll(2);
        let fwd = Realization::from_colligation(&coll, Direction::Forward);
        let z = C64::new(0.4, -0.3);
        let c = check_no_unimodular_eigs(&fwd, z, 1e-8).unwrap();
        assert!(c.holds);
        assert!((c.max_modulus - z.norm()).abs() < 1e-14);
    }

    #[test]
    fn taylor_coefficients_of_shift_example() {
        let psi = TransferFunction::psi(&zero_coll(2));
        let coeffs = psi.taylor_coefficients(4);
        assert!(coeffs[0].max_abs() < 1e-15);
        assert!((&coeffs[1] - &ComplexMatrix::identity(2)).max_abs() < 1e-15);
        assert!(coeffs[2].max_abs() < 1e-15 && coeffs[3].max_abs() < 1e-15);
    }
}
