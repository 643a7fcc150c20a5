//! Validation of commuting contractive pairs and their defect data.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, herm_eig};
use crate::matrix::{ComplexMatrix, C64};

/// Hard cap on the truncation degree of the Hardy-space model.
pub const TRUNCATION_CAP: usize = 2000;

/// Eigenvalues of `I - T T*` closer than this (relative) count as tied.
const CLUSTER_REL: f64 = 1e-12;

/// Numerical thresholds shared by the whole pipeline.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Absolute bound on `|T1 T2 - T2 T1|`.
    pub commute: f64,
    /// `|T_j| <= 1 + contract`.
    pub contract: f64,
    /// `T` counts as pure when its spectral radius is below `1 - pure`.
    pub pure: f64,
    /// Relative eigenvalue cut for defect ranks.
    pub rank: f64,
    /// Target for `|T1^{*N}|` when choosing the truncation degree.
    pub trunc: f64,
}

impl Tolerances {
    /// Defaults for an `n x n` pair; the commutation bound scales with `n`.
    pub fn for_dim(n: usize) -> Self {
        Self {
            commute: 1e-10 * n.max(1) as f64,
            contract: 1e-10,
            pure: 1e-8,
            rank: 1e-10,
            trunc: 1e-10,
        }
    }

    /// Every tolerance halved.
    pub fn strict(self) -> Self {
        Self {
            commute: self.commute / 2.0,
            contract: self.contract / 2.0,
            pure: self.pure / 2.0,
            rank: self.rank / 2.0,
            trunc: self.trunc / 2.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let all = [self.commute, self.contract, self.pure, self.rank, self.trunc];
        if all.iter().all(|t| t.is_finite() && *t >= 0.0) {
            Ok(())
        } else {
            Err(Error::Input("tolerances must be finite and non-negative".into()))
        }
    }
}

impl Default for Tolerances {
    fn default() -> Self {
        Self::for_dim(1)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairReport {
    pub dim: usize,
    pub commute_residual: f64,
    pub norms: [f64; 2],
    pub spectral_radii: [f64; 2],
    pub pure: [bool; 2],
    pub defect_ranks: [usize; 2],
}

/// Defect operator `D_T = (I - T T*)^{1/2}` together with an orthonormal
/// basis of its range.
#[derive(Clone, Debug)]
pub struct DefectData {
    pub d: ComplexMatrix,
    /// `n x r`, isometric columns spanning `ran D_T`.
    pub basis: ComplexMatrix,
    pub rank: usize,
}

impl DefectData {
    /// `E* D_T`: the defect operator in defect-space coordinates (`r x n`).
    pub fn coordinates(&self) -> ComplexMatrix {
        self.basis.adjoint().matmul(&self.d)
    }
}

/// A validated pair of commuting contractions.
#[derive(Clone, Debug)]
pub struct ContractionPair {
    t1: ComplexMatrix,
    t2: ComplexMatrix,
    tols: Tolerances,
    report: PairReport,
}

impl ContractionPair {
    pub fn new(t1: ComplexMatrix, t2: ComplexMatrix, tols: Tolerances) -> Result<Self> {
        let report = validate_pair(&t1, &t2, &tols)?;
        Ok(Self {
            t1,
            t2,
            tols,
            report,
        })
    }

    /// Same as [`ContractionPair::new`] with [`Tolerances::for_dim`].
    pub fn with_defaults(t1: ComplexMatrix, t2: ComplexMatrix) -> Result<Self> {
        let n = t1.rows();
        Self::new(t1, t2, Tolerances::for_dim(n))
    }

    pub fn t1(&self) -> &ComplexMatrix {
        &self.t1
    }

    pub fn t2(&self) -> &ComplexMatrix {
        &self.t2
    }

    pub fn dim(&self) -> usize {
        self.t1.rows()
    }

    pub fn tolerances(&self) -> &Tolerances {
        &self.tols
    }

    pub fn report(&self) -> &PairReport {
        &self.report
    }

    pub fn t1_pure(&self) -> bool {
        self.report.pure[0]
    }

    pub fn t2_pure(&self) -> bool {
        self.report.pure[1]
    }

    /// The pair with the roles of `T1` and `T2` exchanged.
    pub fn swapped(&self) -> Self {
        let r = &self.report;
        Self {
            t1: self.t2.clone(),
            t2: self.t1.clone(),
            tols: self.tols,
            report: PairReport {
                dim: r.dim,
                commute_residual: r.commute_residual,
                norms: [r.norms[1], r.norms[0]],
                spectral_radii: [r.spectral_radii[1], r.spectral_radii[0]],
                pure: [r.pure[1], r.pure[0]],
                defect_ranks: [r.defect_ranks[1], r.defect_ranks[0]],
            },
        }
    }

    pub fn defects(&self) -> Result<(DefectData, DefectData)> {
        Ok((defect(&self.t1, &self.tols)?, defect(&self.t2, &self.tols)?))
    }

    pub fn require_t1_pure(&self) -> Result<()> {
        if self.t1_pure() {
            Ok(())
        } else {
            Err(Error::NotPure {
                which: "T1",
                spectral_radius: self.report.spectral_radii[0],
                tol: self.tols.pure,
            })
        }
    }

    pub fn require_both_pure(&self) -> Result<()> {
        self.require_t1_pure()?;
        if self.t2_pure() {
            Ok(())
        } else {
            Err(Error::NotPure {
                which: "T2",
                spectral_radius: self.report.spectral_radii[1],
                tol: self.tols.pure,
            })
        }
    }

    pub fn truncation_degree(&self) -> Result<usize> {
        truncation_degree(&self.t1, &self.tols)
    }
}

/// Checks shapes, commutation and contractivity; purity is reported only.
pub fn validate_pair(t1: &ComplexMatrix, t2: &ComplexMatrix, tols: &Tolerances) -> Result<PairReport> {
    tols.validate()?;
    t1.check_finite()?;
    t2.check_finite()?;
    if !t1.is_square() || !t2.is_square() || t1.rows() != t2.rows() {
        return Err(Error::Dimension(format!(
            "T1 is {}x{}, T2 is {}x{}; need two square matrices of equal size",
            t1.rows(),
            t1.cols(),
            t2.rows(),
            t2.cols()
        )));
    }
    if t1.rows() == 0 {
        return Err(Error::Dimension("empty pair".into()));
    }
    let commutator = &t1.matmul(t2) - &t2.matmul(t1);
    let commute_residual = linalg::operator_norm(&commutator)?;
    if commute_residual > tols.commute {
        return Err(Error::NotCommuting {
            residual: commute_residual,
            tol: tols.commute,
        });
    }
    let norms = [linalg::operator_norm(t1)?, linalg::operator_norm(t2)?];
    for (which, &nrm) in ["T1", "T2"].iter().zip(&norms) {
        if nrm > 1.0 + tols.contract {
            return Err(Error::NotContraction {
                which,
                norm: nrm,
                tol: tols.contract,
            });
        }
    }
    let spectral_radii = [linalg::spectral_radius(t1)?, linalg::spectral_radius(t2)?];
    let pure = spectral_radii.map(|rho| rho < 1.0 - tols.pure);
    let defect_ranks = [defect(t1, tols)?.rank, defect(t2, tols)?.rank];
    Ok(PairReport {
        dim: t1.rows(),
        commute_residual,
        norms,
        spectral_radii,
        pure,
        defect_ranks,
    })
}

/// Defect operator and defect-space basis of a contraction.
///
/// The rank counts eigenvalues of `I - T T*` above
/// `tols.rank * max(1, |I - T T*|)`; the basis lists the matching eigenvectors
/// by decreasing eigenvalue.
pub fn defect(t: &ComplexMatrix, tols: &Tolerances) -> Result<DefectData> {
    if !t.is_square() {
        return Err(Error::Dimension("defect of a non-square matrix".into()));
    }
    let n = t.rows();
    let m = &ComplexMatrix::identity(n) - &t.matmul(&t.adjoint());
    let dec = herm_eig(&m)?;
    // |T| <= 1 + c allows eigenvalues down to 1 - (1 + c)^2.
    let psd_tol = 2.0 * tols.contract + tols.contract * tols.contract + 1e-14 * n as f64;
    if let Some(&min) = dec.values.first() {
        if min < -psd_tol {
            return Err(Error::NotContraction {
                which: "T",
                norm: (1.0 - min).sqrt(),
                tol: tols.contract,
            });
        }
    }
    let roots: Vec<f64> = dec.values.iter().map(|&l| l.max(0.0).sqrt()).collect();
    let v = &dec.vectors;
    let vs = ComplexMatrix::from_fn(n, n, |i, j| v[(i, j)] * roots[j]);
    let d = vs.matmul(&v.adjoint()).hermitian_part();

    let scale = dec
        .values
        .iter()
        .map(|l| l.abs())
        .fold(0.0, f64::max)
        .max(1.0);
    let cut = tols.rank * scale;
    let keep: Vec<usize> = (0..n).rev().filter(|&i| dec.values[i] > cut).collect();
    // Tied eigenvalues leave the eigenvectors free; each cluster gets the
    // canonical basis of its span.
    let mut basis = v.select_cols(&keep);
    let mut start = 0;
    while start < keep.len() {
        let mut end = start + 1;
        while end < keep.len()
            && dec.values[keep[end - 1]] - dec.values[keep[end]] <= CLUSTER_REL * scale
        {
            end += 1;
        }
        if end - start > 1 {
            let block = basis.submatrix(0, start, n, end - start);
            basis.set_block(0, start, &linalg::canonical_basis(&block));
        }
        start = end;
    }
    Ok(DefectData {
        d,
        rank: keep.len(),
        basis,
    })
}

/// Smallest `N` with `|T^{*N}| < tols.trunc`, capped at [`TRUNCATION_CAP`].
///
/// Powers `T^{2^k}` are squared until the target is met, then the exact
/// degree is located by binary descent over the stored powers. Norms of
/// powers of a contraction are non-increasing, so the descent is exact.
pub fn truncation_degree(t1: &ComplexMatrix, tols: &Tolerances) -> Result<usize> {
    let rho = linalg::spectral_radius(t1)?;
    if rho >= 1.0 - tols.pure {
        return Err(Error::NotPure {
            which: "T1",
            spectral_radius: rho,
            tol: tols.pure,
        });
    }
    let target = tols.trunc;
    let mut powers = vec![t1.clone()];
    loop {
        let last = powers.last().expect("non-empty");
        let k = powers.len() - 1;
        if linalg::norm(last) < target {
            break;
        }
        if (1usize << k) >= TRUNCATION_CAP {
            log::warn!(
                "truncation degree capped at {TRUNCATION_CAP}: |T1^{{*{}}}| = {:e} >= {target:e}",
                1usize << k,
                linalg::norm(last)
            );
            return Ok(TRUNCATION_CAP);
        }
        let sq = last.matmul(last);
        powers.push(sq);
    }
    let k = powers.len() - 1;
    if k == 0 {
        return Ok(1);
    }
    // T^lo has norm >= target, T^{2^k} does not.
    let mut lo = 1usize << (k - 1);
    let mut acc = powers[k - 1].clone();
    for j in (0..k - 1).rev() {
        let cand = acc.matmul(&powers[j]);
        if linalg::norm(&cand) >= target {
            acc = cand;
            lo += 1 << j;
        }
    }
    let n = lo + 1;
    if n > TRUNCATION_CAP {
        log::warn!("truncation degree {n} capped at {TRUNCATION_CAP}");
        return Ok(TRUNCATION_CAP);
    }
    Ok(n)
}

/// `‖D_T1 h‖² + ‖D_T2 T1* h‖² - ‖D_T1 T2* h‖² - ‖D_T2 h‖²`, which vanishes
/// for commuting contractions.
pub fn defect_identity_gap(
    pair: &ContractionPair,
    d1: &DefectData,
    d2: &DefectData,
    h: &[C64],
) -> f64 {
    use crate::matrix::vec_norm;
    let t1s = pair.t1().adjoint();
    let t2s = pair.t2().adjoint();
    let a = vec_norm(&d1.d.matvec(h)).powi(2);
    let b = vec_norm(&d2.d.matvec(&t1s.matvec(h))).powi(2);
    let c = vec_norm(&d1.d.matvec(&t2s.matvec(h))).powi(2);
    let d = vec_norm(&d2.d.matvec(h)).powi(2);
    a + b - c - d
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::ZERO;

    fn jordan_half() -> ComplexMatrix {
        ComplexMatrix::from_real_rows(&[&[0.0, 0.5], &[0.0, 0.0]])
    }

    #[test]
    fn validate_zero_pair() {
        let z = ComplexMatrix::zeros(2, 2);
        let r = validate_pair(&z, &z, &Tolerances::for_dim(2)).unwrap();
        assert_eq!(r.commute_residual, 0.0);
        assert_eq!(r.pure, [true, true]);
        assert_eq!(r.defect_ranks, [2, 2]);
    }

    #[test]
    fn validate_diagonal_pair() {
        let t1 = ComplexMatrix::from_real_diag(&[0.3, 0.4]);
        let t2 = ComplexMatrix::from_real_diag(&[0.2, -0.5]);
        let r = validate_pair(&t1, &t2, &Tolerances::for_dim(2)).unwrap();
        assert_eq!(r.pure, [true, true]);
    }

    #[test]
    fn validate_identity_t2() {
        let r = validate_pair(&jordan_half(), &ComplexMatrix::identity(2), &Tolerances::for_dim(2)).unwrap();
        assert_eq!(r.pure, [true, false]);
        assert_eq!(r.defect_ranks[1], 0);
    }

    #[test]
    fn validate_rejections() {
        let tols = Tolerances::for_dim(2);
        let a = ComplexMatrix::from_real_rows(&[&[0.0, 0.5], &[0.0, 0.0]]);
        let b = ComplexMatrix::from_real_rows(&[&[0.0, 0.0], &[0.5, 0.0]]);
        assert!(matches!(validate_pair(&a, &b, &tols), Err(Error::NotCommuting { .. })));
        let big = ComplexMatrix::from_real_diag(&[1.5, 0.0]);
        assert!(matches!(
            validate_pair(&big, &ComplexMatrix::zeros(2, 2), &tols),
            Err(Error::NotContraction { .. })
        ));
        assert!(matches!(
            validate_pair(&big, &ComplexMatrix::zeros(3, 3), &tols),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn defect_examples() {
        let tols = Tolerances::default();
        let d = defect(&ComplexMatrix::zeros(2, 2), &tols).unwrap();
        assert_eq!(d.rank, 2);
        assert!((&d.d - &ComplexMatrix::identity(2)).max_abs() < 1e-15);

        let j = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
        let d = defect(&j, &tols).unwrap();
        assert_eq!(d.rank, 1);
        assert!((&d.d - &ComplexMatrix::from_real_diag(&[0.0, 1.0])).max_abs() < 1e-15);
        assert!(crate::linalg::orthonormality_defect(&d.basis) < 1e-14);

        let d = defect(&ComplexMatrix::from_real_diag(&[0.5]), &tols).unwrap();
        assert_eq!(d.rank, 1);
        assert!((d.d[(0, 0)].re - 3f64.sqrt() / 2.0).abs() < 1e-15);
        assert_eq!(d.d[(0, 0)].im, 0.0);
    }

    #[test]
    fn defect_rejects_expansion() {
        let err = defect(&ComplexMatrix::from_real_diag(&[1.2]), &Tolerances::default()).unwrap_err();
        assert!(matches!(err, Error::NotContraction { .. }));
    }

    #[test]
    fn truncation_examples() {
        let mut tols = Tolerances {
            trunc: 1e-12,
            ..Tolerances::default()
        };
        let j = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
        assert_eq!(truncation_degree(&j, &tols).unwrap(), 2);
        assert_eq!(truncation_degree(&ComplexMatrix::zeros(2, 2), &tols).unwrap(), 1);
        tols.trunc = 1e-9;
        // direct power oracle: smallest N with 0.5^N < 1e-9
        let oracle = (1..).find(|&n| 0.5f64.powi(n) < 1e-9).unwrap() as usize;
        assert_eq!(oracle, 30);
        assert_eq!(truncation_degree(&ComplexMatrix::from_real_diag(&[0.5]), &tols).unwrap(), oracle);
    }

    #[test]
    fn truncation_requires_purity_and_caps() {
        let tols = Tolerances::default();
        let err = truncation_degree(&ComplexMatrix::identity(2), &tols).unwrap_err();
        assert!(matches!(err, Error::NotPure { .. }));
        let slow = ComplexMatrix::from_real_diag(&[0.9999]);
        assert_eq!(truncation_degree(&slow, &tols).unwrap(), TRUNCATION_CAP);
    }

    #[test]
    fn truncation_matches_linear_scan() {
        let tols = Tolerances {
            trunc: 1e-8,
            ..Tolerances::default()
        };
        let t = ComplexMatrix::from_fn(3, 3, |i, j| {
            if j >= i {
                C64::new(0.3 + 0.1 * (j - i) as f64, 0.05 * i as f64)
            } else {
                ZERO
            }
        });
        let t = t.scale_real(0.95 / crate::linalg::norm(&t));
        let mut p = ComplexMatrix::identity(3);
        let mut scan = 0;
        for k in 1..=TRUNCATION_CAP {
            p = p.matmul(&t);
            if crate::linalg::norm(&p) < tols.trunc {
                scan = k;
                break;
            }
        }
        assert_eq!(truncation_degree(&t, &tols).unwrap(), scan);
    }
}
