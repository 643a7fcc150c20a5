//! The unitary colligation `U = [[A, B], [C, D]]` on `D_T1 ⊕ D_T2`.
//!
//! `U` is forced on the subspace `{(D_T1 h, D_T2 T1* h)}`, where it must send
//! `(D_T1 h, D_T2 T1* h)` to `(D_T1 T2* h, D_T2 h)`. Off that subspace any
//! unitary completion works; the one built here is fixed by a deterministic
//! convention (see [`build_colligation`]) so every downstream object is
//! reproducible.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, orthonormal_complement, svd};
use crate::matrix::{vec_norm, vec_sub, ComplexMatrix, C64};
use crate::pair::{ContractionPair, DefectData};

#[derive(Clone, Debug)]
pub struct Colligation {
    pub a: ComplexMatrix,
    pub b: ComplexMatrix,
    pub c: ComplexMatrix,
    pub d: ComplexMatrix,
    /// Defect data of `T1`; its basis fixes the coordinates of the first summand.
    pub defect1: DefectData,
    /// Defect data of `T2`; its basis fixes the coordinates of the second summand.
    pub defect2: DefectData,
}

/// JSON view: blocks plus the two coordinate bases.
#[derive(Serialize)]
pub struct ColligationRecord<'a> {
    pub n: usize,
    pub r1: usize,
    pub r2: usize,
    #[serde(rename = "A")]
    pub a: &'a ComplexMatrix,
    #[serde(rename = "B")]
    pub b: &'a ComplexMatrix,
    #[serde(rename = "C")]
    pub c: &'a ComplexMatrix,
    #[serde(rename = "D")]
    pub d: &'a ComplexMatrix,
    #[serde(rename = "E1")]
    pub basis1: &'a ComplexMatrix,
    #[serde(rename = "E2")]
    pub basis2: &'a ComplexMatrix,
    pub unitarity_defect: f64,
}

impl Colligation {
    pub fn r1(&self) -> usize {
        self.a.rows()
    }

    pub fn r2(&self) -> usize {
        self.d.rows()
    }

    pub fn unitary(&self) -> ComplexMatrix {
        ComplexMatrix::block2x2(&self.a, &self.b, &self.c, &self.d)
    }

    pub fn unitarity_defect(&self) -> f64 {
        linalg::unitarity_defect(&self.unitary())
    }

    pub fn record(&self) -> ColligationRecord<'_> {
        ColligationRecord {
            n: self.defect1.d.rows(),
            r1: self.r1(),
            r2: self.r2(),
            a: &self.a,
            b: &self.b,
            c: &self.c,
            d: &self.d,
            basis1: &self.defect1.basis,
            basis2: &self.defect2.basis,
            unitarity_defect: self.unitarity_defect(),
        }
    }

    /// `|U (D_T1 h, D_T2 T1* h) - (D_T1 T2* h, D_T2 h)|` in defect coordinates.
    pub fn action_residual(&self, pair: &ContractionPair, h: &[C64]) -> f64 {
        let (dom, ran) = forced_maps(pair, &self.defect1, &self.defect2);
        let lhs = self.unitary().matvec(&dom.matvec(h));
        vec_norm(&vec_sub(&lhs, &ran.matvec(h)))
    }

    /// The colligation of the swapped pair `(T2, T1)` obtained by exchanging
    /// the two summands of `U*`: `[[D*, B*], [C*, A*]]`.
    pub fn flipped_adjoint(&self) -> Colligation {
        Colligation {
            a: self.d.adjoint(),
            b: self.b.adjoint(),
            c: self.c.adjoint(),
            d: self.a.adjoint(),
            defect1: self.defect2.clone(),
            defect2: self.defect1.clone(),
        }
    }
}

/// `([E1* D_T1; E2* D_T2 T1*], [E1* D_T1 T2*; E2* D_T2])`, both `(r1 + r2) x n`.
fn forced_maps(
    pair: &ContractionPair,
    d1: &DefectData,
    d2: &DefectData,
) -> (ComplexMatrix, ComplexMatrix) {
    let k1 = d1.coordinates();
    let k2 = d2.coordinates();
    let dom = ComplexMatrix::vstack(&[&k1, &k2.matmul(&pair.t1().adjoint())]);
    let ran = ComplexMatrix::vstack(&[&k1.matmul(&pair.t2().adjoint()), &k2]);
    (dom, ran)
}

/// Builds the colligation of a validated pair.
///
/// With `M_dom = [E1* D_T1; E2* D_T2 T1*] = Q S V*` (thin SVD, rank cut from
/// the pair's rank tolerance), the forced part is `Y Q*` where `Y` is the
/// polar factor of `M_ran V S^{-1}`. The completion sends the canonical
/// complement basis of `ran Q` to the canonical complement basis of `ran Y`,
/// pairing vectors in order (see [`linalg::orthonormal_complement`]).
pub fn build_colligation(
    pair: &ContractionPair,
    d1: &DefectData,
    d2: &DefectData,
) -> Result<Colligation> {
    let r1 = d1.rank;
    let r2 = d2.rank;
    let r = r1 + r2;
    let tols = pair.tolerances();
    let (m_dom, m_ran) = forced_maps(pair, d1, d2);

    let dec = svd(&m_dom)?;
    let cut = tols.rank * dec.s.first().copied().unwrap_or(0.0).max(1.0);
    let keep: Vec<usize> = (0..dec.s.len()).filter(|&i| dec.s[i] > cut).collect();
    let q = dec.u.select_cols(&keep);
    let v = dec.v.select_cols(&keep);
    let mut y = m_ran.matmul(&v);
    for (j, &i) in keep.iter().enumerate() {
        let col: Vec<C64> = y.col(j).iter().map(|z| z / dec.s[i]).collect();
        y.set_col(j, &col);
    }
    if !keep.is_empty() {
        let p = svd(&y)?;
        y = p.u.matmul(&p.v.adjoint());
    }

    let forced = y.matmul(&q.adjoint());
    let action = linalg::norm(&(&forced.matmul(&m_dom) - &m_ran));
    let action_tol = 1e-8_f64.max(100.0 * tols.commute);
    if action > action_tol {
        return Err(Error::Numeric(format!(
            "forced isometry residual {action:e} exceeds {action_tol:e}; \
             the pair is not a commuting contractive pair within tolerance"
        )));
    }

    let q_perp = orthonormal_complement(&q);
    let y_perp = orthonormal_complement(&y);
    assert_eq!(
        q_perp.cols(),
        y_perp.cols(),
        "complement dimensions must agree"
    );
    let u = &forced + &y_perp.matmul(&q_perp.adjoint());
    debug_assert_eq!(u.shape(), (r, r));

    Ok(Colligation {
        a: u.submatrix(0, 0, r1, r1),
        b: u.submatrix(0, r1, r1, r2),
        c: u.submatrix(r1, 0, r2, r1),
        d: u.submatrix(r1, r1, r2, r2),
        defect1: d1.clone(),
        defect2: d2.clone(),
    })
}

/// Convenience: defects plus colligation in one call.
pub fn colligation_for(pair: &ContractionPair) -> Result<Colligation> {
    let (d1, d2) = pair.defects()?;
    build_colligation(pair, &d1, &d2)
}

/// Partial sums of `D_T1 T2* = A D_T1 + Σ_n B D^n C D_T1 T1^{*(n+1)}`.
#[derive(Clone, Debug, Serialize)]
pub struct SeriesIdentity {
    /// `res_m` for `m = 0..=m_max`.
    pub residuals: Vec<f64>,
    /// `|T1^{*(m+2)} h|`, the tail bound for `res_m`.
    pub bounds: Vec<f64>,
}

pub fn verify_series_identity(
    pair: &ContractionPair,
    coll: &Colligation,
    h: &[C64],
    m_max: usize,
) -> Result<SeriesIdentity> {
    pair.require_t1_pure()?;
    if h.len() != pair.dim() {
        return Err(Error::Dimension("vector length differs from pair dimension".into()));
    }
    let k1 = coll.defect1.coordinates();
    let t1s = pair.t1().adjoint();
    let target = k1.matmul(&pair.t2().adjoint()).matvec(h);
    let mut partial = vec_sub(&target, &coll.a.matvec(&k1.matvec(h)));

    let mut x = t1s.matvec(h);
    let mut dpow = ComplexMatrix::identity(coll.r2());
    let mut residuals = Vec::with_capacity(m_max + 1);
    let mut bounds = Vec::with_capacity(m_max + 1);
    for _ in 0..=m_max {
        // x = T1^{*(n+1)} h
        let term = coll
            .b
            .matvec(&dpow.matvec(&coll.c.matvec(&k1.matvec(&x))));
        partial = vec_sub(&partial, &term);
        residuals.push(vec_norm(&partial));
        x = t1s.matvec(&x);
        bounds.push(vec_norm(&x));
        dpow = dpow.matmul(&coll.d);
    }
    Ok(SeriesIdentity { residuals, bounds })
}
