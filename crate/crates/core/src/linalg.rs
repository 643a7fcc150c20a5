//! Decompositions and norms on [`ComplexMatrix`].
//!
//! Every routine here is deterministic: singular values come out descending,
//! Hermitian eigenvalues ascending, general eigenvalues by descending modulus
//! (ties by ascending argument), and each singular/eigen vector is rotated so
//! that its first entry of largest modulus is real and positive.

use faer::linalg::solvers::Solve;
use faer::Side;

use crate::error::{Error, Result};
use crate::matrix::{inner, vec_norm, ComplexMatrix, C64, ZERO};

/// Relative slack used to decide "largest modulus" ties.
const TIE_REL: f64 = 1e-12;

/// Thin singular value decomposition `M = U diag(s) V*`.
#[derive(Clone, Debug)]
pub struct Svd {
    pub u: ComplexMatrix,
    pub s: Vec<f64>,
    pub v: ComplexMatrix,
}

#[derive(Clone, Debug)]
pub struct HermEig {
    /// Ascending.
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors as columns, matching `values`.
    pub vectors: ComplexMatrix,
}

#[derive(Clone, Debug)]
pub struct Eig {
    pub values: Vec<C64>,
    /// Unit-norm eigenvectors as columns, matching `values`.
    pub vectors: ComplexMatrix,
}

fn pivot_index(v: &[C64]) -> Option<usize> {
    let max = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if max == 0.0 {
        return None;
    }
    v.iter().position(|z| z.norm() >= max * (1.0 - TIE_REL))
}

/// Unit phase that makes the first largest-modulus entry of `v` real positive.
pub fn canonical_phase(v: &[C64]) -> C64 {
    match pivot_index(v) {
        Some(p) => v[p].conj() / v[p].norm(),
        None => C64::new(1.0, 0.0),
    }
}

fn normalize_column_phases(m: &mut ComplexMatrix) -> Vec<C64> {
    let mut phases = Vec::with_capacity(m.cols());
    for j in 0..m.cols() {
        let mut col = m.col(j);
        let ph = canonical_phase(&col);
        for z in col.iter_mut() {
            *z *= ph;
        }
        m.set_col(j, &col);
        phases.push(ph);
    }
    phases
}

fn check_input(m: &ComplexMatrix) -> Result<()> {
    m.check_finite()
}

fn check_square(m: &ComplexMatrix, what: &str) -> Result<()> {
    if m.is_square() {
        Ok(())
    } else {
        Err(Error::Dimension(format!(
            "{what} needs a square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )))
    }
}

pub fn singular_values(m: &ComplexMatrix) -> Result<Vec<f64>> {
    check_input(m)?;
    if m.is_empty() {
        return Ok(vec![0.0; m.rows().min(m.cols())]);
    }
    let mut s = m
        .to_faer()
        .singular_values()
        .map_err(|e| Error::Numeric(format!("svd did not converge: {e:?}")))?;
    s.sort_by(|a, b| b.total_cmp(a));
    Ok(s)
}

/// Largest singular value; 0 for empty or zero matrices.
pub fn operator_norm(m: &ComplexMatrix) -> Result<f64> {
    Ok(singular_values(m)?.first().copied().unwrap_or(0.0))
}

/// Operator norm of a Hermitian matrix, via its eigenvalues.
pub fn hermitian_norm(m: &ComplexMatrix) -> Result<f64> {
    check_input(m)?;
    check_square(m, "hermitian_norm")?;
    if m.rows() == 0 {
        return Ok(0.0);
    }
    let ev = m
        .hermitian_part()
        .to_faer()
        .self_adjoint_eigenvalues(Side::Lower)
        .map_err(|e| Error::Numeric(format!("hermitian eigensolver failed: {e:?}")))?;
    Ok(ev.iter().fold(0.0, |acc: f64, x| acc.max(x.abs())))
}

/// [`operator_norm`] for matrices already known to be finite.
pub fn norm(m: &ComplexMatrix) -> f64 {
    operator_norm(m).expect("operator norm of a finite matrix")
}

pub fn svd(m: &ComplexMatrix) -> Result<Svd> {
    check_input(m)?;
    let k = m.rows().min(m.cols());
    if k == 0 {
        return Ok(Svd {
            u: ComplexMatrix::zeros(m.rows(), 0),
            s: Vec::new(),
            v: ComplexMatrix::zeros(m.cols(), 0),
        });
    }
    let dec = m
        .to_faer()
        .thin_svd()
        .map_err(|e| Error::Numeric(format!("svd did not converge: {e:?}")))?;
    let mut u = ComplexMatrix::from_faer(dec.U());
    let mut v = ComplexMatrix::from_faer(dec.V());
    let s_diag = dec.S().column_vector();
    let mut s: Vec<f64> = (0..k).map(|i| s_diag[i].re).collect();

    // faer already sorts; enforce it anyway so the contract does not depend on it.
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| s[b].total_cmp(&s[a]).then(a.cmp(&b)));
    if order.iter().enumerate().any(|(i, &o)| i != o) {
        u = u.select_cols(&order);
        v = v.select_cols(&order);
        s = order.iter().map(|&i| s[i]).collect();
    }

    let phases = normalize_column_phases(&mut u);
    for (j, ph) in phases.iter().enumerate() {
        let col: Vec<C64> = v.col(j).iter().map(|z| z * ph).collect();
        v.set_col(j, &col);
    }
    Ok(Svd { u, s, v })
}

/// Eigendecomposition of the Hermitian part of `m`.
pub fn herm_eig(m: &ComplexMatrix) -> Result<HermEig> {
    check_input(m)?;
    check_square(m, "herm_eig")?;
    if m.rows() == 0 {
        return Ok(HermEig {
            values: Vec::new(),
            vectors: ComplexMatrix::zeros(0, 0),
        });
    }
    let h = m.hermitian_part();
    let dec = h
        .to_faer()
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::Numeric(format!("hermitian eigensolver failed: {e:?}")))?;
    let n = m.rows();
    let s = dec.S().column_vector();
    let mut values: Vec<f64> = (0..n).map(|i| s[i].re).collect();
    let mut vectors = ComplexMatrix::from_faer(dec.U());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
    if order.iter().enumerate().any(|(i, &o)| i != o) {
        vectors = vectors.select_cols(&order);
        values = order.iter().map(|&i| values[i]).collect();
    }
    normalize_column_phases(&mut vectors);
    Ok(HermEig { values, vectors })
}

fn eig_order(values: &[C64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| {
        values[b]
            .norm()
            .total_cmp(&values[a].norm())
            .then(values[a].arg().total_cmp(&values[b].arg()))
            .then(a.cmp(&b))
    });
    order
}

/// General eigendecomposition (eigenvectors unit norm, canonical phase).
pub fn eig(m: &ComplexMatrix) -> Result<Eig> {
    check_input(m)?;
    check_square(m, "eig")?;
    let n = m.rows();
    if n == 0 {
        return Ok(Eig {
            values: Vec::new(),
            vectors: ComplexMatrix::zeros(0, 0),
        });
    }
    let dec = m
        .to_faer()
        .eigen()
        .map_err(|e| Error::Numeric(format!("eigensolver did not converge: {e:?}")))?;
    let s = dec.S().column_vector();
    let raw_values: Vec<C64> = (0..n).map(|i| s[i]).collect();
    let raw_vectors = ComplexMatrix::from_faer(dec.U());
    let order = eig_order(&raw_values);
    let values: Vec<C64> = order.iter().map(|&i| raw_values[i]).collect();
    let mut vectors = raw_vectors.select_cols(&order);
    for j in 0..n {
        let mut col = vectors.col(j);
        let nrm = vec_norm(&col);
        if nrm > 0.0 {
            for z in col.iter_mut() {
                *z /= nrm;
            }
        }
        vectors.set_col(j, &col);
    }
    normalize_column_phases(&mut vectors);
    if !vectors.is_finite() || values.iter().any(|z| !z.is_finite()) {
        return Err(Error::Numeric("eigensolver produced non-finite output".into()));
    }
    Ok(Eig { values, vectors })
}

/// Eigenvalues only, in the same order as [`eig`].
pub fn eigenvalues(m: &ComplexMatrix) -> Result<Vec<C64>> {
    check_input(m)?;
    check_square(m, "eigenvalues")?;
    if m.rows() == 0 {
        return Ok(Vec::new());
    }
    let raw = m
        .to_faer()
        .eigenvalues()
        .map_err(|e| Error::Numeric(format!("eigensolver did not converge: {e:?}")))?;
    if raw.iter().any(|z| !z.is_finite()) {
        return Err(Error::Numeric("eigensolver produced non-finite output".into()));
    }
    Ok(eig_order(&raw).into_iter().map(|i| raw[i]).collect())
}

pub fn spectral_radius(m: &ComplexMatrix) -> Result<f64> {
    Ok(eigenvalues(m)?.iter().map(|z| z.norm()).fold(0.0, f64::max))
}

/// Positive semidefinite square root.
///
/// `m` must be Hermitian within `tol` (entrywise, relative to `max(1, |m|)`)
/// with no eigenvalue below `-tol`; eigenvalues in `[-tol, 0)` are clamped.
pub fn psd_sqrt(m: &ComplexMatrix, tol: f64) -> Result<ComplexMatrix> {
    check_input(m)?;
    check_square(m, "psd_sqrt")?;
    let scale = m.max_abs().max(1.0);
    let skew = (m - &m.adjoint()).max_abs();
    if skew > tol * scale {
        return Err(Error::Input(format!(
            "psd_sqrt: matrix is not Hermitian (|M - M*| = {skew:e})"
        )));
    }
    let dec = herm_eig(m)?;
    if let Some(&min) = dec.values.first() {
        if min < -tol {
            return Err(Error::NotPsd {
                min_eigenvalue: min,
                tol,
            });
        }
    }
    let roots: Vec<f64> = dec.values.iter().map(|&l| l.max(0.0).sqrt()).collect();
    let v = &dec.vectors;
    let vs = ComplexMatrix::from_fn(v.rows(), v.cols(), |i, j| v[(i, j)] * roots[j]);
    Ok(vs.matmul(&v.adjoint()).hermitian_part())
}

/// Number of singular values above `rel_tol * max(1, sigma_max)`.
pub fn numeric_rank(m: &ComplexMatrix, rel_tol: f64) -> Result<usize> {
    let s = singular_values(m)?;
    let cut = rel_tol * s.first().copied().unwrap_or(0.0).max(1.0);
    Ok(s.iter().filter(|&&x| x > cut).count())
}

/// Solves the square system `a x = b` by LU with partial pivoting.
pub fn solve(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    check_square(a, "solve")?;
    if a.rows() != b.rows() {
        return Err(Error::Dimension("solve: right-hand side rows".into()));
    }
    if a.rows() == 0 {
        return Ok(ComplexMatrix::zeros(0, b.cols()));
    }
    let lu = a.to_faer().partial_piv_lu();
    let x = lu.solve(b.to_faer());
    let x = ComplexMatrix::from_faer(x.as_ref());
    if !x.is_finite() {
        return Err(Error::Numeric("solve: singular system".into()));
    }
    Ok(x)
}

/// 2-norm condition number; infinite for singular matrices.
pub fn condition_number(a: &ComplexMatrix) -> Result<f64> {
    let s = singular_values(a)?;
    match (s.first(), s.last()) {
        (Some(&hi), Some(&lo)) if lo > 0.0 => Ok(hi / lo),
        (Some(_), Some(_)) => Ok(f64::INFINITY),
        _ => Ok(1.0),
    }
}

/// Minimum-norm least-squares solution of `a x = b`; singular values at or
/// below `rel_tol * sigma_max` are treated as zero.
pub fn lstsq(a: &ComplexMatrix, b: &ComplexMatrix, rel_tol: f64) -> Result<ComplexMatrix> {
    if a.rows() != b.rows() {
        return Err(Error::Dimension("lstsq: right-hand side rows".into()));
    }
    b.check_finite()?;
    let dec = svd(a)?;
    let cut = rel_tol * dec.s.first().copied().unwrap_or(0.0);
    let keep: Vec<usize> = (0..dec.s.len()).filter(|&i| dec.s[i] > cut).collect();
    let u = dec.u.select_cols(&keep);
    let v = dec.v.select_cols(&keep);
    let mut utb = u.adjoint().matmul(b);
    for (r, &i) in keep.iter().enumerate() {
        for c in 0..utb.cols() {
            utb[(r, c)] /= dec.s[i];
        }
    }
    Ok(v.matmul(&utb))
}

/// Orthonormal basis of the column space (left singular vectors above the
/// rank cut).
pub fn range_basis(m: &ComplexMatrix, rel_tol: f64) -> Result<ComplexMatrix> {
    let dec = svd(m)?;
    let cut = rel_tol * dec.s.first().copied().unwrap_or(0.0).max(1.0);
    let keep: Vec<usize> = (0..dec.s.len()).filter(|&i| dec.s[i] > cut).collect();
    Ok(dec.u.select_cols(&keep))
}

/// Orthonormal basis of the orthogonal complement of the span of `q`'s
/// (orthonormal) columns.
///
/// The basis is canonical: pivoted Gram-Schmidt over the columns of the
/// projector `I - q q*`, picking the largest remaining residual first (lowest
/// index on ties) and rotating each vector so its pivot entry is real
/// positive. It therefore depends only on the subspace, and permuting the
/// coordinates permutes the basis along with them.
pub fn orthonormal_complement(q: &ComplexMatrix) -> ComplexMatrix {
    let n = q.rows();
    let k = n.saturating_sub(q.cols());
    let mut picked: Vec<Vec<C64>> = Vec::with_capacity(k);
    let q_cols: Vec<Vec<C64>> = (0..q.cols()).map(|j| q.col(j)).collect();

    let project_out = |v: &mut Vec<C64>, basis: &[Vec<C64>]| {
        for b in basis {
            let c = inner(b, v);
            for (x, y) in v.iter_mut().zip(b) {
                *x -= c * y;
            }
        }
    };

    let mut residual: Vec<Vec<C64>> = (0..n)
        .map(|j| {
            let mut e = vec![ZERO; n];
            e[j] = C64::new(1.0, 0.0);
            project_out(&mut e, &q_cols);
            project_out(&mut e, &q_cols);
            e
        })
        .collect();
    let mut used = vec![false; n];

    for _ in 0..k {
        let norms: Vec<f64> = residual.iter().map(|r| vec_norm(r)).collect();
        let max = (0..n)
            .filter(|&j| !used[j])
            .map(|j| norms[j])
            .fold(0.0, f64::max);
        let j = (0..n)
            .find(|&j| !used[j] && norms[j] >= max * (1.0 - TIE_REL))
            .expect("complement pivot");
        used[j] = true;
        let mut v = residual[j].clone();
        // second pass against everything picked so far
        project_out(&mut v, &q_cols);
        project_out(&mut v, &picked);
        let nrm = vec_norm(&v);
        let ph = if v[j].norm() > 0.0 {
            v[j].conj() / v[j].norm()
        } else {
            canonical_phase(&v)
        };
        for z in v.iter_mut() {
            *z *= ph / nrm;
        }
        for (i, r) in residual.iter_mut().enumerate() {
            if !used[i] {
                let c = inner(&v, r);
                for (x, y) in r.iter_mut().zip(&v) {
                    *x -= c * y;
                }
            }
        }
        picked.push(v);
    }

    let mut out = ComplexMatrix::zeros(n, k);
    for (j, v) in picked.iter().enumerate() {
        out.set_col(j, v);
    }
    out
}

/// Canonical orthonormal basis of the span of `q`'s orthonormal columns,
/// in the sense of [`orthonormal_complement`].
pub fn canonical_basis(q: &ComplexMatrix) -> ComplexMatrix {
    orthonormal_complement(&orthonormal_complement(q))
}

/// `|Q*Q - I|`, the departure of `q`'s columns from orthonormality.
pub fn orthonormality_defect(q: &ComplexMatrix) -> f64 {
    let g = q.adjoint().matmul(q);
    norm(&(&g - &ComplexMatrix::identity(q.cols())))
}

/// `max(|U*U - I|, |UU* - I|)`.
pub fn unitarity_defect(u: &ComplexMatrix) -> f64 {
    let n = u.rows();
    let a = u.adjoint().matmul(u);
    let b = u.matmul(&u.adjoint());
    norm(&(&a - &ComplexMatrix::identity(n))).max(norm(&(&b - &ComplexMatrix::identity(n))))
}
