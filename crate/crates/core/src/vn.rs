//! Bivariate polynomials and the von Neumann chain
//! `|p(T1, T2)| <= sup_V |p| <= sup_{T²} |p|`.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::linalg;
use crate::matrix::{cis, ComplexMatrix, C64, ZERO};
use crate::pair::ContractionPair;
use crate::parallel::{map_indexed, max_of};
use crate::variety::Variety;

/// `Σ c[j][k] z1^j z2^k`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PolyRepr", into = "PolyRepr")]
pub struct BivariatePolynomial {
    coeffs: Vec<Vec<C64>>,
}

#[derive(Serialize, Deserialize)]
struct PolyRepr {
    coeffs: Vec<Vec<[f64; 2]>>,
}

impl TryFrom<PolyRepr> for BivariatePolynomial {
    type Error = Error;

    fn try_from(r: PolyRepr) -> Result<Self> {
        let coeffs = r
            .coeffs
            .into_iter()
            .map(|row| row.into_iter().map(|[re, im]| C64::new(re, im)).collect())
            .collect();
        Self::new(coeffs)
    }
}

impl From<BivariatePolynomial> for PolyRepr {
    fn from(p: BivariatePolynomial) -> Self {
        PolyRepr {
            coeffs: p
                .coeffs
                .iter()
                .map(|row| row.iter().map(|z| [z.re, z.im]).collect())
                .collect(),
        }
    }
}

impl BivariatePolynomial {
    /// Rows may be ragged; they are padded with zeros, then trailing zero
    /// rows and columns are trimmed.
    pub fn new(coeffs: Vec<Vec<C64>>) -> Result<Self> {
        if coeffs.iter().flatten().any(|z| !z.is_finite()) {
            return Err(Error::Input("polynomial coefficients must be finite".into()));
        }
        let width = coeffs.iter().map(Vec::len).max().unwrap_or(0);
        let mut grid: Vec<Vec<C64>> = coeffs
            .into_iter()
            .map(|mut row| {
                row.resize(width, ZERO);
                row
            })
            .collect();
        while grid.last().is_some_and(|r| r.iter().all(|z| *z == ZERO)) {
            grid.pop();
        }
        let keep = grid
            .iter()
            .map(|r| r.iter().rposition(|z| *z != ZERO).map_or(0, |k| k + 1))
            .max()
            .unwrap_or(0);
        for row in &mut grid {
            row.truncate(keep);
        }
        Ok(Self { coeffs: grid })
    }

    /// From real coefficients.
    pub fn from_real(rows: &[&[f64]]) -> Self {
        Self::new(
            rows.iter()
                .map(|r| r.iter().map(|&x| C64::new(x, 0.0)).collect())
                .collect(),
        )
        .expect("finite coefficients")
    }

    pub fn coeffs(&self) -> &[Vec<C64>] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn deg1(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn deg2(&self) -> usize {
        self.coeffs.first().map_or(0, |r| r.len().saturating_sub(1))
    }

    pub fn eval(&self, z1: C64, z2: C64) -> C64 {
        let mut acc = ZERO;
        for row in self.coeffs.iter().rev() {
            let inner = row.iter().rev().fold(ZERO, |a, c| a * z2 + c);
            acc = acc * z1 + inner;
        }
        acc
    }

    /// `Σ |c_jk| (j + k)`, a Lipschitz constant on the closed bidisc with
    /// respect to `max(|dz1|, |dz2|)`.
    pub fn lipschitz(&self) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .flat_map(|(j, row)| row.iter().enumerate().map(move |(k, c)| c.norm() * (j + k) as f64))
            .sum()
    }
}

/// `p(T1, T2)`: Horner in `T2` for each row, then Horner in `T1`.
pub fn eval_poly_pair(p: &BivariatePolynomial, t1: &ComplexMatrix, t2: &ComplexMatrix) -> ComplexMatrix {
    let n = t1.rows();
    let eye = ComplexMatrix::identity(n);
    let mut acc = ComplexMatrix::zeros(n, n);
    for row in p.coeffs.iter().rev() {
        let mut inner = ComplexMatrix::zeros(n, n);
        for c in row.iter().rev() {
            inner = &inner.matmul(t2) + &eye.scale(*c);
        }
        acc = &acc.matmul(t1) + &inner;
    }
    acc
}

#[derive(Clone, Debug, Serialize)]
pub struct SupOnVariety {
    pub value: f64,
    pub n_theta: usize,
    pub skipped: usize,
}

/// `max |p|` over the sampled boundary of `V`: `(e^{iθ}, σ(Ψ₁(e^{iθ})))` and
/// `(e^{iθ}, σ(W))`.
pub fn sup_on_variety(p: &BivariatePolynomial, variety: &Variety, n_theta: usize) -> Result<SupOnVariety> {
    let sample = variety.boundary_samples(n_theta)?;
    if sample.skipped.len() == n_theta {
        return Err(Error::Numeric("every boundary sample hit a pole".into()));
    }
    let value = max_of(sample.points.iter().map(|pt| p.eval(pt.z1, pt.z2).norm())).max(0.0);
    Ok(SupOnVariety {
        value,
        n_theta,
        skipped: sample.skipped.len(),
    })
}

/// `max |p|` on an `n_grid x n_grid` grid of the torus.
pub fn sup_on_bidisc(p: &BivariatePolynomial, n_grid: usize) -> Result<f64> {
    let need = (4 * (p.deg1() + p.deg2())).max(1);
    if n_grid < need {
        return Err(Error::Input(format!(
            "torus grid {n_grid} too coarse for degree ({}, {}); need at least {need}",
            p.deg1(),
            p.deg2()
        )));
    }
    let step = std::f64::consts::TAU / n_grid as f64;
    let z2s: Vec<C64> = (0..n_grid).map(|k| cis(step * k as f64)).collect();
    let rows = map_indexed(n_grid, |j| {
        let z1 = cis(step * j as f64);
        max_of(z2s.iter().map(|&z2| p.eval(z1, z2).norm()))
    });
    Ok(max_of(rows).max(0.0))
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct VnOptions {
    pub n_theta: usize,
    pub torus_grid: usize,
}

impl Default for VnOptions {
    fn default() -> Self {
        Self {
            n_theta: 720,
            torus_grid: 512,
        }
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct Grids {
    pub n_theta: usize,
    pub torus: usize,
    pub skipped_theta: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct VnReport {
    pub lhs: f64,
    pub sup_variety: f64,
    pub sup_bidisc: f64,
    pub slack: f64,
    /// `(sup_variety - lhs, sup_bidisc - sup_variety)`.
    pub margins: [f64; 2],
    pub grids: Grids,
    pub pair_digest: String,
}

impl VnReport {
    pub fn chain_holds(&self) -> bool {
        self.margins[0] >= -self.slack && self.margins[1] >= -self.slack
    }
}

/// `L (2π / n)` for the coarser of the two grids, plus `1e-9`.
pub fn sampling_slack(p: &BivariatePolynomial, opts: &VnOptions) -> f64 {
    let tau = std::f64::consts::TAU;
    let h = (tau / opts.n_theta.max(1) as f64).max(tau / (2 * opts.torus_grid.max(1)) as f64);
    p.lipschitz() * h + 1e-9
}

/// SHA-256 of the dimension and the little-endian bytes of both matrices.
pub fn pair_digest(t1: &ComplexMatrix, t2: &ComplexMatrix) -> String {
    let mut h = Sha256::new();
    h.update((t1.rows() as u64).to_le_bytes());
    for m in [t1, t2] {
        for z in m.data() {
            h.update(z.re.to_le_bytes());
            h.update(z.im.to_le_bytes());
        }
    }
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

/// Computes the three norms and fails with [`Error::ChainViolation`] if the
/// chain breaks by more than the sampling slack.
pub fn vn_report(pair: &ContractionPair, p: &BivariatePolynomial, opts: &VnOptions) -> Result<VnReport> {
    let variety = Variety::for_pair(pair)?;
    vn_report_with(pair, &variety, p, opts)
}

pub fn vn_report_with(
    pair: &ContractionPair,
    variety: &Variety,
    p: &BivariatePolynomial,
    opts: &VnOptions,
) -> Result<VnReport> {
    pair.require_t1_pure()?;
    let lhs = linalg::operator_norm(&eval_poly_pair(p, pair.t1(), pair.t2()))?;
    let sv = sup_on_variety(p, variety, opts.n_theta)?;
    let sup_bidisc = sup_on_bidisc(p, opts.torus_grid)?;
    let slack = sampling_slack(p, opts);
    let report = VnReport {
        lhs,
        sup_variety: sv.value,
        sup_bidisc,
        slack,
        margins: [sv.value - lhs, sup_bidisc - sv.value],
        grids: Grids {
            n_theta: opts.n_theta,
            torus: opts.torus_grid,
            skipped_theta: sv.skipped,
        },
        pair_digest: pair_digest(pair.t1(), pair.t2()),
    };
    if !report.chain_holds() {
        return Err(Error::ChainViolation(format!(
            "lhs {}, sup over V {}, sup over torus {}, slack {:e}",
            report.lhs, report.sup_variety, report.sup_bidisc, report.slack
        )));
    }
    Ok(report)
}

/// `V0` points evaluated at interior `z1` on a radial grid; never larger than
/// the boundary value by the maximum principle.
pub fn sup_on_v0_interior(p: &BivariatePolynomial, variety: &Variety, n_theta: usize, radii: &[f64]) -> f64 {
    let step = std::f64::consts::TAU / n_theta.max(1) as f64;
    let mut best: f64 = 0.0;
    for &r in radii {
        for j in 0..n_theta {
            let z1 = cis(step * j as f64) * r;
            for &l in &variety.split.lambda {
                best = best.max(p.eval(z1, l).norm());
            }
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pair::Tolerances;

    fn z1_minus_z2() -> BivariatePolynomial {
        BivariatePolynomial::from_real(&[&[0.0, -1.0], &[1.0]])
    }

    fn z1_plus_z2() -> BivariatePolynomial {
        BivariatePolynomial::from_real(&[&[0.0, 1.0], &[1.0]])
    }

    #[test]
    fn trimming_and_degrees() {
        let p = BivariatePolynomial::from_real(&[&[1.0, 0.0, 0.0], &[0.0, 2.0], &[0.0]]);
        assert_eq!(p.coeffs().len(), 2);
        assert_eq!((p.deg1(), p.deg2()), (1, 1));
        assert!(BivariatePolynomial::from_real(&[&[0.0]]).is_zero());
        assert_eq!(z1_minus_z2().lipschitz(), 2.0);
    }

    #[test]
    fn pair_evaluation() {
        let j = ComplexMatrix::from_real_rows(&[&[0.0, 0.5], &[0.0, 0.0]]);
        let one = BivariatePolynomial::from_real(&[&[1.0]]);
        assert_eq!(eval_poly_pair(&one, &j, &j), ComplexMatrix::identity(2));
        assert!(eval_poly_pair(&z1_minus_z2(), &j, &j).max_abs() == 0.0);
        let z1z2 = BivariatePolynomial::from_real(&[&[0.0], &[0.0, 1.0]]);
        assert!(eval_poly_pair(&z1z2, &j, &j).max_abs() == 0.0);
        let t1 = ComplexMatrix::from_real_diag(&[0.3, 0.4]);
        let t2 = ComplexMatrix::from_real_diag(&[0.2, -0.5]);
        let p = BivariatePolynomial::from_real(&[&[1.0, 2.0, -1.0], &[0.5, 0.0, 3.0]]);
        let m = eval_poly_pair(&p, &t1, &t2);
        for i in 0..2 {
            let want = p.eval(t1[(i, i)], t2[(i, i)]);
            assert!((m[(i, i)] - want).norm() < 1e-15);
        }
    }

    #[test]
    fn torus_sups() {
        let z1z2 = BivariatePolynomial::from_real(&[&[0.0], &[0.0, 1.0]]);
        assert!((sup_on_bidisc(&z1z2, 64).unwrap() - 1.0).abs() < 1e-12);
        assert!((sup_on_bidisc(&z1_plus_z2(), 64).unwrap() - 2.0).abs() < 1e-12);
        assert!((sup_on_bidisc(&z1_minus_z2(), 64).unwrap() - 2.0).abs() < 1e-12);
        assert!(matches!(sup_on_bidisc(&z1_plus_z2(), 4), Err(Error::Input(_))));
    }

    #[test]
    fn shift_example_chain() {
        let z = ComplexMatrix::zeros(1, 1);
        let p = ContractionPair::new(z.clone(), z, Tolerances::default()).unwrap();
        let r = vn_report(&p, &z1_minus_z2(), &VnOptions::default()).unwrap();
        assert_eq!(r.lhs, 0.0);
        assert!(r.sup_variety < 1e-12);
        assert!((r.sup_bidisc - 2.0).abs() < 1e-12);
        let v = Variety::for_pair(&p).unwrap();
        let s = sup_on_variety(&z1_plus_z2(), &v, 720).unwrap();
        assert!((s.value - 2.0).abs() < 1e-12);
    }

    #[test]
    fn identity_t2_sup() {
        let p = ContractionPair::with_defaults(ComplexMatrix::from_real_diag(&[0.5]), ComplexMatrix::identity(1)).unwrap();
        let v = Variety::for_pair(&p).unwrap();
        let z2 = BivariatePolynomial::from_real(&[&[0.0, 1.0]]);
        assert!((sup_on_variety(&z2, &v, 32).unwrap().value - 1.0).abs() < 1e-12);
        assert!((sup_on_v0_interior(&z2, &v, 8, &[0.0, 0.5]) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn digest_is_stable_and_sensitive() {
        let a = ComplexMatrix::from_real_diag(&[0.5]);
        let b = ComplexMatrix::from_real_diag(&[0.25]);
        assert_eq!(pair_digest(&a, &b), pair_digest(&a, &b));
        assert_ne!(pair_digest(&a, &b), pair_digest(&b, &a));
        assert_eq!(pair_digest(&a, &b).len(), 64);
    }

    #[test]
    fn json_round_trip() {
        let p: BivariatePolynomial = serde_json::from_str(r#"{"coeffs": [[[0,0],[-1,0]],[[1,0]]]}"#).unwrap();
        assert_eq!(p, z1_minus_z2());
        let back: BivariatePolynomial = serde_json::from_str(&serde_json::to_string(&p).unwrap()).unwrap();
        assert_eq!(back, p);
    }
}
