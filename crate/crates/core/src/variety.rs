//! The variety `V = {(z1, z2) : det(Ψ(z1) - z2 I) = 0}` and its pieces.
//!
//! After splitting `Ψ(0) = A*` into `W ⊕ E`, the fiber over `z1` is
//! `σ(W) ∪ σ(Ψ₁(z1))`: the `V0` part is constant in `z1` with unimodular
//! values, the `V1` part comes from the completely non-unitary
//! sub-realization `Ψ₁`.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::colligation::{colligation_for, Colligation};
use crate::error::{Error, Result};
use crate::linalg::{self, eig, eigenvalues};
use crate::matrix::{cis, inner, vec_norm, vec_sub, ComplexMatrix, C64};
use crate::pair::ContractionPair;
use crate::parallel::map_indexed;
use crate::transfer::{canonical_split, CanonicalSplit, Direction, Realization};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Kind {
    V0,
    V1,
}

impl Kind {
    pub fn as_str(self) -> &'static str {
        match self {
            Kind::V0 => "V0",
            Kind::V1 => "V1",
        }
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct FiberPoint {
    pub z2: C64,
    pub kind: Kind,
}

/// `Ψ`, its canonical split and the reduced realization `Ψ₁`.
#[derive(Clone, Debug)]
pub struct Variety {
    pub psi: Realization,
    pub split: CanonicalSplit,
    pub psi1: Realization,
}

impl Variety {
    pub fn new(coll: &Colligation, tol_pure: f64) -> Result<Self> {
        let psi = Realization::from_colligation(coll, Direction::Adjoint);
        let split = canonical_split(&psi.a, tol_pure)?;
        Ok(Self::with_split(coll, split))
    }

    pub fn with_split(coll: &Colligation, split: CanonicalSplit) -> Self {
        let psi = Realization::from_colligation(coll, Direction::Adjoint);
        let psi1 = psi.cnu_part(&split);
        Self { psi, split, psi1 }
    }

    /// Colligation, split and variety of a validated pair.
    pub fn for_pair(pair: &ContractionPair) -> Result<Self> {
        Self::new(&colligation_for(pair)?, pair.tolerances().pure)
    }

    /// Fiber size, `r1`.
    pub fn degree(&self) -> usize {
        self.psi.dim()
    }

    /// `Ψ₁(z1)`.
    pub fn psi1_at(&self, z1: C64) -> Result<ComplexMatrix> {
        self.psi1.eval(z1)
    }

    /// `V1` values first (eigenvalues of `Ψ₁(z1)`), then `V0` values `σ(W)`.
    pub fn fiber(&self, z1: C64) -> Result<Vec<FiberPoint>> {
        let mut out = Vec::with_capacity(self.degree());
        if self.psi1.dim() > 0 {
            let m = self.psi1.eval(z1)?;
            out.extend(eigenvalues(&m)?.into_iter().map(|z2| FiberPoint { z2, kind: Kind::V1 }));
        } else if z1.norm() > crate::transfer::MAX_RADIUS {
            return Err(Error::Input(format!("fiber requested at |z1| = {} > 1", z1.norm())));
        }
        out.extend(self.split.lambda.iter().map(|&z2| FiberPoint { z2, kind: Kind::V0 }));
        Ok(out)
    }

    /// Distance from `z2` to the fiber over `z1`.
    pub fn membership_residual(&self, z1: C64, z2: C64) -> Result<f64> {
        Ok(self
            .fiber(z1)?
            .iter()
            .map(|f| (f.z2 - z2).norm())
            .fold(f64::INFINITY, f64::min))
    }

    /// `σ_min(Ψ₁(z1) - z2 I)` for `V1`, `σ_min(W - z2 I)` for `V0`.
    pub fn point_residual(&self, z1: C64, z2: C64, kind: Kind) -> Result<f64> {
        let m = match kind {
            Kind::V1 => self.psi1.eval(z1)?,
            Kind::V0 => self.split.w.clone(),
        };
        let shifted = &m - &ComplexMatrix::identity(m.rows()).scale(z2);
        Ok(linalg::singular_values(&shifted)?.last().copied().unwrap_or(0.0))
    }

    /// Boundary points over a uniform `n_theta` grid of the circle.
    pub fn boundary_samples(&self, n_theta: usize) -> Result<VarietySample> {
        if n_theta == 0 {
            return Err(Error::Input("n_theta must be positive".into()));
        }
        let thetas: Vec<f64> = (0..n_theta)
            .map(|j| 2.0 * std::f64::consts::PI * j as f64 / n_theta as f64)
            .collect();
        let rows = map_indexed(n_theta, |j| self.boundary_column(thetas[j]));
        let mut points = Vec::new();
        let mut skipped = Vec::new();
        for (j, r) in rows.into_iter().enumerate() {
            match r {
                Ok(p) => points.extend(p),
                Err(Error::BoundaryPole { .. }) => skipped.push(thetas[j]),
                Err(e) => return Err(e),
            }
        }
        Ok(VarietySample {
            n_theta,
            points,
            skipped,
        })
    }

    fn boundary_column(&self, theta: f64) -> Result<Vec<VarietyPoint>> {
        let z1 = cis(theta);
        let mut out = Vec::with_capacity(self.degree());
        if self.psi1.dim() > 0 {
            let m = self.psi1.eval(z1)?;
            let eye = ComplexMatrix::identity(m.rows());
            for z2 in eigenvalues(&m)? {
                let s = linalg::singular_values(&(&m - &eye.scale(z2)))?;
                out.push(VarietyPoint {
                    theta,
                    z1,
                    z2,
                    kind: Kind::V1,
                    residual: s.last().copied().unwrap_or(0.0),
                });
            }
        }
        for &z2 in &self.split.lambda {
            out.push(VarietyPoint {
                theta,
                z1,
                z2,
                kind: Kind::V0,
                residual: self.point_residual(z1, z2, Kind::V0)?,
            });
        }
        Ok(out)
    }
}

pub fn variety_fiber(coll: &Colligation, split: &CanonicalSplit, z1: C64) -> Result<Vec<FiberPoint>> {
    Variety::with_split(coll, split.clone()).fiber(z1)
}

pub fn membership_residual(coll: &Colligation, split: &CanonicalSplit, z1: C64, z2: C64) -> Result<f64> {
    Variety::with_split(coll, split.clone()).membership_residual(z1, z2)
}

pub fn boundary_samples(coll: &Colligation, split: &CanonicalSplit, n_theta: usize) -> Result<VarietySample> {
    Variety::with_split(coll, split.clone()).boundary_samples(n_theta)
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct VarietyPoint {
    pub theta: f64,
    pub z1: C64,
    pub z2: C64,
    pub kind: Kind,
    pub residual: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct VarietySample {
    pub n_theta: usize,
    pub points: Vec<VarietyPoint>,
    /// Angles skipped because of a boundary pole.
    pub skipped: Vec<f64>,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct SampleSummary {
    pub v0: usize,
    pub v1: usize,
    pub skipped: usize,
    pub max_residual: f64,
    /// `max ||z2| - 1|` over all points.
    pub max_modulus_gap: f64,
}

impl VarietySample {
    pub fn summary(&self) -> SampleSummary {
        let count = |k| self.points.iter().filter(|p| p.kind == k).count();
        SampleSummary {
            v0: count(Kind::V0),
            v1: count(Kind::V1),
            skipped: self.skipped.len(),
            max_residual: self.points.iter().map(|p| p.residual).fold(0.0, f64::max),
            max_modulus_gap: self
                .points
                .iter()
                .map(|p| (p.z2.norm() - 1.0).abs())
                .fold(0.0, f64::max),
        }
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("theta,re_z1,im_z1,re_z2,im_z2,kind,residual\n");
        for p in &self.points {
            let _ = writeln!(
                s,
                "{},{},{},{},{},{},{}",
                p.theta,
                p.z1.re,
                p.z1.im,
                p.z2.re,
                p.z2.im,
                p.kind.as_str(),
                p.residual
            );
        }
        s
    }

    /// Two unit-disc panels: `z1` coloured by `θ`, and the fiber values `z2`.
    pub fn to_svg(&self) -> String {
        const R: f64 = 140.0;
        const PAD: f64 = 20.0;
        let w = 4.0 * (R + PAD);
        let h = 2.0 * (R + PAD) + 20.0;
        let mut s = String::new();
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#
        );
        let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
        for (panel, label) in ["z1", "z2"].iter().enumerate() {
            let cx = (2 * panel + 1) as f64 * (R + PAD);
            let cy = R + PAD + 20.0;
            let _ = writeln!(
                s,
                r#"<circle cx="{cx}" cy="{cy}" r="{R}" fill="none" stroke="black" stroke-width="1"/>"#
            );
            let _ = writeln!(
                s,
                r#"<text x="{cx}" y="15" text-anchor="middle" font-family="sans-serif" font-size="12">{label}</text>"#
            );
        }
        let tau = 2.0 * std::f64::consts::PI;
        for p in &self.points {
            let hue = (360.0 * p.theta / tau).round();
            let cy = R + PAD + 20.0;
            for (panel, z) in [(0usize, p.z1), (1usize, p.z2)] {
                let cx = (2 * panel + 1) as f64 * (R + PAD);
                let x = cx + R * z.re;
                let y = cy - R * z.im;
                let fill = if panel == 1 && p.kind == Kind::V0 {
                    "black".to_string()
                } else {
                    format!("hsl({hue},80%,45%)")
                };
                let _ = writeln!(s, r#"<circle cx="{x:.3}" cy="{y:.3}" r="1.5" fill="{fill}"/>"#);
            }
        }
        s.push_str("</svg>\n");
        s
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct JointEigen {
    pub lambda1: C64,
    pub lambda2: C64,
    /// `max(|T1* v - λ̄1 v|, |T2* v - λ̄2 v|)`.
    pub eigen_residual: f64,
    pub verified: bool,
    /// Distance to the variety; `None` when the pair is outside the domain
    /// or the eigenvector failed verification.
    pub membership: Option<f64>,
}

/// Eigenvector check threshold for joint eigenpairs.
pub const JOINT_EIGEN_TOL: f64 = 1e-7;

/// Seed for the generic combination `T1* + μ T2*`.
pub const JOINT_EIGEN_SEED: u64 = 0x006a_6f69_6e74;

fn joint_eigen_attempt(pair: &ContractionPair, mu: C64) -> Result<Vec<(C64, C64, f64)>> {
    let t1s = pair.t1().adjoint();
    let t2s = pair.t2().adjoint();
    let combo = &t1s + &t2s.scale(mu);
    let dec = eig(&combo)?;
    let mut out = Vec::with_capacity(pair.dim());
    for j in 0..pair.dim() {
        let v = dec.vectors.col(j);
        let a = t1s.matvec(&v);
        let b = t2s.matvec(&v);
        let l1 = inner(&v, &a);
        let l2 = inner(&v, &b);
        let r1 = vec_norm(&vec_sub(&a, &v.iter().map(|x| x * l1).collect::<Vec<_>>()));
        let r2 = vec_norm(&vec_sub(&b, &v.iter().map(|x| x * l2).collect::<Vec<_>>()));
        out.push((l1.conj(), l2.conj(), r1.max(r2)));
    }
    Ok(out)
}

/// Joint eigenvalues of `(T1*, T2*)`, conjugated, with their distance to the
/// variety. Pairs with `|λ1| < 1` and `|λ2| <= 1` are tested; the closed
/// second coordinate admits the unimodular `V0` fibers.
pub fn joint_eig_membership(pair: &ContractionPair, variety: &Variety) -> Result<Vec<JointEigen>> {
    let mut rng = ChaCha8Rng::seed_from_u64(JOINT_EIGEN_SEED);
    let mut best: Option<Vec<(C64, C64, f64)>> = None;
    for _ in 0..3 {
        let mu = C64::from_polar(rng.gen_range(0.5..1.5), rng.gen_range(0.0..std::f64::consts::TAU));
        let attempt = joint_eigen_attempt(pair, mu)?;
        let failures = attempt.iter().filter(|x| x.2 > JOINT_EIGEN_TOL).count();
        let better = best
            .as_ref()
            .map(|b| failures < b.iter().filter(|x| x.2 > JOINT_EIGEN_TOL).count())
            .unwrap_or(true);
        if better {
            best = Some(attempt);
        }
        if failures == 0 {
            break;
        }
    }
    let tol = pair.tolerances().contract;
    best.unwrap_or_default()
        .into_iter()
        .map(|(lambda1, lambda2, res)| {
            let verified = res <= JOINT_EIGEN_TOL;
            if !verified {
                log::warn!("joint eigenvector verification failed: residual {res:e}");
            }
            let inside = lambda1.norm() < 1.0 && lambda2.norm() <= 1.0 + tol;
            let membership = if verified && inside {
                Some(variety.membership_residual(lambda1, lambda2)?)
            } else {
                None
            };
            Ok(JointEigen {
                lambda1,
                lambda2,
                eigen_residual: res,
                verified,
                membership,
            })
        })
        .collect()
}

/// Largest `|z1 - f|` with `f` the nearest eigenvalue of `Ψ_b(z2)` over
/// points `(z1, z2)` of `a`'s variety, fibered over random `|z1| <= 0.95`.
fn one_way(a: &Variety, b: &Variety, n_samples: usize, seed: u64) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let zs: Vec<C64> = (0..n_samples)
        .map(|_| C64::from_polar(0.95 * rng.gen::<f64>().sqrt(), rng.gen_range(0.0..std::f64::consts::TAU)))
        .collect();
    let per = map_indexed(n_samples, |i| -> Result<f64> {
        let z1 = zs[i];
        let mut worst: f64 = 0.0;
        for f in a.fiber(z1)? {
            let other = eigenvalues(&b.psi.eval(f.z2)?)?;
            let d = other.iter().map(|g| (g - z1).norm()).fold(f64::INFINITY, f64::min);
            worst = worst.max(d);
        }
        Ok(worst)
    });
    per.into_iter().try_fold(0.0, |acc: f64, r| Ok(acc.max(r?)))
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct Symmetry {
    /// Points of `V` tested against `Ṽ`.
    pub forward: f64,
    /// Points of `Ṽ` tested against `V`.
    pub reverse: f64,
}

impl Symmetry {
    pub fn max(&self) -> f64 {
        self.forward.max(self.reverse)
    }
}

/// Compares the variety of `(T1, T2)` with that of the independently built
/// swapped pair `(T2, T1)`, in both directions.
pub fn symmetry_residual(pair: &ContractionPair, n_samples: usize, seed: u64) -> Result<Symmetry> {
    pair.require_both_pure()?;
    let v = Variety::for_pair(pair)?;
    let w = Variety::for_pair(&pair.swapped())?;
    Ok(Symmetry {
        forward: one_way(&v, &w, n_samples, seed)?,
        reverse: one_way(&w, &v, n_samples, seed.wrapping_add(1))?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{ONE, ZERO};
    use crate::pair::Tolerances;

    fn variety(t1: ComplexMatrix, t2: ComplexMatrix) -> (ContractionPair, Variety) {
        let n = t1.rows();
        let p = ContractionPair::new(t1, t2, Tolerances::for_dim(n)).unwrap();
        let v = Variety::for_pair(&p).unwrap();
        (p, v)
    }

    #[test]
    fn shift_example_fiber_is_diagonal() {
        let z = ComplexMatrix::zeros(2, 2);
        let (_, v) = variety(z.clone(), z);
        let f = v.fiber(C64::new(0.3, 0.0)).unwrap();
        assert_eq!(f.len(), 2);
        for p in &f {
            assert_eq!(p.kind, Kind::V1);
            assert!((p.z2 - C64::new(0.3, 0.0)).norm() < 1e-14);
        }
        let r = v.membership_residual(C64::new(0.3, 0.0), C64::new(0.9, 0.0)).unwrap();
        assert!((r - 0.6).abs() < 1e-14);
        let s = v.boundary_samples(16).unwrap();
        for p in &s.points {
            assert!((p.z2 - p.z1).norm() < 1e-12);
        }
    }

    #[test]
    fn identity_t2_fiber_is_one() {
        let (_, v) = variety(ComplexMatrix::from_real_diag(&[0.5]), ComplexMatrix::identity(1));
        for z1 in [ZERO, C64::new(0.2, 0.7)] {
            let f = v.fiber(z1).unwrap();
            assert!(f.iter().all(|p| p.kind == Kind::V0 && (p.z2 - ONE).norm() < 1e-12));
        }
        let s = v.boundary_samples(8).unwrap();
        assert_eq!(s.summary().v0, 8);
        let j = joint_eig_membership(&ContractionPair::with_defaults(
            ComplexMatrix::from_real_diag(&[0.5]),
            ComplexMatrix::identity(1),
        ).unwrap(), &v).unwrap();
        assert_eq!(j.len(), 1);
        assert!(j[0].membership.unwrap() < 1e-12);
    }

    #[test]
    fn scalar_half_fiber_at_origin() {
        let t = ComplexMatrix::from_real_diag(&[0.5]);
        let n = 1;
        let p = ContractionPair::new(t.clone(), t, Tolerances::for_dim(n)).unwrap();
        let coll = colligation_for(&p).unwrap();
        let v = Variety::new(&coll, 1e-8).unwrap();
        let f = v.fiber(ZERO).unwrap();
        assert_eq!(f.len(), 1);
        assert!((f[0].z2 - coll.a[(0, 0)].conj()).norm() < 1e-14);
    }

    #[test]
    fn diagonal_joint_eigenvalues_on_variety() {
        let (p, v) = variety(
            ComplexMatrix::from_real_diag(&[0.3, 0.4]),
            ComplexMatrix::from_real_diag(&[0.2, -0.5]),
        );
        let j = joint_eig_membership(&p, &v).unwrap();
        assert_eq!(j.len(), 2);
        for e in &j {
            assert!(e.verified);
            assert!(e.membership.unwrap() < 1e-8, "{e:?}");
        }
    }

    #[test]
    fn symmetry_small_cases() {
        let z = ComplexMatrix::zeros(2, 2);
        let p = ContractionPair::with_defaults(z.clone(), z).unwrap();
        assert!(symmetry_residual(&p, 10, 1).unwrap().max() < 1e-10);
        let h = ComplexMatrix::from_real_diag(&[0.5]);
        let p = ContractionPair::with_defaults(h.clone(), h).unwrap();
        assert!(symmetry_residual(&p, 10, 2).unwrap().max() < 1e-8);
        let p = ContractionPair::with_defaults(
            ComplexMatrix::from_real_diag(&[0.3, -0.2, 0.6]),
            ComplexMatrix::from_real_diag(&[0.1, 0.7, -0.4]),
        )
        .unwrap();
        assert!(symmetry_residual(&p, 10, 3).unwrap().max() < 1e-8);
    }

    #[test]
    fn csv_header_and_rows() {
        let z = ComplexMatrix::zeros(1, 1);
        let (_, v) = variety(z.clone(), z);
        let csv = v.boundary_samples(4).unwrap().to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "theta,re_z1,im_z1,re_z2,im_z2,kind,residual");
        assert_eq!(lines.len(), 5);
        assert!(lines[1].starts_with("0,1,0,"));
    }
}
