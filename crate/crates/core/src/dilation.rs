//! Truncated Hardy-space model of the isometric dilation.
//!
//! `H²_{D_T1}` is cut at degree `N`, so vectors are `N + 1` stacked blocks of
//! length `r1`. In these coordinates
//!
//! * `Π h` has blocks `E1* D_T1 T1^{*k} h`, `k = 0..=N`;
//! * `M_z` is the block down-shift;
//! * `M_Ψ` is block lower-triangular Toeplitz with symbols `Ψ_q`.
//!
//! Every identity that holds exactly on the full Hardy space holds here up to
//! terms controlled by `|T1^{*(N+1)}|` or by the decay of `Ψ_q`; the bounds
//! reported next to each residual are computed, never assumed.

use serde::Serialize;

use crate::colligation::Colligation;
use crate::error::{Error, Result};
use crate::linalg::{self, singular_values};
use crate::matrix::{ComplexMatrix, C64};
use crate::pair::{ContractionPair, TRUNCATION_CAP};
use crate::transfer::{Direction, Realization};

/// Model size above which assembly logs a warning.
pub const LARGE_MODEL_ROWS: usize = 100_000;

/// Target for `Σ_{q > q_eff} |Ψ_q|` when choosing `q_eff`; the restricted
/// isometry bound is its square.
pub const SYMBOL_TAIL_TARGET: f64 = 1e-4;

#[derive(Clone, Debug, Serialize)]
pub struct TruncatedDilation {
    pub n_trunc: usize,
    pub r1: usize,
    pub n: usize,
    /// `(N + 1) r1 x n`.
    pub pi: ComplexMatrix,
    /// `(N + 1) r1` square.
    pub mz: ComplexMatrix,
    /// `(N + 1) r1` square.
    pub mpsi: ComplexMatrix,
    /// `Ψ_0, ..., Ψ_N`.
    #[serde(skip)]
    pub symbols: Vec<ComplexMatrix>,
    /// `|T1^{*(N+1)}|`.
    pub tail_bound: f64,
    /// `|D_T1|`.
    #[serde(skip)]
    pub defect_norm: f64,
    #[serde(skip)]
    symbol_decay: SymbolDecay,
}

/// Builds the degree-`n_trunc` model. Pass the result of
/// [`ContractionPair::truncation_degree`] for the automatic choice.
pub fn build_dilation(
    pair: &ContractionPair,
    coll: &Colligation,
    n_trunc: usize,
) -> Result<TruncatedDilation> {
    pair.require_t1_pure()?;
    if n_trunc > TRUNCATION_CAP {
        return Err(Error::Input(format!(
            "truncation degree {n_trunc} exceeds the cap {TRUNCATION_CAP}"
        )));
    }
    let n = pair.dim();
    let r1 = coll.r1();
    let blocks = n_trunc + 1;
    let size = blocks * r1;
    if size > LARGE_MODEL_ROWS {
        log::warn!("dilation model has {size} rows; dense assembly will be slow");
    }

    let t1s = pair.t1().adjoint();
    let mut pi = ComplexMatrix::zeros(size, n);
    let mut row = coll.defect1.coordinates();
    for k in 0..blocks {
        pi.set_block(k * r1, 0, &row);
        row = row.matmul(&t1s);
    }
    let tail_bound = linalg::norm(&t1s.pow(n_trunc + 1));

    let mut mz = ComplexMatrix::zeros(size, size);
    let eye = ComplexMatrix::identity(r1);
    for k in 0..n_trunc {
        mz.set_block((k + 1) * r1, k * r1, &eye);
    }

    let psi = Realization::from_colligation(coll, Direction::Adjoint);
    let symbols = psi.taylor_coefficients(blocks);
    let mut mpsi = ComplexMatrix::zeros(size, size);
    for j in 0..blocks {
        for i in j..blocks {
            mpsi.set_block(i * r1, j * r1, &symbols[i - j]);
        }
    }
    let symbol_decay = SymbolDecay::new(&psi, n_trunc.max(1));

    Ok(TruncatedDilation {
        n_trunc,
        r1,
        n,
        pi,
        mz,
        mpsi,
        symbols,
        tail_bound,
        defect_norm: linalg::norm(&coll.defect1.d),
        symbol_decay,
    })
}

/// Data for bounding `Σ_{q > m} |Ψ_q|` without computing the symbols.
///
/// With `|Ψ_q| <= |B| |C| |D^{q-1}|` and `Σ_{j >= m} |D^j| <= |D^m| S_m / (1 - |D^m|)`,
/// `S_m = Σ_{j < m} |D^j|`, valid once `|D^m| < 1`.
#[derive(Clone, Copy, Debug, Default)]
struct SymbolDecay {
    bc: f64,
    dm: f64,
    sm: f64,
}

impl SymbolDecay {
    fn new(psi: &Realization, m: usize) -> Self {
        let bc = if psi.state_dim() == 0 || psi.dim() == 0 {
            0.0
        } else {
            linalg::norm(&psi.b) * linalg::norm(&psi.c)
        };
        let s = psi.state_dim();
        let mut pow = ComplexMatrix::identity(s);
        let mut sm = 0.0;
        for _ in 0..m {
            sm += if s == 0 { 0.0 } else { linalg::norm(&pow) };
            pow = pow.matmul(&psi.d);
        }
        let dm = if s == 0 { 0.0 } else { linalg::norm(&pow) };
        Self { bc, dm, sm }
    }

    /// Bound for `Σ_{q > m} |Ψ_q|`.
    fn remainder(&self) -> f64 {
        if self.bc == 0.0 || self.dm == 0.0 {
            0.0
        } else if self.dm < 1.0 {
            self.bc * self.dm * self.sm / (1.0 - self.dm)
        } else {
            f64::INFINITY
        }
    }
}

/// Smallest `m <= cap` whose a-priori symbol tail `Σ_{q > m} |Ψ_q|` is at
/// most `target`, or `cap`. A model of degree about `2 m` leaves room for a
/// meaningful restricted isometry check.
pub fn symbol_degree(coll: &Colligation, target: f64, cap: usize) -> usize {
    let psi = Realization::from_colligation(coll, Direction::Adjoint);
    let s = psi.state_dim();
    if s == 0 || psi.dim() == 0 {
        return 1;
    }
    let bc = linalg::norm(&psi.b) * linalg::norm(&psi.c);
    let mut pow = psi.d.clone();
    let mut sm = 1.0;
    for m in 1..=cap {
        let dm = linalg::norm(&pow);
        if dm < 1.0 && bc * dm * sm / (1.0 - dm) <= target {
            return m;
        }
        sm += dm;
        pow = pow.matmul(&psi.d);
    }
    cap
}

/// A measured residual next to the bound it must respect.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct Bounded {
    pub residual: f64,
    pub bound: f64,
}

impl Bounded {
    pub fn holds(&self, slack: f64) -> bool {
        self.residual <= self.bound + slack
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct Intertwining {
    /// `|Π T1* - M_z* Π|`, bounded by `|D_T1| |T1^{*(N+1)}|`.
    pub res_z: Bounded,
    /// `|Π T2* - M_Ψ* Π|`, bounded by `|T1^{*(N+1)}|`.
    pub res_psi: Bounded,
}

pub fn intertwining_residuals(dil: &TruncatedDilation, pair: &ContractionPair) -> Intertwining {
    let pz = &dil.pi.matmul(&pair.t1().adjoint()) - &dil.mz.adjoint().matmul(&dil.pi);
    let pp = &dil.pi.matmul(&pair.t2().adjoint()) - &dil.mpsi.adjoint().matmul(&dil.pi);
    Intertwining {
        res_z: Bounded {
            residual: linalg::norm(&pz),
            bound: dil.defect_norm * dil.tail_bound,
        },
        res_psi: Bounded {
            residual: linalg::norm(&pp),
            bound: dil.tail_bound,
        },
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct Compressions {
    /// `|Π* Π - I|`, equal to `|T1^{*(N+1)}|²` in exact arithmetic.
    pub isometry: Bounded,
    /// `|Π* M_z Π - T1|`.
    pub mz: Bounded,
    /// `|Π* M_Ψ Π - T2|`.
    pub mpsi: Bounded,
}

pub fn compression_residuals(dil: &TruncatedDilation, pair: &ContractionPair) -> Compressions {
    let pis = dil.pi.adjoint();
    let gram = &pis.matmul(&dil.pi) - &ComplexMatrix::identity(dil.n);
    let cz = &pis.matmul(&dil.mz).matmul(&dil.pi) - pair.t1();
    let cp = &pis.matmul(&dil.mpsi).matmul(&dil.pi) - pair.t2();
    let t2 = dil.tail_bound * dil.tail_bound;
    Compressions {
        isometry: Bounded {
            residual: linalg::norm(&gram),
            bound: t2,
        },
        mz: Bounded {
            residual: linalg::norm(&cz),
            bound: dil.tail_bound,
        },
        mpsi: Bounded {
            residual: linalg::norm(&cp),
            bound: dil.tail_bound + t2,
        },
    }
}

/// `|M_z M_Ψ - M_Ψ M_z|`.
pub fn shift_commutator(dil: &TruncatedDilation) -> f64 {
    linalg::norm(&(&dil.mz.matmul(&dil.mpsi) - &dil.mpsi.matmul(&dil.mz)))
}

/// `(N + 1) r1` minus the numeric rank of `[Π, M_z Π, ..., M_z^N Π]`.
pub fn minimality_defect(dil: &TruncatedDilation) -> Result<usize> {
    let size = dil.pi.rows();
    if size == 0 {
        return Ok(0);
    }
    let mut cols = Vec::with_capacity(dil.n_trunc + 1);
    let mut cur = dil.pi.clone();
    for _ in 0..=dil.n_trunc {
        let next = dil.mz.matmul(&cur);
        cols.push(cur);
        cur = next;
    }
    let refs: Vec<&ComplexMatrix> = cols.iter().collect();
    let krylov = ComplexMatrix::hstack(&refs);
    let s = singular_values(&krylov)?;
    let cut = 1e-10 * s.first().copied().unwrap_or(0.0).max(1.0);
    let rank = s.iter().filter(|&&x| x > cut).count();
    Ok(size - rank.min(size))
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct MpsiIsometry {
    /// `|M_Ψ* M_Ψ - I|` on the whole truncation.
    pub raw: f64,
    /// Same, restricted to the first `N + 1 - q_eff` block columns.
    pub restricted: f64,
    pub q_eff: usize,
    /// `(Σ_{q > q_eff} |Ψ_q|)²`.
    pub bound: f64,
}

impl TruncatedDilation {
    /// Upper bound for `Σ_{q > q0} |Ψ_q|`, using computed symbol norms up to
    /// `N` and `|Ψ_q| <= |B| |C| |D^{q-1}|` beyond.
    pub fn symbol_tail(&self, q0: usize) -> f64 {
        let head: f64 = self
            .symbols
            .iter()
            .skip(q0 + 1)
            .map(linalg::norm)
            .sum();
        head + self.symbol_decay.remainder()
    }

    fn choose_q_eff(&self) -> usize {
        (1..=self.n_trunc)
            .find(|&q| self.symbol_tail(q) <= SYMBOL_TAIL_TARGET)
            .unwrap_or(self.n_trunc / 2)
    }

    /// Symbol `Ψ_q` (zero beyond the stored range).
    pub fn symbol(&self, q: usize) -> ComplexMatrix {
        self.symbols
            .get(q)
            .cloned()
            .unwrap_or_else(|| ComplexMatrix::zeros(self.r1, self.r1))
    }

    /// `Σ_{q <= N} Ψ_q z^q`.
    pub fn symbol_sum(&self, z: C64) -> ComplexMatrix {
        let mut acc = ComplexMatrix::zeros(self.r1, self.r1);
        for s in self.symbols.iter().rev() {
            acc = &acc.scale(z) + s;
        }
        acc
    }
}

pub fn mpsi_isometry_residual(dil: &TruncatedDilation) -> MpsiIsometry {
    let size = dil.mpsi.rows();
    let gram = &dil.mpsi.adjoint().matmul(&dil.mpsi) - &ComplexMatrix::identity(size);
    let hnorm = |m: &ComplexMatrix| linalg::hermitian_norm(m).expect("finite gram matrix");
    let raw = hnorm(&gram);
    let q_eff = dil.choose_q_eff();
    let keep = (dil.n_trunc + 1 - q_eff.min(dil.n_trunc)) * dil.r1;
    let restricted = if keep == 0 {
        0.0
    } else {
        hnorm(&gram.submatrix(0, 0, keep, keep))
    };
    let tail = dil.symbol_tail(q_eff);
    MpsiIsometry {
        raw,
        restricted,
        q_eff,
        bound: tail * tail,
    }
}

/// Every residual of the model in one record.
#[derive(Clone, Debug, Serialize)]
pub struct DilationReport {
    pub n_trunc: usize,
    pub r1: usize,
    pub tail_bound: f64,
    pub intertwining: Intertwining,
    pub compressions: Compressions,
    pub shift_commutator: f64,
    pub minimality_defect: usize,
    pub mpsi_isometry: MpsiIsometry,
}

pub fn dilation_report(dil: &TruncatedDilation, pair: &ContractionPair) -> Result<DilationReport> {
    Ok(DilationReport {
        n_trunc: dil.n_trunc,
        r1: dil.r1,
        tail_bound: dil.tail_bound,
        intertwining: intertwining_residuals(dil, pair),
        compressions: compression_residuals(dil, pair),
        shift_commutator: shift_commutator(dil),
        minimality_defect: minimality_defect(dil)?,
        mpsi_isometry: mpsi_isometry_residual(dil),
    })
}
