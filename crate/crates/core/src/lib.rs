//! Ando-type isometric dilations, transfer-function inner multipliers and
//! distinguished varieties for pairs of commuting contractive matrices.
//!
//! Pipeline for a pair `(T1, T2)`:
//!
//! 1. [`pair`] validates commutation and contractivity, computes defect
//!    operators `D_T = (I - T T*)^{1/2}` with explicit defect-space bases.
//! 2. [`colligation`] builds the block unitary `U = [[A, B], [C, D]]` on
//!    `D_T1 ⊕ D_T2` sending `(D_T1 h, D_T2 T1* h)` to `(D_T1 T2* h, D_T2 h)`.
//! 3. [`transfer`] evaluates `Ψ(z) = A* + z C* (I - z D*)^{-1} B*` and splits
//!    `A*` into unitary and completely non-unitary parts.
//! 4. [`dilation`] realises `(M_z, M_Ψ)` on a truncated Hardy space and
//!    measures every intertwining identity against computed tail bounds.
//! 5. [`variety`] samples `{det(Ψ(z1) - z2 I) = 0}` and [`vn`] certifies
//!    `|p(T1, T2)| <= sup_V |p| <= sup_{T^2} |p|`.

pub mod colligation;
pub mod dilation;
pub mod error;
pub mod generate;
pub mod io;
pub mod linalg;
pub mod matrix;
pub mod pair;
pub mod parallel;
pub mod transfer;
pub mod variety;
pub mod vn;

pub use colligation::{build_colligation, Colligation};
pub use error::{Error, Result};
pub use matrix::{ComplexMatrix, C64};
pub use pair::{ContractionPair, DefectData, PairReport, Tolerances};
pub use transfer::{CanonicalSplit, Direction, TransferFunction};
pub use vn::{BivariatePolynomial, VnOptions, VnReport};
