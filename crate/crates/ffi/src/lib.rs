//! C interface to `andovar`.
//!
//! Matrices cross the boundary as row-major arrays of [`AndovarComplex`].
//! Every function returns an [`AndovarStatus`]; on failure the message is
//! available from [`andovar_last_error`] on the same thread until the next
//! call. Handles are opaque and must be released with their `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use andovar::colligation::colligation_for;
use andovar::variety::{Kind, Variety};
use andovar::vn::{vn_report_with, BivariatePolynomial, VnOptions};
use andovar::{Colligation, ComplexMatrix, ContractionPair, Error, TransferFunction, C64};

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct AndovarComplex {
    pub re: f64,
    pub im: f64,
}

impl From<C64> for AndovarComplex {
    fn from(z: C64) -> Self {
        Self { re: z.re, im: z.im }
    }
}

impl From<AndovarComplex> for C64 {
    fn from(z: AndovarComplex) -> Self {
        C64::new(z.re, z.im)
    }
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AndovarStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidInput = 2,
    Dimension = 3,
    BufferTooSmall = 4,
    NotPsd = 5,
    NotContraction = 6,
    NotCommuting = 7,
    NotPure = 8,
    BoundaryPole = 9,
    SplitLeakage = 10,
    ChainViolation = 11,
    Numeric = 12,
    Panic = 13,
}

impl From<&Error> for AndovarStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::Input(_) => Self::InvalidInput,
            Error::Dimension(_) => Self::Dimension,
            Error::NotPsd { .. } => Self::NotPsd,
            Error::NotContraction { .. } => Self::NotContraction,
            Error::NotCommuting { .. } => Self::NotCommuting,
            Error::NotPure { .. } => Self::NotPure,
            Error::BoundaryPole { .. } => Self::BoundaryPole,
            Error::SplitLeakage { .. } => Self::SplitLeakage,
            Error::ChainViolation(_) => Self::ChainViolation,
            Error::Numeric(_) => Self::Numeric,
        }
    }
}

/// Validated commuting contractive pair.
pub struct AndovarPair {
    pair: ContractionPair,
}

/// Unitary colligation of a pair, with the purity tolerance it was built with.
pub struct AndovarColligation {
    coll: Colligation,
    tol_pure: f64,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default)]
pub struct AndovarVnReport {
    pub lhs: f64,
    pub sup_variety: f64,
    pub sup_bidisc: f64,
    pub slack: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Failure(AndovarStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure((&e).into(), e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(AndovarStatus::NullPointer, format!("{what} is null"))
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> AndovarStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => AndovarStatus::Ok,
        Ok(Err(Failure(s, msg))) => {
            set_error(msg);
            s
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("internal panic: {msg}"));
            AndovarStatus::Panic
        }
    }
}

unsafe fn read_matrix(ptr: *const AndovarComplex, rows: usize, cols: usize, what: &str) -> Result<ComplexMatrix, Failure> {
    if ptr.is_null() {
        return Err(null(what));
    }
    let s = std::slice::from_raw_parts(ptr, rows * cols);
    Ok(ComplexMatrix::new(rows, cols, s.iter().map(|&z| z.into()).collect())?)
}

unsafe fn write_matrix(m: &ComplexMatrix, out: *mut AndovarComplex, len: usize) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("output buffer"));
    }
    let need = m.rows() * m.cols();
    if len < need {
        return Err(Failure(
            AndovarStatus::BufferTooSmall,
            format!("output buffer holds {len} entries, {need} required"),
        ));
    }
    let dst = std::slice::from_raw_parts_mut(out, need);
    for (d, &z) in dst.iter_mut().zip(m.data()) {
        *d = z.into();
    }
    Ok(())
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

/// Message of the last failed call on this thread, or null. Valid until the
/// next call into the library from the same thread.
#[no_mangle]
pub extern "C" fn andovar_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Validates `(T1, T2)`, both `n x n` row-major, with default tolerances.
///
/// # Safety
/// `t1` and `t2` must point to `n * n` entries; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn andovar_pair_new(
    n: usize,
    t1: *const AndovarComplex,
    t2: *const AndovarComplex,
    out: *mut *mut AndovarPair,
) -> AndovarStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        if n == 0 {
            return Err(Failure(AndovarStatus::InvalidInput, "n must be positive".into()));
        }
        let a = read_matrix(t1, n, n, "t1")?;
        let b = read_matrix(t2, n, n, "t2")?;
        let pair = ContractionPair::with_defaults(a, b)?;
        *out = Box::into_raw(Box::new(AndovarPair { pair }));
        Ok(())
    })
}

/// # Safety
/// `pair` must come from [`andovar_pair_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn andovar_pair_free(pair: *mut AndovarPair) {
    if !pair.is_null() {
        drop(Box::from_raw(pair));
    }
}

/// Writes whether `T1` and `T2` are pure (spectral radius below `1 - tol_pure`).
///
/// # Safety
/// `pair` must be a live handle; `t1_pure` and `t2_pure` must be writable.
#[no_mangle]
pub unsafe extern "C" fn andovar_pair_purity(
    pair: *const AndovarPair,
    t1_pure: *mut bool,
    t2_pure: *mut bool,
) -> AndovarStatus {
    guard(|| {
        let p = deref(pair, "pair")?;
        if t1_pure.is_null() || t2_pure.is_null() {
            return Err(null("output flag"));
        }
        *t1_pure = p.pair.t1_pure();
        *t2_pure = p.pair.t2_pure();
        Ok(())
    })
}

/// # Safety
/// `pair` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn andovar_colligation_new(
    pair: *const AndovarPair,
    out: *mut *mut AndovarColligation,
) -> AndovarStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        let p = deref(pair, "pair")?;
        let coll = colligation_for(&p.pair)?;
        *out = Box::into_raw(Box::new(AndovarColligation {
            coll,
            tol_pure: p.pair.tolerances().pure,
        }));
        Ok(())
    })
}

/// # Safety
/// `coll` must come from [`andovar_colligation_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn andovar_colligation_free(coll: *mut AndovarColligation) {
    if !coll.is_null() {
        drop(Box::from_raw(coll));
    }
}

/// Defect ranks `r1 = rank D_T1`, `r2 = rank D_T2`; the unitary is `(r1 + r2)` square.
///
/// # Safety
/// `coll` must be a live handle; `r1` and `r2` must be writable.
#[no_mangle]
pub unsafe extern "C" fn andovar_colligation_dims(
    coll: *const AndovarColligation,
    r1: *mut usize,
    r2: *mut usize,
) -> AndovarStatus {
    guard(|| {
        let c = deref(coll, "colligation")?;
        if r1.is_null() || r2.is_null() {
            return Err(null("output dimension"));
        }
        *r1 = c.coll.r1();
        *r2 = c.coll.r2();
        Ok(())
    })
}

/// Copies `U = [[A, B], [C, D]]` row-major into `out` (`len` entries available).
///
/// # Safety
/// `coll` must be a live handle; `out` must hold `len` entries.
#[no_mangle]
pub unsafe extern "C" fn andovar_colligation_copy_unitary(
    coll: *const AndovarColligation,
    out: *mut AndovarComplex,
    len: usize,
) -> AndovarStatus {
    guard(|| {
        let c = deref(coll, "colligation")?;
        write_matrix(&c.coll.unitary(), out, len)
    })
}

/// Evaluates the `r1 x r1` inner function `Ψ(z)`, `|z| <= 1`.
///
/// # Safety
/// `coll` must be a live handle; `out` must hold `len` entries.
#[no_mangle]
pub unsafe extern "C" fn andovar_psi_eval(
    coll: *const AndovarColligation,
    z: AndovarComplex,
    out: *mut AndovarComplex,
    len: usize,
) -> AndovarStatus {
    guard(|| {
        let c = deref(coll, "colligation")?;
        let v = TransferFunction::psi(&c.coll).eval(z.into())?;
        write_matrix(&v, out, len)
    })
}

/// Points `z2` of the variety over `z1`. Writes up to `cap` values to `z2`
/// and, when `kinds` is not null, `0` for `V0` and `1` for `V1` points.
/// `count` receives the fiber size even when it exceeds `cap`, in which case
/// the status is `BufferTooSmall`.
///
/// # Safety
/// `coll` must be a live handle; `z2` and `kinds` (if not null) must hold
/// `cap` entries; `count` must be writable.
#[no_mangle]
pub unsafe extern "C" fn andovar_variety_fiber(
    coll: *const AndovarColligation,
    z1: AndovarComplex,
    z2: *mut AndovarComplex,
    kinds: *mut u8,
    cap: usize,
    count: *mut usize,
) -> AndovarStatus {
    guard(|| {
        let c = deref(coll, "colligation")?;
        if count.is_null() {
            return Err(null("count"));
        }
        let v = Variety::new(&c.coll, c.tol_pure)?;
        let fiber = v.fiber(z1.into())?;
        *count = fiber.len();
        if fiber.len() > cap {
            return Err(Failure(
                AndovarStatus::BufferTooSmall,
                format!("fiber has {} points, buffer holds {cap}", fiber.len()),
            ));
        }
        if fiber.is_empty() {
            return Ok(());
        }
        if z2.is_null() {
            return Err(null("z2"));
        }
        for (i, f) in fiber.iter().enumerate() {
            *z2.add(i) = f.z2.into();
            if !kinds.is_null() {
                *kinds.add(i) = match f.kind {
                    Kind::V0 => 0,
                    Kind::V1 => 1,
                };
            }
        }
        Ok(())
    })
}

/// Checks `|p(T1, T2)| <= sup_V |p| <= sup_{T^2} |p|` for the polynomial with
/// coefficients `coeffs[j * cols + k]` of `z1^j z2^k`, `rows x cols`. Zero
/// grid sizes select the defaults. A broken chain returns `ChainViolation`.
///
/// # Safety
/// `pair` must be a live handle; `coeffs` must hold `rows * cols` entries;
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn andovar_vn_report(
    pair: *const AndovarPair,
    coeffs: *const AndovarComplex,
    rows: usize,
    cols: usize,
    n_theta: usize,
    torus_grid: usize,
    out: *mut AndovarVnReport,
) -> AndovarStatus {
    guard(|| {
        let p = deref(pair, "pair")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let m = read_matrix(coeffs, rows, cols, "coeffs")?;
        let c: Vec<Vec<C64>> = (0..rows).map(|j| m.row(j).to_vec()).collect();
        let poly = BivariatePolynomial::new(c)?;
        let d = VnOptions::default();
        let opts = VnOptions {
            n_theta: if n_theta == 0 { d.n_theta } else { n_theta },
            torus_grid: if torus_grid == 0 { d.torus_grid } else { torus_grid },
        };
        let v = Variety::for_pair(&p.pair)?;
        let r = vn_report_with(&p.pair, &v, &poly, &opts)?;
        *out = AndovarVnReport {
            lhs: r.lhs,
            sup_variety: r.sup_variety,
            sup_bidisc: r.sup_bidisc,
            slack: r.slack,
        };
        Ok(())
    })
}
