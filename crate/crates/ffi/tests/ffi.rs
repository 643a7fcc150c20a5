use std::ffi::CStr;
use std::ptr;

use andovar_ffi::*;

fn c(re: f64, im: f64) -> AndovarComplex {
    AndovarComplex { re, im }
}

fn jordan() -> Vec<AndovarComplex> {
    vec![c(0.0, 0.0), c(0.5, 0.0), c(0.0, 0.0), c(0.0, 0.0)]
}

fn last_error() -> String {
    let p = andovar_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn new_pair(n: usize, t1: &[AndovarComplex], t2: &[AndovarComplex]) -> (AndovarStatus, *mut AndovarPair) {
    let mut p = ptr::null_mut();
    let s = unsafe { andovar_pair_new(n, t1.as_ptr(), t2.as_ptr(), &mut p) };
    (s, p)
}

#[test]
fn zero_pair_colligation_is_the_flip() {
    let z = vec![c(0.0, 0.0); 4];
    let (s, pair) = new_pair(2, &z, &z);
    assert_eq!(s, AndovarStatus::Ok);
    let (mut p1, mut p2) = (false, false);
    assert_eq!(unsafe { andovar_pair_purity(pair, &mut p1, &mut p2) }, AndovarStatus::Ok);
    assert!(p1 && p2);

    let mut coll = ptr::null_mut();
    assert_eq!(unsafe { andovar_colligation_new(pair, &mut coll) }, AndovarStatus::Ok);
    let (mut r1, mut r2) = (0, 0);
    assert_eq!(unsafe { andovar_colligation_dims(coll, &mut r1, &mut r2) }, AndovarStatus::Ok);
    assert_eq!((r1, r2), (2, 2));

    let mut u = vec![c(9.0, 9.0); 16];
    assert_eq!(unsafe { andovar_colligation_copy_unitary(coll, u.as_mut_ptr(), 16) }, AndovarStatus::Ok);
    for i in 0..4 {
        for j in 0..4 {
            let want = if (i + 2) % 4 == j { 1.0 } else { 0.0 };
            let got = u[i * 4 + j];
            assert!((got.re - want).abs() < 1e-12 && got.im.abs() < 1e-12, "U[{i}][{j}] = {got:?}");
        }
    }

    let z0 = c(0.3, -0.4);
    let mut psi = vec![c(0.0, 0.0); 4];
    assert_eq!(unsafe { andovar_psi_eval(coll, z0, psi.as_mut_ptr(), 4) }, AndovarStatus::Ok);
    assert!((psi[0].re - 0.3).abs() < 1e-12 && (psi[0].im + 0.4).abs() < 1e-12);
    assert!(psi[1].re.abs() < 1e-12 && psi[1].im.abs() < 1e-12);

    let mut z2 = vec![c(0.0, 0.0); 4];
    let mut kinds = vec![7u8; 4];
    let mut count = 0;
    let s = unsafe { andovar_variety_fiber(coll, z0, z2.as_mut_ptr(), kinds.as_mut_ptr(), 4, &mut count) };
    assert_eq!(s, AndovarStatus::Ok);
    assert_eq!(count, 2);
    for i in 0..count {
        assert!((z2[i].re - 0.3).abs() < 1e-10 && (z2[i].im + 0.4).abs() < 1e-10);
        assert_eq!(kinds[i], 1);
    }
    let s = unsafe { andovar_variety_fiber(coll, z0, z2.as_mut_ptr(), ptr::null_mut(), 1, &mut count) };
    assert_eq!(s, AndovarStatus::BufferTooSmall);
    assert_eq!(count, 2);

    unsafe {
        andovar_colligation_free(coll);
        andovar_pair_free(pair);
    }
}

#[test]
fn error_codes_and_messages() {
    let j = jordan();
    let jt = vec![c(0.0, 0.0), c(0.0, 0.0), c(0.5, 0.0), c(0.0, 0.0)];
    let (s, p) = new_pair(2, &j, &jt);
    assert_eq!(s, AndovarStatus::NotCommuting);
    assert!(p.is_null());
    assert!(last_error().contains("commute"));

    let big = vec![c(2.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(2.0, 0.0)];
    assert_eq!(new_pair(2, &big, &big).0, AndovarStatus::NotContraction);

    let nan = vec![c(f64::NAN, 0.0); 4];
    assert_ne!(new_pair(2, &nan, &nan).0, AndovarStatus::Ok);

    let mut out = ptr::null_mut();
    let s = unsafe { andovar_pair_new(2, ptr::null(), j.as_ptr(), &mut out) };
    assert_eq!(s, AndovarStatus::NullPointer);

    let s = unsafe { andovar_colligation_dims(ptr::null(), ptr::null_mut(), ptr::null_mut()) };
    assert_eq!(s, AndovarStatus::NullPointer);

    // a successful call clears the message
    let (s, p) = new_pair(2, &j, &j);
    assert_eq!(s, AndovarStatus::Ok);
    assert!(andovar_last_error().is_null());

    let mut coll = ptr::null_mut();
    unsafe { andovar_colligation_new(p, &mut coll) };
    let mut small = vec![c(0.0, 0.0); 1];
    let s = unsafe { andovar_colligation_copy_unitary(coll, small.as_mut_ptr(), 1) };
    assert_eq!(s, AndovarStatus::BufferTooSmall);
    unsafe {
        andovar_colligation_free(coll);
        andovar_pair_free(p);
        andovar_pair_free(ptr::null_mut());
    }
}

#[test]
fn non_pure_t1_is_reported() {
    let one = vec![c(1.0, 0.0)];
    let half = vec![c(0.5, 0.0)];
    let (s, p) = new_pair(1, &one, &half);
    assert_eq!(s, AndovarStatus::Ok);
    let coeffs = [c(0.0, 0.0), c(1.0, 0.0)];
    let mut r = AndovarVnReport::default();
    let s = unsafe { andovar_vn_report(p, coeffs.as_ptr(), 1, 2, 0, 0, &mut r) };
    assert_eq!(s, AndovarStatus::NotPure);
    unsafe { andovar_pair_free(p) };
}

#[test]
fn vn_chain_for_z1_minus_z2() {
    let j = jordan();
    let (s, p) = new_pair(2, &j, &j);
    assert_eq!(s, AndovarStatus::Ok);
    // p = z1 - z2
    let coeffs = [c(0.0, 0.0), c(-1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)];
    let mut r = AndovarVnReport::default();
    let s = unsafe { andovar_vn_report(p, coeffs.as_ptr(), 2, 2, 0, 0, &mut r) };
    assert_eq!(s, AndovarStatus::Ok, "{}", last_error());
    assert!(r.lhs < 1e-12);
    assert!(r.sup_variety < 1e-12);
    assert!((r.sup_bidisc - 2.0).abs() < 1e-12);
    unsafe { andovar_pair_free(p) };
}

#[test]
fn header_declares_every_export() {
    let h = include_str!("../include/andovar.h");
    for name in [
        "andovar_last_error",
        "andovar_pair_new",
        "andovar_pair_free",
        "andovar_pair_purity",
        "andovar_colligation_new",
        "andovar_colligation_free",
        "andovar_colligation_dims",
        "andovar_colligation_copy_unitary",
        "andovar_psi_eval",
        "andovar_variety_fiber",
        "andovar_vn_report",
        "typedef struct AndovarPair AndovarPair;",
        "ANDOVAR_STATUS_CHAIN_VIOLATION = 11",
    ] {
        assert!(h.contains(name), "missing {name}");
    }
}
