use std::ffi::{CStr, CString};
use std::ptr;

use projhull_ffi::*;

fn c(re: f64, im: f64) -> PhComplex {
    PhComplex { re, im }
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(ph_last_error()) }.to_string_lossy().into_owned()
}

#[test]
fn version_is_crate_version() {
    let v = unsafe { CStr::from_ptr(ph_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

#[test]
fn circle_extremal_through_handles() {
    let mut k = ptr::null_mut();
    assert_eq!(unsafe { ph_compactum_circle(128, 1.0, &mut k) }, PhStatus::Ok);
    assert_eq!(unsafe { ph_compactum_dim(k) }, 1);
    assert_eq!(unsafe { ph_compactum_len(k) }, 128);
    let x = [c(1.0, 0.0), c(2.0, 0.0)];
    let mut b = PhBracket { lo: 0.0, hi: 0.0, bracketed: 0 };
    assert_eq!(unsafe { ph_truncated_extremal(k, x.as_ptr(), 2, 4, &mut b) }, PhStatus::Ok);
    let v = 2f64.ln() - 0.5 * 2.5f64.ln();
    assert_eq!(b.bracketed, 1);
    assert!(b.lo <= v + 1e-9 && v <= b.hi + 1e-9, "{b:?}");
    // origin: sqrt 2
    let z = [c(1.0, 0.0), c(0.0, 0.0)];
    assert_eq!(unsafe { ph_hom_norm(k, z.as_ptr(), 2, 3, &mut b) }, PhStatus::Ok);
    assert!((b.lo - 2f64.sqrt().powi(3)).abs() < 1e-9 && (b.hi - 2f64.sqrt().powi(3)).abs() < 1e-9, "{b:?}");
    unsafe { ph_compactum_free(k) };
}

#[test]
fn errors_carry_codes_and_messages() {
    let mut k = ptr::null_mut();
    assert_eq!(unsafe { ph_compactum_circle(0, 1.0, &mut k) }, PhStatus::InvalidArgument);
    assert!(k.is_null());
    assert!(!last_error().is_empty());
    assert_eq!(unsafe { ph_compactum_circle(16, 1.0, ptr::null_mut()) }, PhStatus::NullPointer);
    assert!(last_error().contains("null"));

    assert_eq!(unsafe { ph_compactum_circle(16, 1.0, &mut k) }, PhStatus::Ok);
    let mut b = PhBracket { lo: 0.0, hi: 0.0, bracketed: 0 };
    let x3 = [c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)];
    assert_eq!(unsafe { ph_truncated_extremal(k, x3.as_ptr(), 3, 2, &mut b) }, PhStatus::DimensionMismatch);
    assert_eq!(unsafe { ph_truncated_extremal(k, x3.as_ptr(), 2, 1000, &mut b) }, PhStatus::DegreeCap);
    assert_eq!(unsafe { ph_truncated_extremal(ptr::null(), x3.as_ptr(), 2, 2, &mut b) }, PhStatus::NullPointer);
    unsafe { ph_compactum_free(k) };

    let bad = CString::new("{\"generator\": {\"kind\": \"nope\"}, \"samples\": 8}").unwrap();
    assert_eq!(unsafe { ph_compactum_from_json(bad.as_ptr(), &mut k) }, PhStatus::InvalidConfig);
    unsafe { ph_compactum_free(ptr::null_mut()) };
    unsafe { ph_polynomial_free(ptr::null_mut()) };
}

#[test]
fn single_point_is_interpolation_regime_elsewhere() {
    let mut k = ptr::null_mut();
    let pts = [c(1.0, 0.0), c(0.5, 0.5)];
    assert_eq!(unsafe { ph_compactum_from_points(1, pts.as_ptr(), 1, &mut k) }, PhStatus::Ok);
    let x = [c(1.0, 0.0), c(-2.0, 0.0)];
    let mut b = PhBracket { lo: 0.0, hi: 0.0, bracketed: 1 };
    assert_eq!(unsafe { ph_truncated_extremal(k, x.as_ptr(), 2, 1, &mut b) }, PhStatus::Ok);
    assert_eq!(b.bracketed, 0);
    assert!(b.hi.is_infinite());
    assert_eq!(unsafe { ph_hom_norm(k, x.as_ptr(), 2, 1, &mut b) }, PhStatus::InterpolationRegime);
    unsafe { ph_compactum_free(k) };
}

#[test]
fn json_generator_and_polynomials() {
    let mut k = ptr::null_mut();
    let spec = CString::new(r#"{"generator": {"kind": "circle_in_line", "radius": 1.0}, "samples": 64}"#).unwrap();
    assert_eq!(unsafe { ph_compactum_from_json(spec.as_ptr(), &mut k) }, PhStatus::Ok);
    assert_eq!(ph_polynomial_coeff_count(1, 2), 3);
    // Z_0^2 + Z_1^2 in graded order Z_0^2, Z_0 Z_1, Z_1^2
    let coeffs = [c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)];
    let mut p = ptr::null_mut();
    assert_eq!(unsafe { ph_polynomial_new(1, 2, coeffs.as_ptr(), 3, &mut p) }, PhStatus::Ok);
    let z = [c(1.0, 0.0), c(0.0, 1.0)];
    let mut v = c(9.0, 9.0);
    assert_eq!(unsafe { ph_polynomial_eval(p, z.as_ptr(), 2, &mut v) }, PhStatus::Ok);
    assert!(v.re.abs() < 1e-15 && v.im.abs() < 1e-15);
    let z = [c(1.0, 0.0), c(1.0, 0.0)];
    let mut n = 0.0;
    assert_eq!(unsafe { ph_polynomial_fs_norm(p, z.as_ptr(), 2, &mut n) }, PhStatus::Ok);
    assert!((n - 1.0).abs() < 1e-15);
    // on the unit lift of |z| = 1, |1 + z^2|/2 peaks at 1
    let mut sup = 0.0;
    assert_eq!(unsafe { ph_polynomial_sup_on(k, p, &mut sup) }, PhStatus::Ok);
    assert!((sup - 1.0).abs() < 1e-12, "{sup}");
    assert_eq!(unsafe { ph_polynomial_new(1, 2, coeffs.as_ptr(), 2, &mut p) }, PhStatus::DimensionMismatch);
    unsafe {
        ph_polynomial_free(p);
        ph_compactum_free(k);
    }
}
