//! C ABI over `projhull`.
//!
//! Every entry point returns a [`PhStatus`]; results go through out-pointers.
//! On failure, [`ph_last_error`] holds a message for the calling thread.
//! Complex numbers cross the boundary as [`PhComplex`] `{re, im}` pairs.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use num_complex::Complex64;
use projhull::compacta::{sample, CurveGenerator, ProjectivePoint, SampledCompactum};
use projhull::error::Error;
use projhull::extremal::{truncated_extremal, ExtremalStatus};
use projhull::optimizer::SolverConfig;
use projhull::poly::{binomial, HomogeneousPolynomial};
use projhull::spectrum::GradedAlgebraOnK;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    DimensionMismatch = 3,
    DegreeCap = 4,
    InterpolationRegime = 5,
    NumericalFailure = 6,
    InvalidConfig = 7,
    Panic = 8,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhComplex {
    pub re: f64,
    pub im: f64,
}

/// `[lo, hi]`; `lam_*` for extremal values, plain norms for `ph_hom_norm`.
/// `bracketed == 0` means the interpolation regime (both ends `+inf`).
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhBracket {
    pub lo: f64,
    pub hi: f64,
    pub bracketed: i32,
}

/// Opaque sampled compactum.
pub struct PhCompactum(SampledCompactum);

/// Opaque homogeneous polynomial.
pub struct PhPolynomial(HomogeneousPolynomial);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> PhStatus {
    match e {
        Error::DimensionMismatch { .. } => PhStatus::DimensionMismatch,
        Error::DegreeCap { .. } | Error::CoefficientCap { .. } | Error::SampleBudget { .. } => PhStatus::DegreeCap,
        Error::InterpolationRegime => PhStatus::InterpolationRegime,
        Error::NumericalFailure(_) => PhStatus::NumericalFailure,
        Error::Config(_) => PhStatus::InvalidConfig,
        _ => PhStatus::InvalidArgument,
    }
}

/// Run `f`, recording errors and turning panics into `Panic`.
fn guard<F: FnOnce() -> Result<(), (PhStatus, String)>>(f: F) -> PhStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => PhStatus::Ok,
        Ok(Err((s, msg))) => {
            set_error(&msg);
            s
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(&format!("internal panic: {msg}"));
            PhStatus::Panic
        }
    }
}

fn lib(e: Error) -> (PhStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (PhStatus, String) {
    (PhStatus::NullPointer, format!("{what} is null"))
}

unsafe fn complex_slice(ptr: *const PhComplex, len: usize, what: &str) -> Result<Vec<Complex64>, (PhStatus, String)> {
    if len == 0 {
        return Ok(Vec::new());
    }
    if ptr.is_null() {
        return Err(null(what));
    }
    let s = std::slice::from_raw_parts(ptr, len);
    Ok(s.iter().map(|c| Complex64::new(c.re, c.im)).collect())
}

unsafe fn c_str<'a>(ptr: *const c_char, what: &str) -> Result<&'a str, (PhStatus, String)> {
    if ptr.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(ptr).to_str().map_err(|e| (PhStatus::InvalidArgument, format!("{what}: {e}")))
}

unsafe fn out<'a, T>(ptr: *mut T, what: &str) -> Result<&'a mut T, (PhStatus, String)> {
    ptr.as_mut().ok_or_else(|| null(what))
}

/// Library version, static storage.
#[no_mangle]
pub extern "C" fn ph_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failed call on this thread; valid until the next call
/// that fails. Empty if nothing failed yet.
#[no_mangle]
pub extern "C" fn ph_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// `samples` points on the circle `|z| = radius` of the chart `Z_0 != 0` in `P^1`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ph_compactum_circle(samples: usize, radius: f64, out_k: *mut *mut PhCompactum) -> PhStatus {
    guard(|| {
        let slot = out(out_k, "out")?;
        let g = CurveGenerator::CircleInLine { radius, center: vec![Complex64::new(0.0, 0.0)], direction: vec![Complex64::new(1.0, 0.0)] };
        let k = sample(&g, samples).map_err(lib)?;
        *slot = Box::into_raw(Box::new(PhCompactum(k)));
        Ok(())
    })
}

/// `count` points of `P^n`, row-major: point `i` is `coords[i*(n+1) .. (i+1)*(n+1)]`.
///
/// # Safety
/// `coords` must hold `count*(n+1)` values; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn ph_compactum_from_points(n: usize, coords: *const PhComplex, count: usize, out_k: *mut *mut PhCompactum) -> PhStatus {
    guard(|| {
        let slot = out(out_k, "out")?;
        let total = count.checked_mul(n + 1).ok_or_else(|| (PhStatus::InvalidArgument, "point count overflows".to_string()))?;
        let flat = complex_slice(coords, total, "coords")?;
        let reps: Vec<Vec<Complex64>> = flat.chunks(n + 1).map(<[_]>::to_vec).collect();
        let k = SampledCompactum::from_points(n, &reps).map_err(lib)?;
        *slot = Box::into_raw(Box::new(PhCompactum(k)));
        Ok(())
    })
}

/// Either a serialized compactum or `{"generator": {...}, "samples": N}`.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn ph_compactum_from_json(json: *const c_char, out_k: *mut *mut PhCompactum) -> PhStatus {
    guard(|| {
        let slot = out(out_k, "out")?;
        let text = c_str(json, "json")?;
        let value: serde_json::Value = serde_json::from_str(text).map_err(|e| (PhStatus::InvalidConfig, e.to_string()))?;
        let k = if value.get("points").is_some() {
            serde_json::from_value::<SampledCompactum>(value).map_err(|e| (PhStatus::InvalidConfig, e.to_string()))?
        } else {
            let g: CurveGenerator = serde_json::from_value(value.get("generator").cloned().unwrap_or_default())
                .map_err(|e| (PhStatus::InvalidConfig, format!("generator: {e}")))?;
            let count = value
                .get("samples")
                .and_then(serde_json::Value::as_u64)
                .ok_or_else(|| (PhStatus::InvalidConfig, "samples must be a positive integer".to_string()))?;
            sample(&g, count as usize).map_err(lib)?
        };
        *slot = Box::into_raw(Box::new(PhCompactum(k)));
        Ok(())
    })
}

/// Ambient dimension `n` of `P^n`, or 0 for a null handle.
///
/// # Safety
/// `k` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ph_compactum_dim(k: *const PhCompactum) -> usize {
    k.as_ref().map_or(0, |k| k.0.n())
}

/// Number of sample points, or 0 for a null handle.
///
/// # Safety
/// `k` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ph_compactum_len(k: *const PhCompactum) -> usize {
    k.as_ref().map_or(0, |k| k.0.len())
}

/// # Safety
/// `k` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ph_compactum_free(k: *mut PhCompactum) {
    if !k.is_null() {
        drop(Box::from_raw(k));
    }
}

/// Bracket on the degree-`d` extremal function at the point with homogeneous
/// coordinates `x[0..len]`, default solver settings.
///
/// # Safety
/// `k` live, `x` holds `len` values, `out` valid.
#[no_mangle]
pub unsafe extern "C" fn ph_truncated_extremal(
    k: *const PhCompactum,
    x: *const PhComplex,
    len: usize,
    d: usize,
    out_b: *mut PhBracket,
) -> PhStatus {
    guard(|| {
        let k = k.as_ref().ok_or_else(|| null("compactum"))?;
        let slot = out(out_b, "out")?;
        let z = complex_slice(x, len, "x")?;
        let p = ProjectivePoint::new(&z).map_err(lib)?;
        let r = truncated_extremal(&k.0, &p, d, &SolverConfig::default()).map_err(lib)?;
        *slot = PhBracket { lo: r.lam_lo, hi: r.lam_hi, bracketed: i32::from(r.status == ExtremalStatus::Bracketed) };
        Ok(())
    })
}

/// Bracket on the norm of evaluation at the (unnormalized) vector `z` over
/// degree-`d` sections. `InterpolationRegime` if unbounded.
///
/// # Safety
/// `k` live, `z` holds `len` values, `out` valid.
#[no_mangle]
pub unsafe extern "C" fn ph_hom_norm(k: *const PhCompactum, z: *const PhComplex, len: usize, d: usize, out_b: *mut PhBracket) -> PhStatus {
    guard(|| {
        let k = k.as_ref().ok_or_else(|| null("compactum"))?;
        let slot = out(out_b, "out")?;
        let z = complex_slice(z, len, "z")?;
        let alg = GradedAlgebraOnK::new(k.0.clone(), SolverConfig::default()).map_err(lib)?;
        let h = alg.hom_norm(&z, d).map_err(lib)?;
        *slot = PhBracket { lo: h.lo, hi: h.hi, bracketed: 1 };
        Ok(())
    })
}

/// Coefficient count of degree-`d` forms in `n+1` variables.
#[no_mangle]
pub extern "C" fn ph_polynomial_coeff_count(n: usize, d: usize) -> usize {
    binomial(n + d, d)
}

/// Degree-`d` form in `n+1` variables; coefficients in graded-lex order
/// (`Z_0^d` first).
///
/// # Safety
/// `coeffs` holds `len` values; `out` valid.
#[no_mangle]
pub unsafe extern "C" fn ph_polynomial_new(
    n: usize,
    d: usize,
    coeffs: *const PhComplex,
    len: usize,
    out_p: *mut *mut PhPolynomial,
) -> PhStatus {
    guard(|| {
        let slot = out(out_p, "out")?;
        let c = complex_slice(coeffs, len, "coeffs")?;
        let p = HomogeneousPolynomial::new(n, d, c).map_err(lib)?;
        *slot = Box::into_raw(Box::new(PhPolynomial(p)));
        Ok(())
    })
}

/// # Safety
/// `p` live, `z` holds `len` values, `out` valid.
#[no_mangle]
pub unsafe extern "C" fn ph_polynomial_eval(p: *const PhPolynomial, z: *const PhComplex, len: usize, out_v: *mut PhComplex) -> PhStatus {
    guard(|| {
        let p = p.as_ref().ok_or_else(|| null("polynomial"))?;
        let slot = out(out_v, "out")?;
        let v = p.0.eval(&complex_slice(z, len, "z")?).map_err(lib)?;
        *slot = PhComplex { re: v.re, im: v.im };
        Ok(())
    })
}

/// Fubini–Study pointwise norm `|P(z)| / ‖z‖^d`.
///
/// # Safety
/// `p` live, `z` holds `len` values, `out` valid.
#[no_mangle]
pub unsafe extern "C" fn ph_polynomial_fs_norm(p: *const PhPolynomial, z: *const PhComplex, len: usize, out_v: *mut f64) -> PhStatus {
    guard(|| {
        let p = p.as_ref().ok_or_else(|| null("polynomial"))?;
        let slot = out(out_v, "out")?;
        *slot = p.0.fs_section_norm(&complex_slice(z, len, "z")?).map_err(lib)?;
        Ok(())
    })
}

/// `max_K |P|` over the sample lift (unit representatives).
///
/// # Safety
/// `k` and `p` live, `out` valid.
#[no_mangle]
pub unsafe extern "C" fn ph_polynomial_sup_on(k: *const PhCompactum, p: *const PhPolynomial, out_v: *mut f64) -> PhStatus {
    guard(|| {
        let k = k.as_ref().ok_or_else(|| null("compactum"))?;
        let p = p.as_ref().ok_or_else(|| null("polynomial"))?;
        let slot = out(out_v, "out")?;
        let alg = GradedAlgebraOnK::new(k.0.clone(), SolverConfig::default()).map_err(lib)?;
        *slot = alg.degree_norm(&p.0).map_err(lib)?;
        Ok(())
    })
}

/// # Safety
/// `p` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ph_polynomial_free(p: *mut PhPolynomial) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}
