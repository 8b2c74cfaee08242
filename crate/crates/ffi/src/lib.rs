//! C interface to `ffrace`.
//!
//! Objects are opaque handles released by their `_free` function. Every fallible
//! call returns an [`FfrStatus`]; on failure [`ffr_last_error_message`] describes
//! the error for the calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use ffrace::curve::{ulmer_curve, CurveModel};
use ffrace::error::Error;
use ffrace::field::make_field;
use ffrace::io::{read_curve_file, read_spectrum};
use ffrace::limit::{build_rv, delta_cf, delta_mc};
use ffrace::lpoly::{compute_lpolynomial, spectrum, LOptions, LPolynomial, Spectrum};
use ffrace::race::density_exact_periodic;
use ffrace::ulmer;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FfrStatus {
    Ok = 0,
    InvalidArgument = 1,
    WorkBound = 2,
    Parse = 3,
    Unsupported = 4,
    Computation = 5,
    NullPointer = 6,
    Overflow = 7,
    Panic = 8,
}

pub struct FfrCurve(CurveModel);
pub struct FfrLPoly(LPolynomial);
pub struct FfrSpectrum(Spectrum);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let s = CString::new(msg.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(s));
}

fn status_of(e: &Error) -> FfrStatus {
    match e {
        Error::InvalidArgument(_)
        | Error::SingularCurve
        | Error::ConstantJ
        | Error::NotSquarefree
        | Error::GcdCondition
        | Error::NotSelfDual
        | Error::MixedContexts => FfrStatus::InvalidArgument,
        Error::WorkBound { .. } => FfrStatus::WorkBound,
        Error::Parse(_) => FfrStatus::Parse,
        Error::Unsupported(_) | Error::WildRamification | Error::NonMinimal(_) => {
            FfrStatus::Unsupported
        }
        Error::Overflow(_) => FfrStatus::Overflow,
        Error::DivisionByZero
        | Error::Stabilization(_)
        | Error::Purity(_)
        | Error::Quadrature
        | Error::TheoremCheck(_) => FfrStatus::Computation,
    }
}

fn guard(f: impl FnOnce() -> Result<(), FfrStatus>) -> FfrStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => FfrStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("internal panic");
            FfrStatus::Panic
        }
    }
}

fn lift<T>(r: ffrace::Result<T>) -> Result<T, FfrStatus> {
    r.map_err(|e| {
        set_error(e.to_string());
        status_of(&e)
    })
}

unsafe fn str_arg<'a>(p: *const c_char) -> Result<&'a str, FfrStatus> {
    if p.is_null() {
        set_error("null string argument");
        return Err(FfrStatus::NullPointer);
    }
    CStr::from_ptr(p).to_str().map_err(|_| {
        set_error("string argument is not valid UTF-8");
        FfrStatus::InvalidArgument
    })
}

unsafe fn ref_arg<'a, T>(p: *const T) -> Result<&'a T, FfrStatus> {
    p.as_ref().ok_or_else(|| {
        set_error("null handle");
        FfrStatus::NullPointer
    })
}

unsafe fn out_arg<'a, T>(p: *mut T) -> Result<&'a mut T, FfrStatus> {
    p.as_mut().ok_or_else(|| {
        set_error("null output pointer");
        FfrStatus::NullPointer
    })
}

/// Message for the last failed call on this thread, or NULL. Valid until the next failing call.
#[no_mangle]
pub extern "C" fn ffr_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

#[no_mangle]
pub extern "C" fn ffr_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Frees a string returned by this library.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn ffr_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

// ------------------------------------------------------------------ curves

/// Parses a curve file (JSON text).
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ffr_curve_from_json(
    json: *const c_char,
    out: *mut *mut FfrCurve,
) -> FfrStatus {
    guard(|| {
        let out = out_arg(out)?;
        *out = ptr::null_mut();
        let text = str_arg(json)?;
        let cf = lift(read_curve_file(text))?;
        let c = lift(cf.to_curve())?;
        *out = Box::into_raw(Box::new(FfrCurve(c)));
        Ok(())
    })
}

/// The curve y^2 + xy = x^3 - t^d over F_{p^k}(t).
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ffr_curve_ulmer(
    p: u64,
    k: u32,
    d: usize,
    out: *mut *mut FfrCurve,
) -> FfrStatus {
    guard(|| {
        let out = out_arg(out)?;
        *out = ptr::null_mut();
        let f = lift(make_field(p, k))?;
        let c = lift(ulmer_curve(&f, d))?;
        *out = Box::into_raw(Box::new(FfrCurve(c)));
        Ok(())
    })
}

/// # Safety
/// `c` must be NULL or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn ffr_curve_free(c: *mut FfrCurve) {
    if !c.is_null() {
        drop(Box::from_raw(c));
    }
}

// ----------------------------------------------------------- L-polynomials

/// Computes L(E, T). A negative `degree_hint` means use the conductor.
///
/// # Safety
/// `curve` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ffr_lpoly_compute(
    curve: *const FfrCurve,
    degree_hint: i64,
    max_residue_field: u64,
    out: *mut *mut FfrLPoly,
) -> FfrStatus {
    guard(|| {
        let out = out_arg(out)?;
        *out = ptr::null_mut();
        let c = ref_arg(curve)?;
        let opts = LOptions {
            degree_hint: usize::try_from(degree_hint).ok(),
            max_residue_field,
            ..LOptions::default()
        };
        let lc = lift(compute_lpolynomial(&c.0, &opts))?;
        *out = Box::into_raw(Box::new(FfrLPoly(lc.lpoly)));
        Ok(())
    })
}

/// # Safety
/// `l` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn ffr_lpoly_degree(l: *const FfrLPoly) -> usize {
    l.as_ref().map_or(0, |l| l.0.degree())
}

/// Copies the coefficients a_0..a_N into `buf` (length `len` >= N + 1).
///
/// # Safety
/// `l` must be a live handle; `buf` must hold `len` elements.
#[no_mangle]
pub unsafe extern "C" fn ffr_lpoly_coeffs(
    l: *const FfrLPoly,
    buf: *mut i64,
    len: usize,
) -> FfrStatus {
    guard(|| {
        let l = ref_arg(l)?;
        if buf.is_null() {
            set_error("null buffer");
            return Err(FfrStatus::NullPointer);
        }
        let cs = l.0.coeffs();
        if len < cs.len() {
            set_error(format!(
                "buffer holds {len} coefficients, need {}",
                cs.len()
            ));
            return Err(FfrStatus::InvalidArgument);
        }
        let dst = std::slice::from_raw_parts_mut(buf, len);
        for (d, c) in dst.iter_mut().zip(cs) {
            *d = i64::try_from(c).map_err(|_| {
                set_error("coefficient does not fit in 64 bits");
                FfrStatus::Overflow
            })?;
        }
        Ok(())
    })
}

/// Text form such as "1 - 81*T^4"; release with `ffr_string_free`.
///
/// # Safety
/// `l` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn ffr_lpoly_to_string(l: *const FfrLPoly) -> *mut c_char {
    match l.as_ref() {
        Some(l) => CString::new(l.0.to_string()).map_or(ptr::null_mut(), CString::into_raw),
        None => ptr::null_mut(),
    }
}

/// # Safety
/// `l` must be NULL or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn ffr_lpoly_free(l: *mut FfrLPoly) {
    if !l.is_null() {
        drop(Box::from_raw(l));
    }
}

// ----------------------------------------------------------------- spectra

/// # Safety
/// `l` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ffr_spectrum_from_lpoly(
    l: *const FfrLPoly,
    out: *mut *mut FfrSpectrum,
) -> FfrStatus {
    guard(|| {
        let out = out_arg(out)?;
        *out = ptr::null_mut();
        let l = ref_arg(l)?;
        let s = lift(spectrum(&l.0))?;
        *out = Box::into_raw(Box::new(FfrSpectrum(s)));
        Ok(())
    })
}

/// Parses a spectrum file, or any JSON document with a "spectrum" member.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ffr_spectrum_from_json(
    json: *const c_char,
    out: *mut *mut FfrSpectrum,
) -> FfrStatus {
    guard(|| {
        let out = out_arg(out)?;
        *out = ptr::null_mut();
        let s = lift(read_spectrum(str_arg(json)?))?;
        *out = Box::into_raw(Box::new(FfrSpectrum(s)));
        Ok(())
    })
}

/// # Safety
/// `s` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn ffr_spectrum_rank(s: *const FfrSpectrum) -> u32 {
    s.as_ref().map_or(0, |s| s.0.rank)
}

/// # Safety
/// `s` must be NULL or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn ffr_spectrum_free(s: *mut FfrSpectrum) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

// ---------------------------------------------------------------- densities

/// Exact density bounds (equal unless the race has boundary classes).
///
/// # Safety
/// `s` must be a live handle; `lo` and `hi` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ffr_density_exact(
    s: *const FfrSpectrum,
    lo: *mut f64,
    hi: *mut f64,
) -> FfrStatus {
    guard(|| {
        let s = ref_arg(s)?;
        let (lo, hi) = (out_arg(lo)?, out_arg(hi)?);
        let r = lift(density_exact_periodic(&s.0))?;
        (*lo, *hi) = r.bounds_f64();
        Ok(())
    })
}

/// Monte Carlo density under the limiting distribution.
///
/// # Safety
/// `s` must be a live handle; `delta` and `std_error` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ffr_delta_mc(
    s: *const FfrSpectrum,
    samples: usize,
    seed: u64,
    delta: *mut f64,
    std_error: *mut f64,
) -> FfrStatus {
    guard(|| {
        let s = ref_arg(s)?;
        let (delta, std_error) = (out_arg(delta)?, out_arg(std_error)?);
        let mc = lift(delta_mc(&build_rv(&s.0), samples, seed))?;
        *delta = mc.delta;
        *std_error = mc.std_error;
        Ok(())
    })
}

/// Density by characteristic-function inversion up to `cap`.
///
/// # Safety
/// `s` must be a live handle; `delta` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ffr_delta_cf(
    s: *const FfrSpectrum,
    cap: f64,
    delta: *mut f64,
) -> FfrStatus {
    guard(|| {
        let s = ref_arg(s)?;
        let delta = out_arg(delta)?;
        *delta = lift(delta_cf(&build_rv(&s.0), cap))?.delta;
        Ok(())
    })
}

/// Exact density bounds for the Ulmer curve over F_{p^k}(t).
///
/// # Safety
/// `lo` and `hi` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ffr_ulmer_delta(
    p: u64,
    k: u32,
    d: u64,
    lo: *mut f64,
    hi: *mut f64,
) -> FfrStatus {
    guard(|| {
        let (lo, hi) = (out_arg(lo)?, out_arg(hi)?);
        let s = lift(ulmer::validate(p, k, d))?;
        (*lo, *hi) = ulmer::delta_exact(&s).bounds_f64();
        Ok(())
    })
}
