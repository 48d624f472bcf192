//! C ABI over `mfe-lab`.
//!
//! Curves and Hermitian forms are opaque handles created by `mfe_*_new`
//! and released with the matching `mfe_*_free`. Every fallible call returns
//! an [`MfeStatus`] and writes its result through an out-pointer; on failure
//! [`mfe_last_error`] describes the problem. Strings returned by the library
//! are released with [`mfe_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use mfe_lab::calculus::{self, QuadratureSpec};
use mfe_lab::suites::{self, RunConfig, Suite};
use mfe_lab::{divisor, metric, mfe, Complex64, Curve, Error, HermitianForm, SurfacePoint};

/// Result codes.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MfeStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    RepeatedRoots = 3,
    BadDegree = 4,
    OutOfChart = 5,
    AtSingularSupport = 6,
    PoleAtPoint = 7,
    NonConvergent = 8,
    BadExcision = 9,
    WrongGenus = 10,
    NotEffective = 11,
    DivisorHitsWeierstrass = 12,
    BadHermitian = 13,
    DimensionMismatch = 14,
    SuiteFailed = 15,
    Panic = 16,
}

impl From<&Error> for MfeStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::RepeatedRoots(..) => MfeStatus::RepeatedRoots,
            Error::BadDegree(_) => MfeStatus::BadDegree,
            Error::NonFiniteRoot(_) | Error::NotOnCurve(_) | Error::Invalid(_) => MfeStatus::InvalidArgument,
            Error::OutOfChart(..) => MfeStatus::OutOfChart,
            Error::AtSingularSupport => MfeStatus::AtSingularSupport,
            Error::PoleAtPoint => MfeStatus::PoleAtPoint,
            Error::NonConvergent(_) => MfeStatus::NonConvergent,
            Error::BadExcision(_) => MfeStatus::BadExcision,
            Error::WrongGenus { .. } => MfeStatus::WrongGenus,
            Error::NotEffective => MfeStatus::NotEffective,
            Error::DivisorHitsWeierstrass => MfeStatus::DivisorHitsWeierstrass,
            Error::BadHermitian(_) => MfeStatus::BadHermitian,
            Error::DimensionMismatch { .. } => MfeStatus::DimensionMismatch,
        }
    }
}

/// Opaque curve handle.
pub struct MfeCurve {
    curve: Curve,
}

/// Opaque Hermitian form handle.
pub struct MfeHermitian {
    form: HermitianForm,
}

/// A point of the curve. With `infinity == 0` the point lies over `x` on
/// the sheet `y = +√f(x)` when `sheet >= 0` and `y = −√f(x)` otherwise.
/// With `infinity != 0` it is `∞₊` for `sheet >= 0` and `∞₋` otherwise.
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct MfePoint {
    pub x_re: f64,
    pub x_im: f64,
    pub sheet: i32,
    pub infinity: i32,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn fail(status: MfeStatus, msg: &str) -> MfeStatus {
    set_error(msg);
    status
}

fn guard(f: impl FnOnce() -> MfeStatus) -> MfeStatus {
    set_error("");
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => fail(MfeStatus::Panic, "internal panic"),
    }
}

fn from_result<T>(r: mfe_lab::Result<T>, out: *mut T) -> MfeStatus {
    match r {
        Ok(v) => {
            // SAFETY: callers check `out` for null before computing.
            unsafe { out.write(v) };
            MfeStatus::Ok
        }
        Err(e) => fail(MfeStatus::from(&e), &e.to_string()),
    }
}

fn to_point(curve: &Curve, p: &MfePoint) -> Result<SurfacePoint, MfeStatus> {
    let plus = p.sheet >= 0;
    if p.infinity != 0 {
        return Ok(if plus { SurfacePoint::InfinityPlus } else { SurfacePoint::InfinityMinus });
    }
    if !p.x_re.is_finite() || !p.x_im.is_finite() {
        return Err(fail(MfeStatus::InvalidArgument, "point coordinate is not finite"));
    }
    let (a, b) = curve.lift_x(Complex64::new(p.x_re, p.x_im));
    Ok(if plus { a } else { b })
}

macro_rules! deref {
    ($p:expr) => {{
        if $p.is_null() {
            return fail(MfeStatus::NullPointer, concat!(stringify!($p), " is null"));
        }
        // SAFETY: non-null handles come from this library and are live per the API contract.
        unsafe { &*$p }
    }};
}

macro_rules! point {
    ($curve:expr, $p:expr) => {
        match to_point($curve, $p) {
            Ok(p) => p,
            Err(s) => return s,
        }
    };
}

fn null_out<T>(out: *mut T) -> Option<MfeStatus> {
    out.is_null().then(|| fail(MfeStatus::NullPointer, "output pointer is null"))
}

/// Message for the most recent failure on this thread; empty after a
/// success. Valid until the next call into the library on this thread.
#[no_mangle]
pub extern "C" fn mfe_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Curve from `n_roots` roots given as interleaved `(re, im)` pairs.
///
/// # Safety
/// `roots` must point to `2 * n_roots` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mfe_curve_new(roots: *const f64, n_roots: usize, out: *mut *mut MfeCurve) -> MfeStatus {
    guard(|| {
        if roots.is_null() || out.is_null() {
            return fail(MfeStatus::NullPointer, "null argument");
        }
        let flat = std::slice::from_raw_parts(roots, 2 * n_roots);
        let roots = flat.chunks_exact(2).map(|c| Complex64::new(c[0], c[1])).collect();
        match Curve::new(roots) {
            Ok(curve) => {
                out.write(Box::into_raw(Box::new(MfeCurve { curve })));
                MfeStatus::Ok
            }
            Err(e) => fail(MfeStatus::from(&e), &e.to_string()),
        }
    })
}

/// Built-in curve, `"unity6"` or `"unity8"`.
///
/// # Safety
/// `name` must be a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mfe_curve_preset(name: *const c_char, out: *mut *mut MfeCurve) -> MfeStatus {
    guard(|| {
        if name.is_null() || out.is_null() {
            return fail(MfeStatus::NullPointer, "null argument");
        }
        let Ok(name) = CStr::from_ptr(name).to_str() else {
            return fail(MfeStatus::InvalidArgument, "preset name is not UTF-8");
        };
        match Curve::preset(name) {
            Ok(curve) => {
                out.write(Box::into_raw(Box::new(MfeCurve { curve })));
                MfeStatus::Ok
            }
            Err(e) => fail(MfeStatus::from(&e), &e.to_string()),
        }
    })
}

/// # Safety
/// `curve` must be null or a handle from `mfe_curve_new`/`mfe_curve_preset`
/// that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn mfe_curve_free(curve: *mut MfeCurve) {
    if !curve.is_null() {
        drop(Box::from_raw(curve));
    }
}

/// Genus of the curve, 0 for a null handle.
///
/// # Safety
/// `curve` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn mfe_curve_genus(curve: *const MfeCurve) -> usize {
    curve.as_ref().map_or(0, |c| c.curve.genus())
}

/// Identity form of dimension `dim`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mfe_hermitian_identity(dim: usize, out: *mut *mut MfeHermitian) -> MfeStatus {
    guard(|| {
        if let Some(s) = null_out(out) {
            return s;
        }
        if dim == 0 {
            return fail(MfeStatus::InvalidArgument, "dimension must be positive");
        }
        out.write(Box::into_raw(Box::new(MfeHermitian { form: HermitianForm::identity(dim) })));
        MfeStatus::Ok
    })
}

/// Form from a row-major `dim × dim` matrix of interleaved `(re, im)` pairs.
///
/// # Safety
/// `entries` must point to `2 * dim * dim` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mfe_hermitian_new(entries: *const f64, dim: usize, out: *mut *mut MfeHermitian) -> MfeStatus {
    guard(|| {
        if entries.is_null() || out.is_null() {
            return fail(MfeStatus::NullPointer, "null argument");
        }
        if dim == 0 {
            return fail(MfeStatus::InvalidArgument, "dimension must be positive");
        }
        let flat = std::slice::from_raw_parts(entries, 2 * dim * dim);
        let rows: Vec<Vec<Complex64>> = flat
            .chunks_exact(2 * dim)
            .map(|row| row.chunks_exact(2).map(|c| Complex64::new(c[0], c[1])).collect())
            .collect();
        match HermitianForm::from_rows(&rows) {
            Ok(form) => {
                out.write(Box::into_raw(Box::new(MfeHermitian { form })));
                MfeStatus::Ok
            }
            Err(e) => fail(MfeStatus::from(&e), &e.to_string()),
        }
    })
}

/// # Safety
/// `form` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn mfe_hermitian_free(form: *mut MfeHermitian) {
    if !form.is_null() {
        drop(Box::from_raw(form));
    }
}

/// Gaussian curvature `K` at `point`.
///
/// # Safety
/// Handles must be live; `point` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn mfe_curvature(
    curve: *const MfeCurve,
    form: *const MfeHermitian,
    point: *const MfePoint,
    out: *mut f64,
) -> MfeStatus {
    guard(|| {
        let (c, h, p) = (deref!(curve), deref!(form), deref!(point));
        if let Some(s) = null_out(out) {
            return s;
        }
        let p = point!(&c.curve, p);
        from_result(metric::curvature(&c.curve, &h.form, &p), out)
    })
}

/// `u = log(−K)` at `point`.
///
/// # Safety
/// Handles must be live; `point` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn mfe_u(
    curve: *const MfeCurve,
    form: *const MfeHermitian,
    point: *const MfePoint,
    out: *mut f64,
) -> MfeStatus {
    guard(|| {
        let (c, h, p) = (deref!(curve), deref!(form), deref!(point));
        if let Some(s) = null_out(out) {
            return s;
        }
        let p = point!(&c.curve, p);
        from_result(metric::u_log_neg_k(&c.curve, &h.form, &p), out)
    })
}

/// `Φ`, the smooth part of `Δu + 6eᵘ`, at `point`.
///
/// # Safety
/// Handles must be live; `point` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn mfe_phi(
    curve: *const MfeCurve,
    form: *const MfeHermitian,
    point: *const MfePoint,
    out: *mut f64,
) -> MfeStatus {
    guard(|| {
        let (c, h, p) = (deref!(curve), deref!(form), deref!(point));
        if let Some(s) = null_out(out) {
            return s;
        }
        let p = point!(&c.curve, p);
        from_result(metric::phi(&c.curve, &h.form, &p), out)
    })
}

/// `F_P(Q)`.
///
/// # Safety
/// `curve` must be live; `p`, `q` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn mfe_f_point(
    curve: *const MfeCurve,
    p: *const MfePoint,
    q: *const MfePoint,
    out: *mut f64,
) -> MfeStatus {
    guard(|| {
        let (c, p, q) = (deref!(curve), deref!(p), deref!(q));
        if let Some(s) = null_out(out) {
            return s;
        }
        let p = point!(&c.curve, p);
        let q = point!(&c.curve, q);
        from_result(Ok(divisor::f_point(&c.curve, &p, &q)), out)
    })
}

/// `∫ K dA` over the curve with the default quadrature; `error` receives
/// the difference between refinement levels and may be null.
///
/// # Safety
/// Handles must be live; `value` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mfe_gauss_bonnet(
    curve: *const MfeCurve,
    form: *const MfeHermitian,
    value: *mut f64,
    error: *mut f64,
) -> MfeStatus {
    guard(|| {
        let (c, h) = (deref!(curve), deref!(form));
        if let Some(s) = null_out(value) {
            return s;
        }
        let spec = QuadratureSpec::for_curve(&c.curve);
        match calculus::gauss_bonnet(&c.curve, &h.form, &spec) {
            Ok(i) => {
                value.write(i.value);
                if !error.is_null() {
                    error.write(i.error);
                }
                MfeStatus::Ok
            }
            Err(e) => fail(MfeStatus::from(&e), &e.to_string()),
        }
    })
}

/// Pointwise residual of `Δu + 6eᵘ = 0` (genus 2).
///
/// # Safety
/// Handles must be live; `point` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn mfe_residual_e3(
    curve: *const MfeCurve,
    form: *const MfeHermitian,
    point: *const MfePoint,
    out: *mut f64,
) -> MfeStatus {
    guard(|| {
        let (c, h, p) = (deref!(curve), deref!(form), deref!(point));
        if let Some(s) = null_out(out) {
            return s;
        }
        let p = point!(&c.curve, p);
        from_result(mfe::residual_e3(&c.curve, &h.form, &p), out)
    })
}

/// Runs the named suite and writes its JSON report to `*json`, to be
/// released with [`mfe_string_free`]. Returns `SuiteFailed` when the report
/// does not pass; the report is written either way.
///
/// # Safety
/// Handles must be live; `suite` must be a nul-terminated string; `json`
/// must be writable.
#[no_mangle]
pub unsafe extern "C" fn mfe_verify_suite(
    curve: *const MfeCurve,
    form: *const MfeHermitian,
    suite: *const c_char,
    seed: u64,
    json: *mut *mut c_char,
) -> MfeStatus {
    guard(|| {
        let (c, h) = (deref!(curve), deref!(form));
        if suite.is_null() {
            return fail(MfeStatus::NullPointer, "suite is null");
        }
        if let Some(s) = null_out(json) {
            return s;
        }
        json.write(ptr::null_mut());
        let Ok(name) = CStr::from_ptr(suite).to_str() else {
            return fail(MfeStatus::InvalidArgument, "suite name is not UTF-8");
        };
        let suite: Suite = match name.parse() {
            Ok(s) => s,
            Err(e) => return fail(MfeStatus::InvalidArgument, &e.to_string()),
        };
        if h.form.dim() != c.curve.genus() {
            let e = Error::DimensionMismatch { expected: c.curve.genus(), actual: h.form.dim() };
            return fail(MfeStatus::from(&e), &e.to_string());
        }
        let mut cfg = RunConfig::new(c.curve.clone());
        cfg.form = h.form.clone();
        cfg.seed = seed;
        let report = suites::run_suite(suite, &cfg);
        let text = serde_json::to_string_pretty(&report).expect("report serializes");
        json.write(CString::new(text).expect("JSON has no nul bytes").into_raw());
        if report.pass {
            MfeStatus::Ok
        } else {
            fail(MfeStatus::SuiteFailed, report.error.as_deref().unwrap_or("suite failed"))
        }
    })
}

/// # Safety
/// `s` must be null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn mfe_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
