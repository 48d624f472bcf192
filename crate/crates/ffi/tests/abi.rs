use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use mfe_lab_ffi::*;

struct Handles {
    curve: *mut MfeCurve,
    form: *mut MfeHermitian,
}

impl Handles {
    fn preset(name: &str) -> Self {
        let name = CString::new(name).unwrap();
        let mut curve = ptr::null_mut();
        let mut form = ptr::null_mut();
        unsafe {
            assert_eq!(mfe_curve_preset(name.as_ptr(), &mut curve), MfeStatus::Ok);
            assert_eq!(mfe_hermitian_identity(mfe_curve_genus(curve), &mut form), MfeStatus::Ok);
        }
        Handles { curve, form }
    }
}

impl Drop for Handles {
    fn drop(&mut self) {
        unsafe {
            mfe_hermitian_free(self.form);
            mfe_curve_free(self.curve);
        }
    }
}

fn affine(re: f64, im: f64, sheet: i32) -> MfePoint {
    MfePoint { x_re: re, x_im: im, sheet, infinity: 0 }
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(mfe_last_error()) }.to_string_lossy().into_owned()
}

#[test]
fn curvature_and_u_at_the_origin() {
    let h = Handles::preset("unity6");
    let (mut k, mut u) = (0.0, 0.0);
    unsafe {
        assert_eq!(mfe_curvature(h.curve, h.form, &affine(0.0, 0.0, 1), &mut k), MfeStatus::Ok);
        assert_eq!(mfe_u(h.curve, h.form, &affine(0.0, 0.0, -1), &mut u), MfeStatus::Ok);
    }
    assert!((k + 2.0).abs() < 1e-12);
    assert!((u - 2f64.ln()).abs() < 1e-12);
    assert_eq!(last_error(), "");
}

#[test]
fn points_at_infinity() {
    let h = Handles::preset("unity6");
    let mut k = 0.0;
    let inf = MfePoint { x_re: f64::NAN, x_im: f64::NAN, sheet: -1, infinity: 1 };
    unsafe {
        assert_eq!(mfe_curvature(h.curve, h.form, &inf, &mut k), MfeStatus::Ok);
    }
    assert!(k < 0.0);
}

#[test]
fn error_codes_and_messages() {
    let h = Handles::preset("unity6");
    let mut v = 0.0;
    unsafe {
        assert_eq!(mfe_u(h.curve, h.form, &affine(1.0, 0.0, 1), &mut v), MfeStatus::AtSingularSupport);
        assert!(!last_error().is_empty());
        assert_eq!(mfe_curvature(ptr::null(), h.form, &affine(0.0, 0.0, 1), &mut v), MfeStatus::NullPointer);
        assert_eq!(mfe_curvature(h.curve, h.form, &affine(0.0, 0.0, 1), ptr::null_mut()), MfeStatus::NullPointer);
        assert_eq!(
            mfe_curvature(h.curve, h.form, &affine(f64::NAN, 0.0, 1), &mut v),
            MfeStatus::InvalidArgument
        );

        let mut curve = ptr::null_mut();
        let four = [1.0, 0.0, -1.0, 0.0, 0.0, 1.0, 0.0, -1.0];
        assert_eq!(mfe_curve_new(four.as_ptr(), 4, &mut curve), MfeStatus::BadDegree);
        let unknown = CString::new("unity7").unwrap();
        assert_eq!(mfe_curve_preset(unknown.as_ptr(), &mut curve), MfeStatus::InvalidArgument);
        assert!(curve.is_null());

        let mut form = ptr::null_mut();
        let not_hermitian = [1.0, 0.0, 0.0, 1.0, 0.0, 1.0, 1.0, 0.0];
        assert_eq!(mfe_hermitian_new(not_hermitian.as_ptr(), 2, &mut form), MfeStatus::BadHermitian);

        let g3 = Handles::preset("unity8");
        assert_eq!(mfe_residual_e3(g3.curve, g3.form, &affine(0.0, 0.0, 1), &mut v), MfeStatus::WrongGenus);
        assert_eq!(mfe_curvature(g3.curve, h.form, &affine(0.0, 0.0, 1), &mut v), MfeStatus::DimensionMismatch);
    }
}

#[test]
fn roots_and_custom_forms() {
    let roots = [1.0, 0.0, -1.0, 0.0, 0.0, 1.0, 0.0, -1.0, 2.0, 0.5, -2.0, 0.25];
    let entries = [2.0, 0.0, 0.5, 0.5, 0.5, -0.5, 1.0, 0.0];
    let mut curve = ptr::null_mut();
    let mut form = ptr::null_mut();
    let mut r = 1.0;
    unsafe {
        assert_eq!(mfe_curve_new(roots.as_ptr(), 6, &mut curve), MfeStatus::Ok);
        assert_eq!(mfe_hermitian_new(entries.as_ptr(), 2, &mut form), MfeStatus::Ok);
        assert_eq!(mfe_residual_e3(curve, form, &affine(0.3, 0.2, 1), &mut r), MfeStatus::Ok);
        mfe_hermitian_free(form);
        mfe_curve_free(curve);
    }
    assert!(r.abs() < 1e-4, "residual {r}");
}

#[test]
fn f_point_is_involution_invariant() {
    let h = Handles::preset("unity6");
    let p = affine(0.3, 0.1, 1);
    let (mut a, mut b) = (0.0, 0.0);
    unsafe {
        assert_eq!(mfe_f_point(h.curve, &p, &affine(0.5, -0.2, 1), &mut a), MfeStatus::Ok);
        assert_eq!(mfe_f_point(h.curve, &p, &affine(0.5, -0.2, -1), &mut b), MfeStatus::Ok);
    }
    assert_eq!(a, b);
}

#[test]
fn gauss_bonnet_and_phi() {
    let h = Handles::preset("unity6");
    let (mut total, mut err, mut phi) = (0.0, 0.0, 1.0);
    unsafe {
        assert_eq!(mfe_gauss_bonnet(h.curve, h.form, &mut total, &mut err), MfeStatus::Ok);
        assert_eq!(mfe_phi(h.curve, h.form, &affine(0.2, 0.1, 1), &mut phi), MfeStatus::Ok);
    }
    let expected = -4.0 * std::f64::consts::PI;
    assert!((total - expected).abs() < 1e-3 * expected.abs());
    assert!(err >= 0.0);
    assert!(phi.abs() < 1e-4);
}

#[test]
fn verify_suite_json() {
    let h = Handles::preset("unity6");
    let suite = CString::new("effalg-selftest").unwrap();
    let mut json = ptr::null_mut();
    unsafe {
        assert_eq!(mfe_verify_suite(h.curve, h.form, suite.as_ptr(), 3, &mut json), MfeStatus::Ok);
        let text = CStr::from_ptr(json).to_str().unwrap().to_owned();
        mfe_string_free(json);
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["pass"], true);
        assert_eq!(v["equation"], "EFFALG");

        let bogus = CString::new("nope").unwrap();
        assert_eq!(mfe_verify_suite(h.curve, h.form, bogus.as_ptr(), 0, &mut json), MfeStatus::InvalidArgument);
        assert!(json.is_null());
    }
}

#[test]
fn failing_suite_still_returns_a_report() {
    let h = Handles::preset("unity8");
    let suite = CString::new("e3").unwrap();
    let mut json = ptr::null_mut();
    unsafe {
        assert_eq!(mfe_verify_suite(h.curve, h.form, suite.as_ptr(), 0, &mut json), MfeStatus::SuiteFailed);
        assert!(!json.is_null());
        let v: serde_json::Value = serde_json::from_str(CStr::from_ptr(json).to_str().unwrap()).unwrap();
        mfe_string_free(json);
        assert_eq!(v["pass"], false);
        assert!(v["error"].is_string());
    }
}

#[test]
fn header_declares_every_export() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/mfe_lab.h")).unwrap();
    for name in [
        "mfe_last_error",
        "mfe_curve_new",
        "mfe_curve_preset",
        "mfe_curve_free",
        "mfe_curve_genus",
        "mfe_hermitian_identity",
        "mfe_hermitian_new",
        "mfe_hermitian_free",
        "mfe_curvature",
        "mfe_u",
        "mfe_phi",
        "mfe_f_point",
        "mfe_gauss_bonnet",
        "mfe_residual_e3",
        "mfe_verify_suite",
        "mfe_string_free",
        "typedef struct MfeCurve MfeCurve",
        "MFE_STATUS_SUITE_FAILED = 15",
    ] {
        assert!(header.contains(name), "header lacks {name}");
    }
}

#[test]
fn c_program_links_against_the_static_library() {
    let profile_dir = std::env::current_exe().unwrap().parent().unwrap().parent().unwrap().to_path_buf();
    let lib = profile_dir.join("libmfe_lab_ffi.a");
    assert!(lib.exists(), "missing {}", lib.display());
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let exe = tempfile::tempdir().unwrap();
    let bin = exe.path().join("smoke");
    let status = Command::new("cc")
        .arg(manifest.join("tests/c/smoke.c"))
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .status()
        .expect("C compiler available");
    assert!(status.success());
    let out = Command::new(&bin).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "ok");
}
