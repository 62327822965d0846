use std::ffi::CStr;
use std::path::Path;
use std::process::Command;
use std::ptr;

use kzmodp_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(kzp_last_error()) }.to_string_lossy().into_owned()
}

unsafe fn solve(p: u64, num: i64, den: i64, m: &[u32], q: &[i64], l: &[u32]) -> (KzpStatus, *mut KzpSolution) {
    let mut out = ptr::null_mut();
    let s = kzp_solve(p, num, den, m.as_ptr(), m.len(), q.len() as u32, q.as_ptr(), l.as_ptr(), &mut out);
    (s, out)
}

#[test]
fn solve_check_and_serialize() {
    unsafe {
        let (s, sol) = solve(3, 4, 1, &[2, 2], &[0, 0], &[1, 1]);
        assert_eq!(s, KzpStatus::Ok);
        assert!(!sol.is_null());
        let mut dim = 0;
        assert_eq!(kzp_solution_dim(sol, &mut dim), KzpStatus::Ok);
        assert_eq!(dim, 3);
        let mut zero = true;
        assert_eq!(kzp_solution_is_zero(sol, &mut zero), KzpStatus::Ok);
        assert!(!zero);
        assert_eq!(kzp_check_kz(sol), KzpStatus::Ok);
        assert_eq!(kzp_check_singular(sol), KzpStatus::Ok);

        let mut text = ptr::null_mut();
        assert_eq!(kzp_solution_to_json(sol, true, &mut text), KzpStatus::Ok);
        let v: serde_json::Value = serde_json::from_str(CStr::from_ptr(text).to_str().unwrap()).unwrap();
        assert_eq!(v["provenance"]["p"], 3);
        assert_eq!(v["coords"].as_array().unwrap().len(), 3);
        kzp_string_free(text);

        assert_eq!(kzp_solution_to_json(sol, false, &mut text), KzpStatus::Ok);
        let v: serde_json::Value = serde_json::from_str(CStr::from_ptr(text).to_str().unwrap()).unwrap();
        assert_eq!(v["prefactor"], serde_json::json!([2]));
        kzp_string_free(text);
        kzp_solution_free(sol);
    }
}

#[test]
fn invalid_problems_report_errors() {
    unsafe {
        let (s, sol) = solve(3, 3, 1, &[1, 1], &[0], &[1]);
        assert_eq!(s, KzpStatus::InvalidArgument);
        assert!(sol.is_null());
        assert!(last_error().contains("divides"), "{}", last_error());

        let (s, _) = solve(9, 2, 1, &[1, 1], &[0], &[1]);
        assert_eq!(s, KzpStatus::InvalidArgument);

        let mut out = ptr::null_mut();
        let m = [1u32, 1];
        let s = kzp_solve(5, 2, 1, m.as_ptr(), 2, 1, ptr::null(), ptr::null(), &mut out);
        assert_eq!(s, KzpStatus::NullPointer);
        assert_eq!(kzp_check_kz(ptr::null()), KzpStatus::NullPointer);
        kzp_solution_free(ptr::null_mut());
        kzp_string_free(ptr::null_mut());
    }
}

#[test]
fn scalar_helpers() {
    unsafe {
        let mut v = 0;
        assert_eq!(kzp_power_sum(7, 6, &mut v), KzpStatus::Ok);
        assert_eq!(v, 6);
        assert_eq!(kzp_power_sum(7, 0, &mut v), KzpStatus::Ok);
        assert_eq!(v, 0);
        assert_eq!(kzp_primitive_root(7, &mut v), KzpStatus::Ok);
        assert_eq!(v, 3);
        assert_eq!(kzp_primitive_root(8, &mut v), KzpStatus::InvalidArgument);
        assert!(!CStr::from_ptr(kzp_version()).to_bytes().is_empty());
    }
}

#[test]
fn curve_checks() {
    unsafe {
        let x = [0u64, 1, 3];
        assert_eq!(kzp_curve_check(KzpCurve::Elliptic, 7, x.as_ptr(), 3), KzpStatus::Ok);
        assert_eq!(kzp_curve_check(KzpCurve::Genus2, 13, x.as_ptr(), 3), KzpStatus::Ok);
        assert_eq!(kzp_curve_check(KzpCurve::Cubic3, 5, x.as_ptr(), 3), KzpStatus::Precondition);
        assert_eq!(kzp_curve_check(KzpCurve::Elliptic, 3, [0u64, 1, 2].as_ptr(), 3), KzpStatus::Precondition);
        assert_eq!(kzp_curve_check(KzpCurve::Surface, 11, [2u64, 9].as_ptr(), 2), KzpStatus::Ok);
        assert_eq!(kzp_curve_check(KzpCurve::Surface, 11, x.as_ptr(), 3), KzpStatus::InvalidArgument);
    }
}

/// The generated header compiles as C and as C++ when a compiler is present.
#[test]
fn header_compiles() {
    let header = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/kzmodp.h");
    assert!(header.exists());
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("use.c");
    std::fs::write(
        &src,
        "#include \"kzmodp.h\"\nint main(void) { KzpSolution *s = 0; kzp_solution_free(s); return KZP_STATUS_OK; }\n",
    )
    .unwrap();
    let include = header.parent().unwrap();
    for (cc, lang) in [("cc", "c"), ("c++", "c++")] {
        let status = Command::new(cc)
            .args(["-fsyntax-only", "-Wall", "-Werror", "-x", lang, "-I"])
            .arg(include)
            .arg(&src)
            .status();
        match status {
            Ok(s) => assert!(s.success(), "{cc} rejected the header"),
            Err(_) => eprintln!("{cc} not found; skipping"),
        }
    }
}
