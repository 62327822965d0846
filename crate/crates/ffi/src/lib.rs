//! C ABI for kzmodp.
//!
//! Solutions are opaque handles owned by the caller and released with
//! `kzp_solution_free`. Strings returned by the library are released with
//! `kzp_string_free`. Every function returns a `KzpStatus`; on anything other
//! than `KZP_STATUS_OK` or `KZP_STATUS_CHECK_FAILED`, `kzp_last_error` gives a
//! message for the calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;

use kzmodp::construct::{exponent_data, taylor_solution_factored, ExponentData, FactoredSolution, Kappa, ProblemSpec};
use kzmodp::curves::{CurveChecker, CurveKind, SurfaceChecker};
use kzmodp::field::PrimeField;
use kzmodp::fpintegral::{power_sum, primitive_root};
use kzmodp::verify::{check_kz_factored, check_singular, CheckReport};
use kzmodp::Error;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KzpStatus {
    Ok = 0,
    /// The computation ran and the identity does not hold.
    CheckFailed = 1,
    /// Malformed arguments: bad modulus, lengths, κ divisible by p, ...
    InvalidArgument = 2,
    /// A hypothesis of the requested statement is not met.
    Precondition = 3,
    NullPointer = 4,
    Internal = 5,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KzpCurve {
    Elliptic = 0,
    Quartic = 1,
    Cubic3 = 2,
    Genus2 = 3,
    Surface = 4,
}

/// A Taylor-coefficient solution together with the problem it solves.
pub struct KzpSolution {
    spec: ProblemSpec,
    exps: ExponentData,
    sol: FactoredSolution,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let msg = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn status_of(e: &Error) -> KzpStatus {
    match e {
        Error::Precondition(_) | Error::Inapplicable(_) | Error::CoincidentPoints(_) => KzpStatus::Precondition,
        Error::Io(_) | Error::Json(_) | Error::AmbientMismatch(..) => KzpStatus::Internal,
        _ => KzpStatus::InvalidArgument,
    }
}

/// Runs `f`, turning errors and panics into a status plus the thread's last error.
fn guard(f: impl FnOnce() -> Result<KzpStatus, Error>) -> KzpStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(s)) => s,
        Ok(Err(e)) => {
            set_error(&e.to_string());
            status_of(&e)
        }
        Err(_) => {
            set_error("internal panic");
            KzpStatus::Internal
        }
    }
}

fn verdict(r: &CheckReport) -> KzpStatus {
    if r.passed {
        KzpStatus::Ok
    } else {
        if let Ok(w) = serde_json::to_string(&r.witness) {
            set_error(&format!("{} failed: {w}", r.name));
        }
        KzpStatus::CheckFailed
    }
}

unsafe fn array<'a, T>(ptr: *const T, len: usize) -> Option<&'a [T]> {
    if len == 0 {
        Some(&[])
    } else if ptr.is_null() {
        None
    } else {
        Some(slice::from_raw_parts(ptr, len))
    }
}

fn null(what: &str) -> KzpStatus {
    set_error(&format!("{what} is null"));
    KzpStatus::NullPointer
}

/// Message describing the last failure on this thread; valid until the next call
/// into the library from the same thread. Never null.
#[no_mangle]
pub extern "C" fn kzp_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Builds `I^{(l_1 p - 1, .., l_k p - 1)}(z, q)` for `κ = kappa_num / kappa_den`,
/// weights `m[0..n]`, and `q[0..k]`, `l[0..k]`. Least positive exponents are used.
///
/// # Safety
/// `m` must point to `n` values, `q` and `l` to `k` values each, and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn kzp_solve(
    p: u64,
    kappa_num: i64,
    kappa_den: i64,
    m: *const u32,
    n: usize,
    k: u32,
    q: *const i64,
    l: *const u32,
    out: *mut *mut KzpSolution,
) -> KzpStatus {
    if out.is_null() {
        return null("out");
    }
    *out = ptr::null_mut();
    let (Some(m), Some(q), Some(l)) = (array(m, n), array(q, k as usize), array(l, k as usize)) else {
        return null("m, q or l");
    };
    guard(|| {
        let spec = ProblemSpec::new(p, Kappa::new(kappa_num, kappa_den)?, m.to_vec(), k, q, l)?;
        let exps = exponent_data(&spec, None)?;
        let sol = taylor_solution_factored(&spec, &exps)?;
        *out = Box::into_raw(Box::new(KzpSolution { spec, exps, sol }));
        Ok(KzpStatus::Ok)
    })
}

/// # Safety
/// `sol` must come from `kzp_solve` and not have been freed; null is ignored.
#[no_mangle]
pub unsafe extern "C" fn kzp_solution_free(sol: *mut KzpSolution) {
    if !sol.is_null() {
        drop(Box::from_raw(sol));
    }
}

/// Dimension of the weight space the solution lives in.
///
/// # Safety
/// `sol` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn kzp_solution_dim(sol: *const KzpSolution, out: *mut usize) -> KzpStatus {
    if sol.is_null() || out.is_null() {
        return null("sol or out");
    }
    *out = (*sol).spec.weights().basis().len();
    KzpStatus::Ok
}

/// `true` when every coordinate vanishes.
///
/// # Safety
/// `sol` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn kzp_solution_is_zero(sol: *const KzpSolution, out: *mut bool) -> KzpStatus {
    if sol.is_null() || out.is_null() {
        return null("sol or out");
    }
    *out = (*sol).sol.reduced.is_zero();
    KzpStatus::Ok
}

/// WeightVector JSON of the solution; with `expanded` false, the coordinates
/// without the `Π (z_a - z_b)^{M_ab}` factor plus a `prefactor` array of exponents.
///
/// # Safety
/// `sol` must be a live handle and `out` writable; release the string with `kzp_string_free`.
#[no_mangle]
pub unsafe extern "C" fn kzp_solution_to_json(sol: *const KzpSolution, expanded: bool, out: *mut *mut c_char) -> KzpStatus {
    if sol.is_null() || out.is_null() {
        return null("sol or out");
    }
    *out = ptr::null_mut();
    let s = &*sol;
    guard(|| {
        let mut v = if expanded {
            serde_json::to_value(s.sol.expand()?)?
        } else {
            let mut v = serde_json::to_value(&s.sol.reduced)?;
            v["prefactor"] = serde_json::to_value(&s.sol.prefactor)?;
            v
        };
        v["provenance"] = serde_json::to_value(kzmodp::construct::Provenance::new(&s.spec, &s.exps))?;
        let text = CString::new(v.to_string()).map_err(|e| Error::Parse(e.to_string()))?;
        *out = text.into_raw();
        Ok(KzpStatus::Ok)
    })
}

/// # Safety
/// `s` must come from this library; null is ignored.
#[no_mangle]
pub unsafe extern "C" fn kzp_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// `KZP_STATUS_OK` when the solution satisfies the KZ equations.
///
/// # Safety
/// `sol` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn kzp_check_kz(sol: *const KzpSolution) -> KzpStatus {
    if sol.is_null() {
        return null("sol");
    }
    let s = &*sol;
    guard(|| Ok(verdict(&check_kz_factored(&s.sol, &s.spec)?)))
}

/// `KZP_STATUS_OK` when `e` annihilates the solution.
///
/// # Safety
/// `sol` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn kzp_check_singular(sol: *const KzpSolution) -> KzpStatus {
    if sol.is_null() {
        return null("sol");
    }
    let s = &*sol;
    guard(|| Ok(verdict(&check_singular(&s.sol.reduced)?)))
}

/// `Σ_{x ∈ F_p} x^i`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn kzp_power_sum(p: u64, i: u64, out: *mut u64) -> KzpStatus {
    if out.is_null() {
        return null("out");
    }
    guard(|| {
        *out = power_sum(PrimeField::new(p)?, i);
        Ok(KzpStatus::Ok)
    })
}

/// Smallest generator of `F_p^×`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn kzp_primitive_root(p: u64, out: *mut u64) -> KzpStatus {
    if out.is_null() {
        return null("out");
    }
    guard(|| {
        *out = primitive_root(PrimeField::new(p)?);
        Ok(KzpStatus::Ok)
    })
}

/// Point-sum identity at branch points `x[0..len]` (2 for the surface, 4 for the
/// quartic, 3 otherwise).
///
/// # Safety
/// `x` must point to `len` values.
#[no_mangle]
pub unsafe extern "C" fn kzp_curve_check(kind: KzpCurve, p: u64, x: *const u64, len: usize) -> KzpStatus {
    let Some(x) = array(x, len) else {
        return null("x");
    };
    guard(|| {
        let kind = match kind {
            KzpCurve::Elliptic => CurveKind::Elliptic,
            KzpCurve::Quartic => CurveKind::Quartic,
            KzpCurve::Cubic3 => CurveKind::Cubic3,
            KzpCurve::Genus2 => CurveKind::Genus2,
            KzpCurve::Surface => {
                if x.len() != 2 {
                    return Err(Error::LengthMismatch { expected: 2, got: x.len() });
                }
                return Ok(verdict(&SurfaceChecker::new(p)?.check(x[0], x[1])?));
            }
        };
        Ok(verdict(&CurveChecker::new(kind, p)?.check(x)?))
    })
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn kzp_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
