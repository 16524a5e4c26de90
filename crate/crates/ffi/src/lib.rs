//! C ABI for freelin.
//!
//! Objects are opaque handles created by `*_parse` / `*_from_json` and
//! released by the matching `*_free`. Every fallible call returns a
//! [`FreelinStatus`]; on failure [`freelin_last_error`] describes it.
//! Strings returned through out-parameters are owned by the caller and must
//! be released with [`freelin_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use freelin::algebra::{Field, FreePoly, Scalar};
use freelin::differentials::{jacobian, jacobian_invert_bounded, JacobianInversion};
use freelin::endomorphism::{self, compose, Endo, InversionStatus};
use freelin::parse::parse_poly;
use freelin::torus::{average_linearize, validate_action, ActionSpec};
use freelin::Error;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FreelinStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidInput = 3,
    TermLimit = 4,
    /// A computation ran but its mathematical precondition failed.
    Computation = 5,
    Panic = 6,
}

/// Outcome of [`freelin_endo_invert`].
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FreelinInversion {
    Exact = 0,
    Truncated = 1,
    NotInvertible = 2,
    Inconclusive = 3,
}

/// Outcome of [`freelin_endo_jacobian_invertible`].
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FreelinJacobian {
    Invertible = 0,
    NotInvertibleAtCutoff = 1,
    Inconclusive = 2,
}

/// A free polynomial over Q or a prime field.
pub struct FreelinPoly {
    inner: FreePoly<Scalar>,
}

/// An endomorphism of a free algebra.
pub struct FreelinEndo {
    inner: Endo<Scalar>,
}

/// A torus action on a free algebra.
pub struct FreelinAction {
    inner: ActionSpec,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

struct Failure(FreelinStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::InvalidInput(_) | Error::Json(_) => FreelinStatus::InvalidInput,
            Error::TermLimitExceeded(_) => FreelinStatus::TermLimit,
            _ => FreelinStatus::Computation,
        };
        Failure(status, e.to_string())
    }
}

type Outcome = Result<(), Failure>;

fn guard(f: impl FnOnce() -> Outcome) -> FreelinStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            FreelinStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            FreelinStatus::Panic
        }
    }
}

fn null(what: &str) -> Failure {
    Failure(FreelinStatus::NullPointer, format!("{what} is null"))
}

unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(FreelinStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn put<T>(out: *mut *mut T, value: T) -> Outcome {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> Outcome {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    let c = CString::new(s).map_err(|_| Failure(FreelinStatus::Panic, "string contains NUL".into()))?;
    *out = c.into_raw();
    Ok(())
}

unsafe fn put_value<T>(out: *mut T, value: T) -> Outcome {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    *out = value;
    Ok(())
}

fn parse_field(s: &str) -> Result<Field, Failure> {
    Ok(Field::parse(s)?)
}

/// Message for the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn freelin_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn freelin_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses `text` as a polynomial in z1..zn over `field` ("Q" or "Fp:<p>").
///
/// # Safety
/// String arguments must be NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn freelin_poly_parse(
    text: *const c_char,
    field: *const c_char,
    n: usize,
    out: *mut *mut FreelinPoly,
) -> FreelinStatus {
    guard(|| {
        let f = parse_field(read_str(field, "field")?)?;
        let inner = parse_poly(read_str(text, "text")?, f, n)?;
        put(out, FreelinPoly { inner })
    })
}

/// # Safety
/// `a` and `b` must be live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn freelin_poly_mul(
    a: *const FreelinPoly,
    b: *const FreelinPoly,
    out: *mut *mut FreelinPoly,
) -> FreelinStatus {
    guard(|| {
        let (a, b) = (&handle(a, "a")?.inner, &handle(b, "b")?.inner);
        if a.n() != b.n() || a.ring() != b.ring() {
            return Err(Failure(FreelinStatus::InvalidInput, "polynomials live in different algebras".into()));
        }
        put(out, FreelinPoly { inner: a * b })
    })
}

/// # Safety
/// `a` and `b` must be live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn freelin_poly_add(
    a: *const FreelinPoly,
    b: *const FreelinPoly,
    out: *mut *mut FreelinPoly,
) -> FreelinStatus {
    guard(|| {
        let (a, b) = (&handle(a, "a")?.inner, &handle(b, "b")?.inner);
        if a.n() != b.n() || a.ring() != b.ring() {
            return Err(Failure(FreelinStatus::InvalidInput, "polynomials live in different algebras".into()));
        }
        put(out, FreelinPoly { inner: a + b })
    })
}

/// # Safety
/// `p` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn freelin_poly_to_string(p: *const FreelinPoly, out: *mut *mut c_char) -> FreelinStatus {
    guard(|| put_string(out, handle(p, "poly")?.inner.to_string()))
}

/// # Safety
/// `p` must come from this library and not have been freed. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn freelin_poly_free(p: *mut FreelinPoly) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Reads `{"field", "n", "images"}`.
///
/// # Safety
/// `json` must be NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn freelin_endo_from_json(json: *const c_char, out: *mut *mut FreelinEndo) -> FreelinStatus {
    guard(|| {
        let v: serde_json::Value = serde_json::from_str(read_str(json, "json")?).map_err(Error::from)?;
        put(out, FreelinEndo { inner: freelin::json::endo_from_json(&v, "")? })
    })
}

/// # Safety
/// `e` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn freelin_endo_to_json(e: *const FreelinEndo, out: *mut *mut c_char) -> FreelinStatus {
    guard(|| put_string(out, freelin::json::endo_to_json(&handle(e, "endo")?.inner).to_string()))
}

/// The composite whose i-th image is ψᵢ with zⱼ replaced by φⱼ.
///
/// # Safety
/// `phi` and `psi` must be live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn freelin_endo_compose(
    phi: *const FreelinEndo,
    psi: *const FreelinEndo,
    out: *mut *mut FreelinEndo,
) -> FreelinStatus {
    guard(|| {
        let inner = compose(&handle(phi, "phi")?.inner, &handle(psi, "psi")?.inner)?;
        put(out, FreelinEndo { inner })
    })
}

/// Bounded inversion. `cutoff` 0 selects the default escalation. `inverse`
/// may be null; otherwise it receives the candidate inverse, or null when
/// there is none.
///
/// # Safety
/// `e` must be a live handle; `status` must be writable.
#[no_mangle]
pub unsafe extern "C" fn freelin_endo_invert(
    e: *const FreelinEndo,
    cutoff: usize,
    status: *mut FreelinInversion,
    inverse: *mut *mut FreelinEndo,
) -> FreelinStatus {
    guard(|| {
        let e = &handle(e, "endo")?.inner;
        let report = if cutoff == 0 {
            endomorphism::invert(e)?
        } else {
            endomorphism::invert_truncated(e, cutoff)?
        };
        let s = match report.status {
            InversionStatus::Exact => FreelinInversion::Exact,
            InversionStatus::TruncatedAt(_) => FreelinInversion::Truncated,
            InversionStatus::NotInvertible => FreelinInversion::NotInvertible,
            InversionStatus::Inconclusive => FreelinInversion::Inconclusive,
        };
        put_value(status, s)?;
        if !inverse.is_null() {
            match report.inverse {
                Some(inner) => put(inverse, FreelinEndo { inner })?,
                None => *inverse = ptr::null_mut(),
            }
        }
        Ok(())
    })
}

/// Whether the Jacobian matrix has an inverse with entries of degree at
/// most `cutoff`.
///
/// # Safety
/// `e` must be a live handle; `result` must be writable.
#[no_mangle]
pub unsafe extern "C" fn freelin_endo_jacobian_invertible(
    e: *const FreelinEndo,
    cutoff: usize,
    result: *mut FreelinJacobian,
) -> FreelinStatus {
    guard(|| {
        let (status, _) = jacobian_invert_bounded(&jacobian(&handle(e, "endo")?.inner), cutoff)?;
        let r = match status {
            JacobianInversion::Invertible => FreelinJacobian::Invertible,
            JacobianInversion::NotInvertibleAtCutoff => FreelinJacobian::NotInvertibleAtCutoff,
            JacobianInversion::Inconclusive => FreelinJacobian::Inconclusive,
        };
        put_value(result, r)
    })
}

/// # Safety
/// `e` must come from this library and not have been freed. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn freelin_endo_free(e: *mut FreelinEndo) {
    if !e.is_null() {
        drop(Box::from_raw(e));
    }
}

/// Reads `{"field", "n", "r", "images"}`.
///
/// # Safety
/// `json` must be NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn freelin_action_from_json(
    json: *const c_char,
    out: *mut *mut FreelinAction,
) -> FreelinStatus {
    guard(|| {
        let v: serde_json::Value = serde_json::from_str(read_str(json, "json")?).map_err(Error::from)?;
        put(out, FreelinAction { inner: freelin::json::action_from_json(&v, "")? })
    })
}

/// Checks the action axioms; `valid` receives 1 or 0.
///
/// # Safety
/// `a` must be a live handle; `valid` must be writable.
#[no_mangle]
pub unsafe extern "C" fn freelin_action_validate(a: *const FreelinAction, valid: *mut i32) -> FreelinStatus {
    guard(|| put_value(valid, validate_action(&handle(a, "action")?.inner)? as i32))
}

/// Runs the averaging linearization and returns its report as JSON.
///
/// # Safety
/// `a` must be a live handle; `report` must be writable.
#[no_mangle]
pub unsafe extern "C" fn freelin_action_linearize(a: *const FreelinAction, report: *mut *mut c_char) -> FreelinStatus {
    guard(|| {
        let r = average_linearize(&handle(a, "action")?.inner)?;
        put_string(report, freelin::json::linearization_report_to_json(&r).to_string())
    })
}

/// # Safety
/// `a` must come from this library and not have been freed. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn freelin_action_free(a: *mut FreelinAction) {
    if !a.is_null() {
        drop(Box::from_raw(a));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(s: &str) -> CString {
        CString::new(s).unwrap()
    }

    unsafe fn take(s: *mut c_char) -> String {
        let out = CStr::from_ptr(s).to_str().unwrap().to_owned();
        freelin_string_free(s);
        out
    }

    unsafe fn last_error() -> String {
        CStr::from_ptr(freelin_last_error()).to_str().unwrap().to_owned()
    }

    #[test]
    fn polynomials() {
        unsafe {
            let (mut a, mut b, mut p) = (ptr::null_mut(), ptr::null_mut(), ptr::null_mut());
            assert_eq!(freelin_poly_parse(c("z1 + z2").as_ptr(), c("Q").as_ptr(), 2, &mut a), FreelinStatus::Ok);
            assert_eq!(freelin_poly_parse(c("z1 - z2").as_ptr(), c("Q").as_ptr(), 2, &mut b), FreelinStatus::Ok);
            assert_eq!(freelin_poly_mul(a, b, &mut p), FreelinStatus::Ok);
            let mut s = ptr::null_mut();
            assert_eq!(freelin_poly_to_string(p, &mut s), FreelinStatus::Ok);
            // (z1 + z2)(z1 − z2) keeps z2 z1 and z1 z2 apart
            assert_eq!(take(s), "(1)*z1^2 + (-1)*z1*z2 + (1)*z2*z1 + (-1)*z2^2");
            let mut sum = ptr::null_mut();
            assert_eq!(freelin_poly_add(a, b, &mut sum), FreelinStatus::Ok);
            assert_eq!(freelin_poly_to_string(sum, &mut s), FreelinStatus::Ok);
            assert_eq!(take(s), "(2)*z1");
            for h in [a, b, p, sum] {
                freelin_poly_free(h);
            }
        }
    }

    #[test]
    fn errors_are_reported() {
        unsafe {
            let mut p = ptr::null_mut();
            let st = freelin_poly_parse(c("z3").as_ptr(), c("Q").as_ptr(), 2, &mut p);
            assert_eq!(st, FreelinStatus::InvalidInput);
            assert!(p.is_null());
            assert!(!last_error().is_empty());
            assert_eq!(freelin_poly_parse(ptr::null(), c("Q").as_ptr(), 2, &mut p), FreelinStatus::NullPointer);
            assert_eq!(freelin_poly_parse(c("z1").as_ptr(), c("Fp:4").as_ptr(), 1, &mut p), FreelinStatus::InvalidInput);
            assert_eq!(freelin_poly_parse(c("z1").as_ptr(), c("Q").as_ptr(), 1, &mut p), FreelinStatus::Ok);
            assert_eq!(last_error(), "");
            freelin_poly_free(p);
            freelin_poly_free(ptr::null_mut());
        }
    }

    #[test]
    fn endomorphisms() {
        unsafe {
            let mut e = ptr::null_mut();
            let text = c(r#"{"field": "Q", "n": 2, "images": ["z1 + z2^2", "z2"]}"#);
            assert_eq!(freelin_endo_from_json(text.as_ptr(), &mut e), FreelinStatus::Ok);
            let (mut status, mut inv) = (FreelinInversion::Inconclusive, ptr::null_mut());
            assert_eq!(freelin_endo_invert(e, 0, &mut status, &mut inv), FreelinStatus::Ok);
            assert_eq!(status, FreelinInversion::Exact);
            let mut id = ptr::null_mut();
            assert_eq!(freelin_endo_compose(e, inv, &mut id), FreelinStatus::Ok);
            assert!((*id).inner.is_identity());
            let mut j = FreelinJacobian::Inconclusive;
            assert_eq!(freelin_endo_jacobian_invertible(e, 2, &mut j), FreelinStatus::Ok);
            assert_eq!(j, FreelinJacobian::Invertible);
            let mut s = ptr::null_mut();
            assert_eq!(freelin_endo_to_json(inv, &mut s), FreelinStatus::Ok);
            let v: serde_json::Value = serde_json::from_str(&take(s)).unwrap();
            assert_eq!(v["n"], 2);
            for h in [e, inv, id] {
                freelin_endo_free(h);
            }

            let sq = c(r#"{"field": "Q", "n": 1, "images": ["z1^2"]}"#);
            assert_eq!(freelin_endo_from_json(sq.as_ptr(), &mut e), FreelinStatus::Ok);
            assert_eq!(freelin_endo_invert(e, 4, &mut status, ptr::null_mut()), FreelinStatus::Ok);
            assert_eq!(status, FreelinInversion::NotInvertible);
            assert_eq!(freelin_endo_jacobian_invertible(e, 4, &mut j), FreelinStatus::Ok);
            assert_eq!(j, FreelinJacobian::NotInvertibleAtCutoff);
            freelin_endo_free(e);
        }
    }

    #[test]
    fn actions() {
        unsafe {
            let mut a = ptr::null_mut();
            let text = c(r#"{"field": "Q", "n": 2, "r": 1, "images": ["t*z1", "t^3*z2 + (t^2 - t^3)*z1^2"]}"#);
            assert_eq!(freelin_action_from_json(text.as_ptr(), &mut a), FreelinStatus::Ok);
            let mut valid = -1;
            assert_eq!(freelin_action_validate(a, &mut valid), FreelinStatus::Ok);
            assert_eq!(valid, 1);
            let mut s = ptr::null_mut();
            assert_eq!(freelin_action_linearize(a, &mut s), FreelinStatus::Ok);
            let v: serde_json::Value = serde_json::from_str(&take(s)).unwrap();
            assert_eq!(v["status"], "Verified");
            freelin_action_free(a);

            let bad = c(r#"{"field": "Q", "n": 2, "r": 1, "images": ["t*z1"]}"#);
            assert_eq!(freelin_action_from_json(bad.as_ptr(), &mut a), FreelinStatus::InvalidInput);
            assert_eq!(freelin_action_validate(ptr::null(), &mut valid), FreelinStatus::NullPointer);
        }
    }
}
