//! C ABI over the singlift library.
//!
//! Objects are opaque handles created by `sl_*` constructors and released
//! with the matching `_free`. Every fallible call returns an [`SlStatus`];
//! on failure [`sl_last_error`] describes what went wrong on the calling
//! thread. Strings returned by the library are owned by the caller and must
//! be released with [`sl_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use singlift::classical::{delta, eisenstein, weakly_holomorphic};
use singlift::cli::{parse_int_list, parse_principal};
use singlift::hilbert::{decompose_lift, CertifiedDecomposition, PipelineConfig};
use singlift::lift::{lift_unimodular, LiftExpansion};
use singlift::opcalc::run_suite;
use singlift::{Error, PowerSeries};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SlStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    InvalidWeight = 3,
    Unsolvable = 4,
    OddM = 5,
    CertificationFailed = 6,
    ComputationFailed = 7,
    VerificationFailed = 8,
    OutOfRange = 9,
    Panic = 10,
}

/// A truncated q-expansion.
pub struct SlSeries(PowerSeries);

/// Fourier expansion of the unimodular lift.
pub struct SlLift(LiftExpansion);

/// A certified tensor decomposition.
pub struct SlDecomposition(CertifiedDecomposition);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> SlStatus {
    match e {
        Error::InvalidWeight(_) => SlStatus::InvalidWeight,
        Error::Unsolvable(_) => SlStatus::Unsolvable,
        Error::OddM(_) | Error::NegativeM(_) => SlStatus::OddM,
        Error::CertificationMismatch(_) | Error::ReconstructionMismatch(..) => SlStatus::CertificationFailed,
        _ => SlStatus::ComputationFailed,
    }
}

struct Fail(SlStatus, String);

type FfiResult<T> = Result<T, Fail>;

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn invalid<T>(msg: impl Into<String>) -> FfiResult<T> {
    Err(Fail(SlStatus::InvalidArgument, msg.into()))
}

/// Runs `f`, converting errors and panics into a status code.
fn guard(f: impl FnOnce() -> FfiResult<()>) -> SlStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            SlStatus::Ok
        }
        Ok(Err(Fail(s, msg))) => {
            set_error(&msg);
            s
        }
        Err(p) => {
            let msg = p.downcast_ref::<&str>().map(|s| s.to_string()).or_else(|| p.downcast_ref::<String>().cloned());
            set_error(&format!("internal panic: {}", msg.unwrap_or_default()));
            SlStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, name: &str) -> FfiResult<&'a str> {
    if p.is_null() {
        return Err(Fail(SlStatus::NullPointer, format!("{name} is null")));
    }
    CStr::from_ptr(p).to_str().or_else(|_| invalid(format!("{name} is not UTF-8")))
}

unsafe fn put<T>(out: *mut *mut T, v: T) -> FfiResult<()> {
    if out.is_null() {
        return Err(Fail(SlStatus::NullPointer, "output pointer is null".into()));
    }
    *out = Box::into_raw(Box::new(v));
    Ok(())
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> FfiResult<()> {
    if out.is_null() {
        return Err(Fail(SlStatus::NullPointer, "output pointer is null".into()));
    }
    *out = CString::new(s).map_err(|_| Fail(SlStatus::ComputationFailed, "string contains NUL".to_string()))?.into_raw();
    Ok(())
}

unsafe fn get<'a, T>(h: *const T) -> FfiResult<&'a T> {
    h.as_ref().ok_or(Fail(SlStatus::NullPointer, "handle is null".into()))
}

/// Message for the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn sl_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// # Safety
/// `s` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn sl_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// E_k below q^prec.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn sl_eisenstein(k: i64, prec: i64, out: *mut *mut SlSeries) -> SlStatus {
    guard(|| {
        if prec < 1 {
            return invalid("prec must be at least 1");
        }
        put(out, SlSeries(eisenstein(k, prec)?.series))
    })
}

/// Δ below q^prec.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn sl_delta(prec: i64, out: *mut *mut SlSeries) -> SlStatus {
    guard(|| {
        if prec < 1 {
            return invalid("prec must be at least 1");
        }
        put(out, SlSeries(delta(prec).series))
    })
}

/// The weakly holomorphic form of the given weight with principal part
/// written as "d:c,d:c" (c the coefficient of q^-d).
///
/// # Safety
/// `principal` must be a NUL-terminated string; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn sl_weakly_holomorphic(weight: i64, principal: *const c_char, prec: i64, out: *mut *mut SlSeries) -> SlStatus {
    guard(|| {
        let p = parse_principal(str_arg(principal, "principal")?).or_else(invalid)?;
        if prec < 1 {
            return invalid("prec must be at least 1");
        }
        put(out, SlSeries(weakly_holomorphic(weight, &p, prec)?.series))
    })
}

/// Coefficient of q^n as a decimal fraction string.
///
/// # Safety
/// `s` must be a live series handle; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn sl_series_coeff(s: *const SlSeries, n: i64, out: *mut *mut c_char) -> SlStatus {
    guard(|| {
        let s = &get(s)?.0;
        if n >= s.truncation() {
            return Err(Fail(SlStatus::OutOfRange, format!("q^{n} is beyond the truncation q^{}", s.truncation())));
        }
        put_string(out, s.coeff(n).to_string())
    })
}

/// # Safety
/// `s` must be a live series handle.
#[no_mangle]
pub unsafe extern "C" fn sl_series_truncation(s: *const SlSeries, out: *mut i64) -> SlStatus {
    guard(|| {
        let t = get(s)?.0.truncation();
        out.as_mut().map(|o| *o = t).ok_or(Fail(SlStatus::NullPointer, "output pointer is null".into()))
    })
}

/// # Safety
/// `s` must be a live series handle; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn sl_series_render(s: *const SlSeries, out: *mut *mut c_char) -> SlStatus {
    guard(|| put_string(out, get(s)?.0.render("q")))
}

/// # Safety
/// `s` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn sl_series_free(s: *mut SlSeries) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Lift of the weight -m form with the given principal part, regular part
/// on 1 <= a < nq, 1 <= b < np.
///
/// # Safety
/// `principal` must be a NUL-terminated string; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn sl_lift_unimodular(m: i64, principal: *const c_char, nq: i64, np: i64, out: *mut *mut SlLift) -> SlStatus {
    guard(|| {
        let p = parse_principal(str_arg(principal, "principal")?).or_else(invalid)?;
        if nq < 1 || np < 1 {
            return invalid("box sides must be at least 1");
        }
        if m < 0 {
            return Err(Error::NegativeM(m).into());
        }
        if m % 2 != 0 {
            return Err(Error::OddM(m).into());
        }
        let f = weakly_holomorphic(-m, &p, (nq - 1) * (np - 1) + 1)?;
        put(out, SlLift(lift_unimodular(&f, m, nq, np)?))
    })
}

/// Regular coefficient at q^a p^b.
///
/// # Safety
/// `h` must be a live lift handle; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn sl_lift_regular_coeff(h: *const SlLift, a: i64, b: i64, out: *mut *mut c_char) -> SlStatus {
    guard(|| {
        let e = &get(h)?.0;
        let (nq, np) = e.regular.truncation();
        if a < 1 || b < 1 || nq.is_some_and(|n| a >= n) || np.is_some_and(|n| b >= n) {
            return Err(Fail(SlStatus::OutOfRange, format!("({a},{b}) is outside the computed box")));
        }
        put_string(out, e.regular.coeff(a, b).to_string())
    })
}

/// # Safety
/// `h` must be a live lift handle.
#[no_mangle]
pub unsafe extern "C" fn sl_lift_singular_count(h: *const SlLift, out: *mut usize) -> SlStatus {
    guard(|| {
        let n = get(h)?.0.singular_terms.len();
        out.as_mut().map(|o| *o = n).ok_or(Fail(SlStatus::NullPointer, "output pointer is null".into()))
    })
}

/// The whole expansion as JSON.
///
/// # Safety
/// `h` must be a live lift handle; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn sl_lift_to_json(h: *const SlLift, out: *mut *mut c_char) -> SlStatus {
    guard(|| put_string(out, get(h)?.0.to_json().to_string()))
}

/// # Safety
/// `h` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn sl_lift_free(h: *mut SlLift) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// Lift, pole clearing by Δ^delta_power and tensor decomposition, certified
/// at two guards. `guard_size` <= 0 selects the default guard.
///
/// # Safety
/// `principal` must be a NUL-terminated string; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn sl_decompose(m: i64, principal: *const c_char, delta_power: u32, guard_size: i64, out: *mut *mut SlDecomposition) -> SlStatus {
    guard(|| {
        let p = parse_principal(str_arg(principal, "principal")?).or_else(invalid)?;
        if m % 2 != 0 {
            return Err(Error::OddM(m).into());
        }
        let mut cfg = PipelineConfig::new(m, p, delta_power);
        if guard_size > 0 {
            cfg.guard = Some(guard_size);
        }
        put(out, SlDecomposition(decompose_lift(&cfg)?))
    })
}

/// Table in F_{rs} notation, e.g. "-F20 - 4F11 - F02 + ...".
///
/// # Safety
/// `h` must be a live decomposition handle; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn sl_decomposition_render(h: *const SlDecomposition, out: *mut *mut c_char) -> SlStatus {
    guard(|| put_string(out, get(h)?.0.decomposition.render()))
}

/// λ_{rs}, the coefficient of F_r(q) F_s(p).
///
/// # Safety
/// `h` must be a live decomposition handle; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn sl_decomposition_coeff(h: *const SlDecomposition, r: usize, s: usize, out: *mut *mut c_char) -> SlStatus {
    guard(|| {
        let l = &get(h)?.0.decomposition.lambda;
        match l.get(r).and_then(|row| row.get(s)) {
            Some(c) => put_string(out, c.to_string()),
            None => Err(Fail(SlStatus::OutOfRange, format!("no basis pair ({r},{s})"))),
        }
    })
}

/// # Safety
/// `h` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn sl_decomposition_free(h: *mut SlDecomposition) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// Runs an operator identity suite ("all" or one name) for the listed b
/// and m, e.g. "2,3,4" and "-2..4". Returns [`SlStatus::VerificationFailed`]
/// if any identity fails; `report_json` (may be null) receives the report.
///
/// # Safety
/// String arguments must be NUL-terminated; `report_json` null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn sl_verify(suite: *const c_char, bs: *const c_char, ms: *const c_char, report_json: *mut *mut c_char) -> SlStatus {
    guard(|| {
        let suite = str_arg(suite, "suite")?;
        if suite != "all" && !singlift::opcalc::suites::SUITES.contains(&suite) {
            return invalid(format!("unknown suite {suite:?}"));
        }
        let bs = parse_int_list(str_arg(bs, "bs")?).or_else(invalid)?;
        if bs.iter().any(|b| !(1..=8).contains(b)) {
            return invalid("b must lie in 1..8");
        }
        let bs: Vec<usize> = bs.into_iter().map(|b| b as usize).collect();
        let ms = parse_int_list(str_arg(ms, "ms")?).or_else(invalid)?;
        let reports = run_suite(suite, &bs, &ms)?;
        if !report_json.is_null() {
            let v: Vec<String> = reports.iter().map(|r| r.to_json().to_string()).collect();
            put_string(report_json, format!("[{}]", v.join(",")))?;
        }
        if reports.iter().all(|r| r.passed()) {
            Ok(())
        } else {
            let bad: Vec<String> = reports.iter().flat_map(|r| r.failures().into_iter().map(|c| c.id.clone())).collect();
            Err(Fail(SlStatus::VerificationFailed, format!("failing identities: {}", bad.join(", "))))
        }
    })
}
