use std::ffi::{c_char, CStr, CString};
use std::ptr;

use singlift_ffi::*;

unsafe fn take(s: *mut c_char) -> String {
    let out = CStr::from_ptr(s).to_str().unwrap().to_string();
    sl_string_free(s);
    out
}

unsafe fn last_error() -> String {
    CStr::from_ptr(sl_last_error()).to_str().unwrap().to_string()
}

#[test]
fn eisenstein_coefficients() {
    unsafe {
        let mut s = ptr::null_mut();
        assert_eq!(sl_eisenstein(4, 5, &mut s), SlStatus::Ok);
        let mut c = ptr::null_mut();
        assert_eq!(sl_series_coeff(s, 2, &mut c), SlStatus::Ok);
        assert_eq!(take(c), "2160");
        assert_eq!(sl_series_coeff(s, 5, &mut c), SlStatus::OutOfRange);
        let mut t = 0;
        assert_eq!(sl_series_truncation(s, &mut t), SlStatus::Ok);
        assert_eq!(t, 5);
        sl_series_free(s);
    }
}

#[test]
fn weakly_holomorphic_and_errors() {
    unsafe {
        let p = CString::new("1:1").unwrap();
        let mut s = ptr::null_mut();
        assert_eq!(sl_weakly_holomorphic(-2, p.as_ptr(), 3, &mut s), SlStatus::Ok);
        let mut c = ptr::null_mut();
        assert_eq!(sl_series_coeff(s, 0, &mut c), SlStatus::Ok);
        assert_eq!(take(c), "-240");
        sl_series_free(s);

        let zero = CString::new("1:0").unwrap();
        assert_eq!(sl_weakly_holomorphic(-2, zero.as_ptr(), 3, &mut s), SlStatus::Unsolvable);
        assert!(last_error().contains("principal"));
        let bad = CString::new("nonsense").unwrap();
        assert_eq!(sl_weakly_holomorphic(-2, bad.as_ptr(), 3, &mut s), SlStatus::InvalidArgument);
        assert_eq!(sl_weakly_holomorphic(-2, ptr::null(), 3, &mut s), SlStatus::NullPointer);
        assert_eq!(sl_delta(0, &mut s), SlStatus::InvalidArgument);
        assert_eq!(sl_delta(3, ptr::null_mut()), SlStatus::NullPointer);
        assert_eq!(sl_series_render(ptr::null(), &mut c), SlStatus::NullPointer);
        assert_eq!(sl_delta(3, &mut s), SlStatus::Ok);
        assert_eq!(last_error(), "");
        sl_series_free(s);
    }
}

#[test]
fn lift_handles() {
    unsafe {
        let p = CString::new("1:1").unwrap();
        let mut h = ptr::null_mut();
        assert_eq!(sl_lift_unimodular(2, p.as_ptr(), 8, 8, &mut h), SlStatus::Ok);
        let mut n = 0;
        assert_eq!(sl_lift_singular_count(h, &mut n), SlStatus::Ok);
        assert_eq!(n, 1);
        let mut c = ptr::null_mut();
        // 32 c_1 with c_1 = -141444
        assert_eq!(sl_lift_regular_coeff(h, 1, 1, &mut c), SlStatus::Ok);
        assert_eq!(take(c), (32 * -141444i64).to_string());
        assert_eq!(sl_lift_regular_coeff(h, 8, 1, &mut c), SlStatus::OutOfRange);
        assert_eq!(sl_lift_to_json(h, &mut c), SlStatus::Ok);
        let j = take(c);
        assert!(j.contains("\"singular\""));
        sl_lift_free(h);
        assert_eq!(sl_lift_unimodular(3, p.as_ptr(), 8, 8, &mut h), SlStatus::OddM);
        assert_eq!(sl_lift_unimodular(2, p.as_ptr(), 0, 0, &mut h), SlStatus::InvalidArgument);
    }
}

#[test]
fn weight_forty_decomposition() {
    unsafe {
        let p = CString::new("1:1").unwrap();
        let mut h = ptr::null_mut();
        assert_eq!(sl_decompose(2, p.as_ptr(), 3, 0, &mut h), SlStatus::Ok);
        let mut c = ptr::null_mut();
        assert_eq!(sl_decomposition_coeff(h, 2, 2, &mut c), SlStatus::Ok);
        assert_eq!(take(c), "-12607488");
        assert_eq!(sl_decomposition_coeff(h, 9, 0, &mut c), SlStatus::OutOfRange);
        assert_eq!(sl_decomposition_render(h, &mut c), SlStatus::Ok);
        assert!(take(c).starts_with("-F20 - 4F11 - F02 + 984F30"));
        sl_decomposition_free(h);
        assert_eq!(sl_decompose(2, p.as_ptr(), 3, 1, &mut h), SlStatus::Ok);
        sl_decomposition_free(h);
        assert_eq!(sl_decompose(3, p.as_ptr(), 3, 0, &mut h), SlStatus::OddM);
    }
}

#[test]
fn verify_suites() {
    unsafe {
        let (suite, bs, ms) = (CString::new("cocycle").unwrap(), CString::new("2,3").unwrap(), CString::new("0..2").unwrap());
        let mut rep = ptr::null_mut();
        assert_eq!(sl_verify(suite.as_ptr(), bs.as_ptr(), ms.as_ptr(), &mut rep), SlStatus::Ok);
        let r = take(rep);
        assert!(r.contains("\"passed\":true"));
        assert_eq!(sl_verify(suite.as_ptr(), bs.as_ptr(), ms.as_ptr(), ptr::null_mut()), SlStatus::Ok);
        let nosuch = CString::new("nosuch").unwrap();
        assert_eq!(sl_verify(nosuch.as_ptr(), bs.as_ptr(), ms.as_ptr(), ptr::null_mut()), SlStatus::InvalidArgument);
    }
}

#[test]
fn free_null_is_harmless() {
    unsafe {
        sl_series_free(ptr::null_mut());
        sl_lift_free(ptr::null_mut());
        sl_decomposition_free(ptr::null_mut());
        sl_string_free(ptr::null_mut());
    }
}
