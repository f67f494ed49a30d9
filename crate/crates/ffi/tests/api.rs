use std::ffi::{c_char, CStr, CString};
use std::ptr;

use ulef_ffi::*;

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

unsafe fn take(s: *mut c_char) -> String {
    let out = CStr::from_ptr(s).to_str().unwrap().to_owned();
    ulef_string_free(s);
    out
}

unsafe fn last_error() -> String {
    let p = ulef_last_error();
    assert!(!p.is_null());
    CStr::from_ptr(p).to_string_lossy().into_owned()
}

#[test]
fn groups_and_classes() {
    unsafe {
        let mut g = ptr::null_mut();
        assert_eq!(ulef_group_new(c("Z^2").as_ptr(), &mut g), UlefStatus::Ok);
        let mut n = 0usize;
        assert_eq!(ulef_group_ball_size(g, 2, &mut n), UlefStatus::Ok);
        assert_eq!(n, 13);

        let mut out = ptr::null_mut();
        let class = c(r#"{"constant": 0, "finite": [["a", 1], ["b", -1]]}"#);
        assert_eq!(ulef_decide_class(g, class.as_ptr(), &mut out), UlefStatus::Ok);
        let doc: serde_json::Value = serde_json::from_str(&take(out)).unwrap();
        assert_eq!(doc["verdict"], "zero-by-boundary");
        assert_eq!(doc["verifier_result"]["ok"], true);

        let class = c(r#"{"constant": 2}"#);
        assert_eq!(ulef_decide_class(g, class.as_ptr(), &mut out), UlefStatus::Ok);
        assert!(take(out).contains("nonzero-by-mean"));

        assert_eq!(ulef_group_ball_size(g, 1000, &mut n), UlefStatus::Resource);
        assert!(last_error().contains("--radius"));
        ulef_group_free(g);
    }
}

#[test]
fn complexes() {
    unsafe {
        let mut q = ptr::null_mut();
        assert_eq!(ulef_complex_new(c("genus2").as_ptr(), &mut q), UlefStatus::Ok);
        let mut chi = 0i64;
        assert_eq!(ulef_complex_euler_characteristic(q, &mut chi), UlefStatus::Ok);
        assert_eq!(chi, -2);
        let mut out = ptr::null_mut();
        assert_eq!(ulef_complex_validate(q, &mut out), UlefStatus::Ok);
        assert_eq!(take(out), r#"{"violations":[]}"#);
        ulef_complex_free(q);

        assert_eq!(ulef_complex_new(c("klein:3").as_ptr(), &mut q), UlefStatus::Ok);
        assert_eq!(ulef_complex_validate(q, &mut out), UlefStatus::Ok);
        assert!(take(out).contains("orientation"));
        ulef_complex_free(q);

        assert_eq!(ulef_complex_new(c("nowhere").as_ptr(), &mut q), UlefStatus::InvalidInput);
    }
}

#[test]
fn analyze_matches_the_binary_report() {
    unsafe {
        let doc = c(r#"{"group": {"kind": "free-abelian", "rank": 1}, "constant": 2}"#);
        let mut out = ptr::null_mut();
        let mut code = -1;
        let st = ulef_analyze(c("map-analyze").as_ptr(), doc.as_ptr(), 0, 0, &mut out, &mut code);
        assert_eq!(st, UlefStatus::Ok);
        assert_eq!(code, 0);
        let r: serde_json::Value = serde_json::from_str(&take(out)).unwrap();
        assert_eq!(r["certificate"]["payload"]["limit"], "2");

        let st = ulef_analyze(c("selftest").as_ptr(), doc.as_ptr(), 0, 0, &mut out, &mut code);
        assert_eq!(st, UlefStatus::InvalidInput);
    }
}

#[test]
fn null_and_utf8_errors() {
    unsafe {
        let mut g = ptr::null_mut();
        assert_eq!(ulef_group_new(ptr::null(), &mut g), UlefStatus::NullPointer);
        assert_eq!(ulef_group_new(c("Z^2").as_ptr(), ptr::null_mut()), UlefStatus::NullPointer);
        let bad = [0xffu8, 0xfe, 0];
        assert_eq!(ulef_group_new(bad.as_ptr().cast(), &mut g), UlefStatus::Utf8);
        assert!(last_error().contains("UTF-8"));
        let mut n = 0usize;
        assert_eq!(ulef_group_ball_size(ptr::null(), 1, &mut n), UlefStatus::NullPointer);
        ulef_group_free(ptr::null_mut());
        ulef_string_free(ptr::null_mut());
        assert!(!CStr::from_ptr(ulef_version()).to_bytes().is_empty());
        assert_eq!(ulef_group_new(c("F_2").as_ptr(), &mut g), UlefStatus::Ok);
        assert!(ulef_last_error().is_null());
        ulef_group_free(g);
    }
}
