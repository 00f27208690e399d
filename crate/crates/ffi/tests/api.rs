use std::ffi::{c_char, CStr, CString};
use std::ptr;

use modflow_ffi::*;

fn cstr(s: &str) -> CString {
    CString::new(s).unwrap()
}

unsafe fn take_string(p: *mut c_char) -> String {
    let s = CStr::from_ptr(p).to_str().unwrap().to_owned();
    mf_string_free(p);
    s
}

unsafe fn parse(text: &str) -> *mut MfReal {
    let mut r = ptr::null_mut();
    assert_eq!(mf_real_parse(cstr(text).as_ptr(), &mut r), MfStatus::Ok);
    r
}

unsafe fn digits(e: *const MfExpansion, n: usize) -> Vec<(i64, i32)> {
    (0..n)
        .map(|i| {
            let (mut q, mut s) = (0i64, 0i32);
            assert_eq!(mf_expansion_digit(e, i, &mut q, &mut s), MfStatus::Ok);
            (q, s)
        })
        .collect()
}

#[test]
fn real_round_trip() {
    unsafe {
        let r = parse("(1+sqrt(5))/2");
        let mut s = ptr::null_mut();
        assert_eq!(mf_real_to_string(r, &mut s), MfStatus::Ok);
        let text = take_string(s);
        let back = parse(&text);
        assert_eq!(mf_real_to_f64(back), mf_real_to_f64(r));
        assert!((mf_real_to_f64(r) - 1.618_033_988_749_895).abs() < 1e-15);
        mf_real_free(r);
        mf_real_free(back);
    }
}

#[test]
fn lehner_sqrt2() {
    unsafe {
        let r = parse("sqrt(2)");
        let mut e = ptr::null_mut();
        assert_eq!(mf_expand(r, MfSystem::Lehner, 100, &mut e), MfStatus::Ok);
        let (mut pre, mut per) = (9usize, 9usize);
        assert_eq!(mf_expansion_lengths(e, &mut pre, &mut per), MfStatus::Ok);
        assert_eq!((pre, per), (0, 2));
        // sqrt 2 = [[ (2,-1) (1,+1) repeated ]]
        assert_eq!(digits(e, 4), vec![(2, -1), (1, 1), (2, -1), (1, 1)]);
        let mut v = ptr::null_mut();
        assert_eq!(mf_expansion_value(e, &mut v), MfStatus::Ok);
        let mut s = ptr::null_mut();
        assert_eq!(mf_real_to_string(v, &mut s), MfStatus::Ok);
        let mut t = ptr::null_mut();
        assert_eq!(mf_real_to_string(r, &mut t), MfStatus::Ok);
        assert_eq!(take_string(s), take_string(t));
        mf_real_free(v);
        mf_expansion_free(e);
        mf_real_free(r);
    }
}

#[test]
fn farey_and_rcf_digits() {
    unsafe {
        let r = parse("-1");
        let mut e = ptr::null_mut();
        assert_eq!(mf_expand(r, MfSystem::Farey, 100, &mut e), MfStatus::Ok);
        // -1 = << (-1/2) repeated >>
        assert_eq!(digits(e, 3), vec![(2, -1), (2, -1), (2, -1)]);
        mf_expansion_free(e);
        mf_real_free(r);

        let r = parse("7/5");
        assert_eq!(mf_expand(r, MfSystem::Rcf, 100, &mut e), MfStatus::Ok);
        // 7/5 = 1 + 1/(2 + 1/2)
        let (mut pre, mut per) = (0usize, 0usize);
        mf_expansion_lengths(e, &mut pre, &mut per);
        assert_eq!((pre, per), (2, 0));
        assert_eq!(digits(e, 2), vec![(2, 1), (2, 1)]);
        let (mut q, mut s) = (0i64, 0i32);
        assert_eq!(mf_expansion_digit(e, 2, &mut q, &mut s), MfStatus::Index);
        let mut json = ptr::null_mut();
        assert_eq!(mf_expansion_to_json(e, &mut json), MfStatus::Ok);
        let v: serde_json::Value = serde_json::from_str(&take_string(json)).unwrap();
        assert!(v.is_object());
        mf_expansion_free(e);
        mf_real_free(r);
    }
}

#[test]
fn errors_are_reported() {
    unsafe {
        let mut r = ptr::null_mut();
        assert_eq!(mf_real_parse(cstr("1/0").as_ptr(), &mut r), MfStatus::Parse);
        assert!(!mf_last_error().is_null());
        assert_eq!(mf_real_parse(ptr::null(), &mut r), MfStatus::NullPointer);
        let bad = [0xffu8, 0];
        assert_eq!(mf_real_parse(bad.as_ptr() as *const c_char, &mut r), MfStatus::InvalidUtf8);

        let x = parse("3");
        let mut e = ptr::null_mut();
        // the Lehner map lives on [1, 2]
        assert_eq!(mf_expand(x, MfSystem::Lehner, 100, &mut e), MfStatus::Domain);
        assert!(!CStr::from_ptr(mf_last_error()).to_bytes().is_empty());
        mf_real_free(x);
        assert_eq!(mf_expand(ptr::null(), MfSystem::Rcf, 1, &mut e), MfStatus::NullPointer);
        assert!(mf_real_to_f64(ptr::null()).is_nan());
        mf_real_free(ptr::null_mut());
        mf_expansion_free(ptr::null_mut());
        mf_string_free(ptr::null_mut());
    }
}

#[test]
fn json_commands() {
    unsafe {
        let mut out = ptr::null_mut();
        let st = mf_geodesic_json(cstr("1-sqrt(2)").as_ptr(), cstr("sqrt(2)").as_ptr(), 40, &mut out);
        assert_eq!(st, MfStatus::Ok);
        let v: serde_json::Value = serde_json::from_str(&take_string(out)).unwrap();
        assert_eq!(v["status"], "ok");

        let st = mf_verify_json(cstr("theorem1").as_ptr(), 10, 0, &mut out);
        assert_eq!(st, MfStatus::Ok);
        let v: serde_json::Value = serde_json::from_str(&take_string(out)).unwrap();
        assert_eq!(v["status"], "ok");

        let st = mf_verify_json(cstr("nonsense").as_ptr(), 10, 0, &mut out);
        assert_eq!(st, MfStatus::Failed);
        let v: serde_json::Value = serde_json::from_str(&take_string(out)).unwrap();
        assert_eq!(v["status"], "error");
    }
}

#[test]
fn header_declares_every_export() {
    let header = include_str!("../include/modflow.h");
    for name in [
        "mf_last_error",
        "mf_string_free",
        "mf_real_parse",
        "mf_real_free",
        "mf_real_to_string",
        "mf_real_to_f64",
        "mf_expand",
        "mf_expansion_free",
        "mf_expansion_lengths",
        "mf_expansion_digit",
        "mf_expansion_to_json",
        "mf_expansion_value",
        "mf_geodesic_json",
        "mf_verify_json",
        "typedef struct MfReal MfReal",
        "typedef struct MfExpansion MfExpansion",
        "MF_STATUS_OK = 0",
    ] {
        assert!(header.contains(name), "header lacks {name}");
    }
}
