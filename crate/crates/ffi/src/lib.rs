//! C interface. Numbers and expansions are opaque handles; every call
//! returns an `MfStatus` and writes results through out-pointers. Strings
//! returned to the caller are freed with `mf_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::ptr;

use modflow::cf_core::{rcf_expand, DigitSequence, RcfExpansion};
use modflow::cli::{cmd_geodesic, cmd_verify, CommandResult, Suite};
use modflow::dual_mobius::{fstar_expand, FStarDigit};
use modflow::farey_cf::{farey_expand, FareyDigit};
use modflow::lehner::{lehner_expand, LehnerDigit};
use modflow::{Error, ExactReal};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MfStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    Domain = 4,
    Arithmetic = 5,
    Budget = 6,
    Geodesic = 7,
    Index = 8,
    Failed = 9,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MfSystem {
    Rcf = 0,
    Lehner = 1,
    Farey = 2,
    Fstar = 3,
}

/// An exact real number.
pub struct MfReal(ExactReal);

enum Digits {
    Rcf(RcfExpansion),
    Lehner(DigitSequence<LehnerDigit>),
    Farey(DigitSequence<FareyDigit>),
    Fstar(DigitSequence<FStarDigit>, bool),
}

/// An eventually periodic expansion in one of the digit systems.
pub struct MfExpansion(Digits);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = CString::new(msg.into().replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn status_of(e: &Error) -> MfStatus {
    set_error(e.to_string());
    match e {
        Error::Parse { .. } | Error::InvalidNumber(_) => MfStatus::Parse,
        Error::OutOfDomain(_) | Error::UnsupportedHead(_) | Error::NotInImage | Error::OutOfWindow => MfStatus::Domain,
        Error::BudgetExceeded(_) => MfStatus::Budget,
        Error::ExcludedGeodesic | Error::NoLift | Error::DegenerateEndpoints(_) | Error::NoIntersection => {
            MfStatus::Geodesic
        }
        Error::DivisionByZero | Error::MixedFields(..) | Error::InfiniteOperand | Error::Overflow(_) => {
            MfStatus::Arithmetic
        }
        _ => MfStatus::Failed,
    }
}

unsafe fn read_str<'a>(s: *const c_char) -> Result<&'a str, MfStatus> {
    if s.is_null() {
        set_error("null pointer");
        return Err(MfStatus::NullPointer);
    }
    CStr::from_ptr(s).to_str().map_err(|_| {
        set_error("string is not UTF-8");
        MfStatus::InvalidUtf8
    })
}

unsafe fn write_string(out: *mut *mut c_char, s: String) -> MfStatus {
    if out.is_null() {
        set_error("null out pointer");
        return MfStatus::NullPointer;
    }
    *out = CString::new(s.replace('\0', " ")).expect("no interior nul").into_raw();
    MfStatus::Ok
}

macro_rules! tri {
    ($e:expr) => {
        match $e {
            Ok(v) => v,
            Err(s) => return s,
        }
    };
}

/// The message of the last failed call on this thread, or null. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn mf_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// # Safety
/// `s` must be null or a string returned by this library, freed once.
#[no_mangle]
pub unsafe extern "C" fn mf_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses text such as `(1+sqrt(5))/2`, `-3/7` or `inf`.
///
/// # Safety
/// `text` must be a nul-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn mf_real_parse(text: *const c_char, out: *mut *mut MfReal) -> MfStatus {
    let text = tri!(read_str(text));
    if out.is_null() {
        set_error("null out pointer");
        return MfStatus::NullPointer;
    }
    match text.parse::<ExactReal>() {
        Ok(x) => {
            *out = Box::into_raw(Box::new(MfReal(x)));
            MfStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// # Safety
/// `r` must be null or a handle from `mf_real_parse`, freed once.
#[no_mangle]
pub unsafe extern "C" fn mf_real_free(r: *mut MfReal) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}

/// # Safety
/// `r` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn mf_real_to_string(r: *const MfReal, out: *mut *mut c_char) -> MfStatus {
    match r.as_ref() {
        Some(r) => write_string(out, r.0.to_string()),
        None => MfStatus::NullPointer,
    }
}

/// Nearest double; NaN for a null handle.
///
/// # Safety
/// `r` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn mf_real_to_f64(r: *const MfReal) -> f64 {
    r.as_ref().map_or(f64::NAN, |r| r.0.to_f64())
}

/// # Safety
/// `r` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn mf_expand(
    r: *const MfReal,
    system: MfSystem,
    max_digits: usize,
    out: *mut *mut MfExpansion,
) -> MfStatus {
    let (Some(r), false) = (r.as_ref(), out.is_null()) else {
        set_error("null pointer");
        return MfStatus::NullPointer;
    };
    let x = &r.0;
    let digits = match system {
        MfSystem::Rcf => rcf_expand(x, max_digits).map(Digits::Rcf),
        MfSystem::Lehner => lehner_expand(x, max_digits).map(Digits::Lehner),
        MfSystem::Farey => farey_expand(x, max_digits).map(Digits::Farey),
        MfSystem::Fstar => fstar_expand(x, max_digits).map(|e| Digits::Fstar(e.digits, e.hit_boundary)),
    };
    match digits {
        Ok(d) => {
            *out = Box::into_raw(Box::new(MfExpansion(d)));
            MfStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// # Safety
/// `e` must be null or a handle from `mf_expand`, freed once.
#[no_mangle]
pub unsafe extern "C" fn mf_expansion_free(e: *mut MfExpansion) {
    if !e.is_null() {
        drop(Box::from_raw(e));
    }
}

fn lengths(d: &Digits) -> (usize, usize) {
    match d {
        Digits::Rcf(e) => (e.digits.preperiod().len(), e.digits.period().len()),
        Digits::Lehner(s) => (s.preperiod().len(), s.period().len()),
        Digits::Farey(s) => (s.preperiod().len(), s.period().len()),
        Digits::Fstar(s, _) => (s.preperiod().len(), s.period().len()),
    }
}

/// Writes the preperiod and period lengths; a zero period means a finite word.
///
/// # Safety
/// `e` must be a live handle; the out-pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn mf_expansion_lengths(
    e: *const MfExpansion,
    preperiod: *mut usize,
    period: *mut usize,
) -> MfStatus {
    let (Some(e), false, false) = (e.as_ref(), preperiod.is_null(), period.is_null()) else {
        return MfStatus::NullPointer;
    };
    let (a, b) = lengths(&e.0);
    *preperiod = a;
    *period = b;
    MfStatus::Ok
}

/// Digit `index` of the (infinite, for periodic words) sequence as a
/// quotient and a sign. RCF digits carry sign +1; the RCF head is not a digit.
/// Farey digits report the denominator as quotient and the numerator as sign.
///
/// # Safety
/// `e` must be a live handle; the out-pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn mf_expansion_digit(
    e: *const MfExpansion,
    index: usize,
    quotient: *mut i64,
    sign: *mut i32,
) -> MfStatus {
    let (Some(e), false, false) = (e.as_ref(), quotient.is_null(), sign.is_null()) else {
        return MfStatus::NullPointer;
    };
    let digit = match &e.0 {
        Digits::Rcf(x) => x.digits.iter().nth(index).map(|d| (d.get() as i64, 1)),
        Digits::Lehner(s) => s.iter().nth(index).map(|d| (d.quotient(), d.sign().value() as i32)),
        Digits::Fstar(s, _) => s.iter().nth(index).map(|d| (d.0.quotient(), d.0.sign().value() as i32)),
        Digits::Farey(s) => s
            .iter()
            .nth(index)
            .map(|d| (d.denominator(), d.numerator().value() as i32)),
    };
    match digit {
        Some((q, s)) => {
            *quotient = q;
            *sign = s;
            MfStatus::Ok
        }
        None => {
            set_error(format!("index {index} past the end of a finite word"));
            MfStatus::Index
        }
    }
}

/// The expansion as JSON, in the same form the command line prints.
///
/// # Safety
/// `e` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn mf_expansion_to_json(e: *const MfExpansion, out: *mut *mut c_char) -> MfStatus {
    let Some(e) = e.as_ref() else {
        return MfStatus::NullPointer;
    };
    let json = match &e.0 {
        Digits::Rcf(x) => {
            let head = match i64::try_from(&x.head) {
                Ok(h) => h,
                Err(_) => return status_of(&Error::Overflow(x.head.to_string())),
            };
            serde_json::to_string(&x.digits.to_json(Some(head)))
        }
        Digits::Lehner(s) => serde_json::to_string(&s.to_json(None)),
        Digits::Farey(s) => serde_json::to_string(&s.to_json(None)),
        Digits::Fstar(s, boundary) => {
            let mut v = serde_json::to_value(s.to_json(None)).expect("plain JSON");
            v["hit_boundary"] = (*boundary).into();
            serde_json::to_string(&v)
        }
    };
    write_string(out, json.expect("plain JSON"))
}

/// The value the expansion evaluates to, as a new handle.
///
/// # Safety
/// `e` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn mf_expansion_value(e: *const MfExpansion, out: *mut *mut MfReal) -> MfStatus {
    let (Some(e), false) = (e.as_ref(), out.is_null()) else {
        return MfStatus::NullPointer;
    };
    let v = match &e.0 {
        Digits::Rcf(x) => x.value(),
        Digits::Lehner(s) => s.value(),
        Digits::Farey(s) => s.value(),
        Digits::Fstar(s, _) => s.value(),
    };
    match v {
        Ok(v) => {
            *out = Box::into_raw(Box::new(MfReal(v)));
            MfStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

unsafe fn finish(res: CommandResult, out: *mut *mut c_char) -> MfStatus {
    let ok = res.is_ok();
    if !ok {
        set_error(res.diagnostics.join("; "));
    }
    let st = write_string(out, res.to_json_string());
    if st != MfStatus::Ok {
        return st;
    }
    if ok {
        MfStatus::Ok
    } else {
        MfStatus::Failed
    }
}

/// Runs the `geodesic` command; the JSON result is written even on failure.
///
/// # Safety
/// `backward` and `forward` must be nul-terminated strings; `out` valid.
#[no_mangle]
pub unsafe extern "C" fn mf_geodesic_json(
    backward: *const c_char,
    forward: *const c_char,
    letters: usize,
    out: *mut *mut c_char,
) -> MfStatus {
    let (b, f) = (tri!(read_str(backward)), tri!(read_str(forward)));
    finish(cmd_geodesic(b, f, letters), out)
}

/// Runs a verification suite by name; the JSON result is written even on failure.
///
/// # Safety
/// `suite` must be a nul-terminated string; `out` valid.
#[no_mangle]
pub unsafe extern "C" fn mf_verify_json(
    suite: *const c_char,
    samples: usize,
    seed: u64,
    out: *mut *mut c_char,
) -> MfStatus {
    let name = tri!(read_str(suite));
    match Suite::parse(name) {
        Ok(s) => finish(cmd_verify(s, samples, seed), out),
        Err(e) => {
            let st = status_of(&e);
            let _ = write_string(out, CommandResult::from_error(&e).to_json_string());
            st
        }
    }
}
