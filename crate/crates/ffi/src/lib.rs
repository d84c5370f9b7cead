//! C interface to `mstd-core`.
//!
//! Every fallible call returns an [`MstdStatus`]; on failure the message is
//! available from [`mstd_last_error`] on the same thread. Handles are opaque
//! and must be released with their matching `*_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use mstd_core::enumerate::{build_polynomial, enumerate_mstd_pairs, MstdPolynomial as Polynomial, DEFAULT_ENUM_CAP};
use mstd_core::sampler::{estimate_p_n, Parallelism};
use mstd_core::{Error, IntSet, RhoVector, SumDiffStats};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MstdStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    UniverseMismatch = 3,
    Budget = 4,
    Io = 5,
    Panic = 6,
}

/// Opaque subset of `{0..universe-1}`.
pub struct MstdIntSet(IntSet);

/// Opaque exact MSTD probability polynomial.
pub struct MstdPolynomial(Polynomial);

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct MstdPairStats {
    /// `|A+B|`
    pub sum_size: usize,
    /// `|±(A−B)|`
    pub diff_size: usize,
    pub is_mstd: bool,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct MstdEstimate {
    pub point: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub trials: u64,
    pub successes: u64,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

enum Failure {
    Null(&'static str),
    Core(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

type Outcome = Result<(), Failure>;

fn guard(f: impl FnOnce() -> Outcome) -> MstdStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            MstdStatus::Ok
        }
        Ok(Err(Failure::Null(what))) => {
            set_error(&format!("null pointer: {what}"));
            MstdStatus::NullPointer
        }
        Ok(Err(Failure::Core(e))) => {
            set_error(&e.to_string());
            match e {
                Error::Usage(_) => MstdStatus::InvalidArgument,
                Error::UniverseMismatch { .. } => MstdStatus::UniverseMismatch,
                Error::Budget { .. } => MstdStatus::Budget,
                Error::Io(_) | Error::Json(_) => MstdStatus::Io,
            }
        }
        Err(_) => {
            set_error("internal panic");
            MstdStatus::Panic
        }
    }
}

unsafe fn get<'a, T>(p: *const T, what: &'static str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or(Failure::Null(what))
}

unsafe fn get_mut<'a, T>(p: *mut T, what: &'static str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or(Failure::Null(what))
}

unsafe fn put<T>(out: *mut T, value: T) -> Outcome {
    if out.is_null() {
        return Err(Failure::Null("out"));
    }
    out.write(value);
    Ok(())
}

/// Message for the last failed call on this thread, or `""`.
///
/// The pointer stays valid until the next call into this library on the
/// same thread.
#[no_mangle]
pub extern "C" fn mstd_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn mstd_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Creates an empty set over `{0..universe-1}`.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn mstd_intset_new(universe: usize, out: *mut *mut MstdIntSet) -> MstdStatus {
    guard(|| put(out, Box::into_raw(Box::new(MstdIntSet(IntSet::new(universe))))))
}

/// Creates a set from `len` elements, each `< universe`.
///
/// # Safety
/// `elements` must point to `len` readable values (or be null when `len` is 0);
/// `out` must be valid for one handle.
#[no_mangle]
pub unsafe extern "C" fn mstd_intset_from_elements(
    universe: usize,
    elements: *const usize,
    len: usize,
    out: *mut *mut MstdIntSet,
) -> MstdStatus {
    guard(|| {
        let xs: &[usize] = if len == 0 {
            &[]
        } else {
            if elements.is_null() {
                return Err(Failure::Null("elements"));
            }
            std::slice::from_raw_parts(elements, len)
        };
        let s = IntSet::from_elements(universe, xs.iter().copied())?;
        put(out, Box::into_raw(Box::new(MstdIntSet(s))))
    })
}

/// Releases a set; null is ignored.
///
/// # Safety
/// `set` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn mstd_intset_free(set: *mut MstdIntSet) {
    if !set.is_null() {
        drop(Box::from_raw(set));
    }
}

/// # Safety
/// `set` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn mstd_intset_insert(set: *mut MstdIntSet, element: usize) -> MstdStatus {
    guard(|| {
        let s = get_mut(set, "set")?;
        if element >= s.0.universe_size() {
            return Err(Error::usage(format!("element {element} outside universe of {}", s.0.universe_size())).into());
        }
        s.0.insert(element);
        Ok(())
    })
}

/// # Safety
/// `set` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mstd_intset_contains(set: *const MstdIntSet, element: usize, out: *mut bool) -> MstdStatus {
    guard(|| put(out, get(set, "set")?.0.contains(element)))
}

/// # Safety
/// `set` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mstd_intset_count(set: *const MstdIntSet, out: *mut usize) -> MstdStatus {
    guard(|| put(out, get(set, "set")?.0.count()))
}

/// `|A+B|`, `|±(A−B)|` and whether the pair is MSTD. Both sets must share
/// a universe.
///
/// # Safety
/// `a` and `b` must be live handles and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mstd_pair_stats(
    a: *const MstdIntSet,
    b: *const MstdIntSet,
    out: *mut MstdPairStats,
) -> MstdStatus {
    guard(|| {
        let s = SumDiffStats::of(&get(a, "a")?.0, &get(b, "b")?.0)?;
        put(
            out,
            MstdPairStats {
                sum_size: s.sum_size,
                diff_size: s.diff_size,
                is_mstd: s.is_mstd(),
            },
        )
    })
}

/// Monte Carlo estimate of P(MSTD) for a correlated pair over `{0..n}`.
/// `threads == 0` uses every available core; the result does not depend on it.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mstd_estimate_p_n(
    n: usize,
    p: f64,
    rho1: f64,
    rho2: f64,
    trials: u64,
    seed: u64,
    threads: usize,
    out: *mut MstdEstimate,
) -> MstdStatus {
    guard(|| {
        let r = RhoVector::new(p, rho1, rho2)?;
        let par = if threads == 0 { Parallelism::default() } else { Parallelism::with_threads(threads) };
        let e = estimate_p_n(n, &r, trials, seed, &par)?;
        put(
            out,
            MstdEstimate {
                point: e.point,
                ci_low: e.ci_low,
                ci_high: e.ci_high,
                trials: e.trials,
                successes: e.successes,
            },
        )
    })
}

/// Enumerates every MSTD pair over `{0..n}` and compresses them into a
/// polynomial. Fails with `MSTD_STATUS_BUDGET` above the enumeration cap.
///
/// # Safety
/// `out` must be valid for one handle.
#[no_mangle]
pub unsafe extern "C" fn mstd_polynomial_enumerate(n: usize, out: *mut *mut MstdPolynomial) -> MstdStatus {
    guard(|| {
        let catalog = enumerate_mstd_pairs(n, DEFAULT_ENUM_CAP, &Parallelism::default())?;
        let poly = build_polynomial(&catalog)?;
        put(out, Box::into_raw(Box::new(MstdPolynomial(poly))))
    })
}

/// Loads a polynomial written by `mstd enumerate --poly`.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` valid for one handle.
#[no_mangle]
pub unsafe extern "C" fn mstd_polynomial_from_json(json: *const c_char, out: *mut *mut MstdPolynomial) -> MstdStatus {
    guard(|| {
        if json.is_null() {
            return Err(Failure::Null("json"));
        }
        let text = CStr::from_ptr(json)
            .to_str()
            .map_err(|_| Error::usage("polynomial JSON is not UTF-8"))?;
        put(out, Box::into_raw(Box::new(MstdPolynomial(Polynomial::from_json(text)?))))
    })
}

/// # Safety
/// `poly` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mstd_polynomial_evaluate(
    poly: *const MstdPolynomial,
    p: f64,
    rho1: f64,
    rho2: f64,
    out: *mut f64,
) -> MstdStatus {
    guard(|| {
        let poly = get(poly, "poly")?;
        put(out, poly.0.evaluate(&RhoVector::new(p, rho1, rho2)?))
    })
}

/// Number of MSTD pairs the polynomial was built from.
///
/// # Safety
/// `poly` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mstd_polynomial_pair_count(poly: *const MstdPolynomial, out: *mut u64) -> MstdStatus {
    guard(|| put(out, get(poly, "poly")?.0.pair_count()))
}

/// Releases a polynomial; null is ignored.
///
/// # Safety
/// `poly` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn mstd_polynomial_free(poly: *mut MstdPolynomial) {
    if !poly.is_null() {
        drop(Box::from_raw(poly));
    }
}
