//! C ABI over `sievekernel`.
//!
//! Objects are handed out as opaque pointers and must be released with the
//! matching `*_free`. Every fallible call returns an [`SkStatus`]; the text of
//! the most recent failure on the calling thread is available from
//! [`sk_last_error`].

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use sievekernel::analytic;
use sievekernel::majorant::{build_cn_table, CnTable};
use sievekernel::sieve::{auto_bounds, tau_sequence, Eps, TauSequence};
use sievekernel::taylor::{build_family, TaylorFamily};
use sievekernel::SieveError;

/// Result codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SkStatus {
    Ok = 0,
    NullPointer = 1,
    Domain = 2,
    InvalidParameter = 3,
    Mismatch = 4,
    NonConvergence = 5,
    Divergent = 6,
    TailInvalid = 7,
    Internal = 8,
    Panic = 9,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SkConstants {
    pub alpha: f64,
    pub gamma: f64,
    pub h2: f64,
    pub h3: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SkSieveBounds {
    pub big_f1: f64,
    pub small_f1: f64,
    pub k1: usize,
    pub k2: usize,
}

/// Certified `c_n` table.
pub struct SkCnTable(CnTable);

/// `tau_1..tau_N` for one `eps`.
pub struct SkTauSequence(TauSequence);

/// Series tables for `f_1..f_N`.
pub struct SkTaylorFamily(TaylorFamily);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &SieveError) -> SkStatus {
    match e {
        SieveError::Domain { .. } => SkStatus::Domain,
        SieveError::InvalidParameter(_) => SkStatus::InvalidParameter,
        SieveError::Mismatch(_) => SkStatus::Mismatch,
        SieveError::NonConvergence { .. } => SkStatus::NonConvergence,
        SieveError::Divergent { .. } => SkStatus::Divergent,
        SieveError::TailInvalid(_) => SkStatus::TailInvalid,
        SieveError::Internal(_) => SkStatus::Internal,
    }
}

/// Run `f`, translating errors and panics into status codes.
fn guard<F>(f: F) -> SkStatus
where
    F: FnOnce() -> Result<(), SkFailure>,
{
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            SkStatus::Ok
        }
        Ok(Err(SkFailure::Null(what))) => {
            set_error(format!("null pointer passed as {what}"));
            SkStatus::NullPointer
        }
        Ok(Err(SkFailure::Sieve(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Err(_) => {
            set_error("panic inside sievekernel".into());
            SkStatus::Panic
        }
    }
}

enum SkFailure {
    Null(&'static str),
    Sieve(SieveError),
}

impl From<SieveError> for SkFailure {
    fn from(e: SieveError) -> Self {
        SkFailure::Sieve(e)
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &'static str) -> Result<&'a T, SkFailure> {
    p.as_ref().ok_or(SkFailure::Null(what))
}

unsafe fn write<T>(out: *mut T, value: T, what: &'static str) -> Result<(), SkFailure> {
    if out.is_null() {
        return Err(SkFailure::Null(what));
    }
    out.write(value);
    Ok(())
}

fn missing(what: &str, n: usize) -> SkFailure {
    SkFailure::Sieve(SieveError::InvalidParameter(format!("{what} index {n} out of range")))
}

/// Message for the last failed call on this thread, or NULL. Valid until the
/// next call into the library from the same thread.
#[no_mangle]
pub extern "C" fn sk_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn sk_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// `h(s)` for `s >= 1`.
///
/// # Safety
/// `out` must be NULL or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn sk_eval_h(s: f64, out: *mut f64) -> SkStatus {
    guard(|| write(out, analytic::eval_h(s)?, "out"))
}

/// `alpha`, `gamma`, `H(2)`, `H(3)`.
///
/// # Safety
/// `out` must be NULL or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn sk_constants(out: *mut SkConstants) -> SkStatus {
    guard(|| {
        let k = analytic::constants()?;
        write(
            out,
            SkConstants {
                alpha: k.alpha,
                gamma: k.gamma,
                h2: k.h2,
                h3: k.h3,
            },
            "out",
        )
    })
}

/// Build certified `c_2..c_{n_max}` on a grid of density `m`.
///
/// # Safety
/// `out` must be NULL or valid for writes. The handle written there must be
/// released with [`sk_cn_table_free`].
#[no_mangle]
pub unsafe extern "C" fn sk_cn_table_build(
    n_max: usize,
    m: usize,
    inflation: f64,
    out: *mut *mut SkCnTable,
) -> SkStatus {
    guard(|| {
        if out.is_null() {
            return Err(SkFailure::Null("out"));
        }
        let table = build_cn_table(n_max, m, inflation)?;
        write(out, Box::into_raw(Box::new(SkCnTable(table))), "out")
    })
}

/// Largest `n` in the table.
///
/// # Safety
/// `table` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sk_cn_table_n_max(table: *const SkCnTable) -> usize {
    table.as_ref().map_or(0, |t| t.0.n_max())
}

/// `c_n` (with `c_1 = 1`).
///
/// # Safety
/// `table` must be NULL or a live handle; `out` NULL or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn sk_cn_table_get(table: *const SkCnTable, n: usize, out: *mut f64) -> SkStatus {
    guard(|| {
        let t = deref(table, "table")?;
        let c = t.0.get(n).ok_or_else(|| missing("c_n", n))?;
        write(out, c, "out")
    })
}

/// # Safety
/// `table` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sk_cn_table_free(table: *mut SkCnTable) {
    if !table.is_null() {
        drop(Box::from_raw(table));
    }
}

/// `tau_1..tau_len` at `eps = eps_num / eps_den`.
///
/// # Safety
/// `table` must be NULL or a live handle; `out` NULL or valid for writes. The
/// handle written to `out` must be released with [`sk_tau_free`].
#[no_mangle]
pub unsafe extern "C" fn sk_tau_build(
    table: *const SkCnTable,
    eps_num: i64,
    eps_den: i64,
    len: usize,
    out: *mut *mut SkTauSequence,
) -> SkStatus {
    guard(|| {
        let t = deref(table, "table")?;
        if out.is_null() {
            return Err(SkFailure::Null("out"));
        }
        let eps = Eps::new(eps_num, eps_den)?;
        let tau = tau_sequence(eps, &t.0, len)?;
        write(out, Box::into_raw(Box::new(SkTauSequence(tau))), "out")
    })
}

/// # Safety
/// `tau` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sk_tau_len(tau: *const SkTauSequence) -> usize {
    tau.as_ref().map_or(0, |t| t.0.len())
}

/// `tau_n`, 1-based.
///
/// # Safety
/// `tau` must be NULL or a live handle; `out` NULL or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn sk_tau_get(tau: *const SkTauSequence, n: usize, out: *mut f64) -> SkStatus {
    guard(|| {
        let t = deref(tau, "tau")?;
        let v = t.0.get(n).ok_or_else(|| missing("tau", n))?;
        write(out, v, "out")
    })
}

/// Bounds for `F_1` and `f_1` with automatically chosen cutoffs.
///
/// # Safety
/// `tau` must be NULL or a live handle; `out` NULL or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn sk_tau_bounds(tau: *const SkTauSequence, out: *mut SkSieveBounds) -> SkStatus {
    guard(|| {
        let t = deref(tau, "tau")?;
        let b = auto_bounds(&t.0)?;
        write(
            out,
            SkSieveBounds {
                big_f1: b.big_f1,
                small_f1: b.small_f1,
                k1: b.k1,
                k2: b.k2,
            },
            "out",
        )
    })
}

/// # Safety
/// `tau` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sk_tau_free(tau: *mut SkTauSequence) {
    if !tau.is_null() {
        drop(Box::from_raw(tau));
    }
}

/// Series tables for levels `1..=n_max` of degree `order`.
///
/// # Safety
/// `out` must be NULL or valid for writes. The handle must be released with
/// [`sk_taylor_free`].
#[no_mangle]
pub unsafe extern "C" fn sk_taylor_build(n_max: usize, order: usize, out: *mut *mut SkTaylorFamily) -> SkStatus {
    guard(|| {
        if out.is_null() {
            return Err(SkFailure::Null("out"));
        }
        let fam = build_family(n_max, order)?;
        write(out, Box::into_raw(Box::new(SkTaylorFamily(fam))), "out")
    })
}

/// `f_n(s)` from the series tables.
///
/// # Safety
/// `family` must be NULL or a live handle; `out` NULL or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn sk_taylor_eval(
    family: *const SkTaylorFamily,
    n: usize,
    s: f64,
    out: *mut f64,
) -> SkStatus {
    guard(|| {
        let f = deref(family, "family")?;
        write(out, f.0.eval_fn(n, s)?, "out")
    })
}

/// # Safety
/// `family` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sk_taylor_free(family: *mut SkTaylorFamily) {
    if !family.is_null() {
        drop(Box::from_raw(family));
    }
}
