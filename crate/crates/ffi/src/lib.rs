//! C ABI over `qszasz`.
//!
//! Every entry point returns a [`QszStatus`] and writes its result through an
//! out-pointer. On failure the message is kept per thread and can be read with
//! [`qsz_last_error`]. Operators are opaque handles owned by the caller:
//! create with [`qsz_operator_new`], release with [`qsz_operator_free`].

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, c_void, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use qszasz::functions::TestFunction;
use qszasz::qcore::{self, QValue};
use qszasz::{Error, Operator, OperatorParams, PowerSeries};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QszStatus {
    Ok = 0,
    NullPointer = 1,
    Domain = 2,
    Positivity = 3,
    Overflow = 4,
    InvalidParameter = 5,
    Precondition = 6,
    Truncation = 7,
    Panic = 8,
    BufferTooSmall = 9,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QszFunction {
    /// `param`
    Const = 0,
    Identity = 1,
    Square = 2,
    Sin = 3,
    /// `|s - param|`
    AbsDev = 4,
    Sqrt = 5,
    /// `e^{-s}`
    ExpDecay = 6,
}

impl QszFunction {
    fn to_builtin(self, param: f64) -> TestFunction {
        match self {
            QszFunction::Const => TestFunction::Const(param),
            QszFunction::Identity => TestFunction::Identity,
            QszFunction::Square => TestFunction::Square,
            QszFunction::Sin => TestFunction::Sin,
            QszFunction::AbsDev => TestFunction::AbsDev(param),
            QszFunction::Sqrt => TestFunction::Sqrt,
            QszFunction::ExpDecay => TestFunction::ExpDecay,
        }
    }
}

/// Test-function callback: `f(s, user_data)`.
pub type QszCallback = Option<unsafe extern "C" fn(s: f64, user_data: *mut c_void) -> f64>;

/// Opaque operator handle.
pub struct QszOperator {
    inner: Operator,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(err: &Error) -> QszStatus {
    match err {
        Error::Domain(_) => QszStatus::Domain,
        Error::Positivity(_) => QszStatus::Positivity,
        Error::Overflow(_) => QszStatus::Overflow,
        Error::Precondition(_) => QszStatus::Precondition,
        Error::Truncation { .. } => QszStatus::Truncation,
        Error::InvalidParameter(_) | Error::Config { .. } | Error::Io(_) => QszStatus::InvalidParameter,
    }
}

/// Runs `body`, mapping errors and panics to status codes.
fn guard<F: FnOnce() -> Result<(), (QszStatus, String)>>(body: F) -> QszStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => QszStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            QszStatus::Panic
        }
    }
}

fn lift<T>(r: qszasz::Result<T>) -> Result<T, (QszStatus, String)> {
    r.map_err(|e| (status_of(&e), e.to_string()))
}

unsafe fn write_out<T>(out: *mut T, value: T) -> Result<(), (QszStatus, String)> {
    if out.is_null() {
        return Err((QszStatus::NullPointer, "output pointer is null".into()));
    }
    out.write(value);
    Ok(())
}

unsafe fn operator_ref<'a>(op: *const QszOperator) -> Result<&'a Operator, (QszStatus, String)> {
    op.as_ref().map(|h| &h.inner).ok_or_else(|| (QszStatus::NullPointer, "operator handle is null".into()))
}

/// Message of the last failed call on this thread, or NULL. Valid until the
/// next failing call on the same thread.
#[no_mangle]
pub extern "C" fn qsz_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// NUL-terminated library version.
#[no_mangle]
pub extern "C" fn qsz_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

#[no_mangle]
pub unsafe extern "C" fn qsz_q_integer(n: u32, q: f64, out: *mut f64) -> QszStatus {
    guard(|| {
        let q = lift(QValue::new(q))?;
        write_out(out, qcore::q_integer(n, q))
    })
}

#[no_mangle]
pub unsafe extern "C" fn qsz_q_factorial(n: u32, q: f64, out: *mut f64) -> QszStatus {
    guard(|| {
        let q = lift(QValue::new(q))?;
        write_out(out, lift(qcore::q_factorial(n, q))?)
    })
}

#[no_mangle]
pub unsafe extern "C" fn qsz_q_binomial(n: u32, k: u32, q: f64, out: *mut f64) -> QszStatus {
    guard(|| {
        let q = lift(QValue::new(q))?;
        write_out(out, lift(qcore::q_binomial(n, k, q))?)
    })
}

/// `e_q^x`, defined for `|x| (1 - q) < 1`. `terms` may be NULL.
#[no_mangle]
pub unsafe extern "C" fn qsz_q_exp_small(x: f64, q: f64, tol: f64, out: *mut f64, terms: *mut usize) -> QszStatus {
    guard(|| {
        let q = lift(QValue::new(q))?;
        let r = lift(qcore::q_exp_small(x, q, tol))?;
        if !terms.is_null() {
            terms.write(r.terms);
        }
        write_out(out, r.value)
    })
}

/// `E_q^x` for every real `x`. `terms` may be NULL.
#[no_mangle]
pub unsafe extern "C" fn qsz_q_exp_big(x: f64, q: f64, tol: f64, out: *mut f64, terms: *mut usize) -> QszStatus {
    guard(|| {
        let q = lift(QValue::new(q))?;
        let r = lift(qcore::q_exp_big(x, q, tol))?;
        if !terms.is_null() {
            terms.write(r.terms);
        }
        write_out(out, r.value)
    })
}

/// Builds an operator for generator coefficients `a[0..a_len]`.
///
/// `relaxed != 0` drops the `alpha <= beta` requirement. `tol` is the
/// certified series tail tolerance (e.g. `1e-13`).
#[no_mangle]
pub unsafe extern "C" fn qsz_operator_new(
    n: u32,
    t: f64,
    alpha: f64,
    beta: f64,
    q: f64,
    a: *const f64,
    a_len: usize,
    relaxed: i32,
    tol: f64,
    out: *mut *mut QszOperator,
) -> QszStatus {
    guard(|| {
        if out.is_null() {
            return Err((QszStatus::NullPointer, "output pointer is null".into()));
        }
        out.write(ptr::null_mut());
        if a.is_null() || a_len == 0 {
            return Err((QszStatus::NullPointer, "coefficient array is null or empty".into()));
        }
        let coeffs = std::slice::from_raw_parts(a, a_len).to_vec();
        let q = lift(QValue::new(q))?;
        let series = lift(PowerSeries::new(coeffs))?;
        let params = if relaxed != 0 {
            OperatorParams::new_relaxed(n, t, alpha, beta, q, series)
        } else {
            OperatorParams::new(n, t, alpha, beta, q, series)
        };
        let op = lift(Operator::new(lift(params)?, tol))?;
        out.write(Box::into_raw(Box::new(QszOperator { inner: op })));
        Ok(())
    })
}

/// Releases a handle; NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn qsz_operator_free(op: *mut QszOperator) {
    if !op.is_null() {
        drop(Box::from_raw(op));
    }
}

/// `T(f; q; x)` for a caller-supplied `f`.
#[no_mangle]
pub unsafe extern "C" fn qsz_operator_apply(
    op: *const QszOperator,
    f: QszCallback,
    user_data: *mut c_void,
    x: f64,
    out: *mut f64,
) -> QszStatus {
    guard(|| {
        let op = operator_ref(op)?;
        let f = f.ok_or_else(|| (QszStatus::NullPointer, "callback is null".into()))?;
        write_out(out, op.apply(|s| f(s, user_data), x))
    })
}

/// `T(f; q; x)` for a built-in test function; `param` is used by
/// `CONST` and `ABS_DEV`.
#[no_mangle]
pub unsafe extern "C" fn qsz_operator_apply_builtin(
    op: *const QszOperator,
    function: QszFunction,
    param: f64,
    x: f64,
    out: *mut f64,
) -> QszStatus {
    guard(|| {
        let op = operator_ref(op)?;
        let f = function.to_builtin(param);
        write_out(out, op.apply(f.as_fn(), x))
    })
}

/// `T(s^v; q; x)` by direct summation, `v` in {0, 1, 2}.
#[no_mangle]
pub unsafe extern "C" fn qsz_operator_moment(op: *const QszOperator, v: u32, x: f64, out: *mut f64) -> QszStatus {
    guard(|| {
        let op = operator_ref(op)?;
        write_out(out, lift(op.moment_oracle(v, x))?)
    })
}

/// `T((s - (x + t))^2)`, independent of `x`.
#[no_mangle]
pub unsafe extern "C" fn qsz_operator_central_moment(op: *const QszOperator, out: *mut f64) -> QszStatus {
    guard(|| write_out(out, operator_ref(op)?.central_moment2()))
}

/// `e_q^{qy} E_q^{-y} / A(1)`.
#[no_mangle]
pub unsafe extern "C" fn qsz_operator_r_factor(op: *const QszOperator, out: *mut f64) -> QszStatus {
    guard(|| write_out(out, operator_ref(op)?.r_factor()))
}

/// Copies the retained weights into `buf`.
///
/// `*len` is always set to the number of weights. With `buf == NULL` or
/// `cap < *len` nothing is copied; the latter returns `BUFFER_TOO_SMALL`.
#[no_mangle]
pub unsafe extern "C" fn qsz_operator_weights(
    op: *const QszOperator,
    buf: *mut f64,
    cap: usize,
    len: *mut usize,
) -> QszStatus {
    guard(|| {
        let w = &operator_ref(op)?.weights().weights;
        write_out(len, w.len())?;
        if buf.is_null() {
            return Ok(());
        }
        if cap < w.len() {
            return Err((QszStatus::BufferTooSmall, format!("need {} slots, got {cap}", w.len())));
        }
        ptr::copy_nonoverlapping(w.as_ptr(), buf, w.len());
        Ok(())
    })
}

/// Certified bound on the weight mass dropped by truncation.
#[no_mangle]
pub unsafe extern "C" fn qsz_operator_tail_bound(op: *const QszOperator, out: *mut f64) -> QszStatus {
    guard(|| write_out(out, operator_ref(op)?.weights().tail_mass_bound))
}
