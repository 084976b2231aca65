//! C ABI over `legfact`.
//!
//! Every function returns an [`LfStatus`] and writes results through out-pointers. On a
//! non-OK status the message is kept per thread and can be read with [`lf_last_error`].
//! Handles returned through out-pointers are owned by the caller and released with the
//! matching `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};

use legfact::asymptotics::{default_samples, fit_main_terms};
use legfact::dirichlet::{h_truncated, j_estimate, SeriesPoint};
use legfact::{
    factorial_ideal, increment, increments_upto, parse_fspec, summatory, Error, FSpec, FieldSpec,
    IncrementTable, SSet,
};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LfStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Config = 3,
    Domain = 4,
    Size = 5,
    Numeric = 6,
    Io = 7,
    Panic = 8,
}

/// Field, excluded set, and weight function.
pub struct LfContext {
    field: FieldSpec,
    s_set: SSet,
    fspec: FSpec,
}

/// An increment table `B(1..=x_max)` with its prefix sums.
pub struct LfTable(IncrementTable);

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

struct Fail(LfStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::Config(_) => LfStatus::Config,
            Error::Domain(_) => LfStatus::Domain,
            Error::Size { .. } => LfStatus::Size,
            Error::Numeric(_) => LfStatus::Numeric,
            Error::Io { .. } => LfStatus::Io,
        };
        Fail(status, e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(LfStatus::NullPointer, format!("{what} is null"))
}

fn guard<F: FnOnce() -> Result<(), Fail>>(body: F) -> LfStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => LfStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("panic: {msg}"));
            LfStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail(LfStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

unsafe fn put<T>(out: *mut T, value: T, what: &str) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| null(what))
}

/// Copies the calling thread's last error message into `buf` (NUL-terminated, truncated
/// to `len - 1` bytes) and returns the full message length excluding the NUL.
///
/// # Safety
/// `buf` must be null or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn lf_last_error(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            std::ptr::copy_nonoverlapping(msg.as_ptr(), buf.cast::<u8>(), n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}

/// Creates a context from a field string (`"Q"`, `"Q(sqrt-1)"`), an fspec string
/// (`"norm"`, `"norm-1"`, `"c*norm:2"`, `"table:<path>"`), and an excluded set such as
/// `"2,5:one"`; `s_exclude` may be null for the empty set.
///
/// # Safety
/// String arguments must be null or NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lf_context_new(
    field: *const c_char,
    fspec: *const c_char,
    s_exclude: *const c_char,
    out: *mut *mut LfContext,
) -> LfStatus {
    guard(|| {
        let field: FieldSpec = str_arg(field, "field")?.parse()?;
        let fspec = parse_fspec(str_arg(fspec, "fspec")?)?;
        let s_set: SSet = if s_exclude.is_null() {
            SSet::empty()
        } else {
            str_arg(s_exclude, "s_exclude")?.parse()?
        };
        s_set.validate(&field)?;
        let ctx = Box::new(LfContext {
            field,
            s_set,
            fspec,
        });
        put(out, Box::into_raw(ctx), "out")
    })
}

/// # Safety
/// `ctx` must be null or a pointer from [`lf_context_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn lf_context_free(ctx: *mut LfContext) {
    if !ctx.is_null() {
        drop(Box::from_raw(ctx));
    }
}

/// Sieves the increment table up to `x_max`.
///
/// # Safety
/// `ctx` must be a live context; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lf_table_build(
    ctx: *const LfContext,
    x_max: u64,
    out: *mut *mut LfTable,
) -> LfStatus {
    guard(|| {
        let ctx = deref(ctx, "ctx")?;
        let table = increments_upto(x_max, &ctx.field, &ctx.s_set, &ctx.fspec)?;
        put(out, Box::into_raw(Box::new(LfTable(table))), "out")
    })
}

/// # Safety
/// `table` must be null or a pointer from [`lf_table_build`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn lf_table_free(table: *mut LfTable) {
    if !table.is_null() {
        drop(Box::from_raw(table));
    }
}

/// # Safety
/// `table` must be a live table; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lf_table_len(table: *const LfTable, out: *mut u64) -> LfStatus {
    guard(|| put(out, deref(table, "table")?.0.x_max(), "out"))
}

/// `B(n)` for `1 <= n <= x_max`.
///
/// # Safety
/// `table` must be a live table; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lf_table_increment(
    table: *const LfTable,
    n: u64,
    out: *mut f64,
) -> LfStatus {
    guard(|| {
        let t = &deref(table, "table")?.0;
        if n == 0 || n > t.x_max() {
            return Err(Fail(
                LfStatus::InvalidArgument,
                format!("n = {n} outside 1..={}", t.x_max()),
            ));
        }
        put(out, t.value(n), "out")
    })
}

/// `S(x)` for `0 <= x < x_max + 1`.
///
/// # Safety
/// `table` must be a live table; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lf_table_summatory(
    table: *const LfTable,
    x: f64,
    out: *mut f64,
) -> LfStatus {
    guard(|| put(out, summatory(x, &deref(table, "table")?.0)?, "out"))
}

/// Least-squares `S(x) ≈ a x log x + C x` at the default sample points.
///
/// # Safety
/// `table` must be a live table; the out-pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn lf_fit(
    table: *const LfTable,
    a_hat: *mut f64,
    c_hat: *mut f64,
) -> LfStatus {
    guard(|| {
        let t = &deref(table, "table")?.0;
        let fit = fit_main_terms(t, &default_samples(t.x_max()))?;
        put(a_hat, fit.a_hat, "a_hat")?;
        put(c_hat, fit.c_hat, "c_hat")
    })
}

/// `B(n)` computed directly, without a table.
///
/// # Safety
/// `ctx` must be a live context; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lf_increment(ctx: *const LfContext, n: u64, out: *mut f64) -> LfStatus {
    guard(|| {
        let ctx = deref(ctx, "ctx")?;
        put(
            out,
            increment(n, &ctx.field, &ctx.s_set, &ctx.fspec)?,
            "out",
        )
    })
}

/// `log N(n!)`.
///
/// # Safety
/// `ctx` must be a live context; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lf_factorial_log_norm(
    ctx: *const LfContext,
    n: u64,
    out: *mut f64,
) -> LfStatus {
    guard(|| {
        let ctx = deref(ctx, "ctx")?;
        put(
            out,
            factorial_ideal(n, &ctx.field, &ctx.s_set, &ctx.fspec)?.log_norm(),
            "out",
        )
    })
}

/// Kronecker symbol `(d/p)` for a prime `p`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lf_kronecker(d: i64, p: u64, out: *mut i8) -> LfStatus {
    guard(|| put(out, legfact::kronecker_symbol(d, p)?, "out"))
}

/// Riemann zeta on real `s > 1`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lf_zeta_real(s: f64, out: *mut f64) -> LfStatus {
    guard(|| put(out, legfact::zeta::zeta_real(s)?, "out"))
}

unsafe fn series(
    ctx: *const LfContext,
    value: *mut f64,
    tail_bound: *mut f64,
    eval: impl FnOnce(&LfContext) -> legfact::Result<SeriesPoint>,
) -> Result<(), Fail> {
    let pt = eval(deref(ctx, "ctx")?)?;
    put(value, pt.value, "value")?;
    if !tail_bound.is_null() {
        tail_bound.write(pt.tail_bound);
    }
    Ok(())
}

/// The prime-ideal series `H(s)` over norms up to `p`, tail-completed. `tail_bound` may
/// be null.
///
/// # Safety
/// `ctx` must be a live context; `value` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lf_h_truncated(
    ctx: *const LfContext,
    s: f64,
    p: u64,
    value: *mut f64,
    tail_bound: *mut f64,
) -> LfStatus {
    guard(|| {
        series(ctx, value, tail_bound, |c| {
            h_truncated(s, p, &c.field, &c.s_set, &c.fspec)
        })
    })
}

/// `J(s) = H(s) - c^-s (-ζ'_K/ζ_K)(s)` over norms up to `p`. `tail_bound` may be null.
///
/// # Safety
/// `ctx` must be a live context; `value` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lf_j_estimate(
    ctx: *const LfContext,
    s: f64,
    p: u64,
    value: *mut f64,
    tail_bound: *mut f64,
) -> LfStatus {
    guard(|| {
        series(ctx, value, tail_bound, |c| {
            j_estimate(s, p, &c.field, &c.s_set, &c.fspec)
        })
    })
}
