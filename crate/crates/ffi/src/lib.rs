//! C interface to `ghzv`.
//!
//! Strategies are exposed as opaque handles created by
//! [`ghzv_strategy_new`] and released by [`ghzv_strategy_free`]. Every
//! fallible call returns a [`GhzvStatus`]; on failure the message is
//! available from [`ghzv_last_error`] on the same thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use ghzv::analysis::{adversarial_num_tests, gme_tests, num_tests, GmeKind, VerificationPlan};
use ghzv::simulator::{run, SourceSpec};
use ghzv::strategies::{build_named, Strategy, StrategyName, StrategyParams, HOMOGENEITY_TOL};
use ghzv::Error;

/// Result codes.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GhzvStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Numerical = 3,
    CapExceeded = 4,
    BufferTooSmall = 5,
    Panic = 6,
}

/// Which GME strategy [`ghzv_gme_tests`] assumes.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GhzvGmeKind {
    Optimal = 0,
    Plm = 1,
    Zh = 2,
}

/// Opaque strategy handle.
pub struct GhzvStrategy {
    inner: Strategy,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default)]
pub struct GhzvSpectral {
    pub beta: f64,
    pub nu: f64,
    pub tau: f64,
    pub homogeneous: bool,
}

/// Summary of a simulated run; `fidelity` and `fidelity_std` are NaN when
/// the strategy is not homogeneous.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default)]
pub struct GhzvRunSummary {
    pub trials: u64,
    pub passes: u64,
    pub pass_rate: f64,
    pub fidelity: f64,
    pub fidelity_std: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn status_of(err: &Error) -> GhzvStatus {
    match err {
        Error::CapExceeded { .. } => GhzvStatus::CapExceeded,
        Error::NotHermitian { .. }
        | Error::NoConvergence { .. }
        | Error::NotHomogeneous
        | Error::ResultOutOfRange { .. }
        | Error::DegenerateArgument(_) => GhzvStatus::Numerical,
        _ => GhzvStatus::InvalidArgument,
    }
}

/// Runs `f`, translating errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), (GhzvStatus, String)>) -> GhzvStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => GhzvStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            GhzvStatus::Panic
        }
    }
}

fn lib<T>(r: ghzv::Result<T>) -> Result<T, (GhzvStatus, String)> {
    r.map_err(|e| (status_of(&e), e.to_string()))
}

fn null(what: &str) -> (GhzvStatus, String) {
    (GhzvStatus::NullPointer, format!("{what} is null"))
}

unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, (GhzvStatus, String)> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| (GhzvStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

unsafe fn strategy_ref<'a>(h: *const GhzvStrategy) -> Result<&'a Strategy, (GhzvStatus, String)> {
    h.as_ref().map(|s| &s.inner).ok_or_else(|| null("strategy handle"))
}

/// Message of the last failed call on this thread, or NULL. The pointer
/// stays valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn ghzv_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Overrides the maximum Hilbert-space dimension; 0 restores the default.
#[no_mangle]
pub extern "C" fn ghzv_set_dim_cap(cap: usize) {
    ghzv::linalg::set_dim_cap(cap);
}

/// Builds a named strategy (`omega1`..`omega9`, `omega5prime`).
///
/// Optional inputs: `d = 0` and `m = 0` mean unset, `p` and `beta` are unset
/// when NaN, and `lambdas` may be NULL.
///
/// # Safety
/// `name` must be a NUL-terminated string, `lambdas` must point to
/// `n_lambdas` doubles when non-NULL, and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ghzv_strategy_new(
    name: *const c_char,
    n: usize,
    d: usize,
    m: usize,
    p: f64,
    beta: f64,
    lambdas: *const f64,
    n_lambdas: usize,
    out: *mut *mut GhzvStrategy,
) -> GhzvStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        let name: StrategyName = lib(read_str(name, "name")?.parse())?;
        let params = StrategyParams {
            n,
            d: (d != 0).then_some(d),
            m: (m != 0).then_some(m),
            p: (!p.is_nan()).then_some(p),
            beta: (!beta.is_nan()).then_some(beta),
            lambdas: (!lambdas.is_null()).then(|| std::slice::from_raw_parts(lambdas, n_lambdas).to_vec()),
        };
        let inner = lib(build_named(name, &params))?;
        *out = Box::into_raw(Box::new(GhzvStrategy { inner }));
        Ok(())
    })
}

/// Releases a handle; NULL is ignored.
///
/// # Safety
/// `h` must come from [`ghzv_strategy_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ghzv_strategy_free(h: *mut GhzvStrategy) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// Hilbert-space dimension of the strategy, or 0 for NULL.
///
/// # Safety
/// `h` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn ghzv_strategy_dim(h: *const GhzvStrategy) -> usize {
    h.as_ref().map_or(0, |s| s.inner.omega().dim())
}

/// Number of tests in the strategy, or 0 for NULL.
///
/// # Safety
/// `h` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn ghzv_strategy_test_count(h: *const GhzvStrategy) -> usize {
    h.as_ref().map_or(0, |s| s.inner.tests.len())
}

/// `β`, `ν`, `τ` and homogeneity of the strategy.
///
/// # Safety
/// `h` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ghzv_strategy_spectral(h: *const GhzvStrategy, out: *mut GhzvSpectral) -> GhzvStatus {
    guard(|| {
        let s = strategy_ref(h)?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let sd = lib(s.spectral_data())?;
        let homogeneous = lib(s.is_homogeneous(HOMOGENEITY_TOL))?;
        *out = GhzvSpectral { beta: sd.beta, nu: sd.nu, tau: sd.tau, homogeneous };
        Ok(())
    })
}

/// Copies `Ω` row-major into `re` and `im`, each of length `len >= dim²`.
///
/// # Safety
/// `h` must be a live handle; `re` and `im` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn ghzv_strategy_omega(h: *const GhzvStrategy, re: *mut f64, im: *mut f64, len: usize) -> GhzvStatus {
    guard(|| {
        let s = strategy_ref(h)?;
        if re.is_null() || im.is_null() {
            return Err(null("output buffer"));
        }
        let data = s.omega().as_slice();
        if len < data.len() {
            return Err((GhzvStatus::BufferTooSmall, format!("need {} entries, got {len}", data.len())));
        }
        let (re, im) = (std::slice::from_raw_parts_mut(re, len), std::slice::from_raw_parts_mut(im, len));
        for (i, z) in data.iter().enumerate() {
            re[i] = z.re;
            im[i] = z.im;
        }
        Ok(())
    })
}

/// JSON description of the strategy; free with [`ghzv_string_free`].
/// Returns NULL for a NULL handle.
///
/// # Safety
/// `h` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn ghzv_strategy_json(h: *const GhzvStrategy) -> *mut c_char {
    match h.as_ref() {
        Some(s) => CString::new(s.inner.to_json()).map_or(ptr::null_mut(), CString::into_raw),
        None => ptr::null_mut(),
    }
}

/// Releases a string returned by this library; NULL is ignored.
///
/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ghzv_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// `⌈ln δ / ln(1 - νε)⌉`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ghzv_num_tests(epsilon: f64, delta: f64, nu: f64, out: *mut u64) -> GhzvStatus {
    guard(|| {
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = lib(VerificationPlan::new(epsilon, delta, nu).and_then(|p| num_tests(&p)))?;
        Ok(())
    })
}

/// Tests needed to certify GME; `n` is used only by the PLM kind.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ghzv_gme_tests(d: usize, delta: f64, kind: GhzvGmeKind, n: usize, out: *mut u64) -> GhzvStatus {
    guard(|| {
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let kind = match kind {
            GhzvGmeKind::Optimal => GmeKind::Optimal,
            GhzvGmeKind::Plm => GmeKind::Plm { n },
            GhzvGmeKind::Zh => GmeKind::Zh,
        };
        *out = lib(gme_tests(d, delta, kind))?;
        Ok(())
    })
}

/// High-precision adversarial test count for second-largest eigenvalue `beta`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ghzv_adversarial_num_tests(beta: f64, epsilon: f64, delta: f64, out: *mut u64) -> GhzvStatus {
    guard(|| {
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = lib(adversarial_num_tests(beta, epsilon, delta))?;
        Ok(())
    })
}

/// Simulates `trials` tests against `source` (`target`, `depolarized:w` or
/// `file:path`).
///
/// # Safety
/// `h` must be a live handle, `source` NUL-terminated and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ghzv_simulate(
    h: *const GhzvStrategy,
    source: *const c_char,
    trials: u64,
    seed: u64,
    out: *mut GhzvRunSummary,
) -> GhzvStatus {
    guard(|| {
        let s = strategy_ref(h)?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let spec: SourceSpec = lib(read_str(source, "source")?.parse())?;
        let src = lib(spec.resolve(&s.target))?;
        let (summary, _) = lib(run(s, &src, trials, seed))?;
        *out = GhzvRunSummary {
            trials: summary.trials,
            passes: summary.passes,
            pass_rate: summary.pass_rate,
            fidelity: summary.fidelity.unwrap_or(f64::NAN),
            fidelity_std: summary.fidelity_std.unwrap_or(f64::NAN),
        };
        Ok(())
    })
}
