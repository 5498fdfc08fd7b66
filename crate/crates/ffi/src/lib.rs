//! C ABI over the index-transform library.
//!
//! Every function returns an [`IhtStatus`]; results travel through out
//! pointers. Objects are opaque handles created by `*_new` / `*_parse` and
//! released by the matching `*_free`. After a failure,
//! [`iht_last_error_message`] returns a description of the error on the
//! calling thread.

use index_transform::cli::Spline;
use index_transform::error::Error;
use index_transform::funlang;
use index_transform::hyper::{phi, KernelParams};
use index_transform::quad::QuadratureConfig;
use index_transform::registry::Registry;
use index_transform::xform::{self, SpectralData, TransformParams, WeightedFunction};
use index_transform::Complex64;
use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};

/// Status codes returned by every entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IhtStatus {
    Ok = 0,
    InvalidArgument = 1,
    Pole = 2,
    NonConvergence = 3,
    Domain = 4,
    Parse = 5,
    NullPointer = 6,
    Degenerate = 7,
    Panic = -1,
}

/// Transform parameters (b, c) together with quadrature settings.
pub struct IhtTransform {
    params: TransformParams,
    cfg: QuadratureConfig,
}

/// A parsed function of x with its inferred endpoint behaviour.
pub struct IhtFunction {
    f: WeightedFunction<'static>,
}

/// The built-in identity registry.
pub struct IhtRegistry {
    registry: Registry,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn status_of(e: &Error) -> IhtStatus {
    match e {
        Error::Pole { .. } => IhtStatus::Pole,
        Error::NonConvergence { .. } => IhtStatus::NonConvergence,
        Error::Domain(_) | Error::Strip { .. } | Error::Contour(_) => IhtStatus::Domain,
        Error::Syntax { .. } => IhtStatus::Parse,
        Error::Degenerate(_) => IhtStatus::Degenerate,
        Error::Unsupported(_) | Error::Io(_) => IhtStatus::InvalidArgument,
    }
}

enum Failure {
    Lib(Error),
    Null(&'static str),
    Invalid(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

/// Runs `body`, converting errors and panics into status codes.
fn guard(body: impl FnOnce() -> Result<(), Failure>) -> IhtStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            set_error(String::new());
            IhtStatus::Ok
        }
        Ok(Err(Failure::Lib(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Ok(Err(Failure::Null(name))) => {
            set_error(format!("null pointer passed for '{name}'"));
            IhtStatus::NullPointer
        }
        Ok(Err(Failure::Invalid(msg))) => {
            set_error(msg);
            IhtStatus::InvalidArgument
        }
        Err(_) => {
            set_error("internal panic".into());
            IhtStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, name: &'static str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or(Failure::Null(name))
}

unsafe fn out<'a, T>(p: *mut T, name: &'static str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or(Failure::Null(name))
}

unsafe fn slice<'a, T>(p: *const T, n: usize, name: &'static str) -> Result<&'a [T], Failure> {
    if n == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(Failure::Null(name));
    }
    Ok(std::slice::from_raw_parts(p, n))
}

unsafe fn slice_mut<'a, T>(p: *mut T, n: usize, name: &'static str) -> Result<&'a mut [T], Failure> {
    if n == 0 {
        return Ok(&mut []);
    }
    if p.is_null() {
        return Err(Failure::Null(name));
    }
    Ok(std::slice::from_raw_parts_mut(p, n))
}

unsafe fn string(p: *const c_char, name: &'static str) -> Result<String, Failure> {
    if p.is_null() {
        return Err(Failure::Null(name));
    }
    CStr::from_ptr(p)
        .to_str()
        .map(str::to_string)
        .map_err(|_| Failure::Invalid(format!("'{name}' is not valid UTF-8")))
}

/// Copies `text` into `buf` (NUL-terminated, truncated to `len − 1` bytes) and
/// returns the full length without the terminator.
unsafe fn copy_out(text: &str, buf: *mut c_char, len: usize) -> usize {
    if !buf.is_null() && len > 0 {
        let n = text.len().min(len - 1);
        std::ptr::copy_nonoverlapping(text.as_ptr() as *const c_char, buf, n);
        *buf.add(n) = 0;
    }
    text.len()
}

/// Static NUL-terminated version string.
#[no_mangle]
pub extern "C" fn iht_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Writes the last error message of this thread into `buf`; returns its full length.
///
/// # Safety
/// `buf` must be null or point to at least `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn iht_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| copy_out(&e.borrow(), buf, len))
}

/// Creates a transform handle for J_{b,c} with default quadrature settings.
///
/// # Safety
/// `out_handle` must be a valid pointer; the handle is released with [`iht_transform_free`].
#[no_mangle]
pub unsafe extern "C" fn iht_transform_new(b: f64, c: f64, out_handle: *mut *mut IhtTransform) -> IhtStatus {
    guard(|| {
        let slot = out(out_handle, "out_handle")?;
        let params = TransformParams::new(b, c)?;
        *slot = Box::into_raw(Box::new(IhtTransform { params, cfg: QuadratureConfig::default() }));
        Ok(())
    })
}

/// # Safety
/// `handle` must be null or come from [`iht_transform_new`] and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn iht_transform_free(handle: *mut IhtTransform) {
    if !handle.is_null() {
        drop(Box::from_raw(handle));
    }
}

/// Sets the relative and absolute quadrature tolerances and the spectral cutoff.
///
/// # Safety
/// `handle` must be a live transform handle.
#[no_mangle]
pub unsafe extern "C" fn iht_transform_configure(handle: *mut IhtTransform, tol_rel: f64, tol_abs: f64, s_max: f64) -> IhtStatus {
    guard(|| {
        let h = out(handle, "handle")?;
        let cfg = QuadratureConfig { tol_rel, tol_abs, s_max, ..h.cfg.clone() };
        cfg.validate()?;
        h.cfg = cfg;
        Ok(())
    })
}

/// Number of discrete eigenvalues (b+m)² (zero when b ≥ 0).
///
/// # Safety
/// `handle` and `out_count` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn iht_transform_discrete_count(handle: *const IhtTransform, out_count: *mut usize) -> IhtStatus {
    guard(|| {
        *out(out_count, "out_count")? = deref(handle, "handle")?.params.discrete_count();
        Ok(())
    })
}

/// Parses an expression in x (e.g. `"bump(0,2)"`, `"pow1p(-1.5)"`).
///
/// # Safety
/// `source` must be a NUL-terminated string and `out_handle` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn iht_function_parse(source: *const c_char, out_handle: *mut *mut IhtFunction) -> IhtStatus {
    guard(|| {
        let slot = out(out_handle, "out_handle")?;
        let text = string(source, "source")?;
        let f = funlang::weighted_function(funlang::parse(&text)?, None, None)?;
        *slot = Box::into_raw(Box::new(IhtFunction { f }));
        Ok(())
    })
}

/// # Safety
/// `handle` must be null or come from [`iht_function_parse`] and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn iht_function_free(handle: *mut IhtFunction) {
    if !handle.is_null() {
        drop(Box::from_raw(handle));
    }
}

/// Evaluates the function at x.
///
/// # Safety
/// `handle` and `out_value` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn iht_function_eval(handle: *const IhtFunction, x: f64, out_value: *mut f64) -> IhtStatus {
    guard(|| {
        let v = deref(handle, "handle")?.f.eval(x);
        *out(out_value, "out_value")? = v;
        Ok(())
    })
}

/// Forward transform at n real spectral points.
///
/// # Safety
/// `s` and `out_values` must point to `n` readable respectively writable doubles.
#[no_mangle]
pub unsafe extern "C" fn iht_forward(
    transform: *const IhtTransform,
    function: *const IhtFunction,
    s: *const f64,
    n: usize,
    out_values: *mut f64,
) -> IhtStatus {
    guard(|| {
        let t = deref(transform, "transform")?;
        let f = deref(function, "function")?;
        let s = slice(s, n, "s")?;
        let dst = slice_mut(out_values, n, "out_values")?;
        for (d, &sk) in dst.iter_mut().zip(s) {
            *d = xform::forward(&t.params, &f.f, Complex64::new(sk, 0.0), &t.cfg)?.re;
        }
        Ok(())
    })
}

/// Forward transform at one complex spectral point inside the holomorphy strip.
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn iht_forward_complex(
    transform: *const IhtTransform,
    function: *const IhtFunction,
    s_re: f64,
    s_im: f64,
    out_re: *mut f64,
    out_im: *mut f64,
) -> IhtStatus {
    guard(|| {
        let t = deref(transform, "transform")?;
        let f = deref(function, "function")?;
        let v = xform::forward(&t.params, &f.f, Complex64::new(s_re, s_im), &t.cfg)?;
        *out(out_re, "out_re")? = v.re;
        *out(out_im, "out_im")? = v.im;
        Ok(())
    })
}

/// Inverse transform of spectral samples (s_k, g_k), interpolated by a natural
/// cubic spline, plus `n_discrete` discrete coefficients ⟨f, p_m⟩ for m = 0, 1, ….
///
/// # Safety
/// `s`, `g` must hold `n` doubles, `discrete` `n_discrete` doubles, `x` and
/// `out_values` `n_x` doubles.
#[no_mangle]
pub unsafe extern "C" fn iht_inverse(
    transform: *const IhtTransform,
    s: *const f64,
    g: *const f64,
    n: usize,
    discrete: *const f64,
    n_discrete: usize,
    x: *const f64,
    n_x: usize,
    out_values: *mut f64,
) -> IhtStatus {
    guard(|| {
        let t = deref(transform, "transform")?;
        let s = slice(s, n, "s")?.to_vec();
        let g = slice(g, n, "g")?.to_vec();
        let disc: Vec<(usize, f64)> = slice(discrete, n_discrete, "discrete")?.iter().copied().enumerate().collect();
        if disc.len() != t.params.discrete_count() {
            return Err(Failure::Invalid(format!(
                "expected {} discrete coefficients, got {}",
                t.params.discrete_count(),
                disc.len()
            )));
        }
        let xs = slice(x, n_x, "x")?;
        let dst = slice_mut(out_values, n_x, "out_values")?;
        let spline = Spline::new(s, g)?;
        let cfg = QuadratureConfig { s_max: spline.end(), ..t.cfg.clone() };
        let knots = spline.knots().to_vec();
        let data = SpectralData::new(move |v| spline.eval(v), disc).with_breakpoints(knots);
        for (d, &xk) in dst.iter_mut().zip(xs) {
            *d = xform::inverse(&t.params, &data, xk, &cfg)?;
        }
        Ok(())
    })
}

/// Plancherel density (1/2π)|Γ(b+is)Γ(c+is)/Γ(2is)|².
///
/// # Safety
/// `transform` and `out_value` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn iht_density(transform: *const IhtTransform, s: f64, out_value: *mut f64) -> IhtStatus {
    guard(|| {
        *out(out_value, "out_value")? = xform::density(&deref(transform, "transform")?.params, s);
        Ok(())
    })
}

/// Kernel ₂F₁(b+is, b−is; b+c; −x) at complex s.
///
/// # Safety
/// `out_re` and `out_im` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn iht_kernel(b: f64, c: f64, x: f64, s_re: f64, s_im: f64, out_re: *mut f64, out_im: *mut f64) -> IhtStatus {
    guard(|| {
        let v = phi(KernelParams::new(b, c)?, x, Complex64::new(s_re, s_im))?;
        *out(out_re, "out_re")? = v.re;
        *out(out_im, "out_im")? = v.im;
        Ok(())
    })
}

/// Loads the built-in identity registry.
///
/// # Safety
/// `out_handle` must be a valid pointer; release with [`iht_registry_free`].
#[no_mangle]
pub unsafe extern "C" fn iht_registry_new(out_handle: *mut *mut IhtRegistry) -> IhtStatus {
    guard(|| {
        *out(out_handle, "out_handle")? = Box::into_raw(Box::new(IhtRegistry { registry: Registry::builtin() }));
        Ok(())
    })
}

/// # Safety
/// `handle` must be null or come from [`iht_registry_new`] and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn iht_registry_free(handle: *mut IhtRegistry) {
    if !handle.is_null() {
        drop(Box::from_raw(handle));
    }
}

/// Number of registry entries.
///
/// # Safety
/// `handle` and `out_len` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn iht_registry_len(handle: *const IhtRegistry, out_len: *mut usize) -> IhtStatus {
    guard(|| {
        *out(out_len, "out_len")? = deref(handle, "handle")?.registry.entries().len();
        Ok(())
    })
}

/// Copies the id of entry `index` into `buf`; `out_len` receives its full length.
///
/// # Safety
/// `buf` must be null or hold `len` bytes; `out_len` may be null.
#[no_mangle]
pub unsafe extern "C" fn iht_registry_id(handle: *const IhtRegistry, index: usize, buf: *mut c_char, len: usize, out_len: *mut usize) -> IhtStatus {
    guard(|| {
        let r = deref(handle, "handle")?;
        let e = r
            .registry
            .entries()
            .get(index)
            .ok_or_else(|| Failure::Invalid(format!("index {index} out of range")))?;
        let n = copy_out(&e.id, buf, len);
        if let Some(l) = out_len.as_mut() {
            *l = n;
        }
        Ok(())
    })
}

/// Checks entry `id` at `trials` seeded draws; reports whether all passed and the largest gap.
///
/// # Safety
/// `id` must be NUL-terminated; the out pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn iht_registry_verify(
    handle: *const IhtRegistry,
    id: *const c_char,
    seed: u64,
    trials: usize,
    out_passed: *mut bool,
    out_worst_gap: *mut f64,
) -> IhtStatus {
    guard(|| {
        let r = deref(handle, "handle")?;
        let id = string(id, "id")?;
        let reports = r.registry.run_suite(&[id.as_str()], seed, trials, &QuadratureConfig::default())?;
        *out(out_passed, "out_passed")? = reports.iter().all(|x| x.passed);
        *out(out_worst_gap, "out_worst_gap")? = reports.iter().map(|x| x.rel_gap).fold(0.0, f64::max);
        Ok(())
    })
}
