//! C ABI over the `motzkin` crate.
//!
//! Every entry point returns a [`MotzkinStatus`] and writes its result
//! through an out-pointer. On failure the message is available from
//! [`motzkin_last_error`] until the next failing call on the same thread.
//! Panics are caught and reported as [`MotzkinStatus::Panic`].
//!
//! Strings returned by the library are owned by the caller and must be
//! released with [`motzkin_string_free`]. Samplers are opaque handles
//! created by [`motzkin_sampler_new`] and released by
//! [`motzkin_sampler_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;

use motzkin::counting::motzkin_number;
use motzkin::oracles;
use motzkin::path::MotzkinPath;
use motzkin::sampler::{RandomSource, SamplerMode, UniformSampler};
use motzkin::{Error, TimeGrid};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MotzkinStatus {
    Ok = 0,
    NullPointer = 1,
    Domain = 2,
    InvalidPath = 3,
    QuadratureFailure = 4,
    InternalMismatch = 5,
    BufferTooSmall = 6,
    Parse = 7,
    Panic = 8,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MotzkinSamplerMode {
    CycleLemma = 0,
    DpExact = 1,
    DpLogspace = 2,
}

fn sampler_mode(code: u32) -> Result<SamplerMode, Failure> {
    match code {
        c if c == MotzkinSamplerMode::CycleLemma as u32 => Ok(SamplerMode::CycleLemma),
        c if c == MotzkinSamplerMode::DpExact as u32 => Ok(SamplerMode::DpExact),
        c if c == MotzkinSamplerMode::DpLogspace as u32 => Ok(SamplerMode::DpLogspace),
        c => Err(Failure(MotzkinStatus::Domain, format!("unknown sampler mode {c}"))),
    }
}

/// Uniform path sampler with its own random stream.
pub struct MotzkinSampler {
    sampler: UniformSampler,
    rng: RandomSource,
}

const VERSION: &[u8] = concat!(env!("CARGO_PKG_VERSION"), "\0").as_bytes();

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior nul removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(err: &Error) -> MotzkinStatus {
    match err {
        Error::PrefixNegative(_)
        | Error::NonzeroEndpoint(_)
        | Error::CrossingPartition
        | Error::OddSupport(_)
        | Error::BadSum(_)
        | Error::InvalidPartition(_) => MotzkinStatus::InvalidPath,
        Error::Domain(_) | Error::SingularDenominator { .. } => MotzkinStatus::Domain,
        Error::QuadratureFailure { .. } => MotzkinStatus::QuadratureFailure,
        Error::InternalMismatch { .. } => MotzkinStatus::InternalMismatch,
        Error::Parse(_) => MotzkinStatus::Parse,
    }
}

struct Failure(MotzkinStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(MotzkinStatus::NullPointer, format!("{what} is null"))
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> MotzkinStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => MotzkinStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_last_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".to_string());
            set_last_error(format!("panic: {msg}"));
            MotzkinStatus::Panic
        }
    }
}

unsafe fn write<T>(out: *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    out.write(value);
    Ok(())
}

unsafe fn input<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(slice::from_raw_parts(p, len))
}

unsafe fn grid(times: *const f64, d: usize) -> Result<TimeGrid, Failure> {
    Ok(TimeGrid::new(input(times, d, "times")?.to_vec())?)
}

/// Library version, a static nul-terminated string.
#[no_mangle]
pub extern "C" fn motzkin_version() -> *const c_char {
    VERSION.as_ptr().cast()
}

/// Message of the last failing call on this thread, or null if none.
/// Valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn motzkin_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// # Safety
/// `s` must be null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn motzkin_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Exact `M_n` as a decimal string in `*out`.
///
/// # Safety
/// `out` must be valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn motzkin_count(n: usize, out: *mut *mut c_char) -> MotzkinStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("output pointer"));
        }
        let digits = motzkin_number(n)?.to_string();
        write(out, CString::new(digits).expect("decimal digits").into_raw())
    })
}

/// `ln M_n`, accurate for any `n`.
///
/// # Safety
/// `out` must be valid for a write.
#[no_mangle]
pub unsafe extern "C" fn motzkin_count_ln(n: usize, out: *mut f64) -> MotzkinStatus {
    guard(|| {
        let v = motzkin_number(n)?.ln();
        write(out, v)
    })
}

/// Checks that `steps[0..len]`, each in `{-1, 0, 1}`, form a Motzkin path.
/// Returns `InvalidPath` with the reason otherwise.
///
/// # Safety
/// `steps` must point to `len` readable values (or be null when `len == 0`).
#[no_mangle]
pub unsafe extern "C" fn motzkin_path_validate(steps: *const i8, len: usize) -> MotzkinStatus {
    guard(|| {
        let values: Vec<i64> = input(steps, len, "steps")?.iter().map(|&v| v as i64).collect();
        MotzkinPath::from_values(&values)?;
        Ok(())
    })
}

/// New sampler of uniform paths of length `n`, seeded with `seed`; `mode`
/// is a [`MotzkinSamplerMode`] value.
///
/// # Safety
/// `out` must be valid for a pointer write. The handle must be released with
/// [`motzkin_sampler_free`].
#[no_mangle]
pub unsafe extern "C" fn motzkin_sampler_new(
    n: usize,
    mode: u32,
    seed: u64,
    out: *mut *mut MotzkinSampler,
) -> MotzkinStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("output pointer"));
        }
        let handle = MotzkinSampler {
            sampler: UniformSampler::new(n, sampler_mode(mode)?),
            rng: RandomSource::from_seed(seed),
        };
        write(out, Box::into_raw(Box::new(handle)))
    })
}

/// Path length of the sampler, 0 for a null handle.
///
/// # Safety
/// `sampler` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn motzkin_sampler_length(sampler: *const MotzkinSampler) -> usize {
    sampler.as_ref().map_or(0, |s| s.sampler.n())
}

/// Draws one path and writes its steps (`-1`, `0`, `1`) to `buf`.
/// `len` must be at least the sampler length.
///
/// # Safety
/// `sampler` must be a live handle not used concurrently; `buf` must be valid
/// for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn motzkin_sampler_sample(
    sampler: *mut MotzkinSampler,
    buf: *mut i8,
    len: usize,
) -> MotzkinStatus {
    guard(|| {
        let s = sampler.as_mut().ok_or_else(|| null("sampler"))?;
        let n = s.sampler.n();
        if len < n {
            return Err(Failure(
                MotzkinStatus::BufferTooSmall,
                format!("buffer holds {len} steps, path has {n}"),
            ));
        }
        if n == 0 {
            return Ok(());
        }
        if buf.is_null() {
            return Err(null("buffer"));
        }
        let path = s.sampler.sample(&mut s.rng);
        let dst = slice::from_raw_parts_mut(buf, n);
        for (d, step) in dst.iter_mut().zip(path.steps()) {
            *d = step.value();
        }
        Ok(())
    })
}

/// # Safety
/// `sampler` must be null or a handle from [`motzkin_sampler_new`], not yet
/// freed.
#[no_mangle]
pub unsafe extern "C" fn motzkin_sampler_free(sampler: *mut MotzkinSampler) {
    if !sampler.is_null() {
        drop(Box::from_raw(sampler));
    }
}

/// Density of the free Brownian motion at time `t > 0`.
///
/// # Safety
/// `out` must be valid for a write.
#[no_mangle]
pub unsafe extern "C" fn motzkin_fbm_density(t: f64, x: f64, out: *mut f64) -> MotzkinStatus {
    guard(|| write(out, oracles::fbm_density(t, x)?))
}

/// Transition density from `x` at time `s` to `y` at time `t > s`.
///
/// # Safety
/// `out` must be valid for a write.
#[no_mangle]
pub unsafe extern "C" fn motzkin_fbm_transition(
    s: f64,
    x: f64,
    t: f64,
    y: f64,
    out: *mut f64,
) -> MotzkinStatus {
    guard(|| write(out, oracles::fbm_transition(s, x, t, y)?))
}

/// Finite-dimensional density of the Brownian excursion at the `d` grid times.
///
/// # Safety
/// `times` and `x` must each point to `d` readable values.
#[no_mangle]
pub unsafe extern "C" fn motzkin_excursion_density(
    times: *const f64,
    x: *const f64,
    d: usize,
    out: *mut f64,
) -> MotzkinStatus {
    guard(|| {
        let g = grid(times, d)?;
        let v = oracles::excursion_fdd_density(&g, input(x, d, "x")?)?;
        write(out, v)
    })
}

/// Limit joint Laplace transform; `z` and `w` hold `d + 1` values, `d <= 2`.
///
/// # Safety
/// `times` must point to `d` values, `z` and `w` to `d + 1` values each.
#[no_mangle]
pub unsafe extern "C" fn motzkin_limit_laplace(
    times: *const f64,
    d: usize,
    z: *const f64,
    w: *const f64,
    out: *mut f64,
) -> MotzkinStatus {
    guard(|| {
        let g = grid(times, d)?;
        let v = oracles::limit_laplace(&g, input(z, d + 1, "z")?, input(w, d + 1, "w")?)?;
        write(out, v)
    })
}

/// Finite-`n` joint Laplace transform of the increments; `d <= 2`.
///
/// # Safety
/// `times` must point to `d` values, `z` and `w` to `d + 1` values each.
#[no_mangle]
pub unsafe extern "C" fn motzkin_laplace_joint(
    n: usize,
    times: *const f64,
    d: usize,
    z: *const f64,
    w: *const f64,
    out: *mut f64,
) -> MotzkinStatus {
    guard(|| {
        let g = grid(times, d)?;
        let v = oracles::laplace_joint(n, &g, input(z, d + 1, "z")?, input(w, d + 1, "w")?)?;
        write(out, v)
    })
}

/// Finite-`n` Laplace transform of the level-count increments, raw or
/// centered and scaled when `centered` is nonzero.
///
/// # Safety
/// `times` must point to `d` values and `w` to `d + 1` values.
#[no_mangle]
pub unsafe extern "C" fn motzkin_laplace_level(
    n: usize,
    times: *const f64,
    d: usize,
    w: *const f64,
    centered: i32,
    out: *mut f64,
) -> MotzkinStatus {
    guard(|| {
        let g = grid(times, d)?;
        let w = input(w, d + 1, "w")?;
        let v = if centered != 0 {
            oracles::laplace_level_increments_centered(n, &g, w)?
        } else {
            oracles::laplace_level_increments(n, &g, w)?
        };
        write(out, v)
    })
}

/// Level-weighted path generating polynomial at `t`.
///
/// # Safety
/// `out` must be valid for a write.
#[no_mangle]
pub unsafe extern "C" fn motzkin_sulanke(n: usize, t: f64, out: *mut f64) -> MotzkinStatus {
    guard(|| write(out, oracles::sulanke_poly(n, t)?))
}

/// Sum over paths of length `len` of the product of `u_j` over level steps.
///
/// # Safety
/// `u` must point to `len` readable values.
#[no_mangle]
pub unsafe extern "C" fn motzkin_level_pgf(u: *const f64, len: usize, out: *mut f64) -> MotzkinStatus {
    guard(|| {
        let v = oracles::level_pgf(input(u, len, "u")?);
        write(out, v)
    })
}

/// Stieltjes transform of the semicircle law at real `|z| > 2`.
///
/// # Safety
/// `out` must be valid for a write.
#[no_mangle]
pub unsafe extern "C" fn motzkin_stieltjes(z: f64, out: *mut f64) -> MotzkinStatus {
    guard(|| write(out, oracles::semicircle_stieltjes(z)?))
}

/// Copies the last error message into `buf` (nul-terminated, truncated to
/// fit) and returns the full message length, excluding the nul.
///
/// # Safety
/// `buf` must be null or valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn motzkin_last_error_copy(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let e = e.borrow();
        let bytes = e.as_ref().map_or(&b""[..], |c| c.to_bytes());
        if !buf.is_null() && len > 0 {
            let k = bytes.len().min(len - 1);
            ptr::copy_nonoverlapping(bytes.as_ptr().cast(), buf, k);
            *buf.add(k) = 0;
        }
        bytes.len()
    })
}

#[doc(hidden)]
pub fn last_error_string() -> Option<String> {
    let p = motzkin_last_error();
    (!p.is_null()).then(|| unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned())
}
