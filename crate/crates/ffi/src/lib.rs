//! C interface to `gkdv`.
//!
//! Every fallible function returns a [`GkdvStatus`]; on failure the message
//! and the library's error kind are kept per thread and can be read back with
//! [`gkdv_last_error_message`] and [`gkdv_last_error_kind`]. Waves live behind
//! the opaque [`GkdvWave`] handle. Strings handed out by the library must be
//! released with [`gkdv_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use gkdv::cli::config::{Grid, RunConfig, Settings};
use gkdv::cli::report::stability_report;
use gkdv::cli::{execute, CliError, Command};
use gkdv::indices::{Modulational, RealAxis};
use gkdv::monodromy::integrate_monodromy;
use gkdv::profile::{conserved_quantities, reconstruct_profile, ProfileSamples, WaveParameters};
use num_complex::Complex64;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GkdvStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullPointer = 1,
    /// Bad number, bad UTF-8 or unknown command name.
    InvalidArgument = 2,
    /// The run configuration could not be resolved.
    Config = 3,
    /// The computation failed; see [`gkdv_last_error_kind`].
    Computation = 4,
    /// `validate` ran but some checks failed. The report is still returned.
    ValidationFailed = 5,
    /// A Rust panic was caught at the boundary.
    Panic = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GkdvModulational {
    StableTripleImaginary = 0,
    UnstableTwoBranches = 1,
    Degenerate = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GkdvRealAxis {
    OddPeriodicCount = 0,
    EvenPeriodicCount = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GkdvComplex {
    pub re: f64,
    pub im: f64,
}

/// Indices at one wave. `tr2` and `tr3` are the second and third
/// μ-derivatives of tr M at the origin (up to the usual factorials).
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GkdvIndices {
    pub period: f64,
    pub tr2: f64,
    pub tr3: f64,
    pub orientation_jacobian: f64,
    pub delta: f64,
    pub modulational: GkdvModulational,
    pub real_axis: GkdvRealAxis,
}

/// Opaque wave handle.
pub struct GkdvWave {
    params: WaveParameters,
    period: f64,
    profile: Option<ProfileSamples>,
}

struct LastError {
    kind: CString,
    message: CString,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<LastError>> = const { RefCell::new(None) };
}

fn set_error(kind: &str, message: String) {
    let clean = |s: String| CString::new(s.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(LastError { kind: clean(kind.to_string()), message: clean(message) }));
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn fail(status: GkdvStatus, kind: &str, message: String) -> GkdvStatus {
    set_error(kind, message);
    status
}

fn computation(e: gkdv::Error) -> GkdvStatus {
    fail(GkdvStatus::Computation, e.kind(), e.to_string())
}

/// Runs `f` with panics turned into [`GkdvStatus::Panic`].
fn guard(f: impl FnOnce() -> GkdvStatus) -> GkdvStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            fail(GkdvStatus::Panic, "Panic", msg)
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, GkdvStatus> {
    if p.is_null() {
        return Err(fail(GkdvStatus::NullPointer, "NullPointer", format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|e| fail(GkdvStatus::InvalidArgument, "InvalidArgument", format!("{what}: {e}")))
}

fn to_c_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).map(CString::into_raw).unwrap_or(ptr::null_mut())
}

fn command_by_name(name: &str) -> Option<Command> {
    Some(match name {
        "wave" => Command::Wave,
        "indices" => Command::Indices,
        "band-trace" => Command::BandTrace,
        "real-scan" => Command::RealScan,
        "hill" => Command::Hill,
        "sweep" => Command::Sweep,
        "validate" => Command::Validate,
        _ => return None,
    })
}

fn settings_for(w: &GkdvWave, tol: f64) -> Result<Settings, GkdvStatus> {
    let p = w.params.nonlinearity.exponent().ok_or_else(|| {
        fail(GkdvStatus::InvalidArgument, "NotPowerLaw", "handle does not carry a power law".into())
    })?;
    let cfg = RunConfig {
        p: Some(p),
        a: Some(Grid::Value(w.params.a)),
        energy: Some(Grid::Value(w.params.energy)),
        c: Some(Grid::Value(w.params.c)),
        tol: (tol > 0.0).then_some(tol),
        ..RunConfig::default()
    };
    Settings::resolve(&cfg, false).map_err(|m| fail(GkdvStatus::Config, "Config", m))
}

/// Library version as a static NUL-terminated string. Never free it.
#[no_mangle]
pub extern "C" fn gkdv_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failure on this thread, or null if the last call
/// succeeded. Valid until the next library call on the same thread.
#[no_mangle]
pub extern "C" fn gkdv_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |x| x.message.as_ptr()))
}

/// Error kind of the last failure (`"NoPeriodicOrbit"`, `"DetDrift"`, ...),
/// or null. Same lifetime as [`gkdv_last_error_message`].
#[no_mangle]
pub extern "C" fn gkdv_last_error_kind() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |x| x.kind.as_ptr()))
}

/// Creates a power-law wave, f(u) = u^(p+1), and checks that (a, E, c)
/// carries a periodic orbit. On success `*out` owns a handle to release
/// with [`gkdv_wave_free`].
///
/// # Safety
/// `out` must be valid for one pointer write.
#[no_mangle]
pub unsafe extern "C" fn gkdv_wave_new(p: f64, a: f64, energy: f64, c: f64, out: *mut *mut GkdvWave) -> GkdvStatus {
    guard(|| {
        if out.is_null() {
            return fail(GkdvStatus::NullPointer, "NullPointer", "out is null".into());
        }
        *out = ptr::null_mut();
        let params = match WaveParameters::power_law(p, a, energy, c) {
            Ok(w) => w,
            Err(e) => return fail(GkdvStatus::InvalidArgument, e.kind(), e.to_string()),
        };
        match conserved_quantities(&params, 1e-12) {
            Ok(q) => {
                *out = Box::into_raw(Box::new(GkdvWave { params, period: q.period.value, profile: None }));
                GkdvStatus::Ok
            }
            Err(e) => computation(e),
        }
    })
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `wave` must come from [`gkdv_wave_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn gkdv_wave_free(wave: *mut GkdvWave) {
    if !wave.is_null() {
        drop(Box::from_raw(wave));
    }
}

/// Spatial period of the wave.
///
/// # Safety
/// `wave` must be a live handle and `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn gkdv_wave_period(wave: *const GkdvWave, out: *mut f64) -> GkdvStatus {
    guard(|| match (wave.as_ref(), out.is_null()) {
        (Some(w), false) => {
            *out = w.period;
            GkdvStatus::Ok
        }
        _ => fail(GkdvStatus::NullPointer, "NullPointer", "wave or out is null".into()),
    })
}

/// Stability indices and their classification. `tol <= 0` picks the
/// default tolerance.
///
/// # Safety
/// `wave` must be a live handle and `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn gkdv_wave_indices(wave: *const GkdvWave, tol: f64, out: *mut GkdvIndices) -> GkdvStatus {
    guard(|| {
        let Some(w) = wave.as_ref() else {
            return fail(GkdvStatus::NullPointer, "NullPointer", "wave is null".into());
        };
        if out.is_null() {
            return fail(GkdvStatus::NullPointer, "NullPointer", "out is null".into());
        }
        let s = match settings_for(w, tol) {
            Ok(s) => s,
            Err(st) => return st,
        };
        let r = match stability_report(&w.params, &s) {
            Ok(r) => r,
            Err(e) => return computation(e),
        };
        *out = GkdvIndices {
            period: r.conserved.period.value,
            tr2: r.indices.tr2,
            tr3: r.indices.tr3,
            orientation_jacobian: r.indices.orientation_jacobian,
            delta: r.indices.delta,
            modulational: match r.classification.modulational {
                Modulational::StableTripleImaginary => GkdvModulational::StableTripleImaginary,
                Modulational::UnstableTwoBranches => GkdvModulational::UnstableTwoBranches,
                Modulational::Degenerate => GkdvModulational::Degenerate,
            },
            real_axis: match r.classification.real_axis {
                RealAxis::OddPeriodicCount => GkdvRealAxis::OddPeriodicCount,
                RealAxis::EvenPeriodicCount => GkdvRealAxis::EvenPeriodicCount,
            },
        };
        GkdvStatus::Ok
    })
}

/// Trace of the monodromy matrix at spectral point `mu`, and optionally
/// `|det M − 1|`. The profile is built on first use and cached in the
/// handle, so a handle must not be shared between threads during this call.
///
/// # Safety
/// `wave` must be a live handle, `out` valid for one write, and
/// `det_residual` null or valid for one write.
#[no_mangle]
pub unsafe extern "C" fn gkdv_wave_trace(
    wave: *mut GkdvWave,
    mu: GkdvComplex,
    tol: f64,
    out: *mut GkdvComplex,
    det_residual: *mut f64,
) -> GkdvStatus {
    guard(|| {
        let Some(w) = wave.as_mut() else {
            return fail(GkdvStatus::NullPointer, "NullPointer", "wave is null".into());
        };
        if out.is_null() {
            return fail(GkdvStatus::NullPointer, "NullPointer", "out is null".into());
        }
        if !(mu.re.is_finite() && mu.im.is_finite()) {
            return fail(GkdvStatus::InvalidArgument, "InvalidArgument", "mu must be finite".into());
        }
        if w.profile.is_none() {
            match reconstruct_profile(&w.params, 512, false) {
                Ok(p) => w.profile = Some(p),
                Err(e) => return computation(e),
            }
        }
        let tol = if tol > 0.0 { tol } else { 1e-12 };
        match integrate_monodromy(w.profile.as_ref().unwrap(), Complex64::new(mu.re, mu.im), tol) {
            Ok(m) => {
                *out = GkdvComplex { re: m.trace.re, im: m.trace.im };
                if !det_residual.is_null() {
                    *det_residual = m.det_residual;
                }
                GkdvStatus::Ok
            }
            Err(e) => computation(e),
        }
    })
}

/// Runs a CLI command (`"wave"`, `"indices"`, `"band-trace"`, `"real-scan"`,
/// `"hill"`, `"sweep"`, `"validate"`) on a JSON run configuration with the
/// same keys as a `--config` file, and returns the rendered report in
/// `*out`. A failed `validate` still fills `*out` and returns
/// [`GkdvStatus::ValidationFailed`].
///
/// # Safety
/// `command` and `config_json` must be NUL-terminated strings, `out` valid
/// for one pointer write. Release `*out` with [`gkdv_string_free`].
#[no_mangle]
pub unsafe extern "C" fn gkdv_run(command: *const c_char, config_json: *const c_char, out: *mut *mut c_char) -> GkdvStatus {
    guard(|| {
        if out.is_null() {
            return fail(GkdvStatus::NullPointer, "NullPointer", "out is null".into());
        }
        *out = ptr::null_mut();
        let (name, json) = match (str_arg(command, "command"), str_arg(config_json, "config_json")) {
            (Ok(n), Ok(j)) => (n, j),
            (Err(s), _) | (_, Err(s)) => return s,
        };
        let Some(cmd) = command_by_name(name) else {
            return fail(GkdvStatus::InvalidArgument, "InvalidArgument", format!("unknown command {name:?}"));
        };
        let cfg: RunConfig = match serde_json::from_str(json) {
            Ok(c) => c,
            Err(e) => return fail(GkdvStatus::Config, "Config", e.to_string()),
        };
        if cfg.out.is_some() {
            return fail(GkdvStatus::Config, "Config", "\"out\" is not supported here".into());
        }
        let s = match Settings::resolve(&cfg, cmd == Command::Sweep) {
            Ok(s) => s,
            Err(m) => return fail(GkdvStatus::Config, "Config", m),
        };
        match execute(cmd, &s) {
            Ok(r) => {
                *out = to_c_string(r.text);
                if r.failed_checks > 0 {
                    return fail(
                        GkdvStatus::ValidationFailed,
                        "ValidationFailed",
                        format!("{} check(s) did not pass", r.failed_checks),
                    );
                }
                GkdvStatus::Ok
            }
            Err(CliError::Computation(e)) => computation(e),
            Err(CliError::Config(m)) => fail(GkdvStatus::Config, "Config", m),
            Err(e @ CliError::Validation(_)) => fail(GkdvStatus::ValidationFailed, "ValidationFailed", e.to_string()),
        }
    })
}

/// Releases a string returned by the library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn gkdv_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
