//! C ABI over `mtm_lab`.
//!
//! Objects cross the boundary as opaque handles owned by the caller and
//! released with the matching `*_free`. Every fallible call returns an
//! [`MtmStatus`]; on failure the message is available from
//! [`mtm_last_error`] on the same thread. Panics never unwind into C.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

use mtm_lab::harness::{self, Command};
use mtm_lab::rhp::{self, HilbertPlan, RhpConfig};
use mtm_lab::scattering::{self, ScatterConfig, ScatteringData};
use mtm_lab::{asymptotics, simulator, solitons, Error, FieldState, C64};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MtmStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    OutOfRange = 3,
    Config = 4,
    Numerical = 5,
    Io = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct MtmComplex {
    pub re: f64,
    pub im: f64,
}

/// Both field components at one point.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct MtmPoint {
    pub u: MtmComplex,
    pub v: MtmComplex,
}

/// Which reflection coefficient to sample: r on the w-line or r-hat on the z-line.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MtmReflection {
    W = 0,
    Z = 1,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MtmCommand {
    Simulate = 0,
    Scatter = 1,
    Predict = 2,
    Soliton = 3,
    Reconstruct = 4,
    Resolve = 5,
    Report = 6,
}

/// Field state (u, v) on a uniform grid at one time.
pub struct MtmFields(FieldState);

/// Reflection coefficients and discrete spectrum.
pub struct MtmScattering(ScatteringData);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

enum Fail {
    Null(&'static str),
    Range(String),
    Arg(String),
    Lab(Error),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Lab(e)
    }
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> MtmStatus {
    match e {
        Error::Domain(_) | Error::Contract(_) | Error::InvalidData(_) => MtmStatus::InvalidArgument,
        Error::Config(_) | Error::Json(_) => MtmStatus::Config,
        Error::Io(_) => MtmStatus::Io,
        _ => MtmStatus::Numerical,
    }
}

fn guard<F: FnOnce() -> Result<(), Fail>>(f: F) -> MtmStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error(String::new());
            MtmStatus::Ok
        }
        Ok(Err(Fail::Null(name))) => {
            set_error(format!("{name} is null"));
            MtmStatus::NullPointer
        }
        Ok(Err(Fail::Range(m))) => {
            set_error(m);
            MtmStatus::OutOfRange
        }
        Ok(Err(Fail::Arg(m))) => {
            set_error(m);
            MtmStatus::InvalidArgument
        }
        Ok(Err(Fail::Lab(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("panic: {msg}"));
            MtmStatus::Panic
        }
    }
}

unsafe fn get<'a, T>(p: *const T, name: &'static str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or(Fail::Null(name))
}

unsafe fn put<T>(p: *mut T, name: &'static str, value: T) -> Result<(), Fail> {
    if p.is_null() {
        return Err(Fail::Null(name));
    }
    p.write(value);
    Ok(())
}

unsafe fn text<'a>(p: *const c_char, name: &'static str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(Fail::Null(name));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Fail::Arg(format!("{name} is not valid UTF-8")))
}

fn c64(z: MtmComplex) -> C64 {
    C64::new(z.re, z.im)
}

fn mtm(z: C64) -> MtmComplex {
    MtmComplex { re: z.re, im: z.im }
}

fn point((u, v): (C64, C64)) -> MtmPoint {
    MtmPoint { u: mtm(u), v: mtm(v) }
}

fn boxed<T>(v: T) -> *mut T {
    Box::into_raw(Box::new(v))
}

fn owned_string(s: String) -> Result<*mut c_char, Fail> {
    CString::new(s).map(CString::into_raw).map_err(|_| Fail::Arg("string contains NUL".into()))
}

/// Message of the last failed call on this thread, or "" after a success.
/// The pointer stays valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn mtm_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Releases a string returned by this library.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn mtm_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Copies `n` samples of u and v on the grid x_start + k dx into a new handle.
///
/// # Safety
/// `u` and `v` must point to `n` readable values; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mtm_fields_new(
    t: f64,
    x_start: f64,
    dx: f64,
    n: usize,
    u: *const MtmComplex,
    v: *const MtmComplex,
    out: *mut *mut MtmFields,
) -> MtmStatus {
    guard(|| {
        if u.is_null() || v.is_null() {
            return Err(Fail::Null("u or v"));
        }
        let u = std::slice::from_raw_parts(u, n).iter().map(|&z| c64(z)).collect();
        let v = std::slice::from_raw_parts(v, n).iter().map(|&z| c64(z)).collect();
        let f = FieldState::new(t, x_start, dx, u, v)?;
        put(out, "out", boxed(MtmFields(f)))
    })
}

/// Gaussian data u = a exp(-(x/width)^2), v = e^{i phase} u on [-half_width, half_width].
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mtm_fields_gaussian(
    amplitude: f64,
    width: f64,
    v_phase: f64,
    half_width: f64,
    dx: f64,
    out: *mut *mut MtmFields,
) -> MtmStatus {
    guard(|| {
        if !(width > 0.0 && half_width > 0.0 && dx > 0.0 && dx < half_width) {
            return Err(Fail::Arg("width, half_width and dx must be positive with dx < half_width".into()));
        }
        let rot = C64::from_polar(1.0, v_phase);
        let f = FieldState::on_interval(0.0, half_width, dx, |x| {
            let g = C64::from(amplitude * (-(x / width) * (x / width)).exp());
            (g, rot * g)
        });
        put(out, "out", boxed(MtmFields(f)))
    })
}

/// # Safety
/// `f` must be null or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn mtm_fields_free(f: *mut MtmFields) {
    if !f.is_null() {
        drop(Box::from_raw(f));
    }
}

/// Number of grid points; 0 for a null handle.
///
/// # Safety
/// `f` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn mtm_fields_len(f: *const MtmFields) -> usize {
    f.as_ref().map_or(0, |f| f.0.len())
}

/// Time, first node and spacing of the grid.
///
/// # Safety
/// `f` must be a live handle; outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn mtm_fields_grid(
    f: *const MtmFields,
    t: *mut f64,
    x_start: *mut f64,
    dx: *mut f64,
) -> MtmStatus {
    guard(|| {
        let f = &get(f, "fields")?.0;
        put(t, "t", f.t)?;
        put(x_start, "x_start", f.x_start)?;
        put(dx, "dx", f.dx)
    })
}

/// Node k and the fields there.
///
/// # Safety
/// `f` must be a live handle; outputs must be writable (`x` may be null).
#[no_mangle]
pub unsafe extern "C" fn mtm_fields_get(f: *const MtmFields, k: usize, x: *mut f64, out: *mut MtmPoint) -> MtmStatus {
    guard(|| {
        let f = &get(f, "fields")?.0;
        if k >= f.len() {
            return Err(Fail::Range(format!("index {k} out of range for {} nodes", f.len())));
        }
        if !x.is_null() {
            x.write(f.x(k));
        }
        put(out, "out", point((f.u[k], f.v[k])))
    })
}

/// Conserved charge, the integral of |u|^2 + |v|^2.
///
/// # Safety
/// `f` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mtm_fields_charge(f: *const MtmFields, out: *mut f64) -> MtmStatus {
    guard(|| put(out, "out", simulator::charge(&get(f, "fields")?.0)))
}

/// Advances to `t_final` with the split-step solver (time step = dx).
/// `drift`, if non-null, receives the relative charge drift.
///
/// # Safety
/// `f` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mtm_fields_evolve(
    f: *const MtmFields,
    t_final: f64,
    out: *mut *mut MtmFields,
    drift: *mut f64,
) -> MtmStatus {
    guard(|| {
        let (next, report) = simulator::evolve(&get(f, "fields")?.0, t_final)?;
        if !drift.is_null() {
            drift.write(report.relative_drift());
        }
        put(out, "out", boxed(MtmFields(next)))
    })
}

/// Direct transform sampling r and r-hat at `n_grid` points of [w_min, w_max].
///
/// # Safety
/// `f` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mtm_scatter(
    f: *const MtmFields,
    w_min: f64,
    w_max: f64,
    n_grid: usize,
    out: *mut *mut MtmScattering,
) -> MtmStatus {
    guard(|| {
        let cfg = ScatterConfig { w_min, w_max, n_grid, ..ScatterConfig::default() };
        let s = scattering::scattering_data(&get(f, "fields")?.0, &cfg)?;
        put(out, "out", boxed(MtmScattering(s)))
    })
}

/// Parses scattering data in the JSON layout written by `mtm-lab scatter`.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mtm_scattering_from_json(json: *const c_char, out: *mut *mut MtmScattering) -> MtmStatus {
    guard(|| {
        let s = ScatteringData::from_json(text(json, "json")?)?;
        put(out, "out", boxed(MtmScattering(s)))
    })
}

/// Serializes to JSON; release the string with `mtm_string_free`.
///
/// # Safety
/// `s` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mtm_scattering_to_json(s: *const MtmScattering, out: *mut *mut c_char) -> MtmStatus {
    guard(|| {
        let json = owned_string(get(s, "scattering")?.0.to_json())?;
        put(out, "out", json)
    })
}

/// # Safety
/// `s` must be null or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn mtm_scattering_free(s: *mut MtmScattering) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Number of eigenvalues; 0 for a null handle.
///
/// # Safety
/// `s` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn mtm_scattering_eigen_count(s: *const MtmScattering) -> usize {
    s.as_ref().map_or(0, |s| s.0.spectrum.len())
}

/// Eigenvalue lambda_j and norming constant C_j.
///
/// # Safety
/// `s` must be a live handle; outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn mtm_scattering_eigen(
    s: *const MtmScattering,
    j: usize,
    lambda: *mut MtmComplex,
    big_c: *mut MtmComplex,
) -> MtmStatus {
    guard(|| {
        let sp = &get(s, "scattering")?.0.spectrum;
        if j >= sp.len() {
            return Err(Fail::Range(format!("eigenvalue {j} out of range for {}", sp.len())));
        }
        put(lambda, "lambda", mtm(sp.eigenvalues[j]))?;
        put(big_c, "big_c", mtm(sp.norming[j]))
    })
}

/// Interpolated reflection coefficient at `at`; zero outside the sampled range.
///
/// # Safety
/// `s` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mtm_scattering_reflection(
    s: *const MtmScattering,
    which: MtmReflection,
    at: f64,
    out: *mut MtmComplex,
) -> MtmStatus {
    guard(|| {
        let s = &get(s, "scattering")?.0;
        let f = match which {
            MtmReflection::W => &s.r,
            MtmReflection::Z => &s.r_hat,
        };
        put(out, "out", mtm(f.eval(at)))
    })
}

/// Scattering data at time t under the linear flow.
///
/// # Safety
/// `s` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mtm_scattering_evolve(
    s: *const MtmScattering,
    t: f64,
    out: *mut *mut MtmScattering,
) -> MtmStatus {
    guard(|| {
        let next = scattering::evolve_scattering(&get(s, "scattering")?.0, t);
        put(out, "out", boxed(MtmScattering(next)))
    })
}

/// Leading-order long-time fields at (t, x) from the radiation part.
///
/// # Safety
/// `s` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mtm_predict(s: *const MtmScattering, t: f64, x: f64, out: *mut MtmPoint) -> MtmStatus {
    guard(|| {
        let p = asymptotics::predict_fields(&get(s, "scattering")?.0.r_hat, t, x)?;
        put(out, "out", point(p))
    })
}

/// Fields at (t, x) through the Riemann-Hilbert problem, on a contour
/// [-half_width, half_width] with `nodes` points. Radiation-only or
/// reflectionless data.
///
/// # Safety
/// `s` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mtm_reconstruct(
    s: *const MtmScattering,
    t: f64,
    x: f64,
    half_width: f64,
    nodes: usize,
    out: *mut MtmPoint,
) -> MtmStatus {
    guard(|| {
        let s = &get(s, "scattering")?.0;
        if !(half_width > 0.0) || nodes < 8 {
            return Err(Fail::Arg("need half_width > 0 and at least 8 nodes".into()));
        }
        let cfg = RhpConfig { half_width, nodes, ..RhpConfig::default() };
        let p = if s.spectrum.is_empty() {
            rhp::reconstruct_point(s, t, x, &HilbertPlan::new(nodes), &cfg)?
        } else {
            let f = rhp::reconstruct_fields(s, t, x, 1.0, 1, &cfg)?;
            (f.u[0], f.v[0])
        };
        put(out, "out", point(p))
    })
}

/// Exact one-soliton fields for eigenvalue lambda and norming constant C.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mtm_one_soliton(
    lambda: MtmComplex,
    big_c: MtmComplex,
    t: f64,
    x: f64,
    out: *mut MtmPoint,
) -> MtmStatus {
    guard(|| {
        let p = solitons::one_soliton(c64(lambda), c64(big_c), t, x)?;
        put(out, "out", point(p))
    })
}

/// Runs one CLI command on a JSON config file, writing into `out_dir`.
/// `passed` receives 1 if every check held, else 0. `run_dir`, if non-null,
/// receives the directory written (free with `mtm_string_free`).
///
/// # Safety
/// Strings must be NUL-terminated; `passed` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mtm_run(
    command: MtmCommand,
    config_path: *const c_char,
    out_dir: *const c_char,
    passed: *mut i32,
    run_dir: *mut *mut c_char,
) -> MtmStatus {
    guard(|| {
        let cfg = harness::load_config(Path::new(text(config_path, "config_path")?))?;
        let out = Path::new(text(out_dir, "out_dir")?);
        let command = match command {
            MtmCommand::Simulate => Command::Simulate,
            MtmCommand::Scatter => Command::Scatter,
            MtmCommand::Predict => Command::Predict,
            MtmCommand::Soliton => Command::Soliton,
            MtmCommand::Reconstruct => Command::Reconstruct,
            MtmCommand::Resolve => Command::Resolve,
            MtmCommand::Report => Command::Report,
        };
        let o = harness::run(command, &cfg, out)?;
        put(passed, "passed", i32::from(o.summary.pass))?;
        if !run_dir.is_null() {
            run_dir.write(owned_string(o.dir.display().to_string())?);
        }
        Ok(())
    })
}
