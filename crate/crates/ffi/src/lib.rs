//! C interface to `fronthaul-latency`.
//!
//! Every function returns an [`FhlStatus`] and writes results through out
//! pointers. On failure, [`fhl_last_error`] returns a message describing the
//! most recent error on the calling thread. Handles (`FhlCurve`,
//! `FhlExperiment`, `FhlSimulation`) are opaque and must be released with
//! their `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use fronthaul_latency::experiment::{bound_curves, simulate_experiment, ExperimentConfig};
use fronthaul_latency::forkjoin::{
    bound_curve, lower_bound_tail, upper_bound_tail, BoundKind, CurveKind, DelayCurve,
    ForkJoinConfig,
};
use fronthaul_latency::mm1::{mm1_sojourn_tail, Mm1Params};
use fronthaul_latency::planner::achievable_latency;
use fronthaul_latency::sim::MeanEstimate;
use fronthaul_latency::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FhlStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Unstable = 3,
    Config = 4,
    Unreachable = 5,
    Io = 6,
    OutOfRange = 7,
    Panic = 8,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FhlBound {
    Lower = 0,
    Upper = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FhlCurveKind {
    AnalyticLower = 0,
    AnalyticUpper = 1,
    Empirical = 2,
}

pub struct FhlCurve {
    inner: DelayCurve,
}

pub struct FhlExperiment {
    inner: ExperimentConfig,
}

pub struct FhlSimulation {
    curves: Vec<DelayCurve>,
    delays: Vec<MeanEstimate>,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(err: &Error) -> FhlStatus {
    match err {
        Error::Unstable { .. } => FhlStatus::Unstable,
        Error::UnreachableReliability { .. } => FhlStatus::Unreachable,
        Error::Io(_) => FhlStatus::Io,
        Error::Config(_) | Error::InvalidPolicy(_) | Error::Json(_) | Error::Csv(_) => {
            FhlStatus::Config
        }
        Error::InvalidParameters(_) | Error::InvalidCurve(_) | Error::EmptySamples => {
            FhlStatus::InvalidArgument
        }
    }
}

/// Runs `f`, translating errors and panics into a status.
fn guard(f: impl FnOnce() -> Result<(), (FhlStatus, String)>) -> FhlStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => FhlStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            FhlStatus::Panic
        }
    }
}

trait IntoFfi<T> {
    fn ffi(self) -> Result<T, (FhlStatus, String)>;
}

impl<T> IntoFfi<T> for fronthaul_latency::Result<T> {
    fn ffi(self) -> Result<T, (FhlStatus, String)> {
        self.map_err(|e| (status_of(&e), e.to_string()))
    }
}

fn null(what: &str) -> (FhlStatus, String) {
    (FhlStatus::NullPointer, format!("{what} is null"))
}

unsafe fn out<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, (FhlStatus, String)> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn path_arg<'a>(p: *const c_char) -> Result<&'a Path, (FhlStatus, String)> {
    if p.is_null() {
        return Err(null("path"));
    }
    CStr::from_ptr(p)
        .to_str()
        .map(Path::new)
        .map_err(|_| (FhlStatus::InvalidArgument, "path is not valid UTF-8".into()))
}

fn fork_join(
    n: usize,
    k: usize,
    bits: f64,
    capacity: f64,
) -> Result<ForkJoinConfig, (FhlStatus, String)> {
    ForkJoinConfig::new(n, k, bits, capacity).ffi()
}

fn bound_kind(b: FhlBound) -> BoundKind {
    match b {
        FhlBound::Lower => BoundKind::Lower,
        FhlBound::Upper => BoundKind::Upper,
    }
}

fn boxed<T>(value: T, slot: &mut *mut T) {
    *slot = Box::into_raw(Box::new(value));
}

/// Message of the last failed call on this thread. The pointer stays valid
/// until the next failing call on the same thread; never free it.
#[no_mangle]
pub extern "C" fn fhl_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// `P{T > tau}` for the M/M/1 sojourn time.
///
/// # Safety
/// `result` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn fhl_mm1_sojourn_tail(
    arrival_rate: f64,
    service_rate: f64,
    tau: f64,
    result: *mut f64,
) -> FhlStatus {
    guard(|| {
        let result = out(result, "result")?;
        let p = Mm1Params::new(arrival_rate, service_rate).ffi()?;
        *result = mm1_sojourn_tail(&p, tau).ffi()?;
        Ok(())
    })
}

/// Fork-join delay tail bound at `tau` for `(n, k)` coding over paths of
/// `path_capacity_bps`, packets of `packet_size_bits` arriving at
/// `arrival_rate`. `eps_trunc` only affects the upper bound.
///
/// # Safety
/// `result` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn fhl_bound_tail(
    which: FhlBound,
    n: usize,
    k: usize,
    packet_size_bits: f64,
    path_capacity_bps: f64,
    arrival_rate: f64,
    tau: f64,
    eps_trunc: f64,
    result: *mut f64,
) -> FhlStatus {
    guard(|| {
        let result = out(result, "result")?;
        let cfg = fork_join(n, k, packet_size_bits, path_capacity_bps)?;
        *result = match which {
            FhlBound::Lower => lower_bound_tail(&cfg, arrival_rate, tau),
            FhlBound::Upper => upper_bound_tail(&cfg, arrival_rate, tau, eps_trunc),
        }
        .ffi()?;
        Ok(())
    })
}

/// Bound curve on the `grid_len` latencies of `grid`.
///
/// # Safety
/// `grid` must point to `grid_len` doubles and `curve` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn fhl_bound_curve_new(
    which: FhlBound,
    n: usize,
    k: usize,
    packet_size_bits: f64,
    path_capacity_bps: f64,
    arrival_rate: f64,
    grid: *const f64,
    grid_len: usize,
    eps_trunc: f64,
    curve: *mut *mut FhlCurve,
) -> FhlStatus {
    guard(|| {
        let slot = out(curve, "curve")?;
        *slot = ptr::null_mut();
        if grid.is_null() {
            return Err(null("grid"));
        }
        let grid = std::slice::from_raw_parts(grid, grid_len);
        let cfg = fork_join(n, k, packet_size_bits, path_capacity_bps)?;
        let c = bound_curve(&cfg, arrival_rate, grid, bound_kind(which), eps_trunc).ffi()?;
        boxed(FhlCurve { inner: c }, slot);
        Ok(())
    })
}

/// Reads a curve file written by `fhlat` (CSV or JSON).
///
/// # Safety
/// `path` must be a NUL-terminated string and `curve` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn fhl_curve_load(
    path: *const c_char,
    curve: *mut *mut FhlCurve,
) -> FhlStatus {
    guard(|| {
        let slot = out(curve, "curve")?;
        *slot = ptr::null_mut();
        let path = path_arg(path)?;
        let text = std::fs::read_to_string(path)
            .map_err(|e| (FhlStatus::Io, format!("{}: {e}", path.display())))?;
        let c = DelayCurve::parse_any(&text).ffi()?;
        boxed(FhlCurve { inner: c }, slot);
        Ok(())
    })
}

/// Writes the curve as CSV.
///
/// # Safety
/// `curve` must come from this library and `path` be NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn fhl_curve_save_csv(
    curve: *const FhlCurve,
    path: *const c_char,
) -> FhlStatus {
    guard(|| {
        let c = curve.as_ref().ok_or_else(|| null("curve"))?;
        let path = path_arg(path)?;
        let text = c.inner.to_csv_string().ffi()?;
        std::fs::write(path, text)
            .map_err(|e| (FhlStatus::Io, format!("{}: {e}", path.display())))?;
        Ok(())
    })
}

/// Number of grid points; 0 for a null handle.
///
/// # Safety
/// `curve` must be null or come from this library.
#[no_mangle]
pub unsafe extern "C" fn fhl_curve_len(curve: *const FhlCurve) -> usize {
    curve.as_ref().map_or(0, |c| c.inner.points().len())
}

/// # Safety
/// `curve` must come from this library and `kind` be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn fhl_curve_kind(
    curve: *const FhlCurve,
    kind: *mut FhlCurveKind,
) -> FhlStatus {
    guard(|| {
        let c = curve.as_ref().ok_or_else(|| null("curve"))?;
        *out(kind, "kind")? = match c.inner.kind() {
            CurveKind::AnalyticLower => FhlCurveKind::AnalyticLower,
            CurveKind::AnalyticUpper => FhlCurveKind::AnalyticUpper,
            CurveKind::Empirical => FhlCurveKind::Empirical,
        };
        Ok(())
    })
}

/// Point `index` of the curve. `ci_half_width` receives NaN for analytic
/// curves; any of the out pointers may be null.
///
/// # Safety
/// `curve` must come from this library; non-null out pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn fhl_curve_point(
    curve: *const FhlCurve,
    index: usize,
    tau: *mut f64,
    tail: *mut f64,
    ci_half_width: *mut f64,
) -> FhlStatus {
    guard(|| {
        let c = curve.as_ref().ok_or_else(|| null("curve"))?;
        let p = c.inner.points().get(index).ok_or_else(|| {
            (
                FhlStatus::OutOfRange,
                format!(
                    "index {index} out of range for {} points",
                    c.inner.points().len()
                ),
            )
        })?;
        if let Some(t) = tau.as_mut() {
            *t = p.tau;
        }
        if let Some(t) = tail.as_mut() {
            *t = p.tail;
        }
        if let Some(h) = ci_half_width.as_mut() {
            *h = p.ci_half_width.unwrap_or(f64::NAN);
        }
        Ok(())
    })
}

/// Smallest latency at which the curve's tail is at most `1 - reliability`.
/// Returns `FHL_STATUS_UNREACHABLE` if the curve never gets there.
///
/// # Safety
/// `curve` must come from this library and `latency` be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn fhl_curve_achievable_latency(
    curve: *const FhlCurve,
    reliability: f64,
    latency: *mut f64,
) -> FhlStatus {
    guard(|| {
        let c = curve.as_ref().ok_or_else(|| null("curve"))?;
        *out(latency, "latency")? = achievable_latency(&c.inner, reliability).ffi()?;
        Ok(())
    })
}

/// # Safety
/// `curve` must be null or come from this library, and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn fhl_curve_free(curve: *mut FhlCurve) {
    if !curve.is_null() {
        drop(Box::from_raw(curve));
    }
}

/// Loads and validates an experiment config (or the config embedded in
/// an output file).
///
/// # Safety
/// `path` must be NUL-terminated and `experiment` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn fhl_experiment_load(
    path: *const c_char,
    experiment: *mut *mut FhlExperiment,
) -> FhlStatus {
    guard(|| {
        let slot = out(experiment, "experiment")?;
        *slot = ptr::null_mut();
        let cfg = ExperimentConfig::load(path_arg(path)?).ffi()?;
        boxed(FhlExperiment { inner: cfg }, slot);
        Ok(())
    })
}

/// # Safety
/// `experiment` must be null or come from this library.
#[no_mangle]
pub unsafe extern "C" fn fhl_experiment_class_count(experiment: *const FhlExperiment) -> usize {
    experiment.as_ref().map_or(0, |e| e.inner.classes.len())
}

/// Bound curve of class `class_index` on the experiment's grid.
///
/// # Safety
/// `experiment` must come from this library and `curve` be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn fhl_experiment_bound_curve(
    experiment: *const FhlExperiment,
    class_index: usize,
    which: FhlBound,
    curve: *mut *mut FhlCurve,
) -> FhlStatus {
    guard(|| {
        let slot = out(curve, "curve")?;
        *slot = ptr::null_mut();
        let e = experiment.as_ref().ok_or_else(|| null("experiment"))?;
        let mut all = bound_curves(&e.inner).ffi()?;
        if class_index >= all.len() {
            return Err((FhlStatus::OutOfRange, format!("no class {class_index}")));
        }
        let b = all.swap_remove(class_index);
        let c = match which {
            FhlBound::Lower => b.lower,
            FhlBound::Upper => b.upper,
        };
        boxed(FhlCurve { inner: c }, slot);
        Ok(())
    })
}

/// Runs every replication of the experiment.
///
/// # Safety
/// `experiment` must come from this library and `simulation` be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn fhl_experiment_simulate(
    experiment: *const FhlExperiment,
    simulation: *mut *mut FhlSimulation,
) -> FhlStatus {
    guard(|| {
        let slot = out(simulation, "simulation")?;
        *slot = ptr::null_mut();
        let e = experiment.as_ref().ok_or_else(|| null("experiment"))?;
        let (o, _) = simulate_experiment(&e.inner).ffi()?;
        let delays = o.summary.classes.iter().map(|c| c.mean_delay).collect();
        boxed(
            FhlSimulation {
                curves: o.curves,
                delays,
            },
            slot,
        );
        Ok(())
    })
}

/// # Safety
/// `experiment` must be null or come from this library, and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn fhl_experiment_free(experiment: *mut FhlExperiment) {
    if !experiment.is_null() {
        drop(Box::from_raw(experiment));
    }
}

/// Pooled empirical curve of class `class_index`, as a new handle.
///
/// # Safety
/// `simulation` must come from this library and `curve` be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn fhl_simulation_curve(
    simulation: *const FhlSimulation,
    class_index: usize,
    curve: *mut *mut FhlCurve,
) -> FhlStatus {
    guard(|| {
        let slot = out(curve, "curve")?;
        *slot = ptr::null_mut();
        let s = simulation.as_ref().ok_or_else(|| null("simulation"))?;
        let c = s
            .curves
            .get(class_index)
            .ok_or_else(|| (FhlStatus::OutOfRange, format!("no class {class_index}")))?;
        boxed(FhlCurve { inner: c.clone() }, slot);
        Ok(())
    })
}

/// Mean packet delay of class `class_index` and its batch-means standard error.
///
/// # Safety
/// `simulation` must come from this library; out pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn fhl_simulation_mean_delay(
    simulation: *const FhlSimulation,
    class_index: usize,
    mean: *mut f64,
    stderr: *mut f64,
) -> FhlStatus {
    guard(|| {
        let s = simulation.as_ref().ok_or_else(|| null("simulation"))?;
        let d = s
            .delays
            .get(class_index)
            .ok_or_else(|| (FhlStatus::OutOfRange, format!("no class {class_index}")))?;
        *out(mean, "mean")? = d.mean;
        *out(stderr, "stderr")? = d.stderr;
        Ok(())
    })
}

/// # Safety
/// `simulation` must be null or come from this library, and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn fhl_simulation_free(simulation: *mut FhlSimulation) {
    if !simulation.is_null() {
        drop(Box::from_raw(simulation));
    }
}
