//! C interface.
//!
//! Networks and tuple sets cross the boundary as opaque handles built from
//! JSON; reports and samples come back as JSON or CSV strings owned by the
//! library and released with [`dsn_string_free`]. Every entry point returns a
//! [`DsnStatus`]; on failure [`dsn_last_error`] describes the cause.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use disentangle::cbn::CausalNet;
use disentangle::disentangle::{disentangle_finite_samples, disentangle_oracle_report, DisentangleError, ExactMixture};
use disentangle::estimate::{ancestral_sample, mixture_sample, mle_cpds, SampleSet, SampleSource};
use disentangle::intervene::{check_exclusion, InterventionTupleSet};
use disentangle::io;
use disentangle::scalar::Rational;

/// Result of every call. Values match the command-line exit codes where
/// they overlap.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DsnStatus {
    Ok = 0,
    Error = 1,
    InvalidArgument = 2,
    ExclusionUnsatisfiable = 3,
    Inconsistent = 4,
    Panic = 5,
}

/// A causal network.
pub struct DsnNet {
    exact: CausalNet<Rational>,
    float: CausalNet<f64>,
}

/// A set of intervention tuples tied to the network it was parsed against.
pub struct DsnTuples {
    set: InterventionTupleSet<Rational>,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

type Failure = (DsnStatus, String);

fn invalid(msg: impl Into<String>) -> Failure {
    (DsnStatus::InvalidArgument, msg.into())
}

fn error(e: impl ToString) -> Failure {
    (DsnStatus::Error, e.to_string())
}

fn from_disentangle(e: DisentangleError) -> Failure {
    let status = match &e {
        DisentangleError::ExclusionUnsatisfiable { .. } => DsnStatus::ExclusionUnsatisfiable,
        e if e.is_inconsistency() => DsnStatus::Inconsistent,
        _ => DsnStatus::Error,
    };
    (status, e.to_string())
}

fn guard<F>(f: F) -> DsnStatus
where
    F: FnOnce() -> Result<(), Failure>,
{
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            DsnStatus::Ok
        }
        Ok(Err((status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            DsnStatus::Panic
        }
    }
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(invalid(format!("{what} is null")));
    }
    CStr::from_ptr(p).to_str().map_err(|_| invalid(format!("{what} is not valid UTF-8")))
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| invalid(format!("{what} is null")))
}

unsafe fn emit(out: *mut *mut c_char, s: String) -> Result<(), Failure> {
    let c = CString::new(s).map_err(error)?;
    *out = c.into_raw();
    Ok(())
}

fn check_out<T>(out: *mut *mut T) -> Result<(), Failure> {
    if out.is_null() {
        Err(invalid("output pointer is null"))
    } else {
        Ok(())
    }
}

/// Message for the last failed call on this thread; empty after a success.
/// Valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn dsn_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn dsn_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Parses a network document into `*out`.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn dsn_net_from_json(json: *const c_char, out: *mut *mut DsnNet) -> DsnStatus {
    guard(|| {
        check_out(out)?;
        let json = text(json, "json")?;
        let exact = io::net_from_json::<Rational>(json).map_err(error)?;
        let float = io::net_from_json::<f64>(json).map_err(error)?;
        *out = Box::into_raw(Box::new(DsnNet { exact, float }));
        Ok(())
    })
}

/// Number of nodes, or 0 for a null handle.
///
/// # Safety
/// `net` must be null or a handle from [`dsn_net_from_json`].
#[no_mangle]
pub unsafe extern "C" fn dsn_net_node_count(net: *const DsnNet) -> usize {
    net.as_ref().map_or(0, |n| n.exact.len())
}

/// # Safety
/// `net` must be null or a handle from [`dsn_net_from_json`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn dsn_net_free(net: *mut DsnNet) {
    if !net.is_null() {
        drop(Box::from_raw(net));
    }
}

/// Parses a tuple-set document, checking targets against `net`.
///
/// # Safety
/// Pointers must be valid; `json` NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn dsn_tuples_from_json(
    net: *const DsnNet,
    json: *const c_char,
    out: *mut *mut DsnTuples,
) -> DsnStatus {
    guard(|| {
        check_out(out)?;
        let net = handle(net, "net")?;
        let set = io::tuples_from_json::<Rational>(text(json, "json")?, Some(net.exact.dag())).map_err(error)?;
        *out = Box::into_raw(Box::new(DsnTuples { set }));
        Ok(())
    })
}

/// Number of tuples, or 0 for a null handle.
///
/// # Safety
/// `tuples` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn dsn_tuples_len(tuples: *const DsnTuples) -> usize {
    tuples.as_ref().map_or(0, |t| t.set.len())
}

/// Serializes a tuple set; release the string with [`dsn_string_free`].
///
/// # Safety
/// `tuples` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn dsn_tuples_to_json(tuples: *const DsnTuples, out: *mut *mut c_char) -> DsnStatus {
    guard(|| {
        check_out(out)?;
        emit(out, io::tuples_to_json(&handle(tuples, "tuples")?.set))
    })
}

/// # Safety
/// `tuples` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn dsn_tuples_free(tuples: *mut DsnTuples) {
    if !tuples.is_null() {
        drop(Box::from_raw(tuples));
    }
}

/// Exact recovery of `tuples` from the mixture it generates on `net`; writes
/// the report JSON to `*report`.
///
/// # Safety
/// Handles must be live and `report` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn dsn_disentangle_oracle(
    net: *const DsnNet,
    tuples: *const DsnTuples,
    report: *mut *mut c_char,
) -> DsnStatus {
    guard(|| {
        check_out(report)?;
        let net = &handle(net, "net")?.exact;
        let set = &handle(tuples, "tuples")?.set;
        check_exclusion(set, net.dag()).map_err(|e| (DsnStatus::ExclusionUnsatisfiable, e.to_string()))?;
        let r = disentangle_oracle_report(net, &ExactMixture::new(net, set)).map_err(from_disentangle)?;
        emit(report, io::report_to_json(&r))
    })
}

/// Finite-sample recovery. `obs_csv` and `mix_csv` hold observational and
/// mixture samples with a header row of node labels; only the graph of
/// `net` is used.
///
/// # Safety
/// `net` must be live, the CSV arguments NUL-terminated, `report` valid.
#[no_mangle]
pub unsafe extern "C" fn dsn_disentangle_finite(
    net: *const DsnNet,
    obs_csv: *const c_char,
    mix_csv: *const c_char,
    epsilon: f64,
    delta: f64,
    report: *mut *mut c_char,
) -> DsnStatus {
    guard(|| {
        check_out(report)?;
        if !(epsilon > 0.0 && delta > 0.0) {
            return Err(invalid("epsilon and delta must be positive"));
        }
        let dag = handle(net, "net")?.float.dag();
        let obs = SampleSet::read_csv(text(obs_csv, "obs_csv")?.as_bytes(), dag, SampleSource::Observational)
            .map_err(error)?;
        let mix =
            SampleSet::read_csv(text(mix_csv, "mix_csv")?.as_bytes(), dag, SampleSource::Mixture).map_err(error)?;
        let net_hat = mle_cpds(&obs, dag, delta).map_err(error)?;
        let r = disentangle_finite_samples(&net_hat, &mix, epsilon).map_err(from_disentangle)?;
        emit(report, io::report_to_json(&r))
    })
}

/// Draws `samples` rows as CSV: from the mixture of `tuples` when non-null,
/// otherwise from `net` itself.
///
/// # Safety
/// `net` must be live, `tuples` null or live, `csv` valid.
#[no_mangle]
pub unsafe extern "C" fn dsn_sample(
    net: *const DsnNet,
    tuples: *const DsnTuples,
    seed: u64,
    samples: usize,
    csv: *mut *mut c_char,
) -> DsnStatus {
    guard(|| {
        check_out(csv)?;
        let net = &handle(net, "net")?.float;
        let set = match tuples.as_ref() {
            Some(t) => mixture_sample(net, &t.set.convert::<f64>(), seed, samples),
            None => ancestral_sample(net, seed, samples),
        };
        let mut buf = Vec::new();
        set.write_csv(&mut buf).map_err(error)?;
        emit(csv, String::from_utf8(buf).map_err(error)?)
    })
}

/// Releases a string returned by this library.
///
/// # Safety
/// `s` must be null or a string from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn dsn_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
