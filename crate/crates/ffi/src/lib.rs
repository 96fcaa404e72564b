//! C interface to `ban-opt`.
//!
//! Networks and reports are opaque handles owned by the caller and released
//! with their `_free` function. Strings returned through `char **` out
//! parameters are owned by the caller and released with `ban_string_free`.
//! Every function returns a [`BanStatus`]; on failure a description is kept
//! for the calling thread and can be read with `ban_last_error_message`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use ban_opt::dynamics::attractors;
use ban_opt::network::recursive_wiring;
use ban_opt::outputs::output_circuit;
use ban_opt::report::ReportJson;
use ban_opt::{optimize, Error, NetworkDef, NetworkFile, OptimizeOptions, PipelineReport};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BanStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    Promise = 4,
    Cap = 5,
    OpenInputs = 6,
    Cyclic = 7,
    UnknownNode = 8,
    Internal = 9,
    Panic = 10,
}

/// A parsed network file.
pub struct BanNetwork {
    file: NetworkFile,
}

/// Result of the optimization pipeline.
pub struct BanReport {
    report: PipelineReport,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> BanStatus {
    match e {
        Error::Syntax { .. }
        | Error::UnknownIdentifier { .. }
        | Error::Network(_)
        | Error::Io(_)
        | Error::Unassigned(_)
        | Error::InvalidShift(_)
        | Error::IncompleteInput(_)
        | Error::InvalidMapping(_) => BanStatus::Parse,
        Error::PromiseViolation(_) => BanStatus::Promise,
        Error::FanInCap { .. } | Error::StateSpaceCap { .. } | Error::Bounds(_) => BanStatus::Cap,
        Error::OpenInputs(_) => BanStatus::OpenInputs,
        Error::CyclicModule(_) => BanStatus::Cyclic,
        Error::UnknownNode(_) => BanStatus::UnknownNode,
        Error::SeedMismatch(_) | Error::HypothesisFailed(_) => BanStatus::Internal,
    }
}

struct Failure(BanStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> BanStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => BanStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            BanStatus::Panic
        }
    }
}

fn null(what: &str) -> Failure {
    Failure(BanStatus::NullPointer, format!("`{what}` is null"))
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(BanStatus::InvalidUtf8, format!("`{what}` is not UTF-8")))
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> Result<(), Failure> {
    let c = CString::new(s)
        .map_err(|_| Failure(BanStatus::Internal, "string contains a nul byte".into()))?;
    *out = c.into_raw();
    Ok(())
}

fn closed(file: &NetworkFile) -> Result<NetworkDef, Error> {
    if file.wiring.is_empty() {
        Ok(file.network.clone())
    } else {
        recursive_wiring(&file.network, &file.wiring)
    }
}

/// Parses a network file. On success `*out` receives a new handle.
///
/// # Safety
/// `text` must be a valid nul-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ban_network_parse(
    text: *const c_char,
    out: *mut *mut BanNetwork,
) -> BanStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let text = str_arg(text, "text")?;
        let file = NetworkFile::parse(text)?;
        *out = Box::into_raw(Box::new(BanNetwork { file }));
        Ok(())
    })
}

/// Releases a network handle; null is ignored.
///
/// # Safety
/// `net` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ban_network_free(net: *mut BanNetwork) {
    if !net.is_null() {
        drop(Box::from_raw(net));
    }
}

/// Number of nodes, or 0 for a null handle.
///
/// # Safety
/// `net` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ban_network_node_count(net: *const BanNetwork) -> usize {
    net.as_ref().map_or(0, |n| n.file.network.len())
}

/// Number of declared inputs, or 0 for a null handle.
///
/// # Safety
/// `net` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ban_network_input_count(net: *const BanNetwork) -> usize {
    net.as_ref().map_or(0, |n| n.file.network.inputs().len())
}

/// Prints the network in file format.
///
/// # Safety
/// `net` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ban_network_to_string(
    net: *const BanNetwork,
    out: *mut *mut c_char,
) -> BanStatus {
    guard(|| {
        let net = net.as_ref().ok_or_else(|| null("net"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        put_string(out, net.file.to_string())
    })
}

/// JSON attractor report of the network, with its wires applied. `max_n`
/// caps the node count; 0 selects the default cap.
///
/// # Safety
/// `net` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ban_network_attractors_json(
    net: *const BanNetwork,
    max_n: usize,
    out: *mut *mut c_char,
) -> BanStatus {
    guard(|| {
        let net = net.as_ref().ok_or_else(|| null("net"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let max_n = if max_n == 0 {
            ban_opt::dynamics::DEFAULT_MAX_N
        } else {
            max_n
        };
        let f = closed(&net.file)?;
        let atts = attractors(&f, max_n)?;
        put_string(out, ReportJson::attractors(&f, &atts).to_json())
    })
}

/// Output function of `node` in an acyclic module: the expression goes to
/// `*expr_out`, the delay to `*delay_out`.
///
/// # Safety
/// `net` must be a live handle, `node` a nul-terminated string and both out
/// pointers valid.
#[no_mangle]
pub unsafe extern "C" fn ban_network_output_function(
    net: *const BanNetwork,
    node: *const c_char,
    expr_out: *mut *mut c_char,
    delay_out: *mut u32,
) -> BanStatus {
    guard(|| {
        let net = net.as_ref().ok_or_else(|| null("net"))?;
        let node = str_arg(node, "node")?;
        if expr_out.is_null() {
            return Err(null("expr_out"));
        }
        if delay_out.is_null() {
            return Err(null("delay_out"));
        }
        let o = output_circuit(&net.file.network, node)?;
        put_string(expr_out, o.expr.to_string())?;
        *delay_out = o.delay;
        Ok(())
    })
}

/// Runs the optimization pipeline on the network with its wires applied.
/// With `verify`, attractors of both networks are compared when they have
/// at most `max_n` nodes (0 selects the default cap).
///
/// # Safety
/// `net` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ban_optimize(
    net: *const BanNetwork,
    max_n: usize,
    verify: bool,
    out: *mut *mut BanReport,
) -> BanStatus {
    guard(|| {
        let net = net.as_ref().ok_or_else(|| null("net"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let mut opts = OptimizeOptions {
            verify,
            ..OptimizeOptions::default()
        };
        if max_n != 0 {
            opts.max_n = max_n;
        }
        let report = optimize(&closed(&net.file)?, opts)?;
        *out = Box::into_raw(Box::new(BanReport { report }));
        Ok(())
    })
}

/// Releases a report handle; null is ignored.
///
/// # Safety
/// `report` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ban_report_free(report: *mut BanReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// Node count of the original network, or 0 for a null handle.
///
/// # Safety
/// `report` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ban_report_nodes_before(report: *const BanReport) -> usize {
    report.as_ref().map_or(0, |r| r.report.before())
}

/// Node count of the optimized network, or 0 for a null handle.
///
/// # Safety
/// `report` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ban_report_nodes_after(report: *const BanReport) -> usize {
    report.as_ref().map_or(0, |r| r.report.after())
}

/// Size of the cut set, or 0 for a null handle.
///
/// # Safety
/// `report` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ban_report_cut_size(report: *const BanReport) -> usize {
    report.as_ref().map_or(0, |r| r.report.cut.len())
}

/// 1 when the attractors were compared and matched, 0 when they differ,
/// -1 when they were not compared.
///
/// # Safety
/// `report` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ban_report_verified(report: *const BanReport) -> i32 {
    match report.as_ref().and_then(|r| r.report.verified) {
        Some(true) => 1,
        Some(false) => 0,
        None => -1,
    }
}

/// JSON pipeline report.
///
/// # Safety
/// `report` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ban_report_json(
    report: *const BanReport,
    out: *mut *mut c_char,
) -> BanStatus {
    guard(|| {
        let r = report.as_ref().ok_or_else(|| null("report"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        put_string(out, ReportJson::pipeline(&r.report).to_json())
    })
}

/// The optimized network as a new handle.
///
/// # Safety
/// `report` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ban_report_optimized(
    report: *const BanReport,
    out: *mut *mut BanNetwork,
) -> BanStatus {
    guard(|| {
        let r = report.as_ref().ok_or_else(|| null("report"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let file = NetworkFile::new(r.report.optimized.clone());
        *out = Box::into_raw(Box::new(BanNetwork { file }));
        Ok(())
    })
}

/// Releases a string returned by this library; null is ignored.
///
/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ban_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Description of the last failure on this thread, or null. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn ban_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}
