//! C ABI for the homoconn engine.
//!
//! Connections are returned as opaque handles that must be released with
//! `homoconn_connection_free`; strings returned by the library must be
//! released with `homoconn_string_free`. Every fallible call returns a
//! `HomoconnStatus`, and the message of the most recent failure on the calling
//! thread is available from `homoconn_last_error`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use homoconn::error::Error;
use homoconn::report_cli::{cmd_connection, cmd_dims, connection_report, render, ConnectionOutcome, ConnectionSpec, OutputFormat, RunConfig};
use homoconn::verify::{run_suite, SuiteOptions};
use homoconn::EinsteinVerdict;
use num_complex::Complex64;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HomoconnStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Unsupported = 3,
    BufferTooSmall = 4,
    VerificationFailed = 5,
    Internal = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HomoconnEinstein {
    NotApplicable = 0,
    Einstein = 1,
    NotEinstein = 2,
}

/// Dimensions of the invariant, metric and skew-torsion connection spaces.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct HomoconnDims {
    pub n: u32,
    pub invariant: u32,
    pub metric: u32,
    pub skew: u32,
}

/// Scalar summary of a connection report.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HomoconnSummary {
    pub dim: u32,
    pub scalar: f64,
    pub scalar_via_torsion: f64,
    pub torsion_norm_sq: f64,
    pub curvature_max: f64,
    pub torsion_max: f64,
    pub route_gap: f64,
    pub einstein_residual: f64,
    pub is_metric: bool,
    pub is_skew_torsion: bool,
    pub einstein: HomoconnEinstein,
}

/// Opaque connection handle.
pub struct HomoconnConnection {
    outcome: ConnectionOutcome,
    tolerance: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let s = CString::new(msg.into().replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(s));
}

fn fail(status: HomoconnStatus, msg: impl Into<String>) -> HomoconnStatus {
    set_error(msg);
    status
}

fn from_error(e: Error) -> HomoconnStatus {
    let status = match e {
        Error::UnsupportedForN { .. } | Error::InvalidSphere(_) => HomoconnStatus::Unsupported,
        Error::Degenerate(_) => HomoconnStatus::Internal,
        _ => HomoconnStatus::InvalidArgument,
    };
    fail(status, e.to_string())
}

fn guarded(f: impl FnOnce() -> HomoconnStatus) -> HomoconnStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => fail(HomoconnStatus::Internal, "internal panic"),
    }
}

/// Copies the last error message of this thread; NULL when there is none.
/// The result must be released with `homoconn_string_free`.
#[no_mangle]
pub extern "C" fn homoconn_last_error() -> *mut c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null_mut(), |s| s.clone().into_raw()))
}

/// Static description of a status code.
#[no_mangle]
pub extern "C" fn homoconn_status_message(status: HomoconnStatus) -> *const c_char {
    let s: &'static CStr = match status {
        HomoconnStatus::Ok => c"ok",
        HomoconnStatus::NullPointer => c"null pointer argument",
        HomoconnStatus::InvalidArgument => c"invalid argument",
        HomoconnStatus::Unsupported => c"unsupported for this sphere",
        HomoconnStatus::BufferTooSmall => c"output buffer too small",
        HomoconnStatus::VerificationFailed => c"verification failed",
        HomoconnStatus::Internal => c"internal error",
    };
    s.as_ptr()
}

/// Solver dimensions for S^{2n+1}.
///
/// # Safety
/// `out` must be null or point to writable memory for one `HomoconnDims`.
#[no_mangle]
pub unsafe extern "C" fn homoconn_dims(n: u32, out: *mut HomoconnDims) -> HomoconnStatus {
    if out.is_null() {
        return fail(HomoconnStatus::NullPointer, "out is null");
    }
    guarded(|| match cmd_dims(&[n as usize]) {
        Ok(rows) => {
            let r = rows[0];
            // SAFETY: checked non-null; caller guarantees validity.
            unsafe {
                *out = HomoconnDims { n, invariant: r.invariant as u32, metric: r.metric as u32, skew: r.skew as u32 };
            }
            HomoconnStatus::Ok
        }
        Err(e) => from_error(e),
    })
}

/// Builds the skew-torsion connection with parameters (r, q) on the sphere
/// named by `sphere` ("s3", "s5", "s7", "s9", ...). `has_q` selects whether q
/// is passed; it must be false for spheres without a q parameter.
///
/// # Safety
/// `sphere` must be a valid NUL-terminated string and `out` must be null or
/// point to writable memory for one pointer.
#[no_mangle]
pub unsafe extern "C" fn homoconn_connection_skew(
    sphere: *const c_char,
    r: f64,
    has_q: bool,
    q_re: f64,
    q_im: f64,
    tolerance: f64,
    out: *mut *mut HomoconnConnection,
) -> HomoconnStatus {
    if sphere.is_null() || out.is_null() {
        return fail(HomoconnStatus::NullPointer, "sphere or out is null");
    }
    // SAFETY: non-null, NUL-terminated per the contract.
    let name = match unsafe { CStr::from_ptr(sphere) }.to_str() {
        Ok(s) => s.to_owned(),
        Err(_) => return fail(HomoconnStatus::InvalidArgument, "sphere name is not UTF-8"),
    };
    if !(tolerance > 0.0) {
        return fail(HomoconnStatus::InvalidArgument, "tolerance must be positive");
    }
    guarded(|| {
        let (class, n) = match homoconn::report_cli::resolve_sphere(&name, None) {
            Ok(x) => x,
            Err(e) => return from_error(e),
        };
        let q = has_q.then(|| Complex64::new(q_re, q_im));
        let spec = ConnectionSpec::Skew { class, n, r, q };
        match cmd_connection(&spec, tolerance) {
            Ok(outcome) => {
                let h = Box::new(HomoconnConnection { outcome, tolerance });
                // SAFETY: checked non-null.
                unsafe { *out = Box::into_raw(h) };
                HomoconnStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// Releases a handle; NULL is ignored.
///
/// # Safety
/// `h` must be null or a handle from `homoconn_connection_skew` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn homoconn_connection_free(h: *mut HomoconnConnection) {
    if !h.is_null() {
        // SAFETY: caller passes a pointer produced by Box::into_raw.
        drop(unsafe { Box::from_raw(h) });
    }
}

/// # Safety
/// `h` must be a live handle and `out` must point to one `HomoconnSummary`.
#[no_mangle]
pub unsafe extern "C" fn homoconn_connection_summary(h: *const HomoconnConnection, out: *mut HomoconnSummary) -> HomoconnStatus {
    if h.is_null() || out.is_null() {
        return fail(HomoconnStatus::NullPointer, "handle or out is null");
    }
    // SAFETY: live handle per the contract.
    let c = unsafe { &*h };
    let r = &c.outcome.report;
    let einstein = match c.outcome.einstein {
        EinsteinVerdict::Einstein => HomoconnEinstein::Einstein,
        EinsteinVerdict::NotEinstein => HomoconnEinstein::NotEinstein,
        EinsteinVerdict::NotApplicable => HomoconnEinstein::NotApplicable,
    };
    // SAFETY: checked non-null.
    unsafe {
        *out = HomoconnSummary {
            dim: r.dim as u32,
            scalar: r.scalar,
            scalar_via_torsion: r.scalar_via_torsion,
            torsion_norm_sq: r.torsion_norm_sq,
            curvature_max: r.curvature_max,
            torsion_max: r.torsion_max,
            route_gap: r.route_gap,
            einstein_residual: r.einstein_residual,
            is_metric: r.is_metric,
            is_skew_torsion: r.is_skew_torsion,
            einstein,
        };
    }
    HomoconnStatus::Ok
}

/// Writes Sym(Ric) row-major into `buf` (dim * dim entries). When `buf` is
/// NULL or too small, `*needed` receives the required length.
///
/// # Safety
/// `h` must be a live handle, `buf` null or valid for `len` doubles, and
/// `needed` null or valid for one size_t.
#[no_mangle]
pub unsafe extern "C" fn homoconn_connection_sym_ricci(h: *const HomoconnConnection, buf: *mut f64, len: usize, needed: *mut usize) -> HomoconnStatus {
    if h.is_null() {
        return fail(HomoconnStatus::NullPointer, "handle is null");
    }
    // SAFETY: live handle per the contract.
    let m = unsafe { &(*h).outcome.report.sym_ricci };
    let want = m.nrows() * m.ncols();
    if !needed.is_null() {
        // SAFETY: checked non-null.
        unsafe { *needed = want };
    }
    if buf.is_null() || len < want {
        return fail(HomoconnStatus::BufferTooSmall, format!("need {want} entries"));
    }
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            // SAFETY: index < want <= len.
            unsafe { *buf.add(i * m.ncols() + j) = m[(i, j)] };
        }
    }
    HomoconnStatus::Ok
}

/// Full JSON report of the connection; release with `homoconn_string_free`.
/// Returns NULL on failure.
///
/// # Safety
/// `h` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn homoconn_connection_json(h: *const HomoconnConnection) -> *mut c_char {
    if h.is_null() {
        set_error("handle is null");
        return ptr::null_mut();
    }
    // SAFETY: live handle per the contract.
    let c = unsafe { &*h };
    let cfg = match RunConfig::new(
        "connection",
        Some(c.outcome.spec.n()),
        c.outcome.spec.describe(),
        c.tolerance,
        homoconn::sampling::DEFAULT_SEED,
        homoconn::report_cli::DEFAULT_TRIALS,
        OutputFormat::Json,
    ) {
        Ok(cfg) => cfg,
        Err(e) => {
            set_error(e.to_string());
            return ptr::null_mut();
        }
    };
    let text = render(&connection_report(&c.outcome, cfg), OutputFormat::Json);
    CString::new(text).map_or(ptr::null_mut(), CString::into_raw)
}

/// # Safety
/// `s` must be null or a string returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn homoconn_string_free(s: *mut c_char) {
    if !s.is_null() {
        // SAFETY: produced by CString::into_raw in this library.
        drop(unsafe { CString::from_raw(s) });
    }
}

/// Runs the verification batteries; `*all_passed` receives the verdict.
/// Returns `VerificationFailed` when any battery fails.
///
/// # Safety
/// `all_passed` must be null or valid for one bool.
#[no_mangle]
pub unsafe extern "C" fn homoconn_verify(seed: u64, trials: u32, all_passed: *mut bool) -> HomoconnStatus {
    if trials == 0 {
        return fail(HomoconnStatus::InvalidArgument, "trials must be positive");
    }
    guarded(|| match run_suite(SuiteOptions { seed, trials: trials as usize, perturb_structure_constants: false }) {
        Ok(s) => {
            if !all_passed.is_null() {
                // SAFETY: checked non-null.
                unsafe { *all_passed = s.all_passed };
            }
            if s.all_passed {
                HomoconnStatus::Ok
            } else {
                let failed: Vec<&str> = s.batteries.iter().filter(|b| !b.passed).map(|b| b.name.as_str()).collect();
                fail(HomoconnStatus::VerificationFailed, format!("failed batteries: {}", failed.join(", ")))
            }
        }
        Err(e) => from_error(e),
    })
}

/// Whether the named sphere class has a complex q parameter (s5, s7).
///
/// # Safety
/// `sphere` must be null or a valid NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn homoconn_sphere_has_q(sphere: *const c_char) -> bool {
    if sphere.is_null() {
        return false;
    }
    // SAFETY: NUL-terminated per the contract.
    let Ok(name) = unsafe { CStr::from_ptr(sphere) }.to_str() else { return false };
    homoconn::report_cli::resolve_sphere(name, None).is_ok_and(|(c, _)| c.has_q())
}
