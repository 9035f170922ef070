use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use homoconn_ffi::*;

fn sphere(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn last_error() -> String {
    let p = homoconn_last_error();
    assert!(!p.is_null());
    let s = unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned();
    unsafe { homoconn_string_free(p) };
    s
}

#[test]
fn dims_through_the_c_abi() {
    let mut d = HomoconnDims::default();
    for (n, want) in [(1, (27, 9, 1)), (2, (13, 7, 3)), (3, (9, 5, 3)), (4, (7, 3, 1))] {
        assert_eq!(unsafe { homoconn_dims(n, &mut d) }, HomoconnStatus::Ok);
        assert_eq!((d.invariant, d.metric, d.skew), want);
    }
    assert_eq!(unsafe { homoconn_dims(0, &mut d) }, HomoconnStatus::Unsupported);
    assert_eq!(unsafe { homoconn_dims(2, ptr::null_mut()) }, HomoconnStatus::NullPointer);
}

#[test]
fn s5_connection_summary_and_ricci() {
    let mut h = ptr::null_mut();
    let st = unsafe { homoconn_connection_skew(sphere("s5").as_ptr(), 0.3, true, 0.4, 0.0, 1e-8, &mut h) };
    assert_eq!(st, HomoconnStatus::Ok);
    let mut s = std::mem::MaybeUninit::<HomoconnSummary>::uninit();
    assert_eq!(unsafe { homoconn_connection_summary(h, s.as_mut_ptr()) }, HomoconnStatus::Ok);
    let s = unsafe { s.assume_init() };
    assert_eq!(s.dim, 5);
    assert!(s.is_skew_torsion);
    assert_eq!(s.einstein, HomoconnEinstein::NotEinstein);
    assert!(s.route_gap < 1e-8);

    let mut needed = 0usize;
    assert_eq!(unsafe { homoconn_connection_sym_ricci(h, ptr::null_mut(), 0, &mut needed) }, HomoconnStatus::BufferTooSmall);
    assert_eq!(needed, 25);
    let mut buf = vec![0.0; needed];
    assert_eq!(unsafe { homoconn_connection_sym_ricci(h, buf.as_mut_ptr(), buf.len(), ptr::null_mut()) }, HomoconnStatus::Ok);
    // (4 - 2 rho) g - 2 rho eta (x) eta with rho = 0.25; eta is the last coordinate.
    for i in 0..5 {
        let want = if i == 4 { 3.0 } else { 3.5 };
        assert!((buf[i * 5 + i] - want).abs() < 1e-8);
    }

    let json = unsafe { homoconn_connection_json(h) };
    let text = unsafe { CStr::from_ptr(json) }.to_str().unwrap().to_owned();
    unsafe { homoconn_string_free(json) };
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["command"], "connection");
    assert_eq!(v["verdicts"]["is_einstein"], false);
    unsafe { homoconn_connection_free(h) };
}

#[test]
fn errors_are_reported() {
    let mut h = ptr::null_mut();
    let st = unsafe { homoconn_connection_skew(sphere("s9").as_ptr(), 0.5, true, 1.0, 0.0, 1e-8, &mut h) };
    assert_eq!(st, HomoconnStatus::InvalidArgument);
    assert!(h.is_null());
    assert!(last_error().contains("no q parameter"));

    let st = unsafe { homoconn_connection_skew(sphere("s8").as_ptr(), 0.5, false, 0.0, 0.0, 1e-8, &mut h) };
    assert_eq!(st, HomoconnStatus::InvalidArgument);
    let st = unsafe { homoconn_connection_skew(ptr::null(), 0.5, false, 0.0, 0.0, 1e-8, &mut h) };
    assert_eq!(st, HomoconnStatus::NullPointer);
    let msg = unsafe { CStr::from_ptr(homoconn_status_message(HomoconnStatus::BufferTooSmall)) };
    assert_eq!(msg.to_str().unwrap(), "output buffer too small");
    unsafe { homoconn_connection_free(ptr::null_mut()) };
    unsafe { homoconn_string_free(ptr::null_mut()) };
}

#[test]
fn sphere_q_query() {
    assert!(unsafe { homoconn_sphere_has_q(sphere("s7").as_ptr()) });
    assert!(unsafe { homoconn_sphere_has_q(sphere("s5").as_ptr()) });
    assert!(!unsafe { homoconn_sphere_has_q(sphere("s3").as_ptr()) });
    assert!(!unsafe { homoconn_sphere_has_q(sphere("s11").as_ptr()) });
    assert!(!unsafe { homoconn_sphere_has_q(ptr::null()) });
}

#[test]
fn verify_suite_passes() {
    let mut ok = false;
    assert_eq!(unsafe { homoconn_verify(2024, 10, &mut ok) }, HomoconnStatus::Ok);
    assert!(ok);
    assert_eq!(unsafe { homoconn_verify(2024, 0, &mut ok) }, HomoconnStatus::InvalidArgument);
}

#[test]
fn header_declares_the_api() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/homoconn.h")).unwrap();
    for name in [
        "homoconn_dims",
        "homoconn_connection_skew",
        "homoconn_connection_summary",
        "homoconn_connection_sym_ricci",
        "homoconn_connection_json",
        "homoconn_connection_free",
        "homoconn_string_free",
        "homoconn_last_error",
        "homoconn_verify",
        "typedef struct HomoconnConnection HomoconnConnection",
        "HOMOCONN_STATUS_OK = 0",
    ] {
        assert!(header.contains(name), "{name} missing from header");
    }
}

/// Compiles and runs a C program against the static library.
#[test]
fn c_program_links_and_runs() {
    let exe = std::env::current_exe().unwrap();
    let profile_dir: PathBuf = exe.parent().and_then(|d| d.parent()).unwrap().to_path_buf();
    let lib = profile_dir.join("libhomoconn_ffi.a");
    assert!(lib.exists(), "static library not found at {}", lib.display());
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let out = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("homoconn_c_smoke");
    let status = Command::new(std::env::var("CC").unwrap_or_else(|_| "cc".into()))
        .arg(manifest.join("tests/c_smoke.c"))
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(&lib)
        .args(["-lm", "-lpthread", "-ldl", "-o"])
        .arg(&out)
        .status()
        .expect("C compiler available");
    assert!(status.success(), "C compilation failed");
    let run = Command::new(&out).output().unwrap();
    assert!(run.status.success(), "C smoke test exited with {:?}: {}", run.status.code(), String::from_utf8_lossy(&run.stdout));
    assert!(String::from_utf8_lossy(&run.stdout).contains("no q parameter"));
}
