//! Drives the library through its C entry points, first from Rust and then
//! from a C program compiled against the generated header.

use std::ffi::{CStr, CString};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use gkdv_ffi::*;

fn last_kind() -> String {
    let p = gkdv_last_error_kind();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_owned()
}

fn run(cmd: &str, cfg: &str) -> (GkdvStatus, Option<String>) {
    let (cmd, cfg) = (CString::new(cmd).unwrap(), CString::new(cfg).unwrap());
    let mut out = ptr::null_mut();
    let st = unsafe { gkdv_run(cmd.as_ptr(), cfg.as_ptr(), &mut out) };
    let text = (!out.is_null()).then(|| {
        let s = unsafe { CStr::from_ptr(out) }.to_str().unwrap().to_owned();
        unsafe { gkdv_string_free(out) };
        s
    });
    (st, text)
}

#[test]
fn wave_handle_round_trip() {
    let mut w = ptr::null_mut();
    assert_eq!(unsafe { gkdv_wave_new(2.0, 0.0, -0.1, 1.0, &mut w) }, GkdvStatus::Ok);
    assert!(gkdv_last_error_message().is_null());
    let mut period = 0.0;
    assert_eq!(unsafe { gkdv_wave_period(w, &mut period) }, GkdvStatus::Ok);
    assert!(period > 0.0);

    let mut idx = std::mem::MaybeUninit::<GkdvIndices>::uninit();
    assert_eq!(unsafe { gkdv_wave_indices(w, 0.0, idx.as_mut_ptr()) }, GkdvStatus::Ok);
    let idx = unsafe { idx.assume_init() };
    assert_eq!(idx.period, period);
    assert!((idx.delta - (0.5 * idx.tr2.powi(3) - 3.0 * idx.tr3 * idx.tr3)).abs() <= 1e-9 * idx.delta.abs());

    // Conjugate symmetry of the trace, and det M = 1.
    let s = (2.0 * std::f64::consts::PI / period).powi(3);
    let (mut t1, mut t2) = (GkdvComplex { re: 0.0, im: 0.0 }, GkdvComplex { re: 0.0, im: 0.0 });
    let mut det = 1.0;
    unsafe {
        assert_eq!(gkdv_wave_trace(w, GkdvComplex { re: 0.3 * s, im: 0.2 * s }, 0.0, &mut t1, &mut det), GkdvStatus::Ok);
        assert_eq!(gkdv_wave_trace(w, GkdvComplex { re: 0.3 * s, im: -0.2 * s }, 0.0, &mut t2, ptr::null_mut()), GkdvStatus::Ok);
        gkdv_wave_free(w);
    }
    assert!(det < 1e-8);
    assert!((t1.re - t2.re).abs() < 1e-8 && (t1.im + t2.im).abs() < 1e-8, "{t1:?} {t2:?}");
}

#[test]
fn errors_are_reported_per_thread() {
    let mut w = ptr::null_mut();
    assert_eq!(unsafe { gkdv_wave_new(1.0, 0.0, -0.5, 1.0, &mut w) }, GkdvStatus::Computation);
    assert!(w.is_null());
    assert_eq!(last_kind(), "NoPeriodicOrbit");
    // Another thread sees no error.
    std::thread::spawn(|| assert!(gkdv_last_error_kind().is_null())).join().unwrap();

    assert_eq!(unsafe { gkdv_wave_new(-1.0, 0.0, -0.1, 1.0, &mut w) }, GkdvStatus::InvalidArgument);
    assert_eq!(unsafe { gkdv_wave_new(1.0, 0.0, -0.1, 1.0, ptr::null_mut()) }, GkdvStatus::NullPointer);
    assert_eq!(unsafe { gkdv_wave_period(ptr::null(), ptr::null_mut()) }, GkdvStatus::NullPointer);
    unsafe {
        gkdv_wave_free(ptr::null_mut());
        gkdv_string_free(ptr::null_mut());
    }
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { gkdv_run(ptr::null(), ptr::null(), &mut out) }, GkdvStatus::NullPointer);
}

#[test]
fn run_matches_cli_semantics() {
    let (st, text) = run("indices", r#"{"preset": "kdv"}"#);
    assert_eq!(st, GkdvStatus::Ok);
    let v: serde_json::Value = serde_json::from_str(&text.unwrap()).unwrap();
    assert_eq!(v["command"], "indices");
    assert_eq!(v["result"]["classification"]["modulational"], "StableTripleImaginary");

    assert_eq!(run("nope", "{}").0, GkdvStatus::InvalidArgument);
    assert_eq!(run("indices", r#"{"preset": "kdv", "speed": 1}"#).0, GkdvStatus::Config);
    assert_eq!(run("indices", r#"{"preset": "kdv", "E": [-0.1, -0.2]}"#).0, GkdvStatus::Config);
    let (st, text) = run("indices", r#"{"p": 1, "a": 0, "c": 1, "E": -0.5}"#);
    assert_eq!((st, text), (GkdvStatus::Computation, None));
    assert_eq!(last_kind(), "NoPeriodicOrbit");

    // Same bytes as a second call: the output is deterministic.
    let a = run("validate", r#"{"preset": "kdv"}"#);
    let b = run("validate", r#"{"preset": "kdv"}"#);
    assert_eq!(a.0, GkdvStatus::Ok);
    assert_eq!(a.1, b.1);
}

fn target_dir() -> PathBuf {
    // tests run from target/<profile>/deps
    let exe = std::env::current_exe().unwrap();
    exe.parent().and_then(Path::parent).unwrap().to_path_buf()
}

#[test]
fn c_program_links_against_header_and_static_lib() {
    let manifest = Path::new(env!("CARGO_MANIFEST_DIR"));
    let lib = target_dir().join("libgkdv_ffi.a");
    if !lib.exists() {
        eprintln!("skipping: {} not built", lib.display());
        return;
    }
    let tmp = std::env::temp_dir().join(format!("gkdv_smoke_{}", std::process::id()));
    let status = Command::new("cc")
        .args(["-std=c99", "-Wall", "-Wextra", "-Werror", "-o"])
        .arg(&tmp)
        .arg(manifest.join("tests/smoke.c"))
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(&lib)
        .args(["-lm", "-lpthread", "-ldl"])
        .status()
        .expect("a C compiler is available");
    assert!(status.success(), "C build failed");
    let out = Command::new(&tmp).output().unwrap();
    let _ = std::fs::remove_file(&tmp);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("gkdv 0.1.0 ok"));
}
