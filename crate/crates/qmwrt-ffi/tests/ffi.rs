use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use qmwrt_ffi::*;

fn manifold(sel: &str) -> *mut QmwrtManifold {
    let s = CString::new(sel).unwrap();
    let mut m = ptr::null_mut();
    assert_eq!(unsafe { qmwrt_manifold_parse(s.as_ptr(), &mut m) }, QmwrtStatus::Ok);
    m
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(qmwrt_last_error()) }.to_string_lossy().into_owned()
}

#[test]
fn gauss_sum() {
    let (mut re, mut im) = (0.0, 0.0);
    assert_eq!(unsafe { qmwrt_gauss(1, 5, &mut re, &mut im) }, QmwrtStatus::Ok);
    assert!((re - 5f64.sqrt()).abs() < 1e-12 && im.abs() < 1e-12);
    assert_eq!(unsafe { qmwrt_gauss(1, 0, &mut re, &mut im) }, QmwrtStatus::InvalidArgument);
    assert_eq!(unsafe { qmwrt_gauss(1, 5, ptr::null_mut(), &mut im) }, QmwrtStatus::NullPointer);
}

#[test]
fn w_matches_library() {
    let m = manifold("brieskorn:2,3,7");
    let (mut re, mut im) = (0.0, 0.0);
    assert_eq!(unsafe { qmwrt_w(m, 9, 5, &mut re, &mut im) }, QmwrtStatus::Ok);
    let ctx = qmwrt::number_theory::RootContext::normalized(9, 5).unwrap();
    let d: qmwrt::qmod::Manifold = "brieskorn:2,3,7".parse().unwrap();
    let w = qmwrt::wrt::w_closed(&d.data().unwrap(), &ctx).unwrap().eval_complex();
    assert_eq!((re, im), (w.re, w.im));
    unsafe { qmwrt_manifold_free(m) };

    let lens = manifold("lens:5");
    assert_eq!(unsafe { qmwrt_w(lens, 7, 1, &mut re, &mut im) }, QmwrtStatus::Ok);
    assert!(re.is_finite() && im.is_finite());
    unsafe { qmwrt_manifold_free(lens) };
}

#[test]
fn errors_are_reported() {
    let s = CString::new("torus:3").unwrap();
    let mut m = ptr::null_mut();
    assert_eq!(unsafe { qmwrt_manifold_parse(s.as_ptr(), &mut m) }, QmwrtStatus::InvalidArgument);
    assert!(m.is_null());
    assert!(!last_error().is_empty());

    let m = manifold("brieskorn:2,3,5");
    let (mut re, mut im) = (0.0, 0.0);
    assert_eq!(unsafe { qmwrt_w(m, 8, 1, &mut re, &mut im) }, QmwrtStatus::InvalidArgument);
    assert_eq!(unsafe { qmwrt_w(ptr::null(), 7, 1, &mut re, &mut im) }, QmwrtStatus::NullPointer);
    unsafe { qmwrt_manifold_free(m) };
}

#[test]
fn verify_report() {
    let m = manifold("brieskorn:2,3,5");
    let suite = CString::new("identity").unwrap();
    let mut rep = ptr::null_mut();
    assert_eq!(unsafe { qmwrt_verify(m, 7, 1, suite.as_ptr(), &mut rep) }, QmwrtStatus::Ok);
    assert_eq!(unsafe { qmwrt_report_passed(rep) }, 1);
    assert!(unsafe { qmwrt_report_len(rep) } > 0);
    let mut js = ptr::null_mut();
    assert_eq!(unsafe { qmwrt_report_json(rep, &mut js) }, QmwrtStatus::Ok);
    let v: serde_json::Value = serde_json::from_str(unsafe { CStr::from_ptr(js) }.to_str().unwrap()).unwrap();
    assert_eq!(v["passed"], true);
    unsafe {
        qmwrt_string_free(js);
        qmwrt_report_free(rep);
        qmwrt_manifold_free(m);
    }
    assert_eq!(unsafe { qmwrt_report_passed(ptr::null()) }, -1);
}

#[test]
fn residual_is_small_at_large_r() {
    let m = manifold("brieskorn:2,3,7");
    let (mut re, mut im) = (0.0, 0.0);
    assert_eq!(unsafe { qmwrt_saddle_residual(m, 301, 5, 2, &mut re, &mut im) }, QmwrtStatus::Ok);
    assert!(re.hypot(im) < 0.1);
    unsafe { qmwrt_manifold_free(m) };
}

#[test]
fn header_declares_the_api() {
    let h = std::fs::read_to_string(PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include/qmwrt.h")).unwrap();
    for f in [
        "qmwrt_last_error",
        "qmwrt_manifold_parse",
        "qmwrt_manifold_free",
        "qmwrt_w",
        "qmwrt_saddle_residual",
        "qmwrt_gauss",
        "qmwrt_verify",
        "qmwrt_report_passed",
        "qmwrt_report_len",
        "qmwrt_report_json",
        "qmwrt_report_free",
        "qmwrt_string_free",
    ] {
        assert!(h.contains(&format!("{f}(")), "{f} missing from header");
    }
    assert!(h.contains("typedef struct QmwrtManifold QmwrtManifold;"));
    assert!(h.contains("QMWRT_STATUS_OK = 0"));
}

/// Compiles and runs a C program against the static library.
#[test]
fn c_program_links() {
    let target = std::env::current_exe().unwrap().parent().unwrap().parent().unwrap().to_path_buf();
    let lib = target.join("libqmwrt_ffi.a");
    assert!(lib.exists(), "{} not built", lib.display());
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("main.c");
    std::fs::write(
        &src,
        r#"#include <stdio.h>
#include <math.h>
#include "qmwrt.h"
int main(void) {
    double re, im;
    if (qmwrt_gauss(1, 5, &re, &im) != QMWRT_STATUS_OK) return 2;
    if (fabs(re - sqrt(5.0)) > 1e-12) return 3;
    QmwrtManifold *m = NULL;
    if (qmwrt_manifold_parse("bogus", &m) != QMWRT_STATUS_INVALID_ARGUMENT) return 4;
    if (qmwrt_manifold_parse("brieskorn:2,3,5", &m) != QMWRT_STATUS_OK) return 5;
    QmwrtReport *rep = NULL;
    if (qmwrt_verify(m, 7, 1, "identity", &rep) != QMWRT_STATUS_OK) return 6;
    int ok = qmwrt_report_passed(rep);
    qmwrt_report_free(rep);
    qmwrt_manifold_free(m);
    printf("passed=%d\n", ok);
    return ok == 1 ? 0 : 7;
}
"#,
    )
    .unwrap();
    let exe = dir.path().join("main");
    let st = Command::new("cc")
        .arg(&src)
        .arg("-I")
        .arg(PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .expect("cc available");
    assert!(st.success());
    let out = Command::new(&exe).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
}
