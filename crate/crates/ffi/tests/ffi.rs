use std::ffi::CStr;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use sievekernel_ffi::*;

fn last_error() -> String {
    let p = sk_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn scalar_calls() {
    let mut h = 0.0;
    assert_eq!(unsafe { sk_eval_h(4.0, &mut h) }, SkStatus::Ok);
    assert!((h - 0.75 * (-4.0f64).exp()).abs() < 1e-16);
    assert!(sk_last_error().is_null());

    assert_eq!(unsafe { sk_eval_h(0.5, &mut h) }, SkStatus::Domain);
    assert!(last_error().contains("0.5"));
    assert_eq!(unsafe { sk_eval_h(2.0, ptr::null_mut()) }, SkStatus::NullPointer);

    let mut k = SkConstants::default();
    assert_eq!(unsafe { sk_constants(&mut k) }, SkStatus::Ok);
    assert!((k.alpha - 0.960_68).abs() < 5e-6);
    assert!((k.gamma - (2.0 * k.alpha - 1.0)).abs() < 1e-12);

    let v = unsafe { CStr::from_ptr(sk_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn cn_and_tau_handles() {
    let mut table = ptr::null_mut();
    assert_eq!(unsafe { sk_cn_table_build(60, 1000, 1.0 + 1e-9, &mut table) }, SkStatus::Ok);
    assert!(!table.is_null());
    assert_eq!(unsafe { sk_cn_table_n_max(table) }, 60);
    let mut c = 0.0;
    assert_eq!(unsafe { sk_cn_table_get(table, 1, &mut c) }, SkStatus::Ok);
    assert_eq!(c, 1.0);
    assert_eq!(unsafe { sk_cn_table_get(table, 7, &mut c) }, SkStatus::Ok);
    assert!(c > 0.56 && c <= 0.57);
    assert_eq!(unsafe { sk_cn_table_get(table, 61, &mut c) }, SkStatus::InvalidParameter);

    let mut tau = ptr::null_mut();
    assert_eq!(unsafe { sk_tau_build(table, 1, 200, 60, &mut tau) }, SkStatus::Ok);
    assert_eq!(unsafe { sk_tau_len(tau) }, 60);
    let mut t = 0.0;
    assert_eq!(unsafe { sk_tau_get(tau, 1, &mut t) }, SkStatus::Ok);
    assert_eq!(t, 3.0);
    assert_eq!(unsafe { sk_tau_get(tau, 2, &mut t) }, SkStatus::Ok);
    assert_eq!(t.ceil(), 11.0);
    let mut b = SkSieveBounds::default();
    assert_eq!(unsafe { sk_tau_bounds(tau, &mut b) }, SkStatus::Ok);
    assert!(b.big_f1 > 100.0 && b.k1 % 2 == 1 && b.k2 % 2 == 0);

    let mut diverging = ptr::null_mut();
    assert_eq!(unsafe { sk_tau_build(table, 1, 40, 60, &mut diverging) }, SkStatus::Divergent);
    assert!(diverging.is_null());
    assert_eq!(unsafe { sk_tau_build(table, 1, 0, 60, &mut diverging) }, SkStatus::InvalidParameter);

    unsafe {
        sk_tau_free(tau);
        sk_cn_table_free(table);
        sk_cn_table_free(ptr::null_mut());
    }
}

#[test]
fn bad_inputs_do_not_allocate() {
    let mut table = ptr::null_mut();
    assert_eq!(unsafe { sk_cn_table_build(10, 999, 1.0, &mut table) }, SkStatus::InvalidParameter);
    assert!(table.is_null());
    assert_eq!(unsafe { sk_cn_table_build(10, 1000, 1.0, ptr::null_mut()) }, SkStatus::NullPointer);
    let mut c = 0.0;
    assert_eq!(unsafe { sk_cn_table_get(ptr::null(), 2, &mut c) }, SkStatus::NullPointer);
    assert_eq!(unsafe { sk_cn_table_n_max(ptr::null()) }, 0);
    assert_eq!(unsafe { sk_tau_len(ptr::null()) }, 0);
}

#[test]
fn taylor_handle() {
    let mut fam = ptr::null_mut();
    assert_eq!(unsafe { sk_taylor_build(6, 30, &mut fam) }, SkStatus::Ok);
    let mut v = 0.0;
    assert_eq!(unsafe { sk_taylor_eval(fam, 1, 1.7, &mut v) }, SkStatus::Ok);
    assert!((v - (3.0 / 1.7 - 1.0)).abs() < 1e-13);
    assert_eq!(unsafe { sk_taylor_eval(fam, 4, 1.5, &mut v) }, SkStatus::Domain);
    assert_eq!(unsafe { sk_taylor_eval(fam, 9, 3.0, &mut v) }, SkStatus::InvalidParameter);
    unsafe { sk_taylor_free(fam) };
    assert_eq!(unsafe { sk_taylor_build(3, 2, &mut fam) }, SkStatus::InvalidParameter);
}

fn header() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("include/sievekernel.h")
}

#[test]
fn header_declares_the_api() {
    let text = std::fs::read_to_string(header()).unwrap();
    for name in [
        "typedef struct SkCnTable SkCnTable;",
        "SK_STATUS_OK = 0",
        "SK_STATUS_PANIC = 9",
        "sk_cn_table_build(size_t n_max",
        "sk_tau_bounds(",
        "sk_taylor_free(",
        "sk_last_error(void)",
    ] {
        assert!(text.contains(name), "header lacks {name}");
    }
}

/// Compile a small C program against the static library when a C compiler
/// and the archive are available.
#[test]
fn c_program_links() {
    let Some(target) = Path::new(env!("CARGO_MANIFEST_DIR")).ancestors().nth(2).map(|p| p.join("target"))
    else {
        return;
    };
    let lib_dir = std::env::var_os("CARGO_TARGET_DIR").map(PathBuf::from).unwrap_or(target).join(
        if cfg!(debug_assertions) { "debug" } else { "release" },
    );
    let archive = lib_dir.join("libsievekernel_ffi.a");
    if !archive.exists() || Command::new("cc").arg("--version").output().is_err() {
        eprintln!("skipping C link check: no archive at {} or no cc", archive.display());
        return;
    }
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("main.c");
    std::fs::write(
        &src,
        r#"#include <stdio.h>
#include "sievekernel.h"
int main(void) {
    SkConstants k;
    if (sk_constants(&k) != SK_STATUS_OK) return 1;
    double h;
    if (sk_eval_h(0.5, &h) != SK_STATUS_DOMAIN) return 2;
    if (sk_last_error() == NULL) return 3;
    printf("%.5f\n", k.alpha);
    return 0;
}
"#,
    )
    .unwrap();
    let exe = dir.path().join("main");
    let status = Command::new("cc")
        .arg(&src)
        .arg("-I")
        .arg(header().parent().unwrap())
        .arg(&archive)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .unwrap();
    assert!(status.success());
    let out = Command::new(&exe).output().unwrap();
    assert!(out.status.success());
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "0.96068");
}
