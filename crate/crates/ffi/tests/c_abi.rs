use std::ffi::{CStr, CString};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use evoboss_ffi::*;

fn cstr(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn last_error() -> String {
    let p = evoboss_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn write_landscape(dir: &Path) -> PathBuf {
    let csv = dir.join("land.csv");
    let mut body = String::from("variant,fitness\n");
    for (i, a) in "ACDEFGHIKLMNPQRSTVWY".chars().enumerate() {
        for (j, b) in "ACDEFGHIKLMNPQRSTVWY".chars().enumerate() {
            body.push_str(&format!("{a}{b},{}\n", (i * j) as f64 / 10.0));
        }
    }
    std::fs::write(&csv, body).unwrap();
    csv
}

#[test]
fn landscape_store_and_runs() {
    let dir = tempfile::tempdir().unwrap();
    let csv = cstr(write_landscape(dir.path()).to_str().unwrap());
    unsafe {
        let mut land = ptr::null_mut();
        assert_eq!(evoboss_landscape_load(csv.as_ptr(), ptr::null(), &mut land), EvobossStatus::Ok);
        assert_eq!(evoboss_landscape_positions(land), 2);
        let mut y = 0.0;
        let word = cstr("YY");
        assert_eq!(evoboss_landscape_fitness(land, word.as_ptr(), &mut y), EvobossStatus::Ok);
        assert_eq!(y, 36.1);

        let mut store = ptr::null_mut();
        assert_eq!(evoboss_store_synthetic(2, 8, 0, &mut store), EvobossStatus::Ok);
        assert_eq!((evoboss_store_len(store), evoboss_store_dim(store)), (400, 8));

        let mut trace = ptr::null_mut();
        assert_eq!(evoboss_run_boes(land, store, ptr::null(), 12, 0, &mut trace), EvobossStatus::Ok);
        assert_eq!(evoboss_trace_len(trace), 12);
        let mut rec = std::mem::zeroed::<EvobossRecord>();
        assert_eq!(evoboss_trace_record(trace, 0, &mut rec), EvobossStatus::Ok);
        assert_eq!(CStr::from_ptr(rec.variant.as_ptr()).to_str().unwrap(), "AA");
        assert_eq!(rec.step, 1);
        assert!(rec.theta.is_nan());
        assert_eq!(evoboss_trace_record(trace, 5, &mut rec), EvobossStatus::Ok);
        assert!(rec.theta.is_finite());
        assert_eq!(evoboss_trace_record(trace, 12, &mut rec), EvobossStatus::InvalidArgument);
        assert!(last_error().contains("out of range"));

        let path = cstr(dir.path().join("t.jsonl").to_str().unwrap());
        assert_eq!(evoboss_trace_write(trace, path.as_ptr()), EvobossStatus::Ok);
        let mut back = ptr::null_mut();
        assert_eq!(evoboss_trace_read(path.as_ptr(), &mut back), EvobossStatus::Ok);
        assert_eq!(evoboss_trace_len(back), 12);
        evoboss_trace_free(back);
        evoboss_trace_free(trace);

        let start = cstr("CC");
        let mut smw = ptr::null_mut();
        assert_eq!(evoboss_run_smw(land, start.as_ptr(), 39, 1, &mut smw), EvobossStatus::Ok);
        assert_eq!(evoboss_trace_len(smw), 39);
        evoboss_trace_free(smw);

        let mut rec_trace = ptr::null_mut();
        assert_eq!(
            evoboss_run_recombination(land, ptr::null(), 50, 2, 0, &mut rec_trace),
            EvobossStatus::Ok
        );
        assert!(evoboss_trace_len(rec_trace) <= 50);
        evoboss_trace_free(rec_trace);

        let mut rnd = ptr::null_mut();
        assert_eq!(evoboss_run_random(land, 401, 0, &mut rnd), EvobossStatus::InvalidArgument);
        assert!(rnd.is_null());
        assert_eq!(evoboss_run_random(land, 400, 0, &mut rnd), EvobossStatus::Ok);
        evoboss_trace_free(rnd);

        evoboss_store_free(store);
        evoboss_landscape_free(land);
    }
}

#[test]
fn error_codes() {
    unsafe {
        let mut land = ptr::null_mut();
        let missing = cstr("/nonexistent/land.csv");
        assert_eq!(evoboss_landscape_load(missing.as_ptr(), ptr::null(), &mut land), EvobossStatus::Io);
        assert_eq!(
            evoboss_landscape_load(ptr::null(), ptr::null(), &mut land),
            EvobossStatus::NullPointer
        );
        let mut store = ptr::null_mut();
        assert_eq!(evoboss_store_synthetic(2, 8, 0, ptr::null_mut()), EvobossStatus::NullPointer);
        assert_eq!(evoboss_store_synthetic(9, 8, 0, &mut store), EvobossStatus::InvalidArgument);
        assert_eq!(evoboss_trace_len(ptr::null()), 0);
        evoboss_trace_free(ptr::null_mut());
    }
}

#[test]
fn store_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let idx = cstr(dir.path().join("s.idx").to_str().unwrap());
    let emb = cstr(dir.path().join("s.emb").to_str().unwrap());
    unsafe {
        let mut store = ptr::null_mut();
        assert_eq!(evoboss_store_onehot(1, &mut store), EvobossStatus::Ok);
        assert_eq!(evoboss_store_save(store, idx.as_ptr(), emb.as_ptr()), EvobossStatus::Ok);
        let mut back = ptr::null_mut();
        assert_eq!(evoboss_store_load(idx.as_ptr(), emb.as_ptr(), &mut back), EvobossStatus::Ok);
        assert_eq!((evoboss_store_len(back), evoboss_store_dim(back)), (20, 20));
        evoboss_store_free(back);
        evoboss_store_free(store);
        std::fs::write(dir.path().join("s.emb"), b"NOTASTORE").unwrap();
        assert_eq!(evoboss_store_load(idx.as_ptr(), emb.as_ptr(), &mut back), EvobossStatus::Format);
    }
}

#[test]
fn scalar_functions() {
    let truth = [3.0, 2.0, 1.0];
    let pred = [1.0, 2.0, 3.0];
    let mut out = 0.0;
    let status =
        unsafe { evoboss_ndcg(pred.as_ptr(), truth.as_ptr(), 3, EvobossGain::Linear, &mut out) };
    assert_eq!(status, EvobossStatus::Ok);
    let l3 = 3f64.log2();
    assert!((out - (1.0 + 2.0 / l3 + 1.5) / (3.0 + 2.0 / l3 + 0.5)).abs() < 1e-12);
    let status =
        unsafe { evoboss_ndcg(pred.as_ptr(), truth.as_ptr(), 0, EvobossGain::Linear, &mut out) };
    assert_eq!(status, EvobossStatus::InvalidArgument);
    let ei = evoboss_expected_improvement(0.0, 1.0, 0.0);
    assert!((ei - 1.0 / (2.0 * std::f64::consts::PI).sqrt()).abs() < 1e-15);
}

fn header_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("include")
}

#[test]
fn header_is_valid_c() {
    let status = Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-x", "c"])
        .arg(header_dir().join("evoboss.h"))
        .status()
        .expect("cc runs");
    assert!(status.success());
}

const C_PROGRAM: &str = r#"
#include <math.h>
#include <stdio.h>
#include "evoboss.h"

int main(void) {
    EvobossStore *store = NULL;
    if (evoboss_store_synthetic(1, 4, 7, &store) != EVOBOSS_STATUS_OK) return 1;
    if (evoboss_store_len(store) != 20) return 2;
    evoboss_store_free(store);
    if (evoboss_store_synthetic(1, 0, 7, &store) != EVOBOSS_STATUS_INVALID_ARGUMENT) return 3;
    if (evoboss_last_error_message() == NULL) return 4;
    double ei = evoboss_expected_improvement(1.0, 0.0, 0.5);
    if (fabs(ei - 0.5) > 1e-15) return 5;
    printf("ok\n");
    return 0;
}
"#;

#[test]
fn c_program_links_against_static_library() {
    // target/<profile>/deps/<this test> -> target/<profile>
    let exe = std::env::current_exe().unwrap();
    let profile_dir = exe.parent().and_then(Path::parent).unwrap();
    let lib = profile_dir.join("libevoboss_ffi.a");
    if !lib.exists() {
        eprintln!("skipping: {} not built", lib.display());
        return;
    }
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("main.c");
    let bin = dir.path().join("main");
    std::fs::write(&src, C_PROGRAM).unwrap();
    let status = Command::new("cc")
        .arg("-I")
        .arg(header_dir())
        .arg(&src)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .status()
        .expect("cc runs");
    assert!(status.success());
    let out = Command::new(&bin).output().unwrap();
    assert!(out.status.success(), "exit {:?}", out.status.code());
    assert_eq!(String::from_utf8_lossy(&out.stdout), "ok\n");
}
