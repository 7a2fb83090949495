use std::ffi::{CStr, CString};
use std::path::Path;
use std::process::Command;
use std::ptr;

use catenary_ffi::*;

fn last_error() -> String {
    let p = cat_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn roots_and_shift_metric() {
    let (mut s, mut u) = (0.0, 0.0);
    assert_eq!(
        unsafe { cat_catenary_roots(&mut s, &mut u) },
        CatStatus::CatOk
    );
    assert!((s * u - 1.0).abs() < 1e-15 && (s + u - 3.0).abs() < 1e-15);

    let x = [0_i64, 2];
    let mut d = 0.0;
    let st = unsafe { cat_shift_metric(x.as_ptr(), 2, ptr::null(), 0, u, &mut d) };
    assert_eq!(st, CatStatus::CatOk);
    assert!((d - (1.0 + u.powi(-2))).abs() < 1e-15);

    let st = unsafe { cat_shift_metric(x.as_ptr(), 2, ptr::null(), 0, 0.5, &mut d) };
    assert_eq!(st, CatStatus::CatDomain);
    assert!(last_error().contains("λ > 1"));
}

#[test]
fn null_pointers_are_reported() {
    let st = unsafe { cat_catenary_roots(ptr::null_mut(), ptr::null_mut()) };
    assert_eq!(st, CatStatus::CatNullPointer);
    assert!(last_error().contains("null"));
    let x = 1_i64;
    let mut d = 0.0;
    let st = unsafe { cat_shift_metric(ptr::null(), 3, &x, 1, 2.0, &mut d) };
    assert_eq!(st, CatStatus::CatNullPointer);
}

#[test]
fn saddle_handle_matches_l1_norm() {
    let mut h = ptr::null_mut();
    assert_eq!(
        unsafe { cat_saddle_new(1.0, 1.0, 1.0, 50.0, &mut h) },
        CatStatus::CatOk
    );
    for (x, y) in [
        (0.1, 0.5),
        (0.0, 0.3),
        (-0.4, 0.0),
        (0.0, 0.0),
        (0.25, -0.25),
    ] {
        let mut v = f64::NAN;
        assert_eq!(
            unsafe { cat_saddle_eval(h, x, y, &mut v) },
            CatStatus::CatOk
        );
        assert!((v - (x.abs() + y.abs())).abs() < 1e-6, "({x}, {y}) -> {v}");
    }
    let (mut ts, mut tu) = (0.0, 0.0);
    assert_eq!(
        unsafe { cat_saddle_hit_times(h, 0.1, 0.5, &mut ts, &mut tu) },
        CatStatus::CatOk
    );
    let r = 0.8_f64.sqrt();
    assert!((tu - ((1.0 + r) / 0.2).ln()).abs() < 1e-8);
    assert!((ts - ((1.0 - r) / 0.2).ln()).abs() < 1e-8);

    let mut v = 0.0;
    let st = unsafe { cat_saddle_eval(h, 2.0, 0.0, &mut v) };
    assert_eq!(st, CatStatus::CatDomain);
    unsafe { cat_saddle_free(h) };
}

#[test]
fn saddle_rejects_bad_parameters() {
    let mut h = ptr::null_mut();
    assert_eq!(
        unsafe { cat_saddle_new(1.0, 1.0, -1.0, 50.0, &mut h) },
        CatStatus::CatSpec
    );
    assert!(h.is_null());
    assert_eq!(
        unsafe { cat_saddle_new(1.0, 1.0, 1.0, 0.0, &mut h) },
        CatStatus::CatInvalidArgument
    );
}

#[test]
fn scenario_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let out = CString::new(dir.path().to_str().unwrap()).unwrap();
    let json = CString::new(
        r#"{"schema":"catenary-scenario/1","name":"ffi_shift","system":{"kind":"full_shift"},
            "construction":{"kind":"shift_metric","pairs":20}}"#,
    )
    .unwrap();
    let mut rep = ptr::null_mut();
    let st = unsafe { cat_scenario_run(json.as_ptr(), out.as_ptr(), &mut rep) };
    assert_eq!(st, CatStatus::CatOk, "{}", last_error());
    assert_eq!(unsafe { cat_report_passed(rep) }, 1);
    assert!(unsafe { cat_report_check_count(rep) } >= 2);
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { cat_report_json(rep, &mut s) }, CatStatus::CatOk);
    let text = unsafe { CStr::from_ptr(s) }.to_str().unwrap().to_owned();
    unsafe { cat_string_free(s) };
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["scenario"], "ffi_shift");
    assert!(dir.path().join("report.json").exists());
    unsafe { cat_report_free(rep) };
    assert_eq!(unsafe { cat_report_passed(ptr::null()) }, -1);
}

#[test]
fn scenario_config_error_names_field() {
    let json = CString::new(
        r#"{"schema":"catenary-scenario/1","name":"bad","system":{"kind":"saddle"},
            "block":{"indicator":"l1"},"construction":{"kind":"bvp"}}"#,
    )
    .unwrap();
    let mut rep = ptr::null_mut();
    let st = unsafe { cat_scenario_run(json.as_ptr(), ptr::null(), &mut rep) };
    assert_eq!(st, CatStatus::CatConfig);
    assert!(rep.is_null());
    assert!(last_error().contains("delta"));
}

#[test]
fn header_is_valid_c() {
    let header = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/catenary.h");
    let text = std::fs::read_to_string(&header).unwrap();
    for name in [
        "cat_saddle_new",
        "cat_scenario_run",
        "cat_last_error",
        "CAT_OK",
    ] {
        assert!(text.contains(name), "{name} missing from header");
    }
    let Ok(status) = Command::new("cc")
        .args(["-std=c99", "-fsyntax-only", "-x", "c"])
        .arg(&header)
        .status()
    else {
        eprintln!("no C compiler on PATH; skipping syntax check");
        return;
    };
    assert!(status.success());
}
