use std::ffi::{c_char, CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use oplab_ffi::*;

const SCENARIO: &str = r#"{"name":"ident","u":"const(1)","v":"const(0)","phi":"z","m":1,"alpha":2}"#;

fn cstr(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn last_error() -> String {
    let p = oplab_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn json_of(r: *const OplabReport) -> String {
    unsafe { CStr::from_ptr(oplab_report_json(r)) }
        .to_str()
        .unwrap()
        .to_owned()
}

#[test]
fn function_round_trip() {
    let src = cstr("testfn(2, 0.5) * z");
    let mut f = ptr::null_mut();
    unsafe {
        assert_eq!(oplab_function_parse(src.as_ptr(), &mut f), OplabStatus::Ok);
        let (mut re, mut im) = (0.0, 0.0);
        assert_eq!(oplab_function_eval(f, 0.0, 0.0, &mut re, &mut im), OplabStatus::Ok);
        assert_eq!((re, im), (0.0, 0.0));

        // (z f)'(0) = f_{2,a}(0) = (1 - 0.25)^2
        let mut d = [0.0; 6];
        assert_eq!(
            oplab_function_derivatives(f, 0.0, 0.0, 2, d.as_mut_ptr()),
            OplabStatus::Ok
        );
        assert!((d[2] - 0.5625).abs() < 1e-15 && d[3] == 0.0);

        let mut s: *mut c_char = ptr::null_mut();
        assert_eq!(oplab_function_to_string(f, &mut s), OplabStatus::Ok);
        assert!(CStr::from_ptr(s).to_str().unwrap().contains("testfn"));
        oplab_string_free(s);
        oplab_function_free(f);
    }
}

#[test]
fn errors_carry_codes_and_messages() {
    let mut f = ptr::null_mut();
    unsafe {
        let bad = cstr("sigma(");
        assert_eq!(oplab_function_parse(bad.as_ptr(), &mut f), OplabStatus::Parse);
        assert!(last_error().contains("parse error"));
        assert!(f.is_null());

        assert_eq!(oplab_function_parse(ptr::null(), &mut f), OplabStatus::NullPointer);

        let z = cstr("z");
        assert_eq!(
            oplab_function_parse(z.as_ptr(), ptr::null_mut()),
            OplabStatus::NullPointer
        );
        assert_eq!(oplab_function_parse(z.as_ptr(), &mut f), OplabStatus::Ok);
        let (mut re, mut im) = (0.0, 0.0);
        assert_eq!(oplab_function_eval(f, 2.0, 0.0, &mut re, &mut im), OplabStatus::Domain);
        assert!(last_error().contains("outside"));
        oplab_function_free(f);

        let invalid = [0xffu8, 0];
        assert_eq!(
            oplab_function_parse(invalid.as_ptr().cast(), &mut f),
            OplabStatus::InvalidUtf8
        );
    }
}

#[test]
fn run_reports_and_exit_codes() {
    let src = cstr(SCENARIO);
    let mut s = ptr::null_mut();
    unsafe {
        assert_eq!(oplab_scenario_parse(src.as_ptr(), &mut s), OplabStatus::Ok);

        let mut r = ptr::null_mut();
        let cmd = cstr("verify-delta");
        assert_eq!(oplab_run(s, cmd.as_ptr(), ptr::null(), &mut r), OplabStatus::Ok);
        assert_eq!(oplab_report_exit_code(r), 0);
        assert!(json_of(r).contains("\"command\": \"verify-delta\""));
        assert!(oplab_report_csv(r).is_null());
        oplab_report_free(r);

        let opts = OplabOptions {
            tail_depth: 8,
            ..oplab_options_default()
        };
        let cmd = cstr("check-bounded");
        assert_eq!(oplab_run(s, cmd.as_ptr(), &opts, &mut r), OplabStatus::Ok);
        assert_eq!(oplab_report_exit_code(r), 2);
        oplab_report_free(r);

        let cmd = cstr("profile");
        assert_eq!(oplab_run(s, cmd.as_ptr(), ptr::null(), &mut r), OplabStatus::Ok);
        let csv = CStr::from_ptr(oplab_report_csv(r)).to_str().unwrap();
        assert!(csv.starts_with("r,k,q_annulus_max\n"));
        oplab_report_free(r);

        let cmd = cstr("no-such-command");
        assert_eq!(
            oplab_run(s, cmd.as_ptr(), ptr::null(), &mut r),
            OplabStatus::InvalidArgument
        );
        assert_eq!(oplab_report_exit_code(ptr::null()), -1);
        oplab_scenario_free(s);

        let unbounded = cstr(
            &SCENARIO
                .replace("\"m\":1", "\"m\":4")
                .replace("\"alpha\":2", "\"alpha\":1"),
        );
        assert_eq!(oplab_scenario_parse(unbounded.as_ptr(), &mut s), OplabStatus::Ok);
        let cmd = cstr("compactness");
        assert_eq!(oplab_run(s, cmd.as_ptr(), ptr::null(), &mut r), OplabStatus::Unbounded);
        assert!(last_error().contains("Q_2"));
        oplab_scenario_free(s);

        let broken = cstr(r#"{"u":"z"}"#);
        assert_eq!(oplab_scenario_parse(broken.as_ptr(), &mut s), OplabStatus::Parse);
    }
}

#[test]
fn free_accepts_null() {
    unsafe {
        oplab_function_free(ptr::null_mut());
        oplab_scenario_free(ptr::null_mut());
        oplab_report_free(ptr::null_mut());
        oplab_string_free(ptr::null_mut());
    }
    let v = unsafe { CStr::from_ptr(oplab_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_declares_every_entry_point() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/oplab.h")).unwrap();
    let src = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/src/lib.rs")).unwrap();
    let exported: Vec<&str> = src
        .lines()
        .filter_map(|l| l.split("extern \"C\" fn ").nth(1))
        .map(|rest| rest.split('(').next().unwrap())
        .collect();
    assert!(exported.len() >= 15);
    for name in exported {
        assert!(header.contains(&format!("{name}(")), "{name} missing from header");
    }
    assert!(header.contains("OPLAB_STATUS_UNBOUNDED = 6"));
    assert!(header.contains("typedef struct OplabReport OplabReport;"));
}

const C_PROGRAM: &str = r#"
#include <stdio.h>
#include <string.h>
#include "oplab.h"

int main(void) {
    OplabFunction *f = NULL;
    if (oplab_function_parse("sigma(0.5)", &f) != OPLAB_STATUS_OK) return 10;
    double re = 1.0, im = 1.0;
    if (oplab_function_eval(f, 0.5, 0.0, &re, &im) != OPLAB_STATUS_OK) return 11;
    if (re != 0.0 || im != 0.0) return 12;
    oplab_function_free(f);

    OplabScenario *s = NULL;
    const char *json = "{\"u\":\"const(1)\",\"v\":\"const(0)\",\"phi\":\"z\",\"m\":1,\"alpha\":2}";
    if (oplab_scenario_parse(json, &s) != OPLAB_STATUS_OK) return 13;
    OplabOptions opts = oplab_options_default();
    OplabReport *r = NULL;
    if (oplab_run(s, "verify-delta", &opts, &r) != OPLAB_STATUS_OK) return 14;
    if (oplab_report_exit_code(r) != 0) return 15;
    if (strstr(oplab_report_json(r), "\"delta_pass\": true") == NULL) return 16;
    oplab_report_free(r);
    oplab_scenario_free(s);

    if (oplab_function_parse("(", &f) != OPLAB_STATUS_PARSE) return 17;
    printf("%s\n", oplab_last_error());
    return 0;
}
"#;

#[test]
fn c_program_links_against_static_library() {
    // deps/<test binary> -> the profile directory holding the library
    let exe = std::env::current_exe().unwrap();
    let profile_dir = exe.parent().unwrap().parent().unwrap();
    let lib = [
        profile_dir.join("liboplab_ffi.a"),
        profile_dir.join("deps/liboplab_ffi.a"),
    ]
    .into_iter()
    .find(|p| p.exists())
    .expect("static library built alongside the tests");
    let work = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("ffi-c");
    std::fs::create_dir_all(&work).unwrap();
    let c_file = work.join("main.c");
    std::fs::write(&c_file, C_PROGRAM).unwrap();
    let bin = work.join("main");
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    let status = Command::new(&cc)
        .arg("-std=c99")
        .arg("-Wall")
        .arg("-Werror")
        .arg("-I")
        .arg(concat!(env!("CARGO_MANIFEST_DIR"), "/include"))
        .arg(&c_file)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .status()
        .unwrap_or_else(|e| panic!("running {cc}: {e}"));
    assert!(status.success(), "C compile failed");
    let out = Command::new(&bin).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).contains("parse error"));
}
