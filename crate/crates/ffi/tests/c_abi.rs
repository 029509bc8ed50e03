use parchern_ffi::*;
use std::ffi::{CStr, CString};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

fn scenario(name: &str) -> CString {
    let p = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../core/scenarios")
        .join(name);
    CString::new(std::fs::read_to_string(p).unwrap()).unwrap()
}

fn load(text: &CString) -> *mut ParchernScenario {
    let mut h = ptr::null_mut();
    assert_eq!(
        unsafe { parchern_scenario_load(text.as_ptr(), &mut h) },
        ParchernStatus::Ok
    );
    h
}

fn take(s: *mut std::ffi::c_char) -> serde_json::Value {
    assert!(!s.is_null());
    let v = serde_json::from_str(unsafe { CStr::from_ptr(s) }.to_str().unwrap()).unwrap();
    unsafe { parchern_string_free(s) };
    v
}

fn last_error() -> String {
    let p = parchern_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn reports_match_command_line_output() {
    let h = load(&scenario("two_points_five_lines.json"));
    assert_eq!(unsafe { parchern_scenario_rank(h) }, 2);
    let mut out = ptr::null_mut();
    assert_eq!(
        unsafe { parchern_decompose(h, &mut out) },
        ParchernStatus::Ok
    );
    let report = take(out);
    let golden: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(
            Path::new(env!("CARGO_MANIFEST_DIR"))
                .join("../core/scenarios/expected/two_points_five_lines.decompose.json"),
        )
        .unwrap(),
    )
    .unwrap();
    assert_eq!(report, golden);

    let point = CString::new("P2").unwrap();
    assert_eq!(
        unsafe { parchern_minimize(h, point.as_ptr(), -1, true, &mut out) },
        ParchernStatus::Ok
    );
    let m = take(out);
    assert_eq!(m["points"][0]["point"], "P2");
    assert_eq!(
        unsafe { parchern_check(h, 3, &mut out) },
        ParchernStatus::Ok
    );
    assert_eq!(take(out)["status"], "PASS");
    assert!(parchern_last_error().is_null());
    unsafe { parchern_scenario_free(h) };
}

#[test]
fn errors_carry_status_and_message() {
    let bad = CString::new("{\"base_surface\": 1.5}").unwrap();
    let mut h = ptr::null_mut();
    assert_eq!(
        unsafe { parchern_scenario_load(bad.as_ptr(), &mut h) },
        ParchernStatus::ParseError
    );
    assert!(h.is_null());
    assert!(last_error().starts_with("parse error"));

    let text = scenario("oo1_triple_point.json").into_string().unwrap();
    let undeclared = CString::new(text.replace("[\"L3\", \"L4\"]", "[\"L3\", \"L7\"]")).unwrap();
    assert_eq!(
        unsafe { parchern_scenario_load(undeclared.as_ptr(), &mut h) },
        ParchernStatus::InvariantViolated
    );
    assert!(last_error().contains("declared-component"));

    let h = load(&scenario("oo1_triple_point.json"));
    let mut out = ptr::null_mut();
    let missing = CString::new("Q").unwrap();
    assert_eq!(
        unsafe { parchern_minimize(h, missing.as_ptr(), -1, true, &mut out) },
        ParchernStatus::InvariantViolated
    );
    assert!(out.is_null());
    unsafe { parchern_scenario_free(h) };

    let corrupted = CString::new(text.replacen(
        "\"extensions\"",
        "\"attested\": {\"ch1\": {\"H\": 1, \"P\": 1}, \"ch2\": \"-1\"}, \"extensions\"",
        1,
    ))
    .unwrap();
    let h = load(&corrupted);
    assert_eq!(
        unsafe { parchern_decompose(h, &mut out) },
        ParchernStatus::CheckFailed
    );
    assert_eq!(take(out)["status"], "FAIL");
    assert!(last_error().contains("discrepancy"));
    unsafe { parchern_scenario_free(h) };
}

fn static_lib() -> Option<PathBuf> {
    let tmp = Path::new(env!("CARGO_TARGET_TMPDIR"));
    let profile_dir = tmp.parent()?.join(if cfg!(debug_assertions) {
        "debug"
    } else {
        "release"
    });
    let lib = profile_dir.join("libparchern_ffi.a");
    lib.exists().then_some(lib)
}

#[test]
fn header_compiles_and_links_from_c() {
    let header_dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("include");
    let header = std::fs::read_to_string(header_dir.join("parchern.h")).unwrap();
    for sym in [
        "parchern_scenario_load",
        "parchern_minimize",
        "parchern_string_free",
        "PARCHERN_STATUS_OK",
    ] {
        assert!(header.contains(sym), "{sym}");
    }
    let lib = static_lib().expect("static library is built alongside the rlib");
    let dir = Path::new(env!("CARGO_TARGET_TMPDIR"));
    let src = dir.join("smoke.c");
    let exe = dir.join("smoke");
    std::fs::write(
        &src,
        r#"#include "parchern.h"
#include <stdio.h>
#include <string.h>
int main(int argc, char **argv) {
    FILE *f = fopen(argv[1], "rb");
    static char buf[1 << 16];
    size_t n = fread(buf, 1, sizeof buf - 1, f);
    buf[n] = 0;
    fclose(f);
    ParchernScenario *h = NULL;
    if (parchern_scenario_load(buf, &h) != PARCHERN_STATUS_OK) return 10;
    char *out = NULL;
    if (parchern_delta(h, &out) != PARCHERN_STATUS_OK) return 11;
    int ok = strstr(out, "\"delta_par\"") != NULL;
    parchern_string_free(out);
    parchern_scenario_free(h);
    if (parchern_scenario_load("{", &h) != PARCHERN_STATUS_PARSE_ERROR) return 12;
    if (parchern_last_error() == NULL) return 13;
    return ok ? 0 : 14;
}
"#,
    )
    .unwrap();
    let status = Command::new("cc")
        .arg(&src)
        .arg("-I")
        .arg(&header_dir)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .expect("C compiler available");
    assert!(status.success());
    let run = Command::new(&exe)
        .arg(Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/scenarios/oo1_triple_point.json"))
        .status()
        .unwrap();
    assert_eq!(run.code(), Some(0));
}
