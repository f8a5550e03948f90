//! Drives the C ABI from Rust, then compiles a small C program against the
//! generated header and the static library.

use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use cherednik_ffi::*;

fn open() -> *mut ChdDataSet {
    let mut ds = ptr::null_mut();
    assert_eq!(unsafe { chd_dataset_open(ptr::null(), &mut ds) }, ChdStatus::Ok);
    assert!(!ds.is_null());
    ds
}

fn take(s: *mut std::ffi::c_char) -> String {
    assert!(!s.is_null());
    let out = unsafe { CStr::from_ptr(s) }.to_str().unwrap().to_owned();
    unsafe { chd_string_free(s) };
    out
}

fn last_error() -> String {
    let p = chd_last_error_message();
    assert!(!p.is_null(), "an error message is set");
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn verify_all_bundled_blocks_passes() {
    let ds = open();
    let mut r = ptr::null_mut();
    unsafe {
        assert_eq!(chd_dataset_block_count(ds), 25);
        assert_eq!(chd_verify(ds, ptr::null(), &mut r), ChdStatus::Ok);
        assert_eq!(chd_report_status(r), ChdStatus::Ok);
        let json: serde_json::Value = serde_json::from_str(&take(chd_report_json(r))).unwrap();
        assert_eq!(json["sections"].as_array().unwrap().len(), 25);
        assert_eq!(json["status"], "pass");
        chd_report_free(r);
        chd_dataset_free(ds);
    }
}

#[test]
fn solve_reports_unique_and_ambiguous_completions() {
    let ds = open();
    let block = CString::new("E8/c_1_4/block_84_x").unwrap();
    unsafe {
        let mut r = ptr::null_mut();
        assert_eq!(chd_solve(ds, block.as_ptr(), true, 0, &mut r), ChdStatus::Ok);
        assert!(take(chd_report_text(r)).contains("verdict: unique"));
        chd_report_free(r);

        let mut r = ptr::null_mut();
        assert_eq!(chd_solve(ds, block.as_ptr(), false, 0, &mut r), ChdStatus::Ambiguous);
        assert_eq!(chd_report_status(r), ChdStatus::Ambiguous);
        chd_report_free(r);
        chd_dataset_free(ds);
    }
}

#[test]
fn character_query_gives_the_dimension() {
    let ds = open();
    let block = CString::new("E8/c_1_5/block_8_z").unwrap();
    let label = CString::new("56_z").unwrap();
    unsafe {
        let mut r = ptr::null_mut();
        assert_eq!(chd_character(ds, block.as_ptr(), label.as_ptr(), &mut r), ChdStatus::Ok);
        let json: serde_json::Value = serde_json::from_str(&take(chd_report_json(r))).unwrap();
        assert_eq!(json["sections"][0]["simples"][0]["dim"], "1728");
        chd_report_free(r);

        let mut r = ptr::null_mut();
        assert_eq!(chd_character(ds, block.as_ptr(), ptr::null(), &mut r), ChdStatus::Ok);
        assert!(take(chd_report_text(r)).contains("56_z"));
        chd_report_free(r);
        chd_dataset_free(ds);
    }
}

#[test]
fn failures_set_status_and_message() {
    let ds = open();
    let missing = CString::new("E8/c_1_4/no_such_block").unwrap();
    let bad_label = CString::new("nonexistent").unwrap();
    let block = CString::new("F4/c_1_6/principal").unwrap();
    let dir = tempfile::tempdir().unwrap();
    let empty_dir = CString::new(dir.path().join("absent").to_str().unwrap()).unwrap();
    unsafe {
        let mut r = ptr::null_mut();
        assert_eq!(chd_verify(ds, missing.as_ptr(), &mut r), ChdStatus::DataError);
        assert!(last_error().contains("no_such_block"), "{}", last_error());
        chd_report_free(r);

        let mut r = ptr::null_mut();
        assert_eq!(
            chd_character(ds, block.as_ptr(), bad_label.as_ptr(), &mut r),
            ChdStatus::DataError
        );
        chd_report_free(r);

        let mut r = ptr::null_mut();
        assert_eq!(chd_solve(ds, ptr::null(), true, 0, &mut r), ChdStatus::InvalidArgument);
        assert!(r.is_null());
        assert!(last_error().contains("block"));

        let mut other = ptr::null_mut();
        assert_eq!(chd_dataset_open(empty_dir.as_ptr(), &mut other), ChdStatus::DataError);
        assert!(other.is_null());

        let mut r = ptr::null_mut();
        assert_eq!(chd_solve(ds, block.as_ptr(), true, 4, &mut r), ChdStatus::Ok);
        assert!(
            chd_last_error_message().is_null(),
            "a successful call clears the message"
        );
        chd_report_free(r);
        chd_dataset_free(ds);
    }
}

#[test]
fn handles_are_independent_across_threads() {
    let handles: Vec<_> = (0..4)
        .map(|_| {
            std::thread::spawn(|| {
                let ds = open();
                let mut r = ptr::null_mut();
                let block = CString::new("F4/c_1_3/block_4_2").unwrap();
                let s = unsafe { chd_solve(ds, block.as_ptr(), true, 0, &mut r) };
                let text = take(unsafe { chd_report_json(r) });
                unsafe {
                    chd_report_free(r);
                    chd_dataset_free(ds);
                }
                (s, text)
            })
        })
        .collect();
    let results: Vec<_> = handles.into_iter().map(|h| h.join().unwrap()).collect();
    assert!(results.iter().all(|r| r == &results[0]));
    assert_eq!(results[0].0, ChdStatus::Ok);
}

/// Directory holding the static library built alongside this test binary.
fn artifact_dir() -> PathBuf {
    let exe = std::env::current_exe().unwrap();
    exe.parent().unwrap().parent().unwrap().to_path_buf()
}

#[test]
fn c_program_links_against_the_header_and_static_library() {
    let crate_dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let lib = artifact_dir().join("libcherednik_ffi.a");
    assert!(lib.exists(), "static library missing at {}", lib.display());
    let out = tempfile::tempdir().unwrap();
    let exe = out.path().join("smoke");
    let status = Command::new("cc")
        .arg("-std=c99")
        .arg("-Wall")
        .arg("-Werror")
        .arg("-I")
        .arg(crate_dir.join("include"))
        .arg(crate_dir.join("tests/c/smoke.c"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .expect("a C compiler is available");
    assert!(status.success(), "C smoke test failed to compile");
    let run = Command::new(&exe).output().unwrap();
    assert!(run.status.success(), "C smoke test exited with {:?}", run.status.code());
    assert!(String::from_utf8_lossy(&run.stdout).starts_with("ok "));
}
