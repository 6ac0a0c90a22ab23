use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use nodice_ffi::*;

fn parse(src: &str) -> *mut NdProgram {
    let src = CString::new(src).unwrap();
    let mut p = ptr::null_mut();
    assert_eq!(unsafe { nd_program_parse(src.as_ptr(), &mut p) }, NdStatus::Ok);
    p
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(nd_last_error()) }.to_string_lossy().into_owned()
}

#[test]
fn query_all_values() {
    let p = parse("let x = flip(1/2) in let y = nflip() in let z = observe(x || y) in x");
    let mut r = ptr::null_mut();
    unsafe {
        assert_eq!(nd_infer(p, ptr::null(), ptr::null(), &mut r), NdStatus::Ok);
        assert_eq!(nd_result_len(r), 2);
        assert_eq!(CStr::from_ptr(nd_result_value(r, 0)).to_str().unwrap(), "true");
        let mut prob = 0.0;
        assert_eq!(nd_result_probability(r, 0, &mut prob), NdStatus::Ok);
        assert!((prob - 1.0).abs() < 1e-6);
        assert_eq!(nd_result_probability(r, 1, &mut prob), NdStatus::Ok);
        assert!((prob - 0.5).abs() < 1e-6);
        assert_eq!(nd_result_probability(r, 2, &mut prob), NdStatus::OutOfRange);
        assert!(nd_result_value(r, 2).is_null());
        nd_result_free(r);
        nd_program_free(p);
    }
}

#[test]
fn single_value_with_options() {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../programs/coin_choice.nd");
    let path = CString::new(path.to_str().unwrap()).unwrap();
    let mut p = ptr::null_mut();
    let mut r = ptr::null_mut();
    let value = CString::new("true").unwrap();
    let opts = NdOptions { method: NdMethod::Both, ..nd_default_options() };
    unsafe {
        assert_eq!(nd_program_load(path.as_ptr(), &mut p), NdStatus::Ok);
        assert_eq!(nd_infer(p, value.as_ptr(), &opts, &mut r), NdStatus::Ok);
        let mut prob = 0.0;
        nd_result_probability(r, 0, &mut prob);
        assert!((prob - 301.0 / 420.0).abs() < 1e-6);
        assert!(nd_result_iterations(r, 0) > 0);
        nd_result_free(r);
        nd_program_free(p);
    }
}

#[test]
fn errors_map_to_status_codes() {
    let bad = CString::new("let x = in x").unwrap();
    let mut p = ptr::null_mut();
    unsafe {
        assert_eq!(nd_program_parse(bad.as_ptr(), &mut p), NdStatus::Program);
        assert!(p.is_null());
        assert!(last_error().contains("syntax"));
        assert_eq!(nd_program_parse(ptr::null(), &mut p), NdStatus::NullArgument);
        let missing = CString::new("/nonexistent/x.nd").unwrap();
        assert_eq!(nd_program_load(missing.as_ptr(), &mut p), NdStatus::Io);
    }
    let p = parse("flip(1/2)");
    let mut r = ptr::null_mut();
    let pair = CString::new("(true, true)").unwrap();
    let opts = NdOptions { tol: 0.0, ..nd_default_options() };
    unsafe {
        assert_eq!(nd_infer(p, pair.as_ptr(), ptr::null(), &mut r), NdStatus::Value);
        assert_eq!(nd_infer(p, ptr::null(), &opts, &mut r), NdStatus::Param);
        assert_eq!(nd_infer(ptr::null(), ptr::null(), ptr::null(), &mut r), NdStatus::NullArgument);
        assert!(r.is_null());
        nd_program_free(p);
        nd_program_free(ptr::null_mut());
        nd_result_free(ptr::null_mut());
        assert_eq!(nd_result_len(ptr::null()), 0);
    }
}

#[test]
fn version_is_set() {
    let v = unsafe { CStr::from_ptr(nd_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_declares_the_api_and_compiles() {
    let header = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include/nodice.h");
    let text = std::fs::read_to_string(&header).unwrap();
    for name in
        ["nd_program_parse", "nd_infer", "nd_result_free", "nd_last_error", "ND_STATUS_OK", "typedef struct NdProgram"]
    {
        assert!(text.contains(name), "{name}");
    }
    let dir = tempfile::tempdir().unwrap();
    let main = dir.path().join("main.c");
    std::fs::write(
        &main,
        "#include \"nodice.h\"\nint main(void) { NdOptions o = nd_default_options(); return o.compress ? 0 : 1; }\n",
    )
    .unwrap();
    match Command::new("cc").arg("-fsyntax-only").arg("-I").arg(header.parent().unwrap()).arg(&main).output() {
        Ok(o) => assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr)),
        Err(_) => eprintln!("no C compiler, skipping syntax check"),
    }
}
