use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use codd_ffi::*;

unsafe fn take_string(s: *mut std::ffi::c_char) -> String {
    let out = CStr::from_ptr(s).to_str().unwrap().to_owned();
    codd_string_free(s);
    out
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(codd_last_error()).to_string_lossy().into_owned() }
}

#[test]
fn entropies_and_depth() {
    unsafe {
        let cells = [0u32, 0, 1, 2];
        let mut s = ptr::null_mut();
        assert_eq!(codd_logical_entropy(2, cells.as_ptr(), ptr::null(), &mut s), CoddStatus::Ok);
        assert_eq!(take_string(s), "5/8");
        let weights = [1u64, 0, 0, 3];
        assert_eq!(codd_logical_entropy(2, cells.as_ptr(), weights.as_ptr(), &mut s), CoddStatus::Ok);
        assert_eq!(take_string(s), "3/8");
        let mut h = 0.0;
        assert_eq!(codd_shannon_entropy(2, cells.as_ptr(), ptr::null(), &mut h), CoddStatus::Ok);
        assert!((h - 1.5).abs() < 1e-12);
        let outputs = [0u64, 0, 1, 1];
        assert_eq!(codd_optimal_depth(2, outputs.as_ptr(), ptr::null(), &mut s), CoddStatus::Ok);
        assert_eq!(take_string(s), "1/1");
    }
}

#[test]
fn expression_lifecycle() {
    // Decide(0, Leaf "01", Leaf "10") in its binary form
    let e = codd_core::codd::CoddExpr::decide(
        0,
        &codd_core::codd::CoddExpr::leaf("01".parse().unwrap()),
        &codd_core::codd::CoddExpr::leaf("10".parse().unwrap()),
    );
    let bytes = codd_core::codd::encode(&e).unwrap().to_bytes();
    unsafe {
        let mut h = ptr::null_mut();
        assert_eq!(codd_expr_decode(bytes.as_ptr(), bytes.len(), &mut h, ptr::null_mut()), CoddStatus::Ok);
        assert_eq!(codd_expr_size(h), 1);
        assert_eq!(codd_expr_node_count(h), 3);

        let (mut out, mut len) = (ptr::null_mut(), 0usize);
        assert_eq!(codd_expr_encode(h, &mut out, &mut len), CoddStatus::Ok);
        assert_eq!(std::slice::from_raw_parts(out, len), &bytes[..]);
        codd_bytes_free(out, len);

        let arg = CString::new("1").unwrap();
        let mut nf = ptr::null_mut();
        assert_eq!(codd_expr_eval_bits(h, arg.as_ptr(), 100, &mut nf), CoddStatus::Ok);
        let mut bits = ptr::null_mut();
        assert_eq!(codd_expr_leaf_bits(nf, &mut bits), CoddStatus::Ok);
        assert_eq!(take_string(bits), "10");
        assert_eq!(codd_expr_leaf_bits(h, &mut bits), CoddStatus::Invalid);
        codd_expr_free(nf);
        codd_expr_free(h);
    }
}

#[test]
fn errors_carry_status_and_message() {
    unsafe {
        let trailing = [0x00u8, 0x01, 0x40, 0x00];
        let mut h = ptr::null_mut();
        let mut offset = usize::MAX;
        assert_eq!(codd_expr_decode(trailing.as_ptr(), 4, &mut h, &mut offset), CoddStatus::Decode);
        assert_eq!(offset, 24);
        assert!(last_error().contains("offset 24"));
        assert!(h.is_null());

        let mut s = ptr::null_mut();
        assert_eq!(codd_logical_entropy(2, ptr::null(), ptr::null(), &mut s), CoddStatus::NullPointer);
        assert_eq!(codd_optimal_depth(40, ptr::null(), ptr::null(), &mut s), CoddStatus::Capacity);

        // omega = S I I applied to itself never reaches a normal form
        let i = codd_core::codd::CoddExpr::apply_all(
            &codd_core::codd::CoddExpr::s(),
            &[&codd_core::codd::CoddExpr::k(), &codd_core::codd::CoddExpr::k()],
        );
        let w = codd_core::codd::CoddExpr::apply_all(&codd_core::codd::CoddExpr::s(), &[&i, &i]);
        let loop_ = codd_core::codd::CoddExpr::apply(&w, &w);
        let bytes = codd_core::codd::encode(&codd_core::codd::CoddExpr::apply(&codd_core::codd::CoddExpr::k(), &loop_))
            .unwrap()
            .to_bytes();
        assert_eq!(codd_expr_decode(bytes.as_ptr(), bytes.len(), &mut h, ptr::null_mut()), CoddStatus::Ok);
        let arg = CString::new("0").unwrap();
        let mut nf = ptr::null_mut();
        assert_eq!(codd_expr_eval_bits(h, arg.as_ptr(), 50, &mut nf), CoddStatus::FuelExhausted);
        assert!(nf.is_null());
        codd_expr_free(h);

        // a successful call clears the message
        assert_eq!(codd_logical_entropy(1, [0u32, 1].as_ptr(), ptr::null(), &mut s), CoddStatus::Ok);
        codd_string_free(s);
        assert!(codd_last_error().is_null());
    }
}

#[test]
fn header_compiles_and_links_from_c() {
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    // target/<profile>/deps/<this test> -> target/<profile>
    let profile_dir = std::env::current_exe().unwrap().parent().unwrap().parent().unwrap().to_path_buf();
    let lib = profile_dir.join("libcodd_ffi.a");
    assert!(lib.exists(), "static library missing at {}", lib.display());
    let dir = tempfile::tempdir().unwrap();
    let exe = dir.path().join("smoke");
    let status = Command::new("cc")
        .arg("-std=c11")
        .arg("-Wall")
        .arg("-Werror")
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(manifest.join("tests/smoke.c"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .unwrap();
    assert!(status.success());
    let out = Command::new(&exe).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("ok "));
}
