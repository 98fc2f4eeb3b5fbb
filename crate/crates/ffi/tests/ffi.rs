use chainrebuild_ffi::*;
use std::ffi::{c_char, CStr, CString};
use std::path::PathBuf;
use std::ptr;

fn cstr(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn last_error() -> String {
    let p = cr_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

unsafe fn take_string(p: *mut c_char) -> String {
    let s = CStr::from_ptr(p).to_string_lossy().into_owned();
    cr_string_free(p);
    s
}

const RP2: &str = "2\n1 1 1\n1 1 0\n1 1 1\n0 0 2\n";

#[test]
fn complex_round_trip_and_homology() {
    unsafe {
        let mut c = ptr::null_mut();
        assert_eq!(cr_complex_parse(cstr(RP2).as_ptr(), &mut c), CrStatus::Ok, "{}", last_error());
        assert!(cr_last_error().is_null());
        let mut top = 0;
        assert_eq!(cr_complex_top_degree(c, &mut top), CrStatus::Ok);
        assert_eq!(top, 2);
        let mut h = CrHomology::default();
        assert_eq!(cr_complex_homology(c, 1, ptr::null(), &mut h), CrStatus::Ok);
        assert_eq!((h.betti_rational, h.betti_mod2, h.torsion_count), (0, 1, 1));
        assert!((h.log_torsion - 2f64.ln()).abs() < 1e-12);
        let mut t = ptr::null_mut();
        assert_eq!(cr_complex_torsion(c, 1, ptr::null(), &mut t), CrStatus::Ok);
        assert_eq!(take_string(t), "2");
        let mut s = ptr::null_mut();
        assert_eq!(cr_complex_to_text(c, &mut s), CrStatus::Ok);
        let text = take_string(s);
        let mut c2 = ptr::null_mut();
        assert_eq!(cr_complex_parse(cstr(&text).as_ptr(), &mut c2), CrStatus::Ok);
        let mut d = 0;
        assert_eq!(cr_complex_dim(c2, 2, &mut d), CrStatus::Ok);
        assert_eq!(d, 1);
        assert_eq!(cr_complex_dim(c2, 9, &mut d), CrStatus::Ok);
        assert_eq!(d, 0);
        cr_complex_free(c2);
        cr_complex_free(c);
    }
}

#[test]
fn error_codes_and_messages() {
    unsafe {
        let mut c = ptr::null_mut();
        assert_eq!(cr_complex_parse(cstr("1\n1 1\nbogus\n").as_ptr(), &mut c), CrStatus::Parse);
        assert!(last_error().contains("line 3"), "{}", last_error());
        assert!(c.is_null());
        assert_eq!(cr_complex_parse(ptr::null(), &mut c), CrStatus::NullPointer);
        let bad = [0xffu8, 0];
        assert_eq!(cr_complex_parse(bad.as_ptr().cast(), &mut c), CrStatus::InvalidUtf8);
        assert_eq!(cr_complex_top_degree(ptr::null(), &mut 0), CrStatus::NullPointer);

        assert_eq!(cr_complex_circle_cover(5, &mut c), CrStatus::Ok);
        let mut h = CrHomology::default();
        assert_eq!(cr_complex_homology(c, 4, ptr::null(), &mut h), CrStatus::OutOfRange);
        let mut b = 0.0;
        assert_eq!(cr_complex_gabber_bound(c, 1, ptr::null(), &mut b), CrStatus::OutOfRange);
        assert_eq!(cr_complex_gabber_bound(c, 0, ptr::null(), &mut b), CrStatus::Ok);
        assert!((b - 5.0 * 2f64.ln()).abs() < 1e-6, "{b}");
        cr_complex_free(c);

        // The 4-fold Heisenberg cover needs more than 2-bit entries.
        let mut r = ptr::null_mut();
        assert_eq!(cr_rebuild_heisenberg(4, &mut r), CrStatus::Ok);
        let mut src = ptr::null_mut();
        assert_eq!(cr_rebuilding_source(r, &mut src), CrStatus::Ok);
        let caps = CrCaps { max_bits: 2, ..cr_caps_default() };
        assert_eq!(cr_complex_homology(src, 2, &caps, &mut h), CrStatus::CapExceeded);
        assert!(last_error().contains("cap"));
        cr_complex_free(src);
        cr_rebuilding_free(r);

        assert_eq!(cr_rebuild_circle(10, 5.0, &mut r), CrStatus::OutOfRange);
        assert_eq!(cr_rebuild_heisenberg(0, &mut r), CrStatus::OutOfRange);
        cr_complex_free(ptr::null_mut());
        cr_rebuilding_free(ptr::null_mut());
        cr_action_free(ptr::null_mut());
        cr_string_free(ptr::null_mut());
    }
}

#[test]
fn rebuildings_through_the_abi() {
    unsafe {
        let mut r = ptr::null_mut();
        assert_eq!(cr_rebuild_circle(1000, 10.0, &mut r), CrStatus::Ok);
        let (mut alpha, mut viol) = (9, 9);
        assert_eq!(cr_rebuilding_alpha(r, &mut alpha), CrStatus::Ok);
        assert_eq!(cr_rebuilding_verify(r, &mut viol), CrStatus::Ok);
        assert_eq!(viol, 0);
        let mut tgt = ptr::null_mut();
        assert_eq!(cr_rebuilding_target(r, &mut tgt), CrStatus::Ok);
        let mut d = 0;
        cr_complex_dim(tgt, 1, &mut d);
        assert!((100..=200).contains(&d), "{d}");
        cr_complex_free(tgt);
        let mut kappa = 0.0;
        assert_eq!(cr_rebuilding_kappa(r, 10.0, ptr::null(), &mut kappa), CrStatus::Ok);
        assert!(kappa >= 1.0);
        assert_eq!(cr_rebuilding_kappa(r, 0.5, ptr::null(), &mut kappa), CrStatus::OutOfRange);

        let mut s = ptr::null_mut();
        assert_eq!(cr_rebuilding_to_text(r, &mut s), CrStatus::Ok);
        let text = take_string(s);
        let mut r2 = ptr::null_mut();
        assert_eq!(cr_rebuilding_parse(cstr(&text).as_ptr(), &mut r2), CrStatus::Ok, "{}", last_error());
        let mut a2 = 0;
        cr_rebuilding_alpha(r2, &mut a2);
        assert_eq!(a2, alpha);
        cr_rebuilding_free(r2);
        cr_rebuilding_free(r);

        let hnf = [2i64, 1, 0, 3];
        assert_eq!(cr_rebuild_lattice(2, hnf.as_ptr(), &mut r), CrStatus::Ok, "{}", last_error());
        let mut tgt = ptr::null_mut();
        cr_rebuilding_target(r, &mut tgt);
        let dims: Vec<usize> = (0..3).map(|j| {
            let mut d = 0;
            cr_complex_dim(tgt, j, &mut d);
            d
        }).collect();
        assert_eq!(dims, [1, 2, 1]);
        cr_complex_free(tgt);
        cr_rebuilding_free(r);
        let lower = [2i64, 0, 1, 3];
        assert_eq!(cr_rebuild_lattice(2, lower.as_ptr(), &mut r), CrStatus::Invalid);

        let spec = "tower heisenberg\nlevel l=2 a=\nlevel l=2 a=0\nlevel l=2 a=0,0\n";
        assert_eq!(cr_rebuild_subgroup(cstr(spec).as_ptr(), &mut r), CrStatus::Ok, "{}", last_error());
        let mut src = ptr::null_mut();
        cr_rebuilding_source(r, &mut src);
        let mut h = CrHomology::default();
        assert_eq!(cr_complex_homology(src, 1, ptr::null(), &mut h), CrStatus::Ok);
        assert_eq!((h.betti_rational, h.torsion_count), (2, 1));
        cr_complex_free(src);
        cr_rebuilding_free(r);
        assert_eq!(cr_rebuild_subgroup(cstr("tower nope\n").as_ptr(), &mut r), CrStatus::Parse);
    }
}

#[test]
fn actions_through_the_abi() {
    unsafe {
        let text = "degree 4\ngen a: 1 2 3 0\n";
        let mut a = ptr::null_mut();
        assert_eq!(cr_action_parse(cstr(text).as_ptr(), &mut a), CrStatus::Ok);
        let mut n = 0;
        cr_action_degree(a, &mut n);
        assert_eq!(n, 4);
        let (mut num, mut den) = (0, 0);
        assert_eq!(cr_action_fixed_point_ratio(a, cstr("a a a a").as_ptr(), &mut num, &mut den), CrStatus::Ok);
        assert_eq!((num, den), (1, 1));
        assert_eq!(cr_action_fixed_point_ratio(a, cstr("a'").as_ptr(), &mut num, &mut den), CrStatus::Ok);
        assert_eq!((num, den), (0, 1));
        assert_eq!(cr_action_fixed_point_ratio(a, cstr("b").as_ptr(), &mut num, &mut den), CrStatus::Invalid);
        assert!(last_error().contains("`b`"));
        cr_action_free(a);
        assert_eq!(cr_action_parse(cstr("degree 2\ngen a: 0 0\n").as_ptr(), &mut a), CrStatus::Invalid);
    }
}

#[test]
fn version_and_default_caps() {
    let v = unsafe { CStr::from_ptr(cr_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
    let c = cr_caps_default();
    assert_eq!((c.max_bits, c.max_minors, c.max_iterations), (1 << 16, 1_000_000, 10_000));
}

fn manifest() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

#[test]
fn header_declares_the_abi() {
    let h = std::fs::read_to_string(manifest().join("include/chainrebuild.h")).unwrap();
    for name in [
        "typedef struct CrComplex CrComplex;",
        "CR_STATUS_CAP_EXCEEDED = 6",
        "const char *cr_last_error(void);",
        "enum CrStatus cr_complex_homology(const struct CrComplex *c,",
        "void cr_rebuilding_free(struct CrRebuilding *r);",
    ] {
        assert!(h.contains(name), "missing `{name}`");
    }
}

const C_PROGRAM: &str = r#"
#include "chainrebuild.h"
#include <stdio.h>
#include <string.h>

int main(void) {
    CrRebuilding *r = NULL;
    if (cr_rebuild_heisenberg(3, &r) != CR_STATUS_OK) return 1;
    size_t viol = 99, alpha = 0;
    cr_rebuilding_verify(r, &viol);
    cr_rebuilding_alpha(r, &alpha);
    CrComplex *t = NULL;
    cr_rebuilding_target(r, &t);
    CrHomology h;
    cr_complex_homology(t, 1, NULL, &h);
    char *tors = NULL;
    cr_complex_torsion(t, 1, NULL, &tors);
    printf("alpha=%zu viol=%zu b1=%zu tors=%s\n", alpha, viol, h.betti_rational, tors);
    cr_string_free(tors);
    cr_complex_free(t);
    cr_rebuilding_free(r);
    CrComplex *bad = NULL;
    CrStatus s = cr_complex_parse("x", &bad);
    printf("status=%d err=%s\n", (int)s, strstr(cr_last_error(), "line 1") ? "line" : "?");
    return 0;
}
"#;

fn static_lib() -> Option<PathBuf> {
    // target/<profile>/deps/<test binary>
    let exe = std::env::current_exe().ok()?;
    let lib = exe.parent()?.parent()?.join("libchainrebuild_ffi.a");
    lib.exists().then_some(lib)
}

fn have_cc() -> bool {
    std::process::Command::new("cc").arg("--version").output().is_ok()
}

#[test]
fn c_program_links_and_runs() {
    if !have_cc() {
        eprintln!("no C compiler; skipping");
        return;
    }
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    let src = dir.join("main.c");
    std::fs::write(&src, C_PROGRAM).unwrap();
    let include = manifest().join("include");
    let syntax = std::process::Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-I"])
        .arg(&include)
        .arg(&src)
        .output()
        .unwrap();
    assert!(syntax.status.success(), "{}", String::from_utf8_lossy(&syntax.stderr));
    let Some(lib) = static_lib() else {
        eprintln!("static library not found next to the test binary; link step skipped");
        return;
    };
    let exe = dir.join("main");
    let link = std::process::Command::new("cc")
        .args(["-std=c99", "-I"])
        .arg(&include)
        .arg(&src)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .output()
        .unwrap();
    assert!(link.status.success(), "{}", String::from_utf8_lossy(&link.stderr));
    let run = std::process::Command::new(&exe).output().unwrap();
    assert!(run.status.success());
    let out = String::from_utf8(run.stdout).unwrap();
    assert_eq!(out, "alpha=3 viol=0 b1=2 tors=3\nstatus=3 err=line\n");
}
