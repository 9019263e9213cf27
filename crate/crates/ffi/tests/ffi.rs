use std::ffi::{CStr, CString};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use mtm_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(mtm_last_error()) }.to_string_lossy().into_owned()
}

fn gaussian(amplitude: f64, half_width: f64, dx: f64) -> *mut MtmFields {
    let mut f = ptr::null_mut();
    assert_eq!(unsafe { mtm_fields_gaussian(amplitude, 1.0, 0.0, half_width, dx, &mut f) }, MtmStatus::Ok);
    f
}

#[test]
fn fields_round_trip_and_evolve() {
    let u = [MtmComplex { re: 0.1, im: 0.0 }, MtmComplex { re: 0.2, im: -0.1 }, MtmComplex::default()];
    let v = [MtmComplex::default(), MtmComplex { re: 0.0, im: 0.3 }, MtmComplex { re: 0.1, im: 0.1 }];
    let mut f = ptr::null_mut();
    unsafe {
        assert_eq!(mtm_fields_new(0.0, -1.0, 0.5, 3, u.as_ptr(), v.as_ptr(), &mut f), MtmStatus::Ok);
        assert_eq!(mtm_fields_len(f), 3);
        let (mut x, mut p) = (0.0, MtmPoint::default());
        assert_eq!(mtm_fields_get(f, 1, &mut x, &mut p), MtmStatus::Ok);
        assert_eq!(x, -0.5);
        assert_eq!(p, MtmPoint { u: u[1], v: v[1] });
        assert_eq!(mtm_fields_get(f, 3, &mut x, &mut p), MtmStatus::OutOfRange);
        assert!(last_error().contains("out of range"));
        mtm_fields_free(f);
    }

    let f = gaussian(0.3, 10.0, 1.0 / 64.0);
    unsafe {
        let mut q0 = 0.0;
        assert_eq!(mtm_fields_charge(f, &mut q0), MtmStatus::Ok);
        let (mut g, mut drift) = (ptr::null_mut(), f64::NAN);
        assert_eq!(mtm_fields_evolve(f, 1.0, &mut g, &mut drift), MtmStatus::Ok);
        assert!(drift.abs() < 1e-12, "drift {drift}");
        let (mut t, mut xs, mut dx) = (0.0, 0.0, 0.0);
        assert_eq!(mtm_fields_grid(g, &mut t, &mut xs, &mut dx), MtmStatus::Ok);
        assert_eq!((t, xs, dx), (1.0, -10.0, 1.0 / 64.0));
        let mut q1 = 0.0;
        mtm_fields_charge(g, &mut q1);
        assert!((q1 - q0).abs() < 1e-12 * q0);
        assert_eq!(last_error(), "");
        mtm_fields_free(g);
        mtm_fields_free(f);
    }
}

#[test]
fn null_and_bad_arguments_report_status() {
    unsafe {
        let mut q = 0.0;
        assert_eq!(mtm_fields_charge(ptr::null(), &mut q), MtmStatus::NullPointer);
        assert_eq!(last_error(), "fields is null");
        assert_eq!(mtm_fields_len(ptr::null()), 0);
        mtm_fields_free(ptr::null_mut());
        mtm_scattering_free(ptr::null_mut());
        mtm_string_free(ptr::null_mut());

        let mut f = ptr::null_mut();
        assert_eq!(mtm_fields_gaussian(0.1, 1.0, 0.0, 5.0, -1.0, &mut f), MtmStatus::InvalidArgument);
        assert!(f.is_null());
        let one = [MtmComplex::default()];
        assert_eq!(mtm_fields_new(0.0, 0.0, 0.0, 1, one.as_ptr(), one.as_ptr(), &mut f), MtmStatus::InvalidArgument);

        let bad = CString::new("{\"r\": 3}").unwrap();
        let mut s = ptr::null_mut();
        assert_eq!(mtm_scattering_from_json(bad.as_ptr(), &mut s), MtmStatus::Config);
        assert!(!last_error().is_empty());
    }
}

#[test]
fn scattering_prediction_and_reconstruction() {
    let f = gaussian(0.05, 10.0, 0.05);
    unsafe {
        let mut s = ptr::null_mut();
        assert_eq!(mtm_scatter(f, -8.0, 8.0, 513, &mut s), MtmStatus::Ok, "{}", last_error());
        assert_eq!(mtm_scattering_eigen_count(s), 0);
        let (mut r, mut rh) = (MtmComplex::default(), MtmComplex::default());
        assert_eq!(mtm_scattering_reflection(s, MtmReflection::W, 2.0, &mut r), MtmStatus::Ok);
        assert_eq!(mtm_scattering_reflection(s, MtmReflection::Z, 0.5, &mut rh), MtmStatus::Ok);
        // r-hat(z) = r(1/z) / z
        assert!((rh.re - 2.0 * r.re).abs() < 1e-4 && (rh.im - 2.0 * r.im).abs() < 1e-4, "{r:?} {rh:?}");

        let mut json = ptr::null_mut();
        assert_eq!(mtm_scattering_to_json(s, &mut json), MtmStatus::Ok);
        let mut back = ptr::null_mut();
        assert_eq!(mtm_scattering_from_json(json, &mut back), MtmStatus::Ok);
        let mut r2 = MtmComplex::default();
        mtm_scattering_reflection(back, MtmReflection::W, 2.0, &mut r2);
        assert_eq!(r, r2);
        mtm_string_free(json);
        mtm_scattering_free(back);

        let mut p = MtmPoint::default();
        assert_eq!(mtm_reconstruct(s, 0.0, 0.0, 8.0, 1024, &mut p), MtmStatus::Ok, "{}", last_error());
        assert!((p.u.re - 0.05).abs() < 1e-3 && p.u.im.abs() < 1e-3, "{p:?}");
        assert!((p.v.re - 0.05).abs() < 1e-3 && p.v.im.abs() < 1e-3, "{p:?}");

        assert_eq!(mtm_predict(s, 50.0, 10.0, &mut p), MtmStatus::Ok, "{}", last_error());
        assert!(p.u.re.is_finite() && p.v.im.is_finite());
        assert_eq!(mtm_predict(s, 50.0, 60.0, &mut p), MtmStatus::InvalidArgument);

        let mut later = ptr::null_mut();
        assert_eq!(mtm_scattering_evolve(s, 1.0, &mut later), MtmStatus::Ok);
        mtm_scattering_free(later);
        mtm_scattering_free(s);
        mtm_fields_free(f);
    }
}

#[test]
fn one_soliton_is_localized() {
    let lambda = MtmComplex { re: -0.6, im: 0.6 };
    let c = MtmComplex { re: 1.0, im: 0.0 };
    let mut near = MtmPoint::default();
    let mut far = MtmPoint::default();
    unsafe {
        assert_eq!(mtm_one_soliton(lambda, c, 0.0, 0.0, &mut near), MtmStatus::Ok, "{}", last_error());
        assert_eq!(mtm_one_soliton(lambda, c, 0.0, 60.0, &mut far), MtmStatus::Ok);
        assert_eq!(mtm_one_soliton(MtmComplex { re: 0.5, im: 0.5 }, c, 0.0, 0.0, &mut far), MtmStatus::InvalidArgument);
    }
    assert!(near.u.re.hypot(near.u.im) > 1e-3);
}

#[test]
fn run_reports_config_errors() {
    let dir = tempdir("run");
    let cfg = dir.join("bad.json");
    std::fs::write(&cfg, "{\"scenario\": \"nope\"}").unwrap();
    let c = CString::new(cfg.to_str().unwrap()).unwrap();
    let o = CString::new(dir.to_str().unwrap()).unwrap();
    let mut passed = -1;
    let st = unsafe { mtm_run(MtmCommand::Report, c.as_ptr(), o.as_ptr(), &mut passed, ptr::null_mut()) };
    assert_eq!(st, MtmStatus::Config);
    assert!(last_error().contains("scenario"), "{}", last_error());
    assert_eq!(passed, -1);
    std::fs::remove_dir_all(dir).unwrap();
}

fn tempdir(tag: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("mtm-ffi-{tag}-{}", std::process::id()));
    std::fs::create_dir_all(&d).unwrap();
    d
}

fn header() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("bindings/include/mtm_lab.h")
}

#[test]
fn header_declares_the_api() {
    let h = std::fs::read_to_string(header()).unwrap();
    for name in [
        "mtm_last_error",
        "mtm_fields_new",
        "mtm_fields_evolve",
        "mtm_scatter",
        "mtm_scattering_reflection",
        "mtm_predict",
        "mtm_reconstruct",
        "mtm_one_soliton",
        "mtm_run",
        "typedef struct MtmFields MtmFields;",
        "MTM_STATUS_NULL_POINTER = 1",
    ] {
        assert!(h.contains(name), "header lacks {name}");
    }
}

#[test]
fn c_program_links_against_the_static_library() {
    let Ok(cc) = which_cc() else {
        eprintln!("no C compiler, skipping");
        return;
    };
    // target/<profile>/deps/<test binary>
    let exe = std::env::current_exe().unwrap();
    let lib_dir = exe.parent().unwrap().parent().unwrap();
    if !lib_dir.join("libmtm_ffi.a").exists() {
        eprintln!("static library not built, skipping");
        return;
    }
    let dir = tempdir("c");
    let src = dir.join("main.c");
    std::fs::write(&src, C_MAIN).unwrap();
    let bin = dir.join("main");
    let out = Command::new(&cc)
        .arg(&src)
        .arg("-I")
        .arg(header().parent().unwrap())
        .arg(lib_dir.join("libmtm_ffi.a"))
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let run = Command::new(&bin).output().unwrap();
    let stdout = String::from_utf8_lossy(&run.stdout);
    assert!(run.status.success(), "{stdout}{}", String::from_utf8_lossy(&run.stderr));
    assert!(stdout.contains("ok"), "{stdout}");
    std::fs::remove_dir_all(dir).unwrap();
}

fn which_cc() -> Result<String, ()> {
    for cc in ["cc", "gcc", "clang"] {
        if Command::new(cc).arg("--version").output().is_ok_and(|o| o.status.success()) {
            return Ok(cc.into());
        }
    }
    Err(())
}

const C_MAIN: &str = r#"
#include <stdio.h>
#include <string.h>
#include "mtm_lab.h"

int main(void) {
    MtmFields *f = NULL, *g = NULL;
    double q0 = 0, q1 = 0, drift = 0;
    if (mtm_fields_gaussian(0.2, 1.0, 0.0, 8.0, 1.0 / 32.0, &f) != MTM_STATUS_OK) return 1;
    if (mtm_fields_evolve(f, 0.5, &g, &drift) != MTM_STATUS_OK) return 2;
    mtm_fields_charge(f, &q0);
    mtm_fields_charge(g, &q1);
    if (q1 - q0 > 1e-12 || q0 - q1 > 1e-12) return 3;
    if (mtm_fields_charge(NULL, &q0) != MTM_STATUS_NULL_POINTER) return 4;
    if (strlen(mtm_last_error()) == 0) return 5;
    mtm_fields_free(g);
    mtm_fields_free(f);
    printf("ok %.6f\n", q0);
    return 0;
}
"#;
