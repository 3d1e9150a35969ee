use std::ffi::{c_char, CStr};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use motzkin_ffi::*;

fn last_error() -> String {
    last_error_string().unwrap_or_default()
}

#[test]
fn count_round_trips_as_decimal() {
    let mut s: *mut c_char = ptr::null_mut();
    let status = unsafe { motzkin_count(10, &mut s) };
    assert_eq!(status, MotzkinStatus::Ok);
    assert_eq!(unsafe { CStr::from_ptr(s) }.to_str().unwrap(), "2188");
    unsafe { motzkin_string_free(s) };

    let mut ln = 0.0;
    assert_eq!(unsafe { motzkin_count_ln(10, &mut ln) }, MotzkinStatus::Ok);
    assert!((ln - 2188f64.ln()).abs() < 1e-14);
}

#[test]
fn null_out_pointer_is_reported() {
    let status = unsafe { motzkin_count_ln(3, ptr::null_mut()) };
    assert_eq!(status, MotzkinStatus::NullPointer);
    assert!(last_error().contains("null"));
    unsafe { motzkin_string_free(ptr::null_mut()) };
    unsafe { motzkin_sampler_free(ptr::null_mut()) };
    assert_eq!(unsafe { motzkin_sampler_length(ptr::null()) }, 0);
}

#[test]
fn path_validation_codes() {
    let good: [i8; 4] = [1, 0, -1, 0];
    let bad: [i8; 2] = [-1, 1];
    assert_eq!(unsafe { motzkin_path_validate(good.as_ptr(), 4) }, MotzkinStatus::Ok);
    assert_eq!(unsafe { motzkin_path_validate(bad.as_ptr(), 2) }, MotzkinStatus::InvalidPath);
    assert!(last_error().contains("step 1"), "{}", last_error());
    assert_eq!(unsafe { motzkin_path_validate(ptr::null(), 0) }, MotzkinStatus::Ok);
}

#[test]
fn sampler_handle_draws_valid_reproducible_paths() {
    for mode in [MotzkinSamplerMode::CycleLemma, MotzkinSamplerMode::DpExact, MotzkinSamplerMode::DpLogspace] {
        let draw = |seed| {
            let mut h: *mut MotzkinSampler = ptr::null_mut();
            assert_eq!(unsafe { motzkin_sampler_new(30, mode as u32, seed, &mut h) }, MotzkinStatus::Ok);
            assert_eq!(unsafe { motzkin_sampler_length(h) }, 30);
            let mut paths = Vec::new();
            for _ in 0..5 {
                let mut buf = [9i8; 30];
                assert_eq!(unsafe { motzkin_sampler_sample(h, buf.as_mut_ptr(), 30) }, MotzkinStatus::Ok);
                assert_eq!(unsafe { motzkin_path_validate(buf.as_ptr(), 30) }, MotzkinStatus::Ok);
                paths.push(buf);
            }
            let mut small = [0i8; 29];
            let status = unsafe { motzkin_sampler_sample(h, small.as_mut_ptr(), 29) };
            assert_eq!(status, MotzkinStatus::BufferTooSmall);
            unsafe { motzkin_sampler_free(h) };
            paths
        };
        assert_eq!(draw(5), draw(5));
        assert_ne!(draw(5), draw(6));
    }
}

#[test]
fn unknown_sampler_mode_is_a_domain_error() {
    let mut h: *mut MotzkinSampler = ptr::null_mut();
    assert_eq!(unsafe { motzkin_sampler_new(4, 7, 0, &mut h) }, MotzkinStatus::Domain);
    assert!(h.is_null());
}

#[test]
fn analytic_entry_points_match_closed_forms() {
    let mut v = 0.0;
    assert_eq!(unsafe { motzkin_fbm_density(1.0, 0.0, &mut v) }, MotzkinStatus::Ok);
    assert!((v - 1.0 / std::f64::consts::PI).abs() < 1e-14);

    assert_eq!(unsafe { motzkin_stieltjes(2.5, &mut v) }, MotzkinStatus::Ok);
    assert!((v - 0.5).abs() < 1e-14);
    assert_eq!(unsafe { motzkin_stieltjes(1.0, &mut v) }, MotzkinStatus::Domain);

    assert_eq!(unsafe { motzkin_sulanke(6, 1.0, &mut v) }, MotzkinStatus::Ok);
    assert!((v - 51.0).abs() < 1e-9);

    let u = [1.0; 5];
    assert_eq!(unsafe { motzkin_level_pgf(u.as_ptr(), 5, &mut v) }, MotzkinStatus::Ok);
    assert!((v - 21.0).abs() < 1e-9);

    assert_eq!(unsafe { motzkin_fbm_transition(0.5, 0.1, 1.0, 0.2, &mut v) }, MotzkinStatus::Ok);
    assert!(v > 0.0);
    assert_eq!(unsafe { motzkin_fbm_transition(1.0, 0.1, 0.5, 0.2, &mut v) }, MotzkinStatus::Domain);
}

#[test]
fn laplace_entry_points() {
    let times = [0.5];
    let z = [0.2, 0.5];
    let w = [0.0, 0.0];
    let mut limit = 0.0;
    assert_eq!(unsafe { motzkin_limit_laplace(times.as_ptr(), 1, z.as_ptr(), w.as_ptr(), &mut limit) }, MotzkinStatus::Ok);
    let mut finite = 0.0;
    assert_eq!(
        unsafe { motzkin_laplace_joint(400, times.as_ptr(), 1, z.as_ptr(), w.as_ptr(), &mut finite) },
        MotzkinStatus::Ok
    );
    assert!((finite - limit).abs() < 0.05, "{finite} vs {limit}");

    let zero = [0.0, 0.0];
    let mut v = 0.0;
    for centered in [0, 1] {
        assert_eq!(
            unsafe { motzkin_laplace_level(50, times.as_ptr(), 1, zero.as_ptr(), centered, &mut v) },
            MotzkinStatus::Ok
        );
        assert!((v - 1.0).abs() < 1e-10, "{v}");
    }

    let bad_times = [0.7, 0.3];
    let status = unsafe { motzkin_laplace_level(50, bad_times.as_ptr(), 2, [0.0; 3].as_ptr(), 0, &mut v) };
    assert_eq!(status, MotzkinStatus::Domain);
}

#[test]
fn excursion_density_at_midpoint() {
    let times = [0.5];
    let x = [1.0];
    let mut v = 0.0;
    assert_eq!(unsafe { motzkin_excursion_density(times.as_ptr(), x.as_ptr(), 1, &mut v) }, MotzkinStatus::Ok);
    // Maxwell density with variance 1/4 at x = 1.
    let s2: f64 = 0.25;
    let expected = (2.0 / std::f64::consts::PI).sqrt() * (-0.5 / s2).exp() / (s2 * s2.sqrt());
    assert!((v - expected).abs() < 1e-12, "{v} vs {expected}");
}

#[test]
fn last_error_copy_truncates() {
    let mut v = 0.0;
    unsafe { motzkin_stieltjes(0.0, &mut v) };
    let full = last_error();
    let mut buf = [1 as c_char; 8];
    let len = unsafe { motzkin_last_error_copy(buf.as_mut_ptr(), buf.len()) };
    assert_eq!(len, full.len());
    let copied = unsafe { CStr::from_ptr(buf.as_ptr()) }.to_str().unwrap();
    assert_eq!(copied, &full[..7]);
}

#[test]
fn version_is_package_version() {
    let v = unsafe { CStr::from_ptr(motzkin_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

fn header() -> String {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/motzkin.h");
    std::fs::read_to_string(path).expect("generated header")
}

#[test]
fn header_declares_every_entry_point() {
    let h = header();
    for name in [
        "motzkin_version",
        "motzkin_last_error",
        "motzkin_last_error_copy",
        "motzkin_string_free",
        "motzkin_count",
        "motzkin_count_ln",
        "motzkin_path_validate",
        "motzkin_sampler_new",
        "motzkin_sampler_length",
        "motzkin_sampler_sample",
        "motzkin_sampler_free",
        "motzkin_fbm_density",
        "motzkin_fbm_transition",
        "motzkin_excursion_density",
        "motzkin_limit_laplace",
        "motzkin_laplace_joint",
        "motzkin_laplace_level",
        "motzkin_sulanke",
        "motzkin_level_pgf",
        "motzkin_stieltjes",
    ] {
        assert!(h.contains(&format!("{name}(")), "{name} missing from header");
    }
    assert!(h.contains("typedef struct MotzkinSampler MotzkinSampler;"));
    assert!(h.contains("MOTZKIN_STATUS_OK = 0"));
    assert!(h.contains("MOTZKIN_SAMPLER_MODE_DP_LOGSPACE = 2"));
}

fn target_profile_dir() -> PathBuf {
    // tests run from <target>/<profile>/deps
    let exe = std::env::current_exe().unwrap();
    exe.parent().unwrap().parent().unwrap().to_path_buf()
}

const C_SMOKE: &str = r#"
#include <stdio.h>
#include <string.h>
#include "motzkin.h"

int main(void) {
    char *s = NULL;
    if (motzkin_count(10, &s) != MOTZKIN_STATUS_OK || strcmp(s, "2188") != 0) return 1;
    motzkin_string_free(s);

    MotzkinSampler *h = NULL;
    if (motzkin_sampler_new(20, MOTZKIN_SAMPLER_MODE_CYCLE_LEMMA, 1, &h) != MOTZKIN_STATUS_OK) return 2;
    int8_t buf[20];
    if (motzkin_sampler_sample(h, buf, 20) != MOTZKIN_STATUS_OK) return 3;
    if (motzkin_path_validate(buf, 20) != MOTZKIN_STATUS_OK) return 4;
    motzkin_sampler_free(h);

    double v;
    if (motzkin_stieltjes(1.0, &v) != MOTZKIN_STATUS_DOMAIN) return 5;
    if (motzkin_last_error() == NULL) return 6;
    printf("ok %s\n", motzkin_version());
    return 0;
}
"#;

#[test]
fn c_program_links_against_static_library() {
    let lib_dir = target_profile_dir();
    let lib = lib_dir.join("libmotzkin_ffi.a");
    assert!(lib.exists(), "static library not found at {}", lib.display());
    let work = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("c_smoke");
    std::fs::create_dir_all(&work).unwrap();
    let src = work.join("smoke.c");
    std::fs::write(&src, C_SMOKE).unwrap();
    let exe = work.join("smoke");
    let include = Path::new(env!("CARGO_MANIFEST_DIR")).join("include");
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    let out = Command::new(&cc)
        .arg("-std=c99")
        .arg("-Wall")
        .arg("-Werror")
        .arg("-I")
        .arg(&include)
        .arg(&src)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm"])
        .arg("-o")
        .arg(&exe)
        .output()
        .expect("run C compiler");
    assert!(out.status.success(), "cc failed: {}", String::from_utf8_lossy(&out.stderr));
    let run = Command::new(&exe).output().unwrap();
    assert!(run.status.success(), "smoke exited with {:?}", run.status);
    assert!(String::from_utf8_lossy(&run.stdout).starts_with("ok "));
}
