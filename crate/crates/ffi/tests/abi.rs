use std::ffi::CStr;
use std::ptr;

use welding_ffi::*;

fn last_error() -> String {
    let mut buf = [0 as std::ffi::c_char; 256];
    unsafe {
        welding_last_error(buf.as_mut_ptr(), buf.len());
        CStr::from_ptr(buf.as_ptr()).to_string_lossy().into_owned()
    }
}

#[test]
fn identity_field_round_trip() {
    unsafe {
        let mut h = ptr::null_mut();
        assert_eq!(welding_homeo_identity(&mut h), WeldingStatus::Ok);
        let mut f = ptr::null_mut();
        assert_eq!(welding_field_new(h, &mut f), WeldingStatus::Ok);
        let (mut re, mut im, mut k) = (0.0, 0.0, 0.0);
        assert_eq!(welding_field_eval(f, 0.3, -1.7, &mut re, &mut im), WeldingStatus::Ok);
        assert!((re - 0.3).abs() < 1e-12 && (im + 1.7).abs() < 1e-12);
        assert_eq!(welding_field_distortion(f, 0.3, -1.7, &mut k), WeldingStatus::Ok);
        assert!((k - 1.0).abs() < 1e-9);
        welding_field_free(f);
        welding_homeo_free(h);
    }
}

#[test]
fn power_lift_shell_max_grows() {
    unsafe {
        let mut h = ptr::null_mut();
        assert_eq!(welding_homeo_power(2.0, &mut h), WeldingStatus::Ok);
        let mut x = 0.0;
        welding_homeo_lift(h, 1.25, &mut x);
        assert!((x - 1.125).abs() < 1e-15);
        let mut f = ptr::null_mut();
        welding_field_new(h, &mut f);
        let (mut k1, mut k2, mut t) = (0.0, 0.0, 0.0);
        assert_eq!(welding_field_shell_max(f, 1.125, 256, &mut k1, &mut t), WeldingStatus::Ok);
        assert_eq!(welding_field_shell_max(f, 1.0625, 256, &mut k2, &mut t), WeldingStatus::Ok);
        assert!(k2 > 1.5 * k1);
        welding_field_free(f);
        welding_homeo_free(h);
    }
}

#[test]
fn errors_set_status_and_message() {
    unsafe {
        let mut h = ptr::null_mut();
        assert_eq!(welding_homeo_power(-1.0, &mut h), WeldingStatus::InvalidParameter);
        assert!(h.is_null());
        assert!(last_error().contains("invalid parameter"));
        assert_eq!(welding_homeo_identity(ptr::null_mut()), WeldingStatus::NullPointer);

        let mut p = ptr::null_mut();
        welding_control_linear(1.0, &mut p);
        let mut v = 0.0;
        assert_eq!(welding_control_eval(p, -1.0, &mut v), WeldingStatus::Domain);
        welding_control_free(p);

        let bowtie = [0.0, 0.0, 1.0, 1.0, 1.0, 0.0, 0.0, 1.0];
        let mut c = ptr::null_mut();
        assert_eq!(welding_curve_new(bowtie.as_ptr(), 4, &mut c), WeldingStatus::Geometry);
        assert_eq!(welding_curve_domain(99, 0.5, 256, &mut c), WeldingStatus::InvalidParameter);
        welding_curve_free(ptr::null_mut());
    }
}

#[test]
fn control_classification() {
    unsafe {
        let (mut bounded, mut gamma) = (0, 0.0);
        for (beta, want) in [(0.5, 1), (1.1, 0)] {
            let mut p = ptr::null_mut();
            assert_eq!(welding_control_log_power(1.0, beta, &mut p), WeldingStatus::Ok);
            assert_eq!(welding_control_thm51(p, 300, 0.1, &mut bounded, &mut gamma), WeldingStatus::Ok);
            assert_eq!(bounded, want, "beta {beta}: exponent {gamma}");
            welding_control_free(p);
        }
        let mut p = ptr::null_mut();
        welding_control_power(0.5, &mut p);
        let (mut v, mut back) = (0.0, 0.0);
        welding_control_eval(p, 0.04, &mut v);
        welding_control_inverse(p, v, &mut back);
        assert!((v - 0.2).abs() < 1e-15 && (back - 0.04).abs() < 1e-14);
        welding_control_free(p);
    }
}

#[test]
fn curves_and_moduli() {
    unsafe {
        let mut disk = ptr::null_mut();
        assert_eq!(welding_curve_domain(WeldingDomain::Disk as u32, 0.0, 512, &mut disk), WeldingStatus::Ok);
        let (mut d, mut e, mut ratio) = (0.0, 0.0, 0.0);
        welding_curve_diameter(disk, &mut d);
        assert!((d - 2.0).abs() < 1e-12);
        assert_eq!(welding_curve_envelope(disk, 2000, 42, &mut e, &mut ratio), WeldingStatus::Ok);
        assert_eq!(e, 1.0);
        assert!((ratio - 1.0).abs() < 0.02);

        let ring = |r: f64| -> Vec<f64> {
            (0..256).flat_map(|k| {
                let t = std::f64::consts::TAU * k as f64 / 256.0;
                [r * t.cos(), r * t.sin()]
            }).collect()
        };
        let (a, b) = (ring(1.0), ring(2.0));
        let (mut inner, mut outer) = (ptr::null_mut(), ptr::null_mut());
        welding_curve_new(a.as_ptr(), 256, &mut inner);
        welding_curve_new(b.as_ptr(), 256, &mut outer);
        let (mut conn, mut sep) = (0.0, 0.0);
        assert_eq!(welding_ring_modulus(inner, outer, 128, &mut conn, &mut sep), WeldingStatus::Ok);
        assert!((conn * sep - 1.0).abs() < 0.03);
        assert_eq!(welding_ring_modulus(outer, inner, 128, &mut conn, &mut sep), WeldingStatus::InvalidParameter);
        for c in [disk, inner, outer] {
            welding_curve_free(c);
        }
    }
}
