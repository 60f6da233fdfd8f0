//! C ABI over `welding-core`.
//!
//! Objects are opaque heap handles created by `*_new`-style constructors and
//! released with the matching `*_free`. Every fallible call returns a
//! [`WeldingStatus`]; on failure the message is kept per thread and can be
//! copied out with [`welding_last_error`].

use std::cell::RefCell;
use std::ffi::c_char;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use num_complex::Complex64;
use welding_core::circle_homeo::CircleHomeo;
use welding_core::control::{decade_grid_ln, thm51_condition_ln, ControlFunction, LimsupVerdict};
use welding_core::geometry::{make_domain, three_point_envelope, DomainFamily, FitFamily, JordanCurve};
use welding_core::modulus::{ring_modulus, RingProblem};
use welding_core::welding::PlaneMapField;
use welding_core::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeldingStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidParameter = 2,
    /// Query outside the domain of a map or control function.
    Domain = 3,
    /// Injectivity or orientation failure.
    NotHomeomorphic = 4,
    Geometry = 5,
    Numerical = 6,
    Io = 7,
    Panic = 8,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeldingDomain {
    Disk = 0,
    Square = 1,
    InteriorCusp = 2,
    ExteriorCusp = 3,
}

pub struct WeldingHomeo(CircleHomeo);
pub struct WeldingField(PlaneMapField);
pub struct WeldingControl(ControlFunction);
pub struct WeldingCurve(JordanCurve);

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn status_of(e: &Error) -> WeldingStatus {
    match e {
        Error::InvalidParameter(_) | Error::ScaleOutOfRange(_) | Error::StepMargin { .. } | Error::Config(_) => {
            WeldingStatus::InvalidParameter
        }
        Error::BelowFloor(_) | Error::BranchCut(_) | Error::OutOfRange { .. } => WeldingStatus::Domain,
        Error::NotInjective { .. } | Error::OrientationViolation { .. } => WeldingStatus::NotHomeomorphic,
        Error::SelfIntersection(..) | Error::Degenerate(_) | Error::Disconnected | Error::Unresolved(_) => {
            WeldingStatus::Geometry
        }
        Error::NoConvergence { .. } | Error::Unsatisfiable => WeldingStatus::Numerical,
        Error::Io(_) => WeldingStatus::Io,
    }
}

fn guard<F: FnOnce() -> Result<(), WeldingStatus>>(f: F) -> WeldingStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => WeldingStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("internal panic".into());
            WeldingStatus::Panic
        }
    }
}

fn check<T>(r: welding_core::Result<T>) -> Result<T, WeldingStatus> {
    r.map_err(|e| {
        set_error(e.to_string());
        status_of(&e)
    })
}

fn nonnull<T>(p: *const T) -> Result<(), WeldingStatus> {
    if p.is_null() {
        set_error("null pointer argument".into());
        Err(WeldingStatus::NullPointer)
    } else {
        Ok(())
    }
}

unsafe fn put<T>(out: *mut *mut T, value: T) -> Result<(), WeldingStatus> {
    nonnull(out)?;
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

/// Copies the calling thread's last error message into `buf` (NUL-terminated,
/// truncated to `len`). Returns the full message length in bytes.
///
/// # Safety
/// `buf` must be null or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn welding_last_error(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            ptr::copy_nonoverlapping(msg.as_ptr() as *const c_char, buf, n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}

/// Releases a handle; null is ignored.
///
/// # Safety
/// `h` must be null or a live handle from this library, freed once.
#[no_mangle]
pub unsafe extern "C" fn welding_homeo_free(h: *mut WeldingHomeo) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// Releases a handle; null is ignored.
///
/// # Safety
/// `h` must be null or a live handle from this library, freed once.
#[no_mangle]
pub unsafe extern "C" fn welding_field_free(h: *mut WeldingField) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// Releases a handle; null is ignored.
///
/// # Safety
/// `h` must be null or a live handle from this library, freed once.
#[no_mangle]
pub unsafe extern "C" fn welding_control_free(h: *mut WeldingControl) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// Releases a handle; null is ignored.
///
/// # Safety
/// `h` must be null or a live handle from this library, freed once.
#[no_mangle]
pub unsafe extern "C" fn welding_curve_free(h: *mut WeldingCurve) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// # Safety
/// `out` must be a valid pointer to a handle slot.
#[no_mangle]
pub unsafe extern "C" fn welding_homeo_identity(out: *mut *mut WeldingHomeo) -> WeldingStatus {
    guard(|| put(out, WeldingHomeo(CircleHomeo::identity())))
}

/// # Safety
/// `out` must be a valid pointer to a handle slot.
#[no_mangle]
pub unsafe extern "C" fn welding_homeo_rotation(c: f64, out: *mut *mut WeldingHomeo) -> WeldingStatus {
    guard(|| put(out, WeldingHomeo(check(CircleHomeo::rotation(c))?)))
}

/// # Safety
/// `out` must be a valid pointer to a handle slot.
#[no_mangle]
pub unsafe extern "C" fn welding_homeo_power(a: f64, out: *mut *mut WeldingHomeo) -> WeldingStatus {
    guard(|| put(out, WeldingHomeo(check(CircleHomeo::power(a))?)))
}

/// # Safety
/// `out` must be a valid pointer to a handle slot.
#[no_mangle]
pub unsafe extern "C" fn welding_homeo_log_power(beta: f64, out: *mut *mut WeldingHomeo) -> WeldingStatus {
    guard(|| put(out, WeldingHomeo(check(CircleHomeo::log_power(beta))?)))
}

/// Lift values at `i / (n - 1)`, `i = 0..n`.
///
/// # Safety
/// `values` must point to `n` readable doubles; `out` to a handle slot.
#[no_mangle]
pub unsafe extern "C" fn welding_homeo_from_table(values: *const f64, n: usize, out: *mut *mut WeldingHomeo) -> WeldingStatus {
    guard(|| {
        nonnull(values)?;
        let v = std::slice::from_raw_parts(values, n).to_vec();
        put(out, WeldingHomeo(check(CircleHomeo::from_table(v))?))
    })
}

/// # Safety
/// `h` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn welding_homeo_lift(h: *const WeldingHomeo, x: f64, out: *mut f64) -> WeldingStatus {
    guard(|| {
        nonnull(h)?;
        nonnull(out)?;
        *out = (*h).0.lift(x);
        Ok(())
    })
}

/// Extension of the welding to the plane.
///
/// # Safety
/// `h` must be a live handle; `out` a handle slot.
#[no_mangle]
pub unsafe extern "C" fn welding_field_new(h: *const WeldingHomeo, out: *mut *mut WeldingField) -> WeldingStatus {
    guard(|| {
        nonnull(h)?;
        put(out, WeldingField(check(PlaneMapField::new(&(*h).0))?))
    })
}

/// # Safety
/// `f` must be a live handle; `out_re`, `out_im` writable.
#[no_mangle]
pub unsafe extern "C" fn welding_field_eval(
    f: *const WeldingField,
    re: f64,
    im: f64,
    out_re: *mut f64,
    out_im: *mut f64,
) -> WeldingStatus {
    guard(|| {
        nonnull(f)?;
        nonnull(out_re)?;
        nonnull(out_im)?;
        let w = check((*f).0.eval(Complex64::new(re, im)))?;
        *out_re = w.re;
        *out_im = w.im;
        Ok(())
    })
}

/// # Safety
/// `f` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn welding_field_distortion(f: *const WeldingField, re: f64, im: f64, out: *mut f64) -> WeldingStatus {
    guard(|| {
        nonnull(f)?;
        nonnull(out)?;
        *out = check((*f).0.distortion(Complex64::new(re, im)))?;
        Ok(())
    })
}

/// Largest distortion on the circle `|z| = r` and its argument.
///
/// # Safety
/// `f` must be a live handle; `out_k`, `out_theta` writable.
#[no_mangle]
pub unsafe extern "C" fn welding_field_shell_max(
    f: *const WeldingField,
    r: f64,
    theta_samples: usize,
    out_k: *mut f64,
    out_theta: *mut f64,
) -> WeldingStatus {
    guard(|| {
        nonnull(f)?;
        nonnull(out_k)?;
        nonnull(out_theta)?;
        let (k, t) = check((*f).0.shell_max(r, theta_samples))?;
        *out_k = k;
        *out_theta = t;
        Ok(())
    })
}

/// # Safety
/// `out` must be a handle slot.
#[no_mangle]
pub unsafe extern "C" fn welding_control_linear(c: f64, out: *mut *mut WeldingControl) -> WeldingStatus {
    guard(|| put(out, WeldingControl(check(ControlFunction::linear(c))?)))
}

/// `t^s`.
///
/// # Safety
/// `out` must be a handle slot.
#[no_mangle]
pub unsafe extern "C" fn welding_control_power(s: f64, out: *mut *mut WeldingControl) -> WeldingStatus {
    guard(|| put(out, WeldingControl(check(ControlFunction::power(s))?)))
}

/// `c t log^β(1/t)`.
///
/// # Safety
/// `out` must be a handle slot.
#[no_mangle]
pub unsafe extern "C" fn welding_control_log_power(c: f64, beta: f64, out: *mut *mut WeldingControl) -> WeldingStatus {
    guard(|| put(out, WeldingControl(check(ControlFunction::log_power(c, beta))?)))
}

/// # Safety
/// `p` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn welding_control_eval(p: *const WeldingControl, t: f64, out: *mut f64) -> WeldingStatus {
    guard(|| {
        nonnull(p)?;
        nonnull(out)?;
        *out = check((*p).0.eval(t))?;
        Ok(())
    })
}

/// # Safety
/// `p` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn welding_control_inverse(p: *const WeldingControl, r: f64, out: *mut f64) -> WeldingStatus {
    guard(|| {
        nonnull(p)?;
        nonnull(out)?;
        *out = check((*p).0.inverse_eval(r))?;
        Ok(())
    })
}

/// Generalized-quasidisk condition on `r = 10^{-1} … 10^{-decades}`;
/// `out_bounded` is 1 for a bounded verdict.
///
/// # Safety
/// `p` must be a live handle; outputs writable.
#[no_mangle]
pub unsafe extern "C" fn welding_control_thm51(
    p: *const WeldingControl,
    decades: u32,
    t0: f64,
    out_bounded: *mut i32,
    out_log_exponent: *mut f64,
) -> WeldingStatus {
    guard(|| {
        nonnull(p)?;
        nonnull(out_bounded)?;
        nonnull(out_log_exponent)?;
        let rep = check(thm51_condition_ln(&(*p).0, &decade_grid_ln(1, decades), t0))?;
        *out_bounded = (rep.verdict == LimsupVerdict::Bounded) as i32;
        *out_log_exponent = rep.log_exponent;
        Ok(())
    })
}

/// Closed polyline from `n` interleaved `x, y` pairs.
///
/// # Safety
/// `xy` must point to `2n` readable doubles; `out` a handle slot.
#[no_mangle]
pub unsafe extern "C" fn welding_curve_new(xy: *const f64, n: usize, out: *mut *mut WeldingCurve) -> WeldingStatus {
    guard(|| {
        nonnull(xy)?;
        let v = std::slice::from_raw_parts(xy, 2 * n);
        let pts = v.chunks_exact(2).map(|c| [c[0], c[1]]).collect();
        put(out, WeldingCurve(check(JordanCurve::new(pts))?))
    })
}

/// Zoo domain (a `WeldingDomain` value) with `n` vertices; `s` is the cusp exponent (ignored otherwise).
///
/// # Safety
/// `out` must be a handle slot.
#[no_mangle]
pub unsafe extern "C" fn welding_curve_domain(kind: u32, s: f64, n: usize, out: *mut *mut WeldingCurve) -> WeldingStatus {
    guard(|| {
        let family = match kind {
            k if k == WeldingDomain::Disk as u32 => DomainFamily::Disk,
            k if k == WeldingDomain::Square as u32 => DomainFamily::Square,
            k if k == WeldingDomain::InteriorCusp as u32 => DomainFamily::InteriorCusp { s },
            k if k == WeldingDomain::ExteriorCusp as u32 => DomainFamily::ExteriorCusp { s },
            k => {
                set_error(format!("unknown domain kind {k}"));
                return Err(WeldingStatus::InvalidParameter);
            }
        };
        put(out, WeldingCurve(check(make_domain(family, n))?))
    })
}

/// # Safety
/// `c` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn welding_curve_diameter(c: *const WeldingCurve, out: *mut f64) -> WeldingStatus {
    guard(|| {
        nonnull(c)?;
        nonnull(out)?;
        *out = (*c).0.diameter();
        Ok(())
    })
}

/// Fitted three-point envelope: `out_exponent` is 1 for a linear fit, `s`
/// for a power fit and `NAN` for log-power; `out_max_ratio` is `max m/d`.
///
/// # Safety
/// `c` must be a live handle; outputs writable.
#[no_mangle]
pub unsafe extern "C" fn welding_curve_envelope(
    c: *const WeldingCurve,
    pair_samples: usize,
    seed: u64,
    out_exponent: *mut f64,
    out_max_ratio: *mut f64,
) -> WeldingStatus {
    guard(|| {
        nonnull(c)?;
        nonnull(out_exponent)?;
        nonnull(out_max_ratio)?;
        let env = check(three_point_envelope(&(*c).0, pair_samples, seed))?;
        let fit = env.fits.iter().find(|f| f.family == env.family);
        *out_exponent = match env.family {
            FitFamily::Linear => 1.0,
            FitFamily::Power => fit.and_then(|f| f.exponent).unwrap_or(f64::NAN),
            FitFamily::LogPower => f64::NAN,
        };
        *out_max_ratio = env.max_ratio;
        Ok(())
    })
}

/// Moduli of the region between `inner` and `outer`: connecting and
/// separating families.
///
/// # Safety
/// Handles must be live; outputs writable.
#[no_mangle]
pub unsafe extern "C" fn welding_ring_modulus(
    inner: *const WeldingCurve,
    outer: *const WeldingCurve,
    grid: usize,
    out_connecting: *mut f64,
    out_separating: *mut f64,
) -> WeldingStatus {
    guard(|| {
        nonnull(inner)?;
        nonnull(outer)?;
        nonnull(out_connecting)?;
        nonnull(out_separating)?;
        let p = check(RingProblem::new((*inner).0.clone(), (*outer).0.clone(), grid))?;
        let m = check(ring_modulus(&p))?;
        *out_connecting = m.modulus_connecting;
        *out_separating = m.modulus_separating;
        Ok(())
    })
}
