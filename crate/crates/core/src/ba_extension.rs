//! Beurling-Ahlfors extension of a lift to the closed upper half-plane.
//!
//! For `0 < y < 1` the extension averages the lift over `[x - y, x + y]`:
//!
//! ```text
//! H(x+iy) = ½∫₀¹ (h(x+ty) + h(x-ty)) dt + i ∫₀¹ (h(x+ty) - h(x-ty)) dt
//! ```
//!
//! It is glued to `z + (2 - y) C₀` on `1 ≤ y ≤ 2` and to the identity above,
//! where `C₀ = ∫₀¹ h - ½`. After the substitution `u = x ± ty` both
//! integrals become integrals of `h` over `[x - y, x]` and `[x, x + y]`; those
//! are split at the lift's breakpoints and integrated with Gauss-Legendre.

use num_complex::Complex64;

use crate::circle_homeo::{Breakpoint, CircleHomeo};
use crate::error::{Error, Result};
use crate::quadrature::GaussLegendre;

/// Smallest `Im z` accepted by distortion queries.
pub const NEAR_BOUNDARY_FLOOR: f64 = 1e-6;

pub const DEFAULT_QUAD_ORDER: usize = 64;

/// Row-major 2×2 real matrix `[[∂U/∂x, ∂U/∂y], [∂V/∂x, ∂V/∂y]]`.
pub type Mat2 = [[f64; 2]; 2];

/// Evaluable Beurling-Ahlfors extension `H` of a lift.
#[derive(Debug, Clone)]
pub struct StripMap {
    lift: CircleHomeo,
    c0: f64,
    rule: GaussLegendre,
    breakpoints: Vec<Breakpoint>,
}

impl StripMap {
    /// Build the extension with a Gauss-Legendre rule of `quad_order` nodes.
    pub fn new(lift: CircleHomeo, quad_order: usize) -> Result<Self> {
        if quad_order < 16 {
            return Err(Error::InvalidParameter(format!("quad_order must be >= 16, got {quad_order}")));
        }
        let rule = GaussLegendre::new(quad_order);
        let breakpoints = lift.breakpoints();
        let mut map = Self { lift, c0: 0.0, rule, breakpoints };
        map.c0 = map.integral(0.0, 1.0, 0.0) - 0.5;
        Ok(map)
    }

    pub fn lift(&self) -> &CircleHomeo {
        &self.lift
    }

    /// `C₀ = ∫₀¹ h(t) dt - ½`.
    pub fn c0(&self) -> f64 {
        self.c0
    }

    pub fn quad_order(&self) -> usize {
        self.rule.order()
    }

    /// `∫_a^b (h(u) - shift) du`, split at breakpoints.
    fn integral(&self, a: f64, b: f64, shift: f64) -> f64 {
        let mut cuts: Vec<(f64, bool)> = vec![(a, false)];
        if !self.breakpoints.is_empty() {
            let k0 = a.floor() as i64 - 1;
            let k1 = b.ceil() as i64 + 1;
            for k in k0..=k1 {
                for bp in &self.breakpoints {
                    let x = k as f64 + bp.x;
                    if x > a && x < b {
                        cuts.push((x, bp.singular));
                    } else if x == a && bp.singular {
                        cuts[0].1 = true;
                    }
                }
            }
        }
        let end_singular = self.is_singular_point(b);
        cuts.push((b, end_singular));
        cuts.sort_by(|p, q| p.0.total_cmp(&q.0));

        let f = |u: f64| self.lift.lift(u) - shift;
        let mut acc = 0.0;
        for w in cuts.windows(2) {
            let ((p, sp), (q, sq)) = (w[0], w[1]);
            if q <= p {
                continue;
            }
            acc += match (sp, sq) {
                (false, false) => self.rule.integrate(p, q, f),
                (true, false) => self.rule.integrate_graded_left(p, q, f),
                (false, true) => self.rule.integrate_graded_right(p, q, f),
                (true, true) => {
                    let m = 0.5 * (p + q);
                    self.rule.integrate_graded_left(p, m, f) + self.rule.integrate_graded_right(m, q, f)
                }
            };
        }
        acc
    }

    fn is_singular_point(&self, x: f64) -> bool {
        let r = x - x.floor();
        self.breakpoints.iter().any(|bp| bp.singular && bp.x == r)
    }

    /// Signed half-window integrals `(∫_x^{x+y}(h - h(x)), ∫_{x-y}^x (h - h(x)))`.
    fn half_windows(&self, x: f64, y: f64, h0: f64) -> (f64, f64) {
        (self.integral(x, x + y, h0), self.integral(x - y, x, h0))
    }

    /// Evaluate `H(z)` for `Im z ≥ 0`.
    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        let (x, y) = (z.re, z.im);
        if !(y >= 0.0) || !x.is_finite() {
            return Err(Error::InvalidParameter(format!("H is defined on Im z >= 0, got {z}")));
        }
        if y == 0.0 {
            return Ok(Complex64::new(self.lift.lift(x), 0.0));
        }
        if y >= 2.0 {
            return Ok(z);
        }
        if y >= 1.0 {
            return Ok(Complex64::new(x + (2.0 - y) * self.c0, y));
        }
        let h0 = self.lift.lift(x);
        let (ap, am) = self.half_windows(x, y, h0);
        Ok(Complex64::new(h0 + (ap + am) / (2.0 * y), (ap - am) / y))
    }

    /// Finite-difference differential of `H` (central, 4-point) with the
    /// given step. Inside the closed-form layers the exact matrix is returned.
    pub fn differential(&self, z: Complex64, step: f64) -> Result<Mat2> {
        let y = z.im;
        if !(y > 0.0) {
            return Err(Error::InvalidParameter(format!("differential needs Im z > 0, got {z}")));
        }
        if !(step > 0.0) || step > y / 10.0 {
            return Err(Error::StepMargin { step, im: y });
        }
        if let Some(m) = self.closed_form_differential(y, 2.0 * step) {
            return Ok(m);
        }
        let d = |dir: Complex64| -> Result<Complex64> {
            let f = |s: f64| self.eval(z + dir * s);
            let (p1, m1, p2, m2) = (f(step)?, f(-step)?, f(2.0 * step)?, f(-2.0 * step)?);
            Ok((8.0 * (p1 - m1) - (p2 - m2)) / (12.0 * step))
        };
        let dx = d(Complex64::new(1.0, 0.0))?;
        let dy = d(Complex64::new(0.0, 1.0))?;
        Ok([[dx.re, dy.re], [dx.im, dy.im]])
    }

    /// Default step `1e-5 · max(1, Im z)`, shrunk to respect the half-plane margin.
    pub fn default_step(z: Complex64) -> f64 {
        (1e-5 * z.im.max(1.0)).min(z.im / 10.0)
    }

    /// Exact differential of `H` from the half-window integrals.
    pub fn differential_exact(&self, z: Complex64) -> Result<Mat2> {
        let (x, y) = (z.re, z.im);
        if !(y > 0.0) {
            return Err(Error::InvalidParameter(format!("differential needs Im z > 0, got {z}")));
        }
        if let Some(m) = self.closed_form_differential(y, 0.0) {
            return Ok(m);
        }
        let h0 = self.lift.lift(x);
        let hp = self.lift.increment(x, y);
        let hm = self.lift.increment(x, -y);
        let (ap, am) = self.half_windows(x, y, h0);
        let ux = (hp - hm) / (2.0 * y);
        let uy = (hp + hm) / (2.0 * y) - (ap + am) / (2.0 * y * y);
        let vx = (hp + hm) / y;
        let vy = (hp - hm) / y - (ap - am) / (y * y);
        Ok([[ux, uy], [vx, vy]])
    }

    fn closed_form_differential(&self, y: f64, margin: f64) -> Option<Mat2> {
        if y - margin >= 2.0 {
            Some([[1.0, 0.0], [0.0, 1.0]])
        } else if y - margin >= 1.0 && y + margin <= 2.0 {
            Some([[1.0, -self.c0], [0.0, 1.0]])
        } else {
            None
        }
    }

    /// Pointwise distortion `K_H(z) = ‖DH‖² / J_H`.
    pub fn distortion_at(&self, z: Complex64) -> Result<f64> {
        let y = z.im;
        if y < NEAR_BOUNDARY_FLOOR {
            return Err(Error::BelowFloor(y));
        }
        if y >= 2.0 {
            return Ok(1.0);
        }
        let m = self.differential_exact(z)?;
        distortion_of(&m).map_err(|e| match e {
            Error::OrientationViolation { jacobian, .. } => {
                Error::OrientationViolation { re: z.re, im: z.im, jacobian }
            }
            e => e,
        })
    }

    /// Distortion from the finite-difference differential.
    pub fn distortion_fd(&self, z: Complex64, step: f64) -> Result<f64> {
        if z.im < NEAR_BOUNDARY_FLOOR {
            return Err(Error::BelowFloor(z.im));
        }
        distortion_of(&self.differential(z, step)?)
    }
}

/// `ba_extend`: build the strip map of a lift.
pub fn ba_extend(h: &CircleHomeo, quad_order: usize) -> Result<StripMap> {
    StripMap::new(h.clone(), quad_order)
}

/// Largest singular value of a 2×2 matrix.
pub fn operator_norm(m: &Mat2) -> f64 {
    let s = m[0][0].powi(2) + m[0][1].powi(2) + m[1][0].powi(2) + m[1][1].powi(2);
    let j = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    (0.5 * (s + ((s - 2.0 * j.abs()) * (s + 2.0 * j.abs())).max(0.0).sqrt())).sqrt()
}

/// `‖D‖² / det D`; errors on non-positive Jacobian.
pub fn distortion_of(m: &Mat2) -> Result<f64> {
    let s = m[0][0].powi(2) + m[0][1].powi(2) + m[1][0].powi(2) + m[1][1].powi(2);
    let j = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    if !(j > 0.0) {
        return Err(Error::OrientationViolation { re: f64::NAN, im: f64::NAN, jacobian: j });
    }
    // |f_z| and |f_z̄| avoid the cancellation in S² - 4J² near conformality
    let a = 0.5 * (m[0][0] + m[1][1]).hypot(m[1][0] - m[0][1]);
    let b = 0.5 * (m[0][0] - m[1][1]).hypot(m[1][0] + m[0][1]);
    let k = if b <= 0.5 * a { (a + b) / (a - b) } else { (s + ((s - 2.0 * j) * (s + 2.0 * j)).max(0.0).sqrt()) / (2.0 * j) };
    Ok(k.max(1.0))
}
