//! A small zoo of test domains.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use super::curve::{JordanCurve, Point};
use crate::error::{Error, Result};

/// Flank half-width coefficient: flanks are `y = ±CUSP_WIDTH · x^{1/s}`.
pub const CUSP_WIDTH: f64 = 0.3;
/// Innermost flank abscissa; flank vertices are geometric between this and the mouth.
pub const CUSP_X_MIN: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum DomainFamily {
    /// Unit disk.
    Disk,
    /// Axis-aligned ellipse with semi-axes `a`, `b`.
    Ellipse { a: f64, b: f64 },
    /// Unit square centered at the origin.
    Square,
    /// Unit disk with a notch `|y| < κ x^{1/s}`, `x ≥ 0`, removed; the
    /// notch tip sits at the origin.
    InteriorCusp { s: f64 },
    /// A spike `|y| < κ x^{1/s}`, `0 ≤ x ≤ 1`, attached to a unit disk.
    ExteriorCusp { s: f64 },
}

fn geometric(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|k| lo * (hi / lo).powf(k as f64 / (n - 1) as f64)).collect()
}

pub fn make_domain(family: DomainFamily, n: usize) -> Result<JordanCurve> {
    if n < 64 {
        return Err(Error::InvalidParameter(format!("need n >= 64 vertices, got {n}")));
    }
    let cusp_exp = |s: f64| {
        if s > 0.0 && s < 1.0 {
            Ok(1.0 / s)
        } else {
            Err(Error::InvalidParameter(format!("cusp exponent s must lie in (0, 1), got {s}")))
        }
    };
    match family {
        DomainFamily::Disk => JordanCurve::new(ellipse(1.0, 1.0, n)),
        DomainFamily::Ellipse { a, b } => {
            if !(a > 0.0 && b > 0.0) {
                return Err(Error::InvalidParameter("ellipse semi-axes must be positive".into()));
            }
            JordanCurve::new(ellipse(a, b, n))
        }
        DomainFamily::Square => {
            let per = n / 4;
            let corners = [[-0.5, -0.5], [0.5, -0.5], [0.5, 0.5], [-0.5, 0.5]];
            let mut vs = Vec::with_capacity(4 * per);
            for k in 0..4 {
                let (a, b) = (corners[k], corners[(k + 1) % 4]);
                for j in 0..per {
                    let t = j as f64 / per as f64;
                    vs.push([a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]);
                }
            }
            JordanCurve::with_features(vs, (0..4).map(|k| k * per).collect())
        }
        DomainFamily::InteriorCusp { s } => {
            let q = cusp_exp(s)?;
            // mouth: where the flank meets the unit circle
            let (mut lo, mut hi) = (0.0f64, 1.0f64);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                let f: f64 = mid * mid + (CUSP_WIDTH * mid.powf(q)).powi(2) - 1.0;
                if f < 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let xm = lo;
            let ym = CUSP_WIDTH * xm.powf(q);
            let theta = ym.atan2(xm);
            let n_flank = n / 4;
            let n_circle = n - 2 * n_flank - 1;
            let xs = geometric(CUSP_X_MIN, xm, n_flank);
            let mut vs: Vec<Point> = vec![[0.0, 0.0]];
            vs.extend(xs.iter().map(|&x| [x, CUSP_WIDTH * x.powf(q)]));
            for k in 1..=n_circle {
                let t = theta + (TAU - 2.0 * theta) * k as f64 / (n_circle + 1) as f64;
                vs.push([t.cos(), t.sin()]);
            }
            vs.extend(xs.iter().rev().map(|&x| [x, -CUSP_WIDTH * x.powf(q)]));
            JordanCurve::with_features(vs, vec![0])
        }
        DomainFamily::ExteriorCusp { s } => {
            let q = cusp_exp(s)?;
            let w = CUSP_WIDTH;
            let cx = 1.0 + (1.0 - w * w).sqrt();
            let phi = w.asin();
            let n_flank = n / 4;
            let n_circle = n - 2 * n_flank - 1;
            let xs = geometric(CUSP_X_MIN, 1.0, n_flank);
            let mut vs: Vec<Point> = vec![[0.0, 0.0]];
            vs.extend(xs.iter().map(|&x| [x, -w * x.powf(q)]));
            for k in 1..=n_circle {
                let t = PI + phi + (TAU - 2.0 * phi) * k as f64 / (n_circle + 1) as f64;
                vs.push([cx + t.cos(), t.sin()]);
            }
            vs.extend(xs.iter().rev().map(|&x| [x, w * x.powf(q)]));
            JordanCurve::with_features(vs, vec![0])
        }
    }
}

fn ellipse(a: f64, b: f64, n: usize) -> Vec<Point> {
    (0..n)
        .map(|k| {
            let t = TAU * k as f64 / n as f64;
            [a * t.cos(), b * t.sin()]
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn disk_is_regular_polygon() {
        let c = make_domain(DomainFamily::Disk, 256).unwrap();
        assert_eq!(c.len(), 256);
        assert!(c.vertices().iter().all(|v| (v[0].hypot(v[1]) - 1.0).abs() < 1e-15));
        let want = 0.5 * 256.0 * (TAU / 256.0).sin();
        assert!((c.area() - want).abs() < 1e-12);
    }

    #[test]
    fn square_has_unit_side() {
        let c = make_domain(DomainFamily::Square, 4096).unwrap();
        assert!((c.area() - 1.0).abs() < 1e-12);
        assert!((c.perimeter() - 4.0).abs() < 1e-12);
        assert_eq!(c.features().len(), 4);
    }

    #[test]
    fn cusps_are_simple_with_tip_at_origin() {
        for fam in [DomainFamily::InteriorCusp { s: 0.5 }, DomainFamily::ExteriorCusp { s: 0.5 }] {
            let c = make_domain(fam, 1024).unwrap();
            assert_eq!(c.vertices()[c.features()[0]], [0.0, 0.0]);
            assert!(c.area() > 0.0);
        }
        let int = make_domain(DomainFamily::InteriorCusp { s: 0.5 }, 1024).unwrap();
        assert!(int.contains([-0.5, 0.0]) && !int.contains([0.5, 0.0]));
        let ext = make_domain(DomainFamily::ExteriorCusp { s: 0.5 }, 1024).unwrap();
        assert!(ext.contains([0.5, 0.0]) && !ext.contains([-0.5, 0.0]));
    }

    #[test]
    fn preconditions() {
        assert!(make_domain(DomainFamily::Disk, 32).is_err());
        assert!(make_domain(DomainFamily::InteriorCusp { s: 1.5 }, 256).is_err());
    }
}
