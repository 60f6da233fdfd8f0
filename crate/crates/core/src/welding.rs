//! Global extension `Ĝ` of a circle homeomorphism `G`.
//!
//! Inside the disk `Ĝ = e ∘ H ∘ L` with `L(z) = log z / (2πi)` (branch
//! `arg z ∈ [0, 2π)`) and `e(ω) = e^{2πiω}`; outside, `Ĝ = R ∘ Ĝ ∘ R` with the
//! inversion `R(z) = 1/z̄`. Both sides therefore read the strip map at
//!
//! ```text
//! ω(z) = arg z / 2π + i |log |z|| / 2π
//! ```
//!
//! and `Ĝ` is the identity for `|z| ≤ δ` and `|z| ≥ 1/δ`, `δ = e^{-4π}`,
//! where `Im ω ≥ 2`.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ba_extension::{Mat2, StripMap, DEFAULT_QUAD_ORDER};
use crate::circle_homeo::{periodic_max, resolved_samples, rho, CircleHomeo};
use crate::error::{Error, Result};

/// `δ = e^{-4π}`: radius of the inner identity disk.
pub fn identity_radius() -> f64 {
    (-4.0 * std::f64::consts::PI).exp()
}

const BRANCH_PROBE_RADII: [f64; 3] = [1.1, 2.0, 10.0];
const BRANCH_TOLERANCE: f64 = 1e-8;

/// One sample of the field dump.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldSample {
    pub re: f64,
    pub im: f64,
    pub g_re: f64,
    pub g_im: f64,
    #[serde(rename = "K")]
    pub k: f64,
}

/// Evaluable extension `Ĝ` and its distortion.
#[derive(Debug, Clone)]
pub struct PlaneMapField {
    welding: CircleHomeo,
    strip: StripMap,
    delta: f64,
    cache: Option<Vec<FieldSample>>,
}

impl PlaneMapField {
    /// `extend_welding` with the default quadrature order.
    pub fn new(welding: &CircleHomeo) -> Result<Self> {
        Self::with_order(welding, DEFAULT_QUAD_ORDER)
    }

    pub fn with_order(welding: &CircleHomeo, quad_order: usize) -> Result<Self> {
        let strip = StripMap::new(welding.clone(), quad_order)?;
        let field = Self { welding: welding.clone(), strip, delta: identity_radius(), cache: None };
        field.check_branch_cut()?;
        Ok(field)
    }

    fn check_branch_cut(&self) -> Result<()> {
        for r in BRANCH_PROBE_RADII {
            let a = self.eval(Complex64::from_polar(r, 0.0))?;
            let b = self.eval(Complex64::from_polar(r, -1e-12))?;
            let gap = (a - b).norm();
            if !(gap <= BRANCH_TOLERANCE) {
                return Err(Error::BranchCut(gap));
            }
        }
        Ok(())
    }

    pub fn welding(&self) -> &CircleHomeo {
        &self.welding
    }

    pub fn strip(&self) -> &StripMap {
        &self.strip
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// Strip coordinate `ω(z)`; `None` in the identity regions.
    pub fn strip_coordinate(&self, z: Complex64) -> Option<Complex64> {
        let r = z.norm();
        if r <= self.delta || r >= 1.0 / self.delta {
            return None;
        }
        let theta = z.im.atan2(z.re).rem_euclid(TAU);
        Some(Complex64::new(theta / TAU, r.ln().abs() / TAU))
    }

    /// `Ĝ(z)`.
    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        let Some(omega) = self.strip_coordinate(z) else {
            return Ok(z);
        };
        let w = self.strip.eval(omega)?;
        let modulus = if z.norm() >= 1.0 { (TAU * w.im).exp() } else { (-TAU * w.im).exp() };
        Ok(Complex64::from_polar(modulus, TAU * w.re))
    }

    /// `welding_distortion`: `K_Ĝ(z) = K_H(ω(z))`, exactly 1 in the identity regions.
    pub fn distortion(&self, z: Complex64) -> Result<f64> {
        if z == Complex64::new(0.0, 0.0) {
            return Err(Error::InvalidParameter("distortion is queried at z != 0".into()));
        }
        match self.strip_coordinate(z) {
            None => Ok(1.0),
            Some(omega) => self.strip.distortion_at(omega),
        }
    }

    /// Finite-difference differential of `Ĝ` in plane coordinates.
    pub fn plane_differential(&self, z: Complex64, step: f64) -> Result<Mat2> {
        let d = |dir: Complex64| -> Result<Complex64> {
            let p = self.eval(z + dir * step)?;
            let m = self.eval(z - dir * step)?;
            Ok((p - m) / (2.0 * step))
        };
        let dx = d(Complex64::new(1.0, 0.0))?;
        let dy = d(Complex64::new(0.0, 1.0))?;
        Ok([[dx.re, dy.re], [dx.im, dy.im]])
    }

    /// `max_θ K(r e^{iθ})` on a θ-grid resolved to the shell's strip height,
    /// refined around the grid argmax. Returns `(K_max, θ_argmax)`.
    pub fn shell_max(&self, r: f64, theta_samples: usize) -> Result<(f64, f64)> {
        let y = r.ln().abs() / TAU;
        if r <= self.delta || r >= 1.0 / self.delta || y >= 2.0 {
            return Ok((1.0, 0.0));
        }
        let n = resolved_samples(theta_samples, y, 1.0);
        let (k, x) = periodic_max(n, 1.0, |x| self.strip.distortion_at(Complex64::new(x, y)))?;
        Ok((k, TAU * x))
    }

    /// Sample `Ĝ` and `K` on an `n × n` grid over `[-extent, extent]²`.
    pub fn field_grid(&self, n: usize, extent: f64) -> Result<Vec<FieldSample>> {
        if n < 2 {
            return Err(Error::InvalidParameter("field grid needs n >= 2".into()));
        }
        let coord = |i: usize| -extent + 2.0 * extent * i as f64 / (n - 1) as f64;
        (0..n * n)
            .into_par_iter()
            .map(|idx| {
                let z = Complex64::new(coord(idx % n), coord(idx / n));
                let g = self.eval(z)?;
                let k = if z.norm() == 0.0 {
                    1.0
                } else {
                    match self.distortion(z) {
                        Err(Error::BelowFloor(_)) => f64::NAN,
                        other => other?,
                    }
                };
                Ok(FieldSample { re: z.re, im: z.im, g_re: g.re, g_im: g.im, k })
            })
            .collect()
    }

    /// Populate the evaluation cache; reads after this are cache-independent.
    pub fn populate_cache(&mut self, n: usize, extent: f64) -> Result<()> {
        self.cache = Some(self.field_grid(n, extent)?);
        Ok(())
    }

    pub fn cache(&self) -> Option<&[FieldSample]> {
        self.cache.as_deref()
    }

    /// Injectivity and orientation probe on an `n × n` polar grid of the
    /// annulus `r_in ≤ |z| ≤ r_out`.
    pub fn probe_homeomorphism(&self, n: usize, r_in: f64, r_out: f64) -> Result<HomeomorphismProbe> {
        let pts: Vec<Complex64> = (0..n * n)
            .map(|idx| {
                let (i, j) = (idx / n, idx % n);
                let r = r_in * (r_out / r_in).powf((i as f64 + 0.5) / n as f64);
                Complex64::from_polar(r, TAU * (j as f64 + 0.5) / n as f64)
            })
            .collect();
        let evaluated: Vec<(Complex64, f64)> = pts
            .par_iter()
            .map(|&z| {
                let w = self.eval(z)?;
                let m = self.plane_differential(z, 1e-7 * z.norm())?;
                Ok((w, m[0][0] * m[1][1] - m[0][1] * m[1][0]))
            })
            .collect::<Result<Vec<_>>>()?;
        let min_jacobian = evaluated.iter().map(|e| e.1).fold(f64::INFINITY, f64::min);
        let mut images: Vec<Complex64> = evaluated.iter().map(|e| e.0).collect();
        images.sort_by(|a, b| a.re.total_cmp(&b.re));
        let mut min_sep = f64::INFINITY;
        for i in 0..images.len() {
            for j in i + 1..images.len() {
                if images[j].re - images[i].re > min_sep {
                    break;
                }
                min_sep = min_sep.min((images[j] - images[i]).norm());
            }
        }
        Ok(HomeomorphismProbe {
            samples: n * n,
            min_image_separation: min_sep,
            min_jacobian,
            injective: min_sep > 1e-12,
            orientation_preserving: min_jacobian > 0.0,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HomeomorphismProbe {
    pub samples: usize,
    pub min_image_separation: f64,
    pub min_jacobian: f64,
    pub injective: bool,
    pub orientation_preserving: bool,
}

/// `extend_welding`.
pub fn extend_welding(welding: &CircleHomeo) -> Result<PlaneMapField> {
    PlaneMapField::new(welding)
}

/// One shell of a scalewise-bound check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShellRatio {
    pub r: f64,
    pub k_max: f64,
    pub theta_argmax: f64,
    pub rho: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalewiseBoundReport {
    pub shells: Vec<ShellRatio>,
    pub sup_ratio: f64,
    pub min_ratio: f64,
    /// `sup_ratio / min_ratio`.
    pub variation: f64,
}

/// Compare `max_θ K_Ĝ(re^{iθ})` against `ρ_G(log r)` shell by shell.
pub fn verify_scalewise_bound(
    field: &PlaneMapField,
    radii: &[f64],
    theta_samples: usize,
) -> Result<ScalewiseBoundReport> {
    let mut shells = Vec::with_capacity(radii.len());
    for &r in radii {
        if !(r > 1.0 && r < 1.0 / field.delta()) {
            return Err(Error::InvalidParameter(format!("radius {r} outside (1, 1/delta)")));
        }
        let (k_max, theta_argmax) = field.shell_max(r, theta_samples)?;
        let (rho_value, _) = rho(field.welding(), r.ln(), theta_samples)?;
        shells.push(ShellRatio { r, k_max, theta_argmax, rho: rho_value, ratio: k_max / rho_value });
    }
    let sup_ratio = shells.iter().map(|s| s.ratio).fold(f64::NEG_INFINITY, f64::max);
    let min_ratio = shells.iter().map(|s| s.ratio).fold(f64::INFINITY, f64::min);
    Ok(ScalewiseBoundReport { shells, sup_ratio, min_ratio, variation: sup_ratio / min_ratio })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_regions_are_exact() {
        let f = extend_welding(&CircleHomeo::power(2.0).unwrap()).unwrap();
        let d = identity_radius();
        for z in [Complex64::new(d / 2.0, 0.0), Complex64::new(0.0, -3.0 / d), Complex64::new(0.0, 0.0)] {
            assert_eq!(f.eval(z).unwrap(), z);
        }
        assert_eq!(f.distortion(Complex64::new(0.0, 3.0 / d)).unwrap(), 1.0);
        assert!(f.distortion(Complex64::new(0.0, 0.0)).is_err());
    }

    #[test]
    fn far_shell_is_identity() {
        // |z| = e^{5π} sits at strip height 5/2
        let f = extend_welding(&CircleHomeo::power(3.0).unwrap()).unwrap();
        let z = Complex64::from_polar((5.0 * std::f64::consts::PI).exp(), 1.0);
        let w = f.eval(z).unwrap();
        assert!((w - z).norm() <= 1e-9 * z.norm());
        assert_eq!(f.distortion(z).unwrap(), 1.0);
    }

    #[test]
    fn rotation_welding_closed_form() {
        let c = 0.2;
        let f = extend_welding(&CircleHomeo::rotation(c).unwrap()).unwrap();
        for &(r, theta) in &[(1.0, 0.4), (1.5, 2.0), (3.0_f64, 5.0), (0.7, 1.0)] {
            let y = r.ln().abs() / TAU;
            let weight = if y <= 1.0 { 1.0 } else { (2.0 - y).max(0.0) };
            let want = Complex64::from_polar(r, theta + TAU * c * weight);
            let got = f.eval(Complex64::from_polar(r, theta)).unwrap();
            assert!((got - want).norm() < 1e-10 * r, "r = {r}: {got} vs {want}");
        }
        // shell in the linear layer, y ∈ (1, 2)
        let r = (TAU * 1.5).exp();
        let got = f.eval(Complex64::from_polar(r, 1.0)).unwrap();
        let want = Complex64::from_polar(r, 1.0 + TAU * c * 0.5);
        assert!((got - want).norm() < 1e-10 * r);
    }

    #[test]
    fn boundary_trace_is_the_welding() {
        let g = CircleHomeo::power(1.5).unwrap();
        let f = extend_welding(&g).unwrap();
        for i in 0..100 {
            let theta = TAU * i as f64 / 100.0;
            let (re, im) = g.apply(theta);
            let w = f.eval(Complex64::from_polar(1.0, theta)).unwrap();
            assert!((w - Complex64::new(re, im)).norm() < 1e-12);
        }
    }

    #[test]
    fn mirror_symmetry_of_distortion() {
        let f = extend_welding(&CircleHomeo::power(2.0).unwrap()).unwrap();
        for &(r, th) in &[(1.01, 0.01), (1.3, 3.0), (1.001, 6.2)] {
            let z = Complex64::from_polar(r, th);
            let mirror = 1.0 / z.conj();
            let a = f.distortion(z).unwrap();
            let b = f.distortion(mirror).unwrap();
            assert!((a - b).abs() <= 1e-6 * a, "{a} vs {b}");
        }
    }
}
