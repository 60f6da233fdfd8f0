//! Three-point envelopes: chord length against the smaller arc diameter.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::curve::{dist, JordanCurve};
use super::hull;
use crate::control::{ControlFamily, ControlFunction};
use crate::distortion::linear_fit;
use crate::error::{Error, Result};

/// Bins per factor `e` in the chord length.
const BINS_PER_E: f64 = 3.0;
/// A more complex family replaces a simpler one only when its residual is
/// below `(r_simple - FIT_ABS_SLACK) / FIT_REL_SLACK`.
const FIT_REL_SLACK: f64 = 1.5;
const FIT_ABS_SLACK: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnvelopePair {
    pub i: usize,
    pub j: usize,
    /// `|P_i - P_j|`.
    pub d: f64,
    /// `min(diam γ₁, diam γ₂)`.
    pub m: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitFamily {
    Linear,
    Power,
    LogPower,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyFit {
    pub family: FitFamily,
    pub c: f64,
    /// `s` for power, `β` for log-power.
    pub exponent: Option<f64>,
    /// RMS residual in `log m`.
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Envelope {
    pub pairs: Vec<EnvelopePair>,
    /// Upper envelope `(d, m)`: the pair with the largest `m` in each log bin of `d`.
    pub bins: Vec<[f64; 2]>,
    pub fits: Vec<FamilyFit>,
    pub family: FitFamily,
    pub control: ControlFunction,
    /// `max m / d` over all pairs.
    pub max_ratio: f64,
    pub curve_diameter: f64,
}

/// `min` of the two arc diameters between vertices `i` and `j`.
pub fn arc_min_diameter(curve: &JordanCurve, i: usize, j: usize) -> f64 {
    let a = hull::diameter(&curve.arc_vertices(i, j));
    let b = hull::diameter(&curve.arc_vertices(j, i));
    a.min(b)
}

fn sample_pairs(curve: &JordanCurve, count: usize, seed: u64) -> Vec<(usize, usize)> {
    let n = curve.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    let stratified = count / 2;
    for k in 0..stratified {
        let s = (k as f64 + rng.gen::<f64>()) / stratified as f64;
        let i = curve.vertex_at_fraction(s);
        let j = (i + rng.gen_range(1..n)) % n;
        out.push((i, j));
    }
    // near pairs: around tagged features when present, anywhere otherwise
    let max_gap = (n / 4).max(2) as f64;
    let features = curve.features();
    while out.len() < count {
        let center = if features.is_empty() {
            rng.gen_range(0..n)
        } else {
            features[rng.gen_range(0..features.len())]
        };
        let a = max_gap.powf(rng.gen::<f64>()).floor() as usize;
        let b = if rng.gen_bool(0.5) {
            (a as i64 + rng.gen_range(-2..=2)).max(0) as usize
        } else {
            max_gap.powf(rng.gen::<f64>()).floor() as usize
        };
        let i = (center + n - a % n) % n;
        let j = (center + b) % n;
        if i != j {
            out.push((i, j));
        }
    }
    out
}

/// Upper envelope over log bins of `d`.
pub fn upper_envelope(pairs: &[EnvelopePair]) -> Vec<[f64; 2]> {
    let mut bins: std::collections::BTreeMap<i64, [f64; 2]> = Default::default();
    for p in pairs {
        let key = (p.d.ln() * BINS_PER_E).floor() as i64;
        let e = bins.entry(key).or_insert([p.d, p.m]);
        if p.m > e[1] {
            *e = [p.d, p.m];
        }
    }
    bins.into_values().collect()
}

fn rms(v: impl Iterator<Item = f64>) -> f64 {
    let (mut s, mut n) = (0.0, 0usize);
    for x in v {
        s += x * x;
        n += 1;
    }
    (s / n.max(1) as f64).sqrt()
}

/// Fits `m ≈ C d`, `C d^s` and `C d log^β(1/d)` to envelope points.
pub fn fit_families(points: &[[f64; 2]]) -> Vec<FamilyFit> {
    let mut fits = Vec::new();
    if points.is_empty() {
        return fits;
    }
    let ld: Vec<f64> = points.iter().map(|p| p[0].ln()).collect();
    let lm: Vec<f64> = points.iter().map(|p| p[1].ln()).collect();
    let diff: Vec<f64> = lm.iter().zip(&ld).map(|(m, d)| m - d).collect();
    let lc = diff.iter().sum::<f64>() / diff.len() as f64;
    fits.push(FamilyFit {
        family: FitFamily::Linear,
        c: lc.exp(),
        exponent: None,
        residual: rms(diff.iter().map(|v| v - lc)),
    });
    if points.len() >= 3 {
        let (a, s, res) = linear_fit(&ld, &lm);
        fits.push(FamilyFit { family: FitFamily::Power, c: a.exp(), exponent: Some(s), residual: res });
        let keep: Vec<usize> = (0..points.len()).filter(|&k| points[k][0] < (-1.0f64).exp()).collect();
        if keep.len() >= 3 {
            let xs: Vec<f64> = keep.iter().map(|&k| (-ld[k]).ln()).collect();
            let ys: Vec<f64> = keep.iter().map(|&k| diff[k]).collect();
            let (a, beta, res) = linear_fit(&xs, &ys);
            fits.push(FamilyFit { family: FitFamily::LogPower, c: a.exp(), exponent: Some(beta), residual: res });
        }
    }
    fits
}

/// Simplest family whose residual is not clearly beaten by a richer one.
pub fn choose_family(fits: &[FamilyFit]) -> Option<&FamilyFit> {
    let mut best = fits.iter().find(|f| f.family == FitFamily::Linear)?;
    for fam in [FitFamily::Power, FitFamily::LogPower] {
        if let Some(f) = fits.iter().find(|f| f.family == fam) {
            if best.residual > FIT_REL_SLACK * f.residual + FIT_ABS_SLACK {
                best = f;
            }
        }
    }
    Some(best)
}

fn control_of(fit: &FamilyFit) -> Result<ControlFunction> {
    let fam = match fit.family {
        FitFamily::Linear => ControlFamily::Linear { c: fit.c, t_max: None },
        FitFamily::Power => ControlFamily::Power { s: fit.exponent.unwrap_or(1.0), c: fit.c, t_max: None },
        FitFamily::LogPower => ControlFamily::LogPower { c: fit.c, beta: fit.exponent.unwrap_or(0.0).max(0.0), t_max: None },
    };
    ControlFunction::new(fam)
}

/// Sample vertex pairs, bin the upper envelope and fit a control function on
/// the bins with `d ≤ diam / 4`.
pub fn three_point_envelope(curve: &JordanCurve, pair_samples: usize, seed: u64) -> Result<Envelope> {
    if pair_samples < 1000 {
        return Err(Error::InvalidParameter(format!("need >= 1000 pair samples, got {pair_samples}")));
    }
    let v = curve.vertices();
    let pairs: Vec<EnvelopePair> = sample_pairs(curve, pair_samples, seed)
        .par_iter()
        .map(|&(i, j)| EnvelopePair { i, j, d: dist(v[i], v[j]), m: arc_min_diameter(curve, i, j) })
        .collect();
    let diam = curve.diameter();
    let bins = upper_envelope(&pairs);
    let fit_pts: Vec<[f64; 2]> = bins.iter().copied().filter(|b| b[0] <= diam / 4.0).collect();
    if fit_pts.len() < 3 {
        return Err(Error::Unresolved("fewer than 3 envelope bins below diam/4".into()));
    }
    let fits = fit_families(&fit_pts);
    let chosen = choose_family(&fits).ok_or_else(|| Error::Unresolved("no envelope fit".into()))?.clone();
    let max_ratio = pairs.iter().map(|p| p.m / p.d).fold(0.0, f64::max);
    Ok(Envelope {
        control: control_of(&chosen)?,
        family: chosen.family,
        pairs,
        bins,
        fits,
        max_ratio,
        curve_diameter: diam,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::domains::{make_domain, DomainFamily};

    #[test]
    fn circle_envelope_is_linear_with_unit_constant() {
        let c = make_domain(DomainFamily::Disk, 512).unwrap();
        let env = three_point_envelope(&c, 2000, 42).unwrap();
        assert!((env.max_ratio - 1.0).abs() < 1e-12, "{}", env.max_ratio);
        assert_eq!(env.family, FitFamily::Linear);
    }

    #[test]
    fn swapping_endpoints_keeps_pair() {
        let c = make_domain(DomainFamily::Square, 256).unwrap();
        for (i, j) in [(3, 100), (0, 128), (250, 5)] {
            assert_eq!(arc_min_diameter(&c, i, j), arc_min_diameter(&c, j, i));
        }
    }

    #[test]
    fn family_selection_prefers_simple() {
        let lin: Vec<[f64; 2]> = (1..20).map(|k| [0.5f64.powi(k), 2.0 * 0.5f64.powi(k)]).collect();
        let fits = fit_families(&lin);
        assert_eq!(choose_family(&fits).unwrap().family, FitFamily::Linear);
        let pow: Vec<[f64; 2]> = (1..20).map(|k| [0.5f64.powi(k), 0.5f64.powi(k).sqrt()]).collect();
        let fits = fit_families(&pow);
        let f = choose_family(&fits).unwrap();
        assert_eq!(f.family, FitFamily::Power);
        assert!((f.exponent.unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn too_few_samples_rejected() {
        let c = make_domain(DomainFamily::Disk, 128).unwrap();
        assert!(three_point_envelope(&c, 10, 42).is_err());
    }
}
