//! Radial distortion profiles, growth-exponent fits and integrability trends.
//!
//! Local integrability is asymptotic, so it is read off as a trend: the
//! increments of `∫ Φ(K)` over nested annuli `1 + ε_{k+1} < |z| < 1 + ε_k`
//! are regressed against `ε_k` in log-log space. A positive slope means the
//! increments shrink geometrically (convergent tail), otherwise divergent.
//!
//! Two series are reported per exponent. The *envelope* series integrates the
//! shell supremum `K_max(r)`, i.e. the radial majorant `K ≤ C |r-1|^{-α}`
//! whose polar integral is finite exactly when `pα < 1`; its trend is the
//! reported verdict. The *field* series integrates `K` itself. When the
//! distortion concentrates in an angular window of width `~ r - 1` the field
//! integral converges for larger `p` than the envelope does.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circle_homeo::resolved_samples;
use crate::error::{Error, Result};
use crate::quadrature::GaussLegendre;
use crate::welding::PlaneMapField;

/// A sampled distortion field on the plane.
pub trait DistortionField: Sync {
    fn distortion(&self, z: Complex64) -> Result<f64>;

    /// `(max_θ K(re^{iθ}), argmax)`.
    fn shell_max(&self, r: f64, theta_samples: usize) -> Result<(f64, f64)>;

    /// θ-samples needed to resolve the shell at radius `r`.
    fn theta_resolution(&self, _r: f64, requested: usize) -> usize {
        requested
    }
}

impl DistortionField for PlaneMapField {
    fn distortion(&self, z: Complex64) -> Result<f64> {
        PlaneMapField::distortion(self, z)
    }

    fn shell_max(&self, r: f64, theta_samples: usize) -> Result<(f64, f64)> {
        PlaneMapField::shell_max(self, r, theta_samples)
    }

    fn theta_resolution(&self, r: f64, requested: usize) -> usize {
        let y = r.ln().abs() / TAU;
        if y >= 2.0 || y == 0.0 {
            requested
        } else {
            resolved_samples(requested, y, 1.0)
        }
    }
}

/// A rotation-invariant synthetic field `K(z) = k(|z|)`.
pub struct RadialField<F: Fn(f64) -> f64 + Sync>(pub F);

impl<F: Fn(f64) -> f64 + Sync> DistortionField for RadialField<F> {
    fn distortion(&self, z: Complex64) -> Result<f64> {
        Ok((self.0)(z.norm()))
    }

    fn shell_max(&self, r: f64, _theta_samples: usize) -> Result<(f64, f64)> {
        Ok(((self.0)(r), 0.0))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum GrowthModel {
    /// `K_max ≈ c₀ + coefficient · log(1/(r-1))`.
    LogLaw { coefficient: f64 },
    /// `K_max ≈ C (r-1)^{-α}`.
    PowerLaw { alpha: f64 },
}

/// Shell maxima of `K` on radii decreasing toward 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistortionProfile {
    pub r_grid: Vec<f64>,
    pub k_max: Vec<f64>,
    pub model: Option<GrowthModel>,
}

impl DistortionProfile {
    pub fn new(r_grid: Vec<f64>, k_max: Vec<f64>) -> Result<Self> {
        if r_grid.len() != k_max.len() {
            return Err(Error::InvalidParameter("r_grid and k_max lengths differ".into()));
        }
        if r_grid.iter().any(|&r| !(r > 1.0)) || r_grid.windows(2).any(|w| w[1] >= w[0]) {
            return Err(Error::InvalidParameter("r_grid must be > 1 and strictly decreasing".into()));
        }
        if k_max.iter().any(|&k| !(k >= 1.0 - 1e-9)) {
            return Err(Error::InvalidParameter("k_max values must be >= 1".into()));
        }
        Ok(Self { r_grid, k_max, model: None })
    }

    /// CSV rows `r,K_max`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("r,K_max\n");
        for (r, k) in self.r_grid.iter().zip(&self.k_max) {
            s.push_str(&format!("{r:e},{k:e}\n"));
        }
        s
    }
}

/// Radii `1 + 2^{-k}` for `k` in the given range.
pub fn dyadic_radii(k_from: i32, k_to: i32) -> Vec<f64> {
    (k_from..=k_to).map(|k| 1.0 + 2f64.powi(-k)).collect()
}

/// Shell maxima of a field over `r_grid`.
pub fn radial_profile<D: DistortionField + ?Sized>(
    field: &D,
    r_grid: &[f64],
    theta_samples: usize,
) -> Result<DistortionProfile> {
    let k_max = r_grid
        .iter()
        .map(|&r| field.shell_max(r, theta_samples).map(|p| p.0))
        .collect::<Result<Vec<_>>>()?;
    DistortionProfile::new(r_grid.to_vec(), k_max)
}

/// Ordinary least squares `y ≈ a + b x`; returns `(a, b, rms residual)`.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let b = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let a = my - b * mx;
    let rss: f64 = xs.iter().zip(ys).map(|(x, y)| (y - a - b * x).powi(2)).sum();
    (a, b, (rss / n).sqrt())
}

/// Slope of `log y` against `log x`.
pub fn log_log_slope(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let (_, b, res) = linear_fit(&lx, &ly);
    (b, res)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentFit {
    pub alpha: f64,
    pub residual: f64,
    /// Set when the profile is flat and `α = 0` is returned.
    pub bounded: bool,
}

fn check_span(profile: &DistortionProfile) -> Result<()> {
    let n = profile.r_grid.len();
    if n < 5 {
        return Err(Error::InvalidParameter(format!("need >= 5 shells, got {n}")));
    }
    let span = ((profile.r_grid[0] - 1.0) / (profile.r_grid[n - 1] - 1.0)).log10();
    if span < 2.0 - 1e-9 {
        return Err(Error::InvalidParameter(format!("shells span {span:.2} < 2 decades of r - 1")));
    }
    Ok(())
}

/// Least-squares slope of `log K_max` against `log(1/(r-1))`.
pub fn fit_radial_exponent(profile: &DistortionProfile) -> Result<ExponentFit> {
    check_span(profile)?;
    let (kmin, kmax) = profile
        .k_max
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &k| (a.min(k), b.max(k)));
    if kmax - kmin <= 1e-9 * kmax {
        return Ok(ExponentFit { alpha: 0.0, residual: 0.0, bounded: true });
    }
    let xs: Vec<f64> = profile.r_grid.iter().map(|r| -(r - 1.0).ln()).collect();
    let ys: Vec<f64> = profile.k_max.iter().map(|k| k.ln()).collect();
    let (_, alpha, residual) = linear_fit(&xs, &ys);
    Ok(ExponentFit { alpha, residual, bounded: false })
}

/// Fit both growth laws and keep the one with the smaller residual in
/// `log K` (ties go to the log law).
pub fn fit_growth_model(profile: &DistortionProfile) -> Result<(GrowthModel, f64)> {
    let power = fit_radial_exponent(profile)?;
    let xs: Vec<f64> = profile.r_grid.iter().map(|r| -(r - 1.0).ln()).collect();
    let (a, b, _) = linear_fit(&xs, &profile.k_max);
    let log_res = {
        let rss: f64 = xs
            .iter()
            .zip(&profile.k_max)
            .map(|(x, k)| {
                let pred = (a + b * x).max(1e-300);
                (k.ln() - pred.ln()).powi(2)
            })
            .sum();
        (rss / xs.len() as f64).sqrt()
    };
    if log_res <= power.residual {
        Ok((GrowthModel::LogLaw { coefficient: b }, log_res))
    } else {
        Ok((GrowthModel::PowerLaw { alpha: power.alpha }, power.residual))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Converging,
    Diverging,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrendEntry {
    /// `p` for power trends, `λ` for exponential trends.
    pub exponent: f64,
    /// Trend of the shell-supremum envelope.
    pub verdict: Verdict,
    /// Trend of the field integral itself.
    pub field_verdict: Verdict,
    pub envelope_slope: f64,
    pub field_slope: f64,
    /// Slope of the model increments `∫ (r-1)^{-pα} dr` (power trends only).
    pub model_slope: Option<f64>,
    /// `log ∫ Φ(K)` per annulus, field integral.
    pub log_increments: Vec<f64>,
    /// `log` of the summed field integral over all annuli.
    pub log_total: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntegrabilityReport {
    pub alpha: f64,
    pub residual: f64,
    /// Annulus boundaries `ε_0 > ε_1 > ... ` in `r - 1`.
    pub annuli: Vec<f64>,
    pub p_trends: Vec<TrendEntry>,
    pub lambda_trends: Vec<TrendEntry>,
}

const RADIAL_ORDER: usize = 16;

fn log_sum_exp(values: impl IntoIterator<Item = f64>) -> f64 {
    let v: Vec<f64> = values.into_iter().collect();
    let m = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m.is_infinite() {
        return m;
    }
    m + v.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

/// Per-annulus sample data: for every radial node the log-weight
/// `log(w_s · r (r-1))` and the θ-samples of `K`.
struct AnnulusSamples {
    nodes: Vec<(f64, f64, Vec<f64>, f64)>, // (r, log weight, K samples, K_max)
}

fn sample_annulus<D: DistortionField + ?Sized>(
    field: &D,
    outer: f64,
    inner: f64,
    theta_samples: usize,
    rule: &GaussLegendre,
) -> Result<AnnulusSamples> {
    let (s0, s1) = (inner.ln(), outer.ln());
    let mut nodes = Vec::with_capacity(rule.order());
    for (&v, &w) in rule.nodes().iter().zip(rule.weights()) {
        let s = s0 + (s1 - s0) * v;
        let eps = s.exp();
        let r = 1.0 + eps;
        let n = field.theta_resolution(r, theta_samples);
        let ks: Vec<f64> = (0..n)
            .into_par_iter()
            .map(|j| field.distortion(Complex64::from_polar(r, TAU * (j as f64 + 0.5) / n as f64)))
            .collect::<Result<Vec<_>>>()?;
        let (kmax, _) = field.shell_max(r, theta_samples)?;
        let kmax = ks.iter().copied().fold(kmax, f64::max);
        let log_w = (w * (s1 - s0)).ln() + r.ln() + eps.ln();
        nodes.push((r, log_w, ks, kmax));
    }
    Ok(AnnulusSamples { nodes })
}

/// `log ∫_annulus exp(φ(K)) dA` for the field and for the envelope.
fn annulus_logs(samples: &AnnulusSamples, phi: &dyn Fn(f64) -> f64) -> (f64, f64) {
    let field = log_sum_exp(samples.nodes.iter().map(|(_, lw, ks, _)| {
        let n = ks.len() as f64;
        lw + (TAU / n).ln() + log_sum_exp(ks.iter().map(|&k| phi(k)))
    }));
    let envelope = log_sum_exp(samples.nodes.iter().map(|(_, lw, _, kmax)| lw + TAU.ln() + phi(*kmax)));
    (field, envelope)
}

fn trend_slope(annuli: &[f64], logs: &[f64]) -> f64 {
    let xs: Vec<f64> = annuli.windows(2).map(|w| (w[0] * w[1]).sqrt().ln()).collect();
    linear_fit(&xs, logs).1
}

fn verdict_of(slope: f64) -> Verdict {
    if slope > 0.0 {
        Verdict::Converging
    } else {
        Verdict::Diverging
    }
}

/// Integrate `K^p` and `exp(λK)` over nested annuli and report tail trends.
///
/// `annuli` lists the boundaries `ε_0 > ε_1 > ... > ε_n` in `r - 1`; the
/// exponent `α` is fitted from the shell maxima at those boundaries.
pub fn integrability_report<D: DistortionField + ?Sized>(
    field: &D,
    p_list: &[f64],
    lambda_list: &[f64],
    annuli: &[f64],
    theta_samples: usize,
) -> Result<IntegrabilityReport> {
    if annuli.len() < 3 || annuli.windows(2).any(|w| !(w[1] < w[0])) || annuli[annuli.len() - 1] <= 0.0 {
        return Err(Error::InvalidParameter("annuli must be >= 3 strictly decreasing positive radii offsets".into()));
    }
    let delta = crate::welding::identity_radius();
    if 1.0 + annuli[0] >= 1.0 / delta {
        return Err(Error::InvalidParameter("annuli must lie inside delta < |z| < 1/delta".into()));
    }
    let rule = GaussLegendre::new(RADIAL_ORDER);
    let samples = annuli
        .windows(2)
        .map(|w| sample_annulus(field, w[0], w[1], theta_samples, &rule))
        .collect::<Result<Vec<_>>>()?;

    let r_grid: Vec<f64> = annuli.iter().map(|e| 1.0 + e).collect();
    let profile = radial_profile(field, &r_grid, theta_samples)?;
    let fit = if profile.r_grid.len() >= 5 {
        fit_radial_exponent(&profile)?
    } else {
        let (a, r) = log_log_slope(annuli, &profile.k_max);
        ExponentFit { alpha: -a, residual: r, bounded: false }
    };

    let trend = |exponent: f64, phi: &dyn Fn(f64) -> f64, model_slope: Option<f64>| -> TrendEntry {
        let (field_logs, env_logs): (Vec<f64>, Vec<f64>) =
            samples.iter().map(|s| annulus_logs(s, phi)).unzip();
        let field_slope = trend_slope(annuli, &field_logs);
        let envelope_slope = trend_slope(annuli, &env_logs);
        TrendEntry {
            exponent,
            verdict: verdict_of(envelope_slope),
            field_verdict: verdict_of(field_slope),
            envelope_slope,
            field_slope,
            model_slope,
            log_total: log_sum_exp(field_logs.iter().copied()),
            log_increments: field_logs,
        }
    };
    let p_trends = p_list
        .iter()
        .map(|&p| trend(p, &|k: f64| p * k.ln(), Some(1.0 - p * fit.alpha)))
        .collect();
    let lambda_trends = lambda_list.iter().map(|&l| trend(l, &|k: f64| l * k, None)).collect();
    Ok(IntegrabilityReport {
        alpha: fit.alpha,
        residual: fit.residual,
        annuli: annuli.to_vec(),
        p_trends,
        lambda_trends,
    })
}

/// Growth model of `ρ_G` used for classification.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum RhoModel {
    LogLaw,
    PowerLaw { alpha: f64 },
}

/// Setting in which a classification is made.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Context {
    #[default]
    Welding,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "class", rename_all = "snake_case")]
pub enum Classification {
    ExpIntegrable,
    /// Locally `p`-integrable for every `p ∈ (0, p_sup)`.
    PIntegrable { p_sup: f64 },
    /// Bounded distortion (quasiconformal extension).
    BoundedDistortion,
}

impl Classification {
    pub fn label(&self) -> String {
        match self {
            Classification::ExpIntegrable => "exp-integrable".into(),
            Classification::PIntegrable { p_sup } => format!("p-integrable for p < {p_sup}"),
            Classification::BoundedDistortion => "bounded distortion".into(),
        }
    }
}

/// Integrability class of the extension implied by the growth of `ρ_G`.
pub fn classify_from_rho(model: RhoModel, _context: Context) -> Classification {
    match model {
        RhoModel::LogLaw => Classification::ExpIntegrable,
        RhoModel::PowerLaw { alpha } if alpha <= 0.0 => Classification::BoundedDistortion,
        RhoModel::PowerLaw { alpha } => Classification::PIntegrable { p_sup: 1.0 / alpha },
    }
}

/// Welding growth exponent `α = 2(1/s² - 1)` implied by a three-point
/// control `ψ(t) = t^s`.
pub fn welding_exponent_from_three_point(s: f64) -> f64 {
    2.0 * (1.0 / (s * s) - 1.0)
}

/// Upper end `s² / (2(1 - s²))` of the p-range for `ψ(t) = t^s`.
pub fn p_sup_from_three_point(s: f64) -> f64 {
    s * s / (2.0 * (1.0 - s * s))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn synthetic(alpha: f64) -> DistortionProfile {
        let r: Vec<f64> = dyadic_radii(1, 12);
        let k = r.iter().map(|r| (r - 1.0f64).powf(-alpha)).collect();
        DistortionProfile::new(r, k).unwrap()
    }

    #[test]
    fn flat_profile_gives_zero_exponent() {
        let r = dyadic_radii(1, 10);
        let p = DistortionProfile::new(r.clone(), vec![1.0; r.len()]).unwrap();
        let fit = fit_radial_exponent(&p).unwrap();
        assert_eq!(fit.alpha, 0.0);
        assert!(fit.bounded);
    }

    #[test]
    fn exact_power_profile_recovers_exponent() {
        let fit = fit_radial_exponent(&synthetic(0.5)).unwrap();
        assert!((fit.alpha - 0.5).abs() < 1e-6);
        assert!(fit.residual < 1e-9);
        assert!(matches!(fit_growth_model(&synthetic(0.5)).unwrap().0, GrowthModel::PowerLaw { .. }));
    }

    #[test]
    fn log_profile_selects_log_law() {
        let r = dyadic_radii(1, 12);
        let k = r.iter().map(|r| 1.0 + 0.7 * (1.0 / (r - 1.0f64)).ln()).collect();
        let p = DistortionProfile::new(r, k).unwrap();
        match fit_growth_model(&p).unwrap().0 {
            GrowthModel::LogLaw { coefficient } => assert!((coefficient - 0.7).abs() < 1e-9),
            m => panic!("{m:?}"),
        }
    }

    #[test]
    fn profile_span_preconditions() {
        let r = dyadic_radii(1, 4);
        let p = DistortionProfile::new(r.clone(), vec![2.0; r.len()]).unwrap();
        assert!(fit_radial_exponent(&p).is_err());
        let r = dyadic_radii(1, 6); // 1.5 decades
        let p = DistortionProfile::new(r.clone(), vec![2.0; r.len()]).unwrap();
        assert!(fit_radial_exponent(&p).is_err());
        assert!(DistortionProfile::new(vec![1.1, 1.2], vec![1.0, 1.0]).is_err());
    }

    #[test]
    fn classification_rules() {
        assert_eq!(
            classify_from_rho(RhoModel::PowerLaw { alpha: 2.0 }, Context::Welding),
            Classification::PIntegrable { p_sup: 0.5 }
        );
        assert_eq!(classify_from_rho(RhoModel::LogLaw, Context::Welding), Classification::ExpIntegrable);
        assert_eq!(
            classify_from_rho(RhoModel::PowerLaw { alpha: 0.0 }, Context::Welding),
            Classification::BoundedDistortion
        );
        let s = 0.5f64.sqrt();
        assert!((welding_exponent_from_three_point(s) - 2.0).abs() < 1e-14);
        assert!((p_sup_from_three_point(s) - 0.5).abs() < 1e-14);
    }

    #[test]
    fn constant_field_integrates_to_area() {
        let annuli: Vec<f64> = (1..=9).map(|k| 2f64.powi(-k)).collect();
        let c = 3.0;
        let rep = integrability_report(&RadialField(|_| c), &[0.5, 2.0], &[0.1], &annuli, 64).unwrap();
        let area = std::f64::consts::PI * ((1.0 + annuli[0]).powi(2) - (1.0 + annuli[8]).powi(2));
        for t in &rep.p_trends {
            let want = c.powf(t.exponent) * area;
            assert!((t.log_total.exp() - want).abs() <= 1e-8 * want, "{} vs {want}", t.log_total.exp());
        }
        let want = (0.1 * c).exp() * area;
        assert!((rep.lambda_trends[0].log_total.exp() - want).abs() <= 1e-8 * want);
        assert_eq!(rep.alpha, 0.0);
    }

    #[test]
    fn synthetic_power_field_threshold() {
        let annuli: Vec<f64> = (2..=10).map(|k| 2f64.powi(-k)).collect();
        let field = RadialField(|r: f64| (r - 1.0).powi(-2));
        let rep = integrability_report(&field, &[0.4, 0.6], &[], &annuli, 64).unwrap();
        assert!((rep.alpha - 2.0).abs() < 1e-9);
        let (conv, div) = (&rep.p_trends[0], &rep.p_trends[1]);
        assert_eq!(conv.verdict, Verdict::Converging);
        assert_eq!(conv.field_verdict, Verdict::Converging);
        assert_eq!(div.verdict, Verdict::Diverging);
        // increments follow ∫ s^{-2p} ds over each dyadic annulus
        for (k, w) in annuli.windows(2).enumerate() {
            let p: f64 = 0.4;
            let e = 1.0 - 2.0 * p;
            let model = (w[0].powf(e) - w[1].powf(e)) / e;
            // r dr dθ weight: r ∈ (1, 1.25], so the ratio sits in [2π, 2π·1.25]
            let ratio = conv.log_increments[k].exp() / model;
            assert!(ratio > TAU && ratio < TAU * 1.25, "annulus {k}: {ratio}");
        }
    }
}
