//! Control functions `ψ` and the analytic conditions built from them.
//!
//! Everything is evaluated on `ln t` so that grids reaching far below the
//! smallest normal double stay exact.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const BISECTION_ITERS: usize = 200;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", content = "params", rename_all = "snake_case")]
pub enum ControlFamily {
    /// `c t`.
    Linear {
        c: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        t_max: Option<f64>,
    },
    /// `c t^s`.
    Power {
        s: f64,
        #[serde(default = "one")]
        c: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        t_max: Option<f64>,
    },
    /// `c t log^β(1/t)`.
    LogPower {
        c: f64,
        beta: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        t_max: Option<f64>,
    },
    /// Samples `(t_i, ψ_i)`, interpolated linearly in log-log coordinates and
    /// extended below `t_0` by the first segment's power law.
    Table { t: Vec<f64>, psi: Vec<f64> },
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ControlFamily", into = "ControlFamily")]
pub struct ControlFunction {
    family: ControlFamily,
    ln_t_max: f64,
}

impl TryFrom<ControlFamily> for ControlFunction {
    type Error = Error;
    fn try_from(f: ControlFamily) -> Result<Self> {
        ControlFunction::new(f)
    }
}

impl From<ControlFunction> for ControlFamily {
    fn from(c: ControlFunction) -> Self {
        c.family
    }
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} must be positive and finite, got {v}")))
    }
}

fn ln_t_max_of(t_max: Option<f64>, default: f64) -> Result<f64> {
    match t_max {
        Some(t) => {
            if !(t > 0.0) {
                return Err(Error::InvalidParameter(format!("t_max must be positive, got {t}")));
            }
            Ok(t.ln().min(default))
        }
        None => Ok(default),
    }
}

impl ControlFunction {
    pub fn new(family: ControlFamily) -> Result<Self> {
        let ln_t_max = match &family {
            ControlFamily::Linear { c, t_max } => {
                positive("c", *c)?;
                ln_t_max_of(*t_max, f64::INFINITY)?
            }
            ControlFamily::Power { s, c, t_max } => {
                positive("s", *s)?;
                positive("c", *c)?;
                ln_t_max_of(*t_max, f64::INFINITY)?
            }
            ControlFamily::LogPower { c, beta, t_max } => {
                positive("c", *c)?;
                if !(beta.is_finite() && *beta >= 0.0) {
                    return Err(Error::InvalidParameter(format!("beta must be >= 0, got {beta}")));
                }
                // ψ' > 0 iff log(1/t) > β
                ln_t_max_of(*t_max, -(beta + 1.0))?
            }
            ControlFamily::Table { t, psi } => {
                if t.len() < 2 || t.len() != psi.len() {
                    return Err(Error::InvalidParameter("table needs >= 2 matching (t, psi) samples".into()));
                }
                if t.iter().chain(psi).any(|v| !(v.is_finite() && *v > 0.0)) {
                    return Err(Error::InvalidParameter("table entries must be positive".into()));
                }
                if t.windows(2).any(|w| w[1] <= w[0]) || psi.windows(2).any(|w| w[1] <= w[0]) {
                    return Err(Error::InvalidParameter("table must be strictly increasing".into()));
                }
                t[t.len() - 1].ln()
            }
        };
        Ok(Self { family, ln_t_max })
    }

    pub fn linear(c: f64) -> Result<Self> {
        Self::new(ControlFamily::Linear { c, t_max: None })
    }

    pub fn power(s: f64) -> Result<Self> {
        Self::new(ControlFamily::Power { s, c: 1.0, t_max: None })
    }

    pub fn log_power(c: f64, beta: f64) -> Result<Self> {
        Self::new(ControlFamily::LogPower { c, beta, t_max: None })
    }

    pub fn table(t: Vec<f64>, psi: Vec<f64>) -> Result<Self> {
        Self::new(ControlFamily::Table { t, psi })
    }

    pub fn family(&self) -> &ControlFamily {
        &self.family
    }

    pub fn t_max(&self) -> f64 {
        self.ln_t_max.exp()
    }

    /// `ψ(t_max)`, the top of the invertible range.
    pub fn range_max(&self) -> f64 {
        if self.ln_t_max == f64::INFINITY {
            f64::INFINITY
        } else {
            self.ln_eval_unchecked(self.ln_t_max).exp()
        }
    }

    fn ln_eval_unchecked(&self, u: f64) -> f64 {
        match &self.family {
            ControlFamily::Linear { c, .. } => c.ln() + u,
            ControlFamily::Power { s, c, .. } => c.ln() + s * u,
            ControlFamily::LogPower { c, beta, .. } => c.ln() + u + beta * (-u).ln(),
            ControlFamily::Table { t, psi } => {
                let n = t.len();
                let seg = t.partition_point(|&ti| ti.ln() <= u).clamp(1, n - 1);
                let (u0, u1) = (t[seg - 1].ln(), t[seg].ln());
                let (v0, v1) = (psi[seg - 1].ln(), psi[seg].ln());
                v0 + (v1 - v0) * (u - u0) / (u1 - u0)
            }
        }
    }

    /// `ln ψ(e^u)`.
    pub fn ln_eval(&self, u: f64) -> Result<f64> {
        if u.is_nan() || u > self.ln_t_max * (1.0 + 1e-15 * self.ln_t_max.signum()) + 1e-300 {
            return Err(Error::OutOfRange { value: u.exp(), max: self.t_max() });
        }
        Ok(self.ln_eval_unchecked(u.min(self.ln_t_max)))
    }

    pub fn eval(&self, t: f64) -> Result<f64> {
        if !(t > 0.0) {
            return Err(Error::OutOfRange { value: t, max: self.t_max() });
        }
        Ok(self.ln_eval(t.ln())?.exp())
    }

    /// `ln ψ⁻¹(e^v)`.
    pub fn ln_inverse(&self, v: f64) -> Result<f64> {
        let v_max = if self.ln_t_max == f64::INFINITY {
            f64::INFINITY
        } else {
            self.ln_eval_unchecked(self.ln_t_max)
        };
        if v.is_nan() || v > v_max + 1e-14 * v_max.abs().max(1.0) {
            return Err(Error::OutOfRange { value: v.exp(), max: v_max.exp() });
        }
        let v = v.min(v_max);
        match &self.family {
            ControlFamily::Linear { c, .. } => Ok(v - c.ln()),
            ControlFamily::Power { s, c, .. } => Ok((v - c.ln()) / s),
            _ => self.bisect(v),
        }
    }

    fn bisect(&self, v: f64) -> Result<f64> {
        let mut hi = self.ln_t_max;
        // a lower bracket: ψ(t) ≥ c t for the log family on its domain, and the
        // table extension is a power law
        let mut lo = (v - 1.0).min(hi - 1.0);
        let mut grow = 1.0;
        while self.ln_eval_unchecked(lo) > v {
            lo -= grow;
            grow *= 2.0;
            if !lo.is_finite() {
                return Err(Error::Unresolved("inverse bracket escaped".into()));
            }
        }
        for _ in 0..BISECTION_ITERS {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.ln_eval_unchecked(mid) < v {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let (elo, ehi) = (self.ln_eval_unchecked(lo) - v, self.ln_eval_unchecked(hi) - v);
        Ok(if elo.abs() <= ehi.abs() { lo } else { hi })
    }

    /// `ψ⁻¹(r)` for `r ∈ (0, ψ(t_max)]`.
    pub fn inverse_eval(&self, r: f64) -> Result<f64> {
        if !(r > 0.0) {
            return Err(Error::OutOfRange { value: r, max: self.range_max() });
        }
        Ok(self.ln_inverse(r.ln())?.exp())
    }

    /// Strictly increasing on `samples` log-spaced points of `[t_min, t_max]`.
    pub fn check_monotone(&self, t_min: f64, samples: usize) -> Result<()> {
        let grid = self.log_grid(t_min, samples)?;
        let vals: Vec<f64> = grid.iter().map(|&u| self.ln_eval_unchecked(u)).collect();
        if let Some(i) = vals.windows(2).position(|w| w[1] <= w[0]) {
            return Err(Error::InvalidParameter(format!("not strictly increasing near t = {:e}", grid[i].exp())));
        }
        Ok(())
    }

    fn log_grid(&self, t_min: f64, samples: usize) -> Result<Vec<f64>> {
        positive("t_min", t_min)?;
        let hi = if self.ln_t_max.is_finite() { self.ln_t_max } else { 0.0 };
        let lo = t_min.ln();
        if lo >= hi || samples < 2 {
            return Err(Error::InvalidParameter("empty sampling interval".into()));
        }
        Ok((0..samples).map(|i| lo + (hi - lo) * i as f64 / (samples - 1) as f64).collect())
    }

    /// `(min, max)` of `ψ(2t)/ψ(t)` over dyadic `t ≤ t_max / 2` down to `t_min`.
    pub fn doubling_constants(&self, t_min: f64) -> Result<(f64, f64)> {
        positive("t_min", t_min)?;
        let top = if self.ln_t_max.is_finite() { self.ln_t_max } else { 1.0 } - std::f64::consts::LN_2;
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        let mut u = top;
        while u >= t_min.ln() {
            let q = (self.ln_eval_unchecked(u + std::f64::consts::LN_2) - self.ln_eval_unchecked(u)).exp();
            lo = lo.min(q);
            hi = hi.max(q);
            u -= std::f64::consts::LN_2;
        }
        if lo > hi {
            return Err(Error::InvalidParameter("no dyadic samples in range".into()));
        }
        Ok((lo, hi))
    }

    /// `t ↦ t / φ⁻¹(t)²` is non-increasing on log-spaced samples of the range.
    pub fn satisfies_technical_condition(&self, t_min: f64, samples: usize) -> Result<bool> {
        let top = if self.ln_t_max.is_finite() { self.ln_eval_unchecked(self.ln_t_max) } else { 0.0 };
        positive("t_min", t_min)?;
        let lo = t_min.ln();
        if lo >= top || samples < 2 {
            return Err(Error::InvalidParameter("empty sampling interval".into()));
        }
        let mut prev = f64::INFINITY;
        for i in 0..samples {
            let v = lo + (top - lo) * i as f64 / (samples - 1) as f64;
            let g = v - 2.0 * self.ln_inverse(v)?;
            if g > prev + 1e-12 * prev.abs().max(1.0) {
                return Ok(false);
            }
            prev = g;
        }
        Ok(true)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LimsupVerdict {
    Bounded,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Thm51Report {
    pub r_grid: Vec<f64>,
    /// `ln q(r)` on the grid (kept in logs: `r` may underflow).
    pub ln_q: Vec<f64>,
    /// `max q` over the last three decades.
    pub limsup_estimate: f64,
    /// `q(r_end) / q(r_end · 10³)`.
    pub growth_last_3_decades: f64,
    /// Fitted `d ln q / d ln ln(1/r)` over the last three decades.
    pub log_exponent: f64,
    pub verdict: LimsupVerdict,
}

/// Exponent of `log(1/r)` above which `q` is called unbounded.
pub const LOG_EXPONENT_THRESHOLD: f64 = 0.05;

/// Limsup quantity `q(r) = r / (ψ⁻¹(ψ⁻¹(r)) log(1/r))` on a grid of
/// `ln r` values decreasing toward `-∞`, restricted to `r ≤ t0`.
///
/// The verdict is `unbounded` when `q` grows at least tenfold over the last
/// three decades or grows like a positive power of `log(1/r)` with exponent
/// above [`LOG_EXPONENT_THRESHOLD`]; otherwise `bounded`.
pub fn thm51_condition_ln(psi: &ControlFunction, ln_r_grid: &[f64], t0: f64) -> Result<Thm51Report> {
    positive("t0", t0)?;
    let grid: Vec<f64> = ln_r_grid.iter().copied().filter(|&v| v <= t0.ln()).collect();
    if grid.len() < 4 || grid.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidParameter("r grid must be strictly decreasing with >= 4 points below t0".into()));
    }
    let span = (grid[0] - grid[grid.len() - 1]) / std::f64::consts::LN_10;
    if span < 6.0 - 1e-9 || grid[grid.len() - 1] > (1e-12f64).ln() + 1e-9 {
        return Err(Error::InvalidParameter("r grid must span >= 6 decades and reach 1e-12".into()));
    }
    let ln_q = grid
        .iter()
        .map(|&v| {
            let inner = psi.ln_inverse(psi.ln_inverse(v)?)?;
            Ok(v - inner - (-v).ln())
        })
        .collect::<Result<Vec<f64>>>()?;
    let end = grid[grid.len() - 1];
    let window_start = grid.partition_point(|&v| v > end + 3.0 * std::f64::consts::LN_10);
    let window = window_start.min(grid.len() - 2);
    let xs: Vec<f64> = grid[window..].iter().map(|v| (-v).ln()).collect();
    let ys = &ln_q[window..];
    let (_, log_exponent, _) = crate::distortion::linear_fit(&xs, ys);
    let growth = (ln_q[ln_q.len() - 1] - ln_q[window]).exp();
    let limsup = ys.iter().copied().fold(f64::NEG_INFINITY, f64::max).exp();
    let verdict = if growth >= 10.0 || log_exponent > LOG_EXPONENT_THRESHOLD {
        LimsupVerdict::Unbounded
    } else {
        LimsupVerdict::Bounded
    };
    Ok(Thm51Report {
        r_grid: grid.iter().map(|v| v.exp()).collect(),
        ln_q,
        limsup_estimate: limsup,
        growth_last_3_decades: growth,
        log_exponent,
        verdict,
    })
}

/// [`thm51_condition_ln`] on a grid of plain `r` values with `t0 = 0.1`.
pub fn thm51_condition(psi: &ControlFunction, r_grid: &[f64]) -> Result<Thm51Report> {
    if r_grid.iter().any(|&r| !(r > 0.0)) {
        return Err(Error::InvalidParameter("r grid must be positive".into()));
    }
    let ln: Vec<f64> = r_grid.iter().map(|r| r.ln()).collect();
    thm51_condition_ln(psi, &ln, 0.1)
}

/// `r = 10^{-k}` for `k = from..=to`, as `ln r`.
pub fn decade_grid_ln(from: u32, to: u32) -> Vec<f64> {
    (from..=to).map(|k| -(k as f64) * std::f64::consts::LN_10).collect()
}

/// `t² / ψ⁻¹(ψ⁻¹(t²))`, the scalewise distortion bound with unit constant.
pub fn scalewise_bound_from_psi(psi: &ControlFunction, t: f64) -> Result<f64> {
    positive("t", t)?;
    let v = 2.0 * t.ln();
    Ok((v - psi.ln_inverse(psi.ln_inverse(v)?)?).exp())
}

/// Diameter and modulus bounds for two continua at distance `d`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KeyModulusBound {
    /// `ψ(ψ(d))`.
    pub diam_bound: f64,
    /// Multiplicative constant left unevaluated.
    pub constant: String,
    #[serde(skip)]
    psi: Option<ControlFunction>,
}

impl KeyModulusBound {
    /// `1 / log(1 + ψ⁻¹(ψ⁻¹(m)) / m)`, to be multiplied by `C₀⁻¹`.
    pub fn modulus_bound(&self, m: f64) -> Result<f64> {
        positive("m", m)?;
        let psi = self.psi.as_ref().ok_or_else(|| Error::Degenerate("bound detached from control".into()))?;
        let inner = psi.ln_inverse(psi.ln_inverse(m.ln())?)?;
        Ok(1.0 / (inner - m.ln()).exp().ln_1p())
    }
}

pub fn key_modulus_bound(psi: &ControlFunction, d: f64) -> Result<KeyModulusBound> {
    positive("d", d)?;
    let diam_bound = psi.eval(psi.eval(d)?)?;
    Ok(KeyModulusBound { diam_bound, constant: "×C0⁻¹".into(), psi: Some(psi.clone()) })
}

/// Smallest `C = 2^k`, `k ≤ 40`, with `C₁φ(C₂t) + C₃t ≤ φ(Ct)` on every grid
/// point. Arguments leaving the domain of `φ` count as failures.
pub fn lemma35_constant(c1: f64, c2: f64, c3: f64, phi: &ControlFunction, t_grid: &[f64]) -> Result<f64> {
    for (name, c) in [("C1", c1), ("C2", c2), ("C3", c3)] {
        if !(c >= 1.0 && c.is_finite()) {
            return Err(Error::InvalidParameter(format!("{name} must be >= 1, got {c}")));
        }
    }
    if t_grid.is_empty() || t_grid.iter().any(|&t| !(t > 0.0)) {
        return Err(Error::InvalidParameter("t grid must be non-empty and positive".into()));
    }
    let holds = |c: f64| {
        t_grid.iter().all(|&t| {
            let (Ok(lhs), Ok(rhs)) = (phi.eval(c2 * t), phi.eval(c * t)) else {
                return false;
            };
            c1 * lhs + c3 * t <= rhs * (1.0 + 1e-12)
        })
    };
    (0..=40).map(|k| 2f64.powi(k)).find(|&c| holds(c)).ok_or(Error::Unsatisfiable)
}

/// `t ↦ φ(t)^{1/(2K)}` with the leading constant left symbolic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HoelderBound {
    pub phi: ControlFunction,
    pub exponent: f64,
}

impl HoelderBound {
    pub fn eval(&self, t: f64) -> Result<f64> {
        Ok(self.phi.eval(t)?.powf(self.exponent))
    }
}

pub fn hoelder_bound(phi: &ControlFunction, k: f64) -> Result<HoelderBound> {
    if !(k >= 1.0 && k.is_finite()) {
        return Err(Error::InvalidParameter(format!("K must be >= 1, got {k}")));
    }
    Ok(HoelderBound { phi: phi.clone(), exponent: 1.0 / (2.0 * k) })
}
