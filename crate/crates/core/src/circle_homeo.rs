//! Circle homeomorphisms represented by their lifts, and the three-point
//! scalewise distortion `δ_f(θ, t)` / `ρ_f(t)`.
//!
//! A lift `h: ℝ → ℝ` satisfies `h(x + 1) = h(x) + 1`; the circle map is
//! `G(e^{2πix}) = e^{2πih(x)}`. Every model lift is stored as a shape on one
//! period plus an optional post-rotation offset `c` (the lift becomes
//! `h + c`), so the rotation family is the identity shape with an offset.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Minimum node count for tabulated lifts.
pub const MIN_TABLE_NODES: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Identity,
    Rotation,
    Power,
    LogPower,
    Table,
}

#[derive(Debug, Clone, PartialEq)]
enum Shape {
    Identity,
    /// `2^{a-1} r^a` on `[0, ½)`, `r` on `[-½, 0)`.
    Power { a: f64, scale: f64 },
    /// `r / (1 + β log(1/(2r)))` on `[0, ½)`, `r` on `[-½, 0)`.
    LogPower { beta: f64 },
    /// Values at `i / N`, `i = 0..=N`, with `v[0] = 0` and `v[N] = 1`.
    Table { values: Vec<f64> },
}

/// A sense-preserving circle homeomorphism, stored as its lift.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "HomeoSpec", into = "HomeoSpec")]
pub struct CircleHomeo {
    family: Family,
    shape: Shape,
    offset: f64,
}

/// Serialized form: `{"family": ..., "params": [...], "table": [[x, h(x)], ...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HomeoSpec {
    pub family: Family,
    #[serde(default)]
    pub params: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table: Option<Vec<[f64; 2]>>,
}

/// A breakpoint of the lift inside one period, where the integrand of the
/// extension loses smoothness. `singular` marks algebraic/log behaviour.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Breakpoint {
    pub x: f64,
    pub singular: bool,
}

impl CircleHomeo {
    pub fn identity() -> Self {
        Self { family: Family::Identity, shape: Shape::Identity, offset: 0.0 }
    }

    pub fn rotation(c: f64) -> Result<Self> {
        if !c.is_finite() {
            return Err(Error::InvalidParameter(format!("rotation offset {c}")));
        }
        Ok(Self { family: Family::Rotation, shape: Shape::Identity, offset: c })
    }

    /// Power cusp at `x = 0`: `h(x) = 2^{a-1} x^a` on `[0, ½]`, `h(x) = x` on `[½, 1]`.
    pub fn power(a: f64) -> Result<Self> {
        if !(a > 0.0 && a.is_finite()) {
            return Err(Error::InvalidParameter(format!("power exponent must be > 0, got {a}")));
        }
        let scale = 2f64.powf(a - 1.0);
        Ok(Self { family: Family::Power, shape: Shape::Power { a, scale }, offset: 0.0 })
    }

    /// Logarithmic cusp at `x = 0`, giving `ρ(t) ~ β log(1/t)`.
    pub fn log_power(beta: f64) -> Result<Self> {
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(Error::InvalidParameter(format!("log-power beta must be > 0, got {beta}")));
        }
        Ok(Self { family: Family::LogPower, shape: Shape::LogPower { beta }, offset: 0.0 })
    }

    /// Monotone piecewise-linear lift through `values[i] = h(i / N)`.
    pub fn from_table(values: Vec<f64>) -> Result<Self> {
        let n = values.len().saturating_sub(1);
        if n < MIN_TABLE_NODES {
            return Err(Error::InvalidParameter(format!(
                "table needs at least {MIN_TABLE_NODES} intervals, got {n}"
            )));
        }
        if values[0] != 0.0 || (values[n] - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter("table must satisfy h(0) = 0 and h(1) = 1".into()));
        }
        if values.iter().any(|v| !v.is_finite()) || values.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidParameter("table is not strictly increasing".into()));
        }
        let mut values = values;
        values[n] = 1.0;
        Ok(Self { family: Family::Table, shape: Shape::Table { values }, offset: 0.0 })
    }

    /// Tabulate `f` on a uniform grid of `n` intervals.
    pub fn tabulate<F: Fn(f64) -> f64>(n: usize, f: F) -> Result<Self> {
        let values = (0..=n).map(|i| if i == n { 1.0 } else { f(i as f64 / n as f64) }).collect();
        Self::from_table(values)
    }

    /// Build one of the model families.
    ///
    /// `params`: identity `[]`; rotation `[c]`; power `[a]` or `[a, c]`;
    /// log_power `[β]` or `[β, c]`; table `[h_0, ..., h_N]` on the uniform
    /// grid. The optional trailing `c` post-composes with a rotation.
    pub fn build_model(family: Family, params: &[f64]) -> Result<Self> {
        let want = |lo: usize, hi: usize| -> Result<()> {
            if params.len() < lo || params.len() > hi {
                Err(Error::InvalidParameter(format!(
                    "{family:?} expects {lo}..={hi} params, got {}",
                    params.len()
                )))
            } else {
                Ok(())
            }
        };
        match family {
            Family::Identity => {
                want(0, 0)?;
                Ok(Self::identity())
            }
            Family::Rotation => {
                want(1, 1)?;
                Self::rotation(params[0])
            }
            Family::Power => {
                want(1, 2)?;
                Ok(Self::power(params[0])?.post_rotated(params.get(1).copied().unwrap_or(0.0)))
            }
            Family::LogPower => {
                want(1, 2)?;
                Ok(Self::log_power(params[0])?.post_rotated(params.get(1).copied().unwrap_or(0.0)))
            }
            Family::Table => Self::from_table(params.to_vec()),
        }
    }

    /// `r_c ∘ f`: the lift becomes `h + c`.
    pub fn post_rotated(&self, c: f64) -> Self {
        let mut out = self.clone();
        out.offset += c;
        out
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    /// Evaluate the lift at any real `x`.
    pub fn lift(&self, x: f64) -> f64 {
        let k = (x + 0.5).floor();
        let r = x - k;
        k + self.base(r) + self.offset
    }

    /// `h(x + dx) - h(x)`, summed piece by piece so that small steps keep
    /// full relative accuracy.
    pub fn increment(&self, x: f64, dx: f64) -> f64 {
        let (a, scale, log) = match &self.shape {
            Shape::Identity => return dx,
            Shape::Table { .. } => return self.lift(x + dx) - self.lift(x),
            Shape::Power { a, scale } => (*a, *scale, false),
            Shape::LogPower { .. } => (0.0, 0.0, true),
        };
        let piece = |r: f64, s: f64| -> f64 {
            if r + 0.5 * s <= 0.0 {
                s
            } else if log {
                self.base(r + s) - self.base(r)
            } else if r == 0.0 {
                scale * s.powf(a)
            } else if r + s == 0.0 {
                -scale * r.powf(a)
            } else {
                scale * r.powf(a) * (a * (s / r).ln_1p()).exp_m1()
            }
        };
        let mut r = x - (x + 0.5).floor();
        let mut rem = dx;
        let mut acc = 0.0;
        while rem != 0.0 {
            let bp = if rem > 0.0 {
                if r < 0.0 { 0.0 } else { 0.5 }
            } else if r > 0.0 {
                0.0
            } else {
                -0.5
            };
            let room = bp - r;
            if rem.abs() <= room.abs() {
                acc += piece(r, rem);
                break;
            }
            acc += piece(r, room);
            rem -= room;
            r = if bp == 0.5 {
                -0.5
            } else if bp == -0.5 {
                0.5
            } else {
                0.0
            };
        }
        acc
    }

    /// Lift on the fundamental window `[-½, ½)`, without offset.
    fn base(&self, r: f64) -> f64 {
        match &self.shape {
            Shape::Identity => r,
            Shape::Power { a, scale } => {
                if r <= 0.0 {
                    r
                } else {
                    scale * r.powf(*a)
                }
            }
            Shape::LogPower { beta } => {
                if r <= 0.0 {
                    r
                } else {
                    r / (1.0 + beta * (0.5 / r).ln())
                }
            }
            Shape::Table { values } => {
                if r < 0.0 {
                    table_eval(values, r + 1.0) - 1.0
                } else {
                    table_eval(values, r)
                }
            }
        }
    }

    /// Smoothness breakpoints of the lift in `[0, 1)`.
    pub fn breakpoints(&self) -> Vec<Breakpoint> {
        match &self.shape {
            Shape::Identity => Vec::new(),
            Shape::Power { a, .. } => {
                let singular = a.fract() != 0.0;
                vec![Breakpoint { x: 0.0, singular }, Breakpoint { x: 0.5, singular: false }]
            }
            Shape::LogPower { .. } => {
                vec![Breakpoint { x: 0.0, singular: true }, Breakpoint { x: 0.5, singular: false }]
            }
            Shape::Table { values } => {
                let n = values.len() - 1;
                (0..n).map(|i| Breakpoint { x: i as f64 / n as f64, singular: false }).collect()
            }
        }
    }

    /// Image of the angle `theta` under the circle map, as an angle.
    pub fn apply_angle(&self, theta: f64) -> f64 {
        TAU * self.lift(theta / TAU)
    }

    /// `G(e^{iθ})` as `(re, im)`.
    pub fn apply(&self, theta: f64) -> (f64, f64) {
        let phi = self.apply_angle(theta);
        (phi.cos(), phi.sin())
    }

    /// Check the type invariants on a scan of `samples` points in `[0, 2]`.
    pub fn check_invariants(&self, samples: usize) -> Result<()> {
        let mut prev = f64::NEG_INFINITY;
        for i in 0..=samples {
            let x = 2.0 * i as f64 / samples as f64;
            let v = self.lift(x);
            if v <= prev {
                return Err(Error::InvalidParameter(format!("lift not increasing near x = {x}")));
            }
            if (self.lift(x + 1.0) - v - 1.0).abs() > 1e-12 {
                return Err(Error::InvalidParameter(format!("lift does not commute at x = {x}")));
            }
            prev = v;
        }
        Ok(())
    }

    pub fn to_spec(&self) -> HomeoSpec {
        let mut params = match &self.shape {
            Shape::Identity => Vec::new(),
            Shape::Power { a, .. } => vec![*a],
            Shape::LogPower { beta } => vec![*beta],
            Shape::Table { .. } => Vec::new(),
        };
        let table = match &self.shape {
            Shape::Table { values } => {
                let n = values.len() - 1;
                Some(values.iter().enumerate().map(|(i, &v)| [i as f64 / n as f64, v]).collect())
            }
            _ => None,
        };
        match self.family {
            Family::Rotation => params.push(self.offset),
            Family::Power | Family::LogPower if self.offset != 0.0 => params.push(self.offset),
            _ => {}
        }
        HomeoSpec { family: self.family, params, table }
    }
}

impl TryFrom<HomeoSpec> for CircleHomeo {
    type Error = Error;

    fn try_from(spec: HomeoSpec) -> Result<Self> {
        match (spec.family, spec.table) {
            (Family::Table, Some(pairs)) => {
                let n = pairs.len().saturating_sub(1);
                for (i, p) in pairs.iter().enumerate() {
                    if n == 0 || (p[0] - i as f64 / n as f64).abs() > 1e-9 {
                        return Err(Error::InvalidParameter(
                            "table abscissae must be the uniform grid i/N on [0, 1]".into(),
                        ));
                    }
                }
                Self::from_table(pairs.iter().map(|p| p[1]).collect())
            }
            (Family::Table, None) => Self::from_table(spec.params),
            (family, None) => Self::build_model(family, &spec.params),
            (family, Some(_)) => {
                Err(Error::InvalidParameter(format!("{family:?} does not take a table")))
            }
        }
    }
}

impl From<CircleHomeo> for HomeoSpec {
    fn from(h: CircleHomeo) -> Self {
        h.to_spec()
    }
}

fn table_eval(values: &[f64], x: f64) -> f64 {
    let n = values.len() - 1;
    let s = x * n as f64;
    let i = (s.floor() as isize).clamp(0, n as isize - 1) as usize;
    let w = s - i as f64;
    values[i] + w * (values[i + 1] - values[i])
}

/// Chord subtending the lift increment `du` (in turns).
#[inline]
fn chord(du: f64) -> f64 {
    2.0 * (PI * du).sin().abs()
}

/// `δ_f(θ, t)`: the larger of the two ratios of adjacent image chords around
/// `e^{iθ}` at angular scale `t`.
pub fn delta(f: &CircleHomeo, theta: f64, t: f64) -> Result<f64> {
    if !(t > 0.0 && t < FRAC_PI_2) {
        return Err(Error::ScaleOutOfRange(t));
    }
    let x = theta.rem_euclid(TAU) / TAU;
    let tau = t / TAU;
    let forward = chord(f.increment(x, tau));
    let backward = chord(f.increment(x, -tau));
    if forward == 0.0 || backward == 0.0 {
        return Err(Error::NotInjective { theta, t });
    }
    Ok((forward / backward).max(backward / forward))
}

/// `δ_h(x, t)` for the lift on the line (`x`, `t` in lift units).
pub fn delta_line(f: &CircleHomeo, x: f64, t: f64) -> Result<f64> {
    let forward = f.increment(x, t);
    let backward = -f.increment(x, -t);
    if forward <= 0.0 || backward <= 0.0 {
        return Err(Error::NotInjective { theta: TAU * x, t: TAU * t });
    }
    Ok((forward / backward).max(backward / forward))
}

/// Number of samples actually used for a sweep at scale `scale` (in the
/// same units as a full period `period`): the requested count doubled until
/// the spacing is at most `scale / 8`. Doubling keeps grids nested.
pub fn resolved_samples(requested: usize, scale: f64, period: f64) -> usize {
    let need = 8.0 * period / scale;
    let mut n = requested.max(1);
    while (n as f64) < need && n < (1 << 26) {
        n *= 2;
    }
    n
}

/// Maximise a continuous function sampled on a periodic grid of `n` points
/// over `[0, period)`, then refine by golden-section search around the best
/// grid point. Returns `(max, argmax)`.
pub(crate) fn periodic_max<F>(n: usize, period: f64, f: F) -> Result<(f64, f64)>
where
    F: Fn(f64) -> Result<f64> + Sync,
{
    let step = period / n as f64;
    let values: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|j| f(j as f64 * step))
        .collect::<Result<Vec<_>>>()?;
    let (mut best_j, mut best) = (0, values[0]);
    for (j, &v) in values.iter().enumerate() {
        if v > best {
            best = v;
            best_j = j;
        }
    }
    let center = best_j as f64 * step;
    let (refined, arg) = golden_max(center - step, center + step, 60, &f)?;
    if refined > best {
        Ok((refined, arg.rem_euclid(period)))
    } else {
        Ok((best, center))
    }
}

fn golden_max<F>(mut lo: f64, mut hi: f64, iters: usize, f: &F) -> Result<(f64, f64)>
where
    F: Fn(f64) -> Result<f64>,
{
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    for _ in 0..iters {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = f(x2)?;
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = f(x1)?;
        }
    }
    Ok(if f1 > f2 { (f1, x1) } else { (f2, x2) })
}

/// `ρ_f(t) = sup_θ δ_f(θ, t)`, approximated by a resolved θ-grid plus a
/// golden-section refinement. Returns `(ρ, argmax θ)`.
pub fn rho(f: &CircleHomeo, t: f64, theta_samples: usize) -> Result<(f64, f64)> {
    if theta_samples < 64 {
        return Err(Error::InvalidParameter(format!(
            "theta_samples must be >= 64, got {theta_samples}"
        )));
    }
    if !(t > 0.0 && t < FRAC_PI_2) {
        return Err(Error::ScaleOutOfRange(t));
    }
    let n = resolved_samples(theta_samples, t, TAU);
    let (r, arg) = periodic_max(n, TAU, |theta| delta(f, theta, t))?;
    Ok((r.max(1.0), arg))
}

/// Samples of `ρ_f` over a grid of scales.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalewiseProfile {
    pub t_grid: Vec<f64>,
    pub rho_values: Vec<f64>,
    pub theta_argmax: Vec<f64>,
}

pub fn scalewise_profile(f: &CircleHomeo, t_grid: &[f64], theta_samples: usize) -> Result<ScalewiseProfile> {
    if t_grid.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidParameter("t_grid must be strictly decreasing".into()));
    }
    let mut rho_values = Vec::with_capacity(t_grid.len());
    let mut theta_argmax = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        let (r, a) = rho(f, t, theta_samples)?;
        rho_values.push(r);
        theta_argmax.push(a);
    }
    Ok(ScalewiseProfile { t_grid: t_grid.to_vec(), rho_values, theta_argmax })
}
