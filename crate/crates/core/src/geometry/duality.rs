//! Three-point property against two-sided local connectivity.

use serde::{Deserialize, Serialize};

use super::curve::JordanCurve;
use super::envelope::{three_point_envelope, Envelope, FitFamily};
use super::raster::{lc_check_raster, LcKind, LcOptions, Raster, Side};
use crate::control::ControlFunction;
use crate::error::{Error, Result};

/// Factors tried for the LC constants, smallest first.
pub const LADDER: [f64; 7] = [1.0, 1.5, 2.0, 3.0, 4.0, 6.0, 8.0];
/// Largest constant accepted by either direction.
pub const SLACK_CEILING: f64 = 8.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DualityOptions {
    pub grid_res: usize,
    pub probe_count: usize,
    pub pair_samples: usize,
    pub seed: u64,
}

impl Default for DualityOptions {
    fn default() -> Self {
        Self { grid_res: 256, probe_count: 120, pair_samples: 4000, seed: 42 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualityReport {
    pub envelope_family: FitFamily,
    /// `sup ψ⁻¹(m) / d`: the constant `C` in `m ≤ ψ(C d)`.
    pub three_point_constant: f64,
    /// Smallest ladder `λ` with both sides `φ`-LC-1 for `φ(r) = λ ψ(C r)`.
    pub tp_to_lc_lambda: Option<f64>,
    pub tp_to_lc: bool,
    /// Smallest ladder `κ` with both sides LC-1 for `φ(r) = κ ψ(r)`.
    pub lc_kappa: Option<f64>,
    /// `sup m / (κ ψ(d))` over the sampled pairs.
    pub lc_to_tp_slack: Option<f64>,
    pub lc_to_tp: bool,
    pub slack_ceiling: f64,
}

fn min_ladder(
    curve: &JordanCurve,
    rasters: &[Raster],
    opts: &LcOptions,
    phi: &(dyn Fn(f64, f64) -> Result<f64> + Sync),
) -> Result<Option<f64>> {
    for &k in &LADDER {
        let mut ok = true;
        for raster in rasters {
            let rep = lc_check_raster(curve, raster, &|r| phi(k, r), opts)?;
            if rep.passed < rep.probes {
                ok = false;
                break;
            }
        }
        if ok {
            return Ok(Some(k));
        }
    }
    Ok(None)
}

/// Runs the envelope and LC-1 on both sides and reports each implication
/// with the constants it needed.
pub fn duality_check(curve: &JordanCurve, psi: &ControlFunction, opts: &DualityOptions) -> Result<DualityReport> {
    let env: Envelope = three_point_envelope(curve, opts.pair_samples, opts.seed)?;
    let c_tp = env
        .pairs
        .iter()
        .map(|p| Ok(psi.inverse_eval(p.m)? / p.d))
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    if !(c_tp > 0.0 && c_tp.is_finite()) {
        return Err(Error::Degenerate("three-point constant is not finite".into()));
    }
    let lc_opts = LcOptions { kind: LcKind::Lc1, grid_res: opts.grid_res, probe_count: opts.probe_count, seed: opts.seed };
    let rasters = [Raster::new(curve, Side::Interior, opts.grid_res)?, Raster::new(curve, Side::Exterior, opts.grid_res)?];
    let lambda = min_ladder(curve, &rasters, &lc_opts, &|k, r| {
        // beyond ψ's domain the three-point control is vacuous
        Ok(psi.eval(c_tp * r).map(|v| k * v).unwrap_or(f64::INFINITY))
    })?;
    let kappa = min_ladder(curve, &rasters, &lc_opts, &|k, r| Ok(psi.eval(r).map(|v| k * v).unwrap_or(f64::INFINITY)))?;
    let slack = match kappa {
        Some(k) => Some(
            env.pairs
                .iter()
                .map(|p| Ok(p.m / (k * psi.eval(p.d)?)))
                .collect::<Result<Vec<f64>>>()?
                .into_iter()
                .fold(0.0, f64::max),
        ),
        None => None,
    };
    Ok(DualityReport {
        envelope_family: env.family,
        three_point_constant: c_tp,
        tp_to_lc_lambda: lambda,
        tp_to_lc: lambda.is_some_and(|l| l <= SLACK_CEILING),
        lc_kappa: kappa,
        lc_to_tp_slack: slack,
        lc_to_tp: slack.is_some_and(|s| s <= SLACK_CEILING),
        slack_ceiling: SLACK_CEILING,
    })
}
