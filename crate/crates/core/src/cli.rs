//! Command-line experiment runner.
//!
//! Every command reads an optional JSON config (unknown keys are rejected),
//! applies flag overrides, and writes JSON reports with sorted keys plus CSV
//! tables into the output directory. Reports embed the resolved config.

use std::f64::consts::{E, TAU};
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::circle_homeo::{CircleHomeo, HomeoSpec};
use crate::control::{decade_grid_ln, thm51_condition_ln, ControlFamily, ControlFunction, LimsupVerdict};
use crate::distortion::{
    classify_from_rho, dyadic_radii, fit_growth_model, fit_radial_exponent, integrability_report, p_sup_from_three_point,
    radial_profile, welding_exponent_from_three_point, Context, GrowthModel, RhoModel,
};
use crate::error::{Error, Result};
use crate::geometry::{
    duality_check, make_domain, three_point_envelope, DomainFamily, DualityOptions, Envelope, JordanCurve, Point,
};
use crate::modulus::{continua_modulus_bounds, lemma36_check, ring_modulus, RingProblem};
use crate::welding::{extend_welding, identity_radius, verify_scalewise_bound};

#[derive(Debug, Parser)]
#[command(name = "welding", version, about = "Conformal welding and boundary geometry experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// JSON config file; defaults apply when omitted.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    pub out: PathBuf,
    #[arg(long, global = true, default_value_t = 42)]
    pub seed: u64,
    /// Grid resolution override.
    #[arg(long, global = true)]
    pub grid: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Extend a welding to the plane and measure its distortion.
    Extend,
    /// Classify a three-point control function.
    Classify,
    /// Three-point envelope and LC duality of a curve.
    Boundary,
    /// Numerical moduli of ring domains, continua and quadrilaterals.
    Modulus,
    /// Reproduction tables.
    Report,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExtendConfig {
    pub welding: HomeoSpec,
    /// Field dump is `grid × grid` samples over `[-extent, extent]²`.
    pub grid: usize,
    pub extent: f64,
    /// Shells at `r = 1 + 2^{-k}`.
    pub shell_k_from: i32,
    pub shell_k_to: i32,
    pub theta_samples: usize,
    /// Also integrate `K^p` at `p = 0.9/α, 1.1/α`.
    pub integrability: bool,
}

impl Default for ExtendConfig {
    fn default() -> Self {
        Self {
            welding: HomeoSpec { family: crate::circle_homeo::Family::Power, params: vec![2.0], table: None },
            grid: 64,
            extent: 2.0,
            shell_k_from: 3,
            shell_k_to: 10,
            theta_samples: 1024,
            integrability: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ClassifyConfig {
    pub psi: ControlFamily,
    /// The condition is evaluated on `r = 10^{-1} … 10^{-decades}`.
    pub decades: u32,
    pub t0: f64,
}

impl Default for ClassifyConfig {
    fn default() -> Self {
        Self { psi: ControlFamily::LogPower { c: 1.0, beta: 0.5, t_max: None }, decades: 300, t0: 0.1 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BoundaryConfig {
    pub domain: DomainFamily,
    /// Vertex CSV; overrides `domain`.
    pub curve_csv: Option<PathBuf>,
    pub vertices: usize,
    pub pair_samples: usize,
    /// Control for the duality check; the fitted envelope when absent.
    pub psi: Option<ControlFamily>,
    pub grid_res: usize,
    pub probe_count: usize,
    pub duality_pair_samples: usize,
}

impl Default for BoundaryConfig {
    fn default() -> Self {
        let d = DualityOptions::default();
        Self {
            domain: DomainFamily::Disk,
            curve_csv: None,
            vertices: 1024,
            pair_samples: 10_000,
            psi: None,
            grid_res: d.grid_res,
            probe_count: d.probe_count,
            duality_pair_samples: d.pair_samples,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "problem", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModulusConfig {
    /// Concentric circles of radii `r < big_r`.
    Annulus {
        r: f64,
        big_r: f64,
        #[serde(default = "default_vertices")]
        vertices: usize,
        #[serde(default = "default_modulus_grid")]
        grid: usize,
    },
    /// Nested curves from vertex CSV files.
    Ring {
        inner_csv: PathBuf,
        outer_csv: PathBuf,
        #[serde(default = "default_modulus_grid")]
        grid: usize,
    },
    /// Concentric axis-aligned squares of half-sides `inner < outer`.
    Squares {
        inner: f64,
        outer: f64,
        #[serde(default = "default_modulus_grid")]
        grid: usize,
    },
    /// Polylines `e`, `f` inside the ball `B(center, radius)`.
    Continua {
        e: Vec<Point>,
        f: Vec<Point>,
        center: Point,
        radius: f64,
        #[serde(default = "default_modulus_grid")]
        grid: usize,
    },
    /// Two vertex arcs of a zoo domain; `psi` defaults to the fitted envelope.
    Quadrilateral {
        domain: DomainFamily,
        #[serde(default = "default_vertices")]
        vertices: usize,
        alpha1: (usize, usize),
        alpha2: (usize, usize),
        #[serde(default)]
        psi: Option<ControlFamily>,
        #[serde(default = "default_pairs")]
        pair_samples: usize,
        #[serde(default = "default_modulus_grid")]
        grid: usize,
    },
}

fn default_vertices() -> usize {
    1024
}
fn default_modulus_grid() -> usize {
    512
}
fn default_pairs() -> usize {
    10_000
}

impl Default for ModulusConfig {
    fn default() -> Self {
        ModulusConfig::Annulus { r: 1.0, big_r: E, vertices: default_vertices(), grid: default_modulus_grid() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ReportConfig {
    pub power_lifts: Vec<f64>,
    pub shell_k_from: i32,
    pub shell_k_to: i32,
    pub annuli_k_from: i32,
    pub annuli_k_to: i32,
    pub theta_samples: usize,
    pub annulus_theta_samples: usize,
    pub log_power_betas: Vec<f64>,
    pub decades: u32,
    /// `(r, R)` pairs for the annulus table.
    pub rings: Vec<[f64; 2]>,
    pub modulus_grid: usize,
    pub pair_samples: usize,
    pub cusp_s: f64,
    pub duality_grid: usize,
}

impl Default for ReportConfig {
    fn default() -> Self {
        Self {
            power_lifts: vec![1.5, 2.0, 3.0],
            shell_k_from: 3,
            shell_k_to: 10,
            annuli_k_from: 3,
            annuli_k_to: 11,
            theta_samples: 1024,
            annulus_theta_samples: 256,
            log_power_betas: vec![0.0, 0.5, 1.1],
            decades: 300,
            rings: vec![[1.0, E], [1.0, 2.0], [0.3, 2.0]],
            modulus_grid: 512,
            pair_samples: 10_000,
            cusp_s: 0.5,
            duality_grid: 256,
        }
    }
}

fn load<T: DeserializeOwned + Default>(path: Option<&Path>) -> Result<T> {
    match path {
        None => Ok(T::default()),
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|e| Error::Io(format!("{}: {e}", p.display())))?;
            serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", p.display())))
        }
    }
}

/// Pretty JSON with sorted keys and a trailing newline.
pub fn to_sorted_json<T: Serialize>(value: &T) -> Result<String> {
    let v: Value = serde_json::to_value(value).map_err(|e| Error::Config(e.to_string()))?;
    let mut s = serde_json::to_string_pretty(&v).map_err(|e| Error::Config(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

fn write(dir: &Path, name: &str, text: &str) -> Result<PathBuf> {
    fs::create_dir_all(dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
    let path = dir.join(name);
    fs::write(&path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    Ok(path)
}

fn csv<const N: usize>(header: [&str; N], rows: impl IntoIterator<Item = [f64; N]>) -> String {
    let mut s = header.join(",");
    s.push('\n');
    for row in rows {
        let cells: Vec<String> = row.iter().map(|v| format!("{v:e}")).collect();
        s.push_str(&cells.join(","));
        s.push('\n');
    }
    s
}

/// Runs a parsed command line; returns the written files.
pub fn run(cli: &Cli) -> Result<Vec<PathBuf>> {
    let cfg = cli.config.as_deref();
    match cli.command {
        Command::Extend => {
            let mut c: ExtendConfig = load(cfg)?;
            if let Some(g) = cli.grid {
                c.grid = g;
            }
            cmd_extend(&c, &cli.out)
        }
        Command::Classify => cmd_classify(&load(cfg)?, &cli.out),
        Command::Boundary => {
            let mut c: BoundaryConfig = load(cfg)?;
            if let Some(g) = cli.grid {
                c.grid_res = g;
            }
            cmd_boundary(&c, cli.seed, &cli.out)
        }
        Command::Modulus => {
            let mut c: ModulusConfig = load(cfg)?;
            if let Some(g) = cli.grid {
                match &mut c {
                    ModulusConfig::Annulus { grid, .. }
                    | ModulusConfig::Ring { grid, .. }
                    | ModulusConfig::Squares { grid, .. }
                    | ModulusConfig::Continua { grid, .. }
                    | ModulusConfig::Quadrilateral { grid, .. } => *grid = g,
                }
            }
            cmd_modulus(&c, cli.seed, &cli.out)
        }
        Command::Report => {
            let mut c: ReportConfig = load(cfg)?;
            if let Some(g) = cli.grid {
                c.modulus_grid = g;
            }
            cmd_report(&c, cli.seed, &cli.out)
        }
    }
}

fn rho_model(model: &GrowthModel) -> RhoModel {
    match *model {
        GrowthModel::LogLaw { .. } => RhoModel::LogLaw,
        GrowthModel::PowerLaw { alpha } => RhoModel::PowerLaw { alpha },
    }
}

pub fn cmd_extend(c: &ExtendConfig, out: &Path) -> Result<Vec<PathBuf>> {
    let welding = CircleHomeo::try_from(c.welding.clone())?;
    let field = extend_welding(&welding)?;
    let samples = field.field_grid(c.grid, c.extent)?;
    let finite_k = samples.iter().map(|s| s.k).filter(|k| k.is_finite());
    let k_max = finite_k.clone().fold(f64::NEG_INFINITY, f64::max);
    let k_min = finite_k.fold(f64::INFINITY, f64::min);
    let displacement = samples.iter().map(|s| (s.g_re - s.re).hypot(s.g_im - s.im)).fold(0.0, f64::max);

    let radii = dyadic_radii(c.shell_k_from, c.shell_k_to);
    let profile = radial_profile(&field, &radii, c.theta_samples)?;
    let fit = fit_radial_exponent(&profile)?;
    let (model, model_residual) = fit_growth_model(&profile)?;
    let model = if fit.bounded { GrowthModel::PowerLaw { alpha: 0.0 } } else { model };
    let classification = classify_from_rho(rho_model(&model), Context::Welding);
    let bound = verify_scalewise_bound(&field, &radii, c.theta_samples)?;

    let integrability = if c.integrability && fit.alpha > 0.0 {
        let annuli: Vec<f64> = (c.shell_k_from..=c.shell_k_to + 1).map(|k| 2f64.powi(-k)).collect();
        let p = [0.9 / fit.alpha, 1.1 / fit.alpha];
        Some(integrability_report(&field, &p, &[], &annuli, c.theta_samples.min(256))?)
    } else {
        None
    };

    let report = json!({
        "config": c,
        "identity_radius": identity_radius(),
        "field": {"grid": c.grid, "extent": c.extent, "k_max": k_max, "k_min": k_min, "max_displacement": displacement},
        "exponent_fit": fit,
        "growth_model": model,
        "growth_model_residual": model_residual,
        "classification": classification,
        "classification_label": classification.label(),
        "scalewise_bound": bound,
        "integrability": integrability,
    });
    Ok(vec![
        write(out, "extend.json", &to_sorted_json(&report)?)?,
        write(out, "field.csv", &csv(["re", "im", "g_re", "g_im", "K"], samples.iter().map(|s| [s.re, s.im, s.g_re, s.g_im, s.k])))?,
        write(out, "profile.csv", &profile.to_csv())?,
    ])
}

/// Verdict and p-range for a three-point control.
pub fn classify_value(c: &ClassifyConfig) -> Result<Value> {
    let psi = ControlFunction::new(c.psi.clone())?;
    let thm = thm51_condition_ln(&psi, &decade_grid_ln(1, c.decades), c.t0)?;
    let (verdict, p_range, welding_exponent) = match *psi.family() {
        ControlFamily::Linear { .. } => ("quasidisk (bounded distortion)".to_string(), None, Some(0.0)),
        ControlFamily::Power { s, .. } if s < 1.0 => (
            format!("p-integrable distortion for p < {}", p_sup_from_three_point(s)),
            Some([0.0, p_sup_from_three_point(s)]),
            Some(welding_exponent_from_three_point(s)),
        ),
        _ => match thm.verdict {
            LimsupVerdict::Bounded => ("generalized quasidisk (exp-integrable)".to_string(), None, None),
            LimsupVerdict::Unbounded => ("condition fails".to_string(), None, None),
        },
    };
    Ok(json!({
        "config": c,
        "thm51": {
            "verdict": thm.verdict,
            "log_exponent": thm.log_exponent,
            "growth_last_3_decades": thm.growth_last_3_decades,
            "limsup_estimate": thm.limsup_estimate,
            "ln_q_last": thm.ln_q.last(),
        },
        "verdict": verdict,
        "p_range": p_range,
        "welding_exponent": welding_exponent,
    }))
}

pub fn cmd_classify(c: &ClassifyConfig, out: &Path) -> Result<Vec<PathBuf>> {
    Ok(vec![write(out, "classify.json", &to_sorted_json(&classify_value(c)?)?)?])
}

fn envelope_summary(env: &Envelope) -> Value {
    json!({
        "family": env.family,
        "control": env.control,
        "fits": env.fits,
        "bins": env.bins,
        "max_ratio": env.max_ratio,
        "curve_diameter": env.curve_diameter,
        "pairs": env.pairs.len(),
    })
}

pub fn cmd_boundary(c: &BoundaryConfig, seed: u64, out: &Path) -> Result<Vec<PathBuf>> {
    let curve = match &c.curve_csv {
        Some(p) => JordanCurve::from_csv(&fs::read_to_string(p).map_err(|e| Error::Io(format!("{}: {e}", p.display())))?)?,
        None => make_domain(c.domain, c.vertices)?,
    };
    let env = three_point_envelope(&curve, c.pair_samples, seed)?;
    let psi = match &c.psi {
        Some(f) => ControlFunction::new(f.clone())?,
        None => env.control.clone(),
    };
    let opts = DualityOptions {
        grid_res: c.grid_res,
        probe_count: c.probe_count,
        pair_samples: c.duality_pair_samples,
        seed,
    };
    let duality = duality_check(&curve, &psi, &opts)?;
    let report = json!({
        "config": c,
        "seed": seed,
        "curve": {"vertices": curve.len(), "diameter": curve.diameter(), "perimeter": curve.perimeter(), "area": curve.area()},
        "envelope": envelope_summary(&env),
        "psi": psi,
        "duality": duality,
    });
    Ok(vec![
        write(out, "boundary.json", &to_sorted_json(&report)?)?,
        write(out, "envelope.csv", &csv(["d", "m"], env.pairs.iter().map(|p| [p.d, p.m])))?,
        write(out, "curve.csv", &curve.to_csv())?,
    ])
}

fn read_curve(p: &Path) -> Result<JordanCurve> {
    JordanCurve::from_csv(&fs::read_to_string(p).map_err(|e| Error::Io(format!("{}: {e}", p.display())))?)
}

fn square(half: f64) -> Result<JordanCurve> {
    JordanCurve::new(vec![[-half, -half], [half, -half], [half, half], [-half, half]])
}

pub fn modulus_value(c: &ModulusConfig, seed: u64) -> Result<Value> {
    let result = match c {
        ModulusConfig::Annulus { r, big_r, vertices, grid } => {
            let m = ring_modulus(&RingProblem::circles(*r, *big_r, [0.0, 0.0], *vertices, *grid)?)?;
            json!({"result": m, "closed_form_separating": (big_r / r).ln() / TAU})
        }
        ModulusConfig::Ring { inner_csv, outer_csv, grid } => {
            json!({"result": ring_modulus(&RingProblem::new(read_curve(inner_csv)?, read_curve(outer_csv)?, *grid)?)?})
        }
        ModulusConfig::Squares { inner, outer, grid } => {
            json!({"result": ring_modulus(&RingProblem::new(square(*inner)?, square(*outer)?, *grid)?)?})
        }
        ModulusConfig::Continua { e, f, center, radius, grid } => {
            json!({"result": continua_modulus_bounds(e, f, *center, *radius, *grid)?})
        }
        ModulusConfig::Quadrilateral { domain, vertices, alpha1, alpha2, psi, pair_samples, grid } => {
            let curve = make_domain(*domain, *vertices)?;
            let psi = match psi {
                Some(f) => ControlFunction::new(f.clone())?,
                None => three_point_envelope(&curve, *pair_samples, seed)?.control,
            };
            json!({"result": lemma36_check(&curve, *alpha1, *alpha2, &psi, *grid)?, "psi": psi})
        }
    };
    Ok(json!({"config": c, "seed": seed, "modulus": result}))
}

pub fn cmd_modulus(c: &ModulusConfig, seed: u64, out: &Path) -> Result<Vec<PathBuf>> {
    Ok(vec![write(out, "modulus.json", &to_sorted_json(&modulus_value(c, seed)?)?)?])
}

pub fn cmd_report(c: &ReportConfig, seed: u64, out: &Path) -> Result<Vec<PathBuf>> {
    let mut files = Vec::new();

    let mut lifts = Vec::new();
    let mut lift_rows = Vec::new();
    for &a in &c.power_lifts {
        let field = extend_welding(&CircleHomeo::power(a)?)?;
        let radii = dyadic_radii(c.shell_k_from, c.shell_k_to);
        let bound = verify_scalewise_bound(&field, &radii, c.theta_samples)?;
        let annuli: Vec<f64> = (c.annuli_k_from..=c.annuli_k_to).map(|k| 2f64.powi(-k)).collect();
        let radii_fit: Vec<f64> = annuli.iter().map(|e| 1.0 + e).collect();
        let fit = fit_radial_exponent(&radial_profile(&field, &radii_fit, c.theta_samples)?)?;
        let integ = integrability_report(&field, &[0.9 / fit.alpha, 1.1 / fit.alpha], &[], &annuli, c.annulus_theta_samples)?;
        lift_rows.push([a, fit.alpha, bound.variation, integ.p_trends[0].envelope_slope, integ.p_trends[1].envelope_slope]);
        lifts.push(json!({
            "a": a,
            "expected_alpha": a - 1.0,
            "alpha": fit.alpha,
            "scalewise_variation": bound.variation,
            "trend_low_p": integ.p_trends[0],
            "trend_high_p": integ.p_trends[1],
        }));
    }
    files.push(write(out, "lifts.csv", &csv(["a", "alpha", "scalewise_variation", "slope_low_p", "slope_high_p"], lift_rows))?);

    let mut classify = Vec::new();
    for &beta in &c.log_power_betas {
        classify.push(classify_value(&ClassifyConfig {
            psi: ControlFamily::LogPower { c: 1.0, beta, t_max: None },
            decades: c.decades,
            t0: 0.1,
        })?);
    }

    let mut rings = Vec::new();
    let mut ring_rows = Vec::new();
    for &[r, big_r] in &c.rings {
        let m = ring_modulus(&RingProblem::circles(r, big_r, [0.0, 0.0], 2048, c.modulus_grid)?)?;
        let want = (big_r / r).ln() / TAU;
        ring_rows.push([r, big_r, m.modulus_separating, m.reciprocal_connecting, want, m.duality_product]);
        rings.push(json!({"r": r, "big_r": big_r, "closed_form_separating": want, "result": m}));
    }
    files.push(write(
        out,
        "rings.csv",
        &csv(["r", "big_r", "separating", "reciprocal_connecting", "closed_form", "duality_product"], ring_rows),
    )?);

    let disk = make_domain(DomainFamily::Disk, 1024)?;
    let cusp = make_domain(DomainFamily::InteriorCusp { s: c.cusp_s }, 1024)?;
    let square_curve = make_domain(DomainFamily::Square, 1024)?;
    let disk_env = three_point_envelope(&disk, c.pair_samples, seed)?;
    let cusp_env = three_point_envelope(&cusp, c.pair_samples, seed)?;
    let opts = DualityOptions { grid_res: c.duality_grid, seed, ..DualityOptions::default() };
    let linear = ControlFunction::linear(1.0)?;
    let duality = json!({
        "disk": duality_check(&disk, &linear, &opts)?,
        "square": duality_check(&square_curve, &linear, &opts)?,
    });

    let report = json!({
        "config": c,
        "seed": seed,
        "power_lifts": lifts,
        "log_power_classification": classify,
        "rings": rings,
        "envelopes": {"disk": envelope_summary(&disk_env), "interior_cusp": envelope_summary(&cusp_env)},
        "duality": duality,
    });
    files.insert(0, write(out, "report.json", &to_sorted_json(&report)?)?);
    Ok(files)
}

/// Binary entry point; returns the process exit code.
pub fn main() -> i32 {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(files) => {
            for f in files {
                println!("{}", f.display());
            }
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}
