//! Rasterized sides of a curve: local connectivity probes and internal distance.

use std::collections::VecDeque;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::curve::{dist, JordanCurve, Point};
use crate::control::ControlFunction;
use crate::error::{Error, Result};

/// Smallest accepted grid resolution.
pub const MIN_GRID: usize = 32;
/// Probe radii are at least this many cells.
pub const MIN_PROBE_CELLS: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Interior,
    Exterior,
}

/// Cell-center membership mask of one side of a curve.
#[derive(Debug, Clone)]
pub struct Raster {
    pub nx: usize,
    pub ny: usize,
    pub origin: Point,
    pub h: f64,
    pub side: Side,
    mask: Vec<bool>,
}

impl Raster {
    /// `res` cells across the larger extent of the box. The exterior box
    /// is padded by half the curve's extent on every side.
    pub fn new(curve: &JordanCurve, side: Side, res: usize) -> Result<Self> {
        if res < MIN_GRID {
            return Err(Error::InvalidParameter(format!("grid resolution {res} < {MIN_GRID}")));
        }
        let (lo, hi) = curve.bbox();
        let ext = (hi[0] - lo[0]).max(hi[1] - lo[1]);
        let pad = match side {
            Side::Interior => 0.02 * ext,
            Side::Exterior => 0.5 * ext,
        };
        let origin = [lo[0] - pad, lo[1] - pad];
        let h = (ext + 2.0 * pad) / res as f64;
        let nx = (((hi[0] - lo[0]) + 2.0 * pad) / h).ceil() as usize;
        let ny = (((hi[1] - lo[1]) + 2.0 * pad) / h).ceil() as usize;
        let mut mask = interior_mask(curve, origin, h, nx, ny);
        if side == Side::Exterior {
            mask.iter_mut().for_each(|c| *c = !*c);
        }
        Ok(Self { nx, ny, origin, h, side, mask })
    }

    pub fn center(&self, ix: usize, iy: usize) -> Point {
        [self.origin[0] + (ix as f64 + 0.5) * self.h, self.origin[1] + (iy as f64 + 0.5) * self.h]
    }

    pub fn cell_of(&self, p: Point) -> Option<(usize, usize)> {
        let fx = (p[0] - self.origin[0]) / self.h;
        let fy = (p[1] - self.origin[1]) / self.h;
        if fx < 0.0 || fy < 0.0 || fx >= self.nx as f64 || fy >= self.ny as f64 {
            return None;
        }
        Some((fx as usize, fy as usize))
    }

    pub fn get(&self, ix: usize, iy: usize) -> bool {
        self.mask[iy * self.nx + ix]
    }

    pub fn count(&self) -> usize {
        self.mask.iter().filter(|&&b| b).count()
    }

    /// Cell and its 8 neighbours are all on the side.
    fn interior_cell(&self, ix: usize, iy: usize) -> bool {
        if ix == 0 || iy == 0 || ix + 1 >= self.nx || iy + 1 >= self.ny {
            return false;
        }
        (iy - 1..=iy + 1).all(|y| (ix - 1..=ix + 1).all(|x| self.get(x, y)))
    }

    /// Component labels of `allowed` cells inside the index window, 8-connected.
    fn label(&self, win: Window, allowed: &dyn Fn(usize, usize) -> bool) -> (Vec<u32>, u32) {
        let (w, hgt) = (win.x1 - win.x0, win.y1 - win.y0);
        let mut labels = vec![0u32; w * hgt];
        let mut next = 0u32;
        let mut queue = VecDeque::new();
        for sy in 0..hgt {
            for sx in 0..w {
                if labels[sy * w + sx] != 0 || !allowed(win.x0 + sx, win.y0 + sy) {
                    continue;
                }
                next += 1;
                labels[sy * w + sx] = next;
                queue.push_back((sx, sy));
                while let Some((x, y)) = queue.pop_front() {
                    for dy in -1i64..=1 {
                        for dx in -1i64..=1 {
                            let (nx, ny) = (x as i64 + dx, y as i64 + dy);
                            if nx < 0 || ny < 0 || nx >= w as i64 || ny >= hgt as i64 {
                                continue;
                            }
                            let (nx, ny) = (nx as usize, ny as usize);
                            if labels[ny * w + nx] == 0 && allowed(win.x0 + nx, win.y0 + ny) {
                                labels[ny * w + nx] = next;
                                queue.push_back((nx, ny));
                            }
                        }
                    }
                }
            }
        }
        (labels, next)
    }

    fn full(&self) -> Window {
        Window { x0: 0, x1: self.nx, y0: 0, y1: self.ny }
    }

    /// Cells overlapping the disk `B(c, r)`.
    fn window_around(&self, c: Point, r: f64) -> Window {
        let clampi = |v: f64, n: usize| (v.floor().max(0.0) as usize).min(n);
        Window {
            x0: clampi((c[0] - r - self.origin[0]) / self.h, self.nx),
            x1: clampi((c[0] + r - self.origin[0]) / self.h + 1.0, self.nx),
            y0: clampi((c[1] - r - self.origin[1]) / self.h, self.ny),
            y1: clampi((c[1] + r - self.origin[1]) / self.h + 1.0, self.ny),
        }
    }
}

/// Cell-center interior mask of `curve` on an `nx × ny` grid, row-major.
pub fn interior_mask(curve: &JordanCurve, origin: Point, h: f64, nx: usize, ny: usize) -> Vec<bool> {
    let mut mask = vec![false; nx * ny];
    let n = curve.len();
    let v = curve.vertices();
    mask.par_chunks_mut(nx).enumerate().for_each(|(iy, row)| {
        let y = origin[1] + (iy as f64 + 0.5) * h;
        let mut xs: Vec<f64> = Vec::new();
        for i in 0..n {
            let (a, b) = (v[i], v[(i + 1) % n]);
            if (a[1] > y) != (b[1] > y) {
                xs.push(a[0] + (y - a[1]) * (b[0] - a[0]) / (b[1] - a[1]));
            }
        }
        xs.sort_by(f64::total_cmp);
        for pair in xs.chunks(2) {
            if pair.len() < 2 {
                continue;
            }
            let i0 = ((pair[0] - origin[0]) / h - 0.5).ceil().max(0.0) as usize;
            let i1 = (((pair[1] - origin[0]) / h - 0.5).ceil().max(0.0) as usize).min(nx);
            for c in row.iter_mut().take(i1).skip(i0.min(i1)) {
                *c = true;
            }
        }
    });
    mask
}

#[derive(Debug, Clone, Copy)]
struct Window {
    x0: usize,
    x1: usize,
    y0: usize,
    y1: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LcKind {
    /// Points of `B(x, r)` joined inside `B(x, φ(r))`.
    Lc1,
    /// Points outside `B(x, φ(r))` joined outside `B(x, r)`.
    Lc2,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LcProbe {
    pub center: Point,
    pub r: f64,
    pub phi_r: f64,
    /// Number of components the probed points fall into.
    pub components: usize,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LcReport {
    pub side: Side,
    pub kind: LcKind,
    pub grid: usize,
    pub cell: f64,
    pub probes: usize,
    pub passed: usize,
    pub pass_fraction: f64,
    /// Failing probe with the most components (largest `r` on ties), or the
    /// largest passing probe when none fail.
    pub worst: Option<LcProbe>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LcOptions {
    pub kind: LcKind,
    pub grid_res: usize,
    pub probe_count: usize,
    pub seed: u64,
}

impl Default for LcOptions {
    fn default() -> Self {
        Self { kind: LcKind::Lc1, grid_res: 256, probe_count: 200, seed: 42 }
    }
}

/// Probe centers and radii: half near tagged features, half uniform in
/// arc length, radii log-uniform in `[4h, diam/4]`.
pub fn probe_set(curve: &JordanCurve, h: f64, count: usize, seed: u64) -> Result<Vec<(Point, f64)>> {
    let diam = curve.diameter();
    let (r_lo, r_hi) = (MIN_PROBE_CELLS * h, diam / 4.0);
    if r_lo >= r_hi {
        return Err(Error::Unresolved(format!("grid cell {h:e} too coarse for curve of diameter {diam:e}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = curve.len();
    let features = curve.features();
    let max_off = (n / 4).max(2) as f64;
    Ok((0..count)
        .map(|k| {
            let idx = if k % 2 == 0 && !features.is_empty() {
                let f = features[rng.gen_range(0..features.len())];
                let off = max_off.powf(rng.gen::<f64>()).floor() as usize;
                if rng.gen_bool(0.5) {
                    (f + off) % n
                } else {
                    (f + n - off % n) % n
                }
            } else {
                curve.vertex_at_fraction(rng.gen::<f64>())
            };
            let r = r_lo * (r_hi / r_lo).powf(rng.gen::<f64>());
            (curve.vertices()[idx], r)
        })
        .collect())
}

fn probe(raster: &Raster, kind: LcKind, center: Point, r: f64, phi_r: f64) -> LcProbe {
    let inside = |x: usize, y: usize, rad: f64| dist(raster.center(x, y), center) < rad;
    let (win, allowed, probed): (Window, Box<dyn Fn(usize, usize) -> bool + '_>, Box<dyn Fn(usize, usize) -> bool + '_>) =
        match kind {
            LcKind::Lc1 => (
                raster.window_around(center, phi_r),
                Box::new(move |x, y| raster.get(x, y) && inside(x, y, phi_r)),
                Box::new(move |x, y| raster.interior_cell(x, y) && inside(x, y, r)),
            ),
            LcKind::Lc2 => (
                raster.full(),
                Box::new(move |x, y| raster.get(x, y) && !inside(x, y, r)),
                Box::new(move |x, y| raster.interior_cell(x, y) && !inside(x, y, phi_r)),
            ),
        };
    let (labels, _) = raster.label(win, &*allowed);
    let w = win.x1 - win.x0;
    let mut seen: Vec<u32> = Vec::new();
    for y in win.y0..win.y1 {
        for x in win.x0..win.x1 {
            if probed(x, y) {
                let l = labels[(y - win.y0) * w + (x - win.x0)];
                if !seen.contains(&l) {
                    seen.push(l);
                }
            }
        }
    }
    LcProbe { center, r, phi_r, components: seen.len(), passed: seen.len() <= 1 }
}

/// Local-connectivity probes on one side of `curve` with control `φ`.
pub fn lc_check(curve: &JordanCurve, side: Side, phi: &ControlFunction, opts: &LcOptions) -> Result<LcReport> {
    lc_check_with(curve, side, &|r| phi.eval(r), opts)
}

/// [`lc_check`] for an arbitrary radius map `r ↦ φ(r)`; `φ(r) < r` is lifted to `r`.
pub fn lc_check_with(
    curve: &JordanCurve,
    side: Side,
    phi: &(dyn Fn(f64) -> Result<f64> + Sync),
    opts: &LcOptions,
) -> Result<LcReport> {
    let raster = Raster::new(curve, side, opts.grid_res)?;
    lc_check_raster(curve, &raster, phi, opts)
}

pub(crate) fn lc_check_raster(
    curve: &JordanCurve,
    raster: &Raster,
    phi: &(dyn Fn(f64) -> Result<f64> + Sync),
    opts: &LcOptions,
) -> Result<LcReport> {
    if opts.probe_count == 0 {
        return Err(Error::InvalidParameter("probe_count must be positive".into()));
    }
    let probes = probe_set(curve, raster.h, opts.probe_count, opts.seed)?;
    let results: Vec<LcProbe> = probes
        .par_iter()
        .map(|&(c, r)| Ok(probe(raster, opts.kind, c, r, phi(r)?.max(r))))
        .collect::<Result<Vec<_>>>()?;
    let passed = results.iter().filter(|p| p.passed).count();
    let worst = results
        .iter()
        .filter(|p| !p.passed)
        .max_by(|a, b| a.components.cmp(&b.components).then(a.r.total_cmp(&b.r)))
        .or_else(|| results.iter().max_by(|a, b| a.r.total_cmp(&b.r)))
        .copied();
    Ok(LcReport {
        side: raster.side,
        kind: opts.kind,
        grid: opts.grid_res,
        cell: raster.h,
        probes: results.len(),
        passed,
        pass_fraction: passed as f64 / results.len() as f64,
        worst,
    })
}

/// Infimal diameter of grid paths joining `a` and `b` on one side, found by
/// bisection on `D`: a path exists whose bounding box has diagonal `≤ D`.
pub fn internal_distance(curve: &JordanCurve, side: Side, a: Point, b: Point, grid_res: usize) -> Result<f64> {
    let raster = Raster::new(curve, side, grid_res)?;
    let on_side = |p: Point| raster.cell_of(p).is_some_and(|(x, y)| raster.get(x, y));
    let wanted = match side {
        Side::Interior => curve.contains(a) && curve.contains(b),
        Side::Exterior => !curve.contains(a) && !curve.contains(b),
    };
    if !wanted || !on_side(a) || !on_side(b) {
        return Err(Error::InvalidParameter("endpoints must lie strictly inside the chosen side".into()));
    }
    let (ca, cb) = (raster.cell_of(a).unwrap(), raster.cell_of(b).unwrap());
    let (labels, _) = raster.label(raster.full(), &|x, y| raster.get(x, y));
    if labels[ca.1 * raster.nx + ca.0] != labels[cb.1 * raster.nx + cb.0] {
        return Err(Error::Disconnected);
    }
    let euclid = dist(a, b);
    let box_diag = (raster.nx as f64).hypot(raster.ny as f64) * raster.h;
    let (mut lo, mut hi) = (euclid, box_diag.max(euclid));
    let feasible = |d: f64| bbox_path_exists(&raster, a, b, ca, cb, d);
    if feasible(lo) {
        return Ok(lo);
    }
    while hi - lo > 0.25 * raster.h {
        let mid = 0.5 * (lo + hi);
        if feasible(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

const WIDTH_STEPS: usize = 9;
const OFFSET_STEPS: usize = 5;

fn bbox_path_exists(raster: &Raster, a: Point, b: Point, ca: (usize, usize), cb: (usize, usize), d: f64) -> bool {
    let (dx, dy) = ((a[0] - b[0]).abs(), (a[1] - b[1]).abs());
    let mut boxes = Vec::new();
    for k in 0..WIDTH_STEPS {
        let w = dx + (d - dx) * k as f64 / (WIDTH_STEPS - 1) as f64;
        let hgt2 = d * d - w * w;
        if hgt2 < dy * dy {
            continue;
        }
        let hgt = hgt2.sqrt();
        let (xa, xb) = (a[0].max(b[0]) - w, a[0].min(b[0]));
        let (ya, yb) = (a[1].max(b[1]) - hgt, a[1].min(b[1]));
        for i in 0..OFFSET_STEPS {
            for j in 0..OFFSET_STEPS {
                let x0 = xa + (xb - xa) * i as f64 / (OFFSET_STEPS - 1) as f64;
                let y0 = ya + (yb - ya) * j as f64 / (OFFSET_STEPS - 1) as f64;
                boxes.push([x0, y0, x0 + w, y0 + hgt]);
            }
        }
    }
    boxes.par_iter().any(|bx| {
        let half = 0.5 * raster.h;
        let overlaps = |x: usize, y: usize| {
            let c = raster.center(x, y);
            c[0] >= bx[0] - half && c[0] <= bx[2] + half && c[1] >= bx[1] - half && c[1] <= bx[3] + half
        };
        let clampi = |v: f64, n: usize| (v.floor().max(0.0) as usize).min(n);
        let win = Window {
            x0: clampi((bx[0] - raster.origin[0]) / raster.h - 1.0, raster.nx),
            x1: clampi((bx[2] - raster.origin[0]) / raster.h + 2.0, raster.nx),
            y0: clampi((bx[1] - raster.origin[1]) / raster.h - 1.0, raster.ny),
            y1: clampi((bx[3] - raster.origin[1]) / raster.h + 2.0, raster.ny),
        };
        if ca.0 < win.x0 || ca.0 >= win.x1 || cb.0 < win.x0 || cb.0 >= win.x1 || ca.1 < win.y0 || ca.1 >= win.y1 || cb.1 < win.y0 || cb.1 >= win.y1 {
            return false;
        }
        let (labels, _) = raster.label(win, &|x, y| raster.get(x, y) && overlaps(x, y));
        let w = win.x1 - win.x0;
        let la = labels[(ca.1 - win.y0) * w + ca.0 - win.x0];
        la != 0 && la == labels[(cb.1 - win.y0) * w + cb.0 - win.x0]
    })
}
