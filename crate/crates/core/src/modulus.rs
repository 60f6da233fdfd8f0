//! Grid Dirichlet-energy solver for moduli of curve families.
//!
//! Unknowns live at cell centers of a uniform grid. A 5-point edge that
//! crosses a Dirichlet segment at fraction `θ` of its length is replaced by a
//! link of conductance `1/θ` to the boundary value; an edge crossing a Neumann
//! segment, or leaving the domain, is dropped. The discrete energy is
//! `Σ w (u_q - u_p - s)²` over the surviving links, where `s` is a prescribed
//! jump across an optional horizontal cut ray (used for conjugate potentials).

use std::f64::consts::TAU;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::control::ControlFunction;
use crate::geometry::curve::{cross, dist, point_segment_distance, segments_intersect, sub, JordanCurve, Point};
use crate::geometry::hull;
use crate::geometry::raster::interior_mask;
use crate::error::{Error, Result};

/// Smallest crossing fraction; caps link conductance at `1e3`.
pub const MIN_THETA: f64 = 1e-3;
/// Relative residual target of the linear solver.
pub const RESIDUAL_TOL: f64 = 1e-10;
/// Iteration cap of the linear solver.
pub const MAX_ITERATIONS: usize = 200_000;
/// Minimum gap between the two boundaries, in cells.
pub const MIN_GAP_CELLS: f64 = 8.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Condition {
    Dirichlet(f64),
    Neumann,
}

/// Uniform bucket grid over boundary segments for crossing queries.
struct SegmentIndex {
    segs: Vec<(Point, Point, Condition)>,
    origin: Point,
    cell: f64,
    nx: usize,
    ny: usize,
    buckets: Vec<Vec<u32>>,
}

impl SegmentIndex {
    fn new(segs: Vec<(Point, Point, Condition)>, origin: Point, cell: f64, nx: usize, ny: usize) -> Self {
        let mut buckets = vec![Vec::new(); nx * ny];
        let clampi = |v: f64, n: usize| (v.floor().max(0.0) as usize).min(n - 1);
        for (k, (a, b, _)) in segs.iter().enumerate() {
            let x0 = clampi((a[0].min(b[0]) - origin[0]) / cell, nx);
            let x1 = clampi((a[0].max(b[0]) - origin[0]) / cell, nx);
            let y0 = clampi((a[1].min(b[1]) - origin[1]) / cell, ny);
            let y1 = clampi((a[1].max(b[1]) - origin[1]) / cell, ny);
            for y in y0..=y1 {
                for x in x0..=x1 {
                    buckets[y * nx + x].push(k as u32);
                }
            }
        }
        Self { segs, origin, cell, nx, ny, buckets }
    }

    /// First crossing of the segment `p → q`: fraction along it and condition.
    fn first_crossing(&self, p: Point, q: Point) -> Option<(f64, Condition)> {
        let clampi = |v: f64, n: usize| (v.floor().max(0.0) as usize).min(n - 1);
        let x0 = clampi((p[0].min(q[0]) - self.origin[0]) / self.cell, self.nx);
        let x1 = clampi((p[0].max(q[0]) - self.origin[0]) / self.cell, self.nx);
        let y0 = clampi((p[1].min(q[1]) - self.origin[1]) / self.cell, self.ny);
        let y1 = clampi((p[1].max(q[1]) - self.origin[1]) / self.cell, self.ny);
        let d = sub(q, p);
        let mut best: Option<(f64, Condition)> = None;
        for y in y0..=y1 {
            for x in x0..=x1 {
                for &k in &self.buckets[y * self.nx + x] {
                    let (a, b, cond) = self.segs[k as usize];
                    if !segments_intersect(p, q, a, b) {
                        continue;
                    }
                    let e = sub(b, a);
                    let den = cross(d, e);
                    let t = if den == 0.0 {
                        // collinear overlap: nearest endpoint along p → q
                        let len2 = d[0] * d[0] + d[1] * d[1];
                        let ta = ((a[0] - p[0]) * d[0] + (a[1] - p[1]) * d[1]) / len2;
                        let tb = ((b[0] - p[0]) * d[0] + (b[1] - p[1]) * d[1]) / len2;
                        ta.min(tb).clamp(0.0, 1.0)
                    } else {
                        (cross(sub(a, p), e) / den).clamp(0.0, 1.0)
                    };
                    if best.is_none_or(|(bt, _)| t < bt) {
                        best = Some((t, cond));
                    }
                }
            }
        }
        best
    }
}

/// Grid geometry of a problem.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridFrame {
    pub origin: Point,
    pub h: f64,
    pub nx: usize,
    pub ny: usize,
}

impl GridFrame {
    /// `res` cells across the larger side of the box `[lo, hi]`, padded by two cells.
    pub fn covering(lo: Point, hi: Point, res: usize) -> Result<Self> {
        if res < 16 {
            return Err(Error::InvalidParameter(format!("grid resolution {res} < 16")));
        }
        let ext = (hi[0] - lo[0]).max(hi[1] - lo[1]);
        let h = ext / res as f64;
        let origin = [lo[0] - 2.0 * h, lo[1] - 2.0 * h];
        let nx = ((hi[0] - lo[0]) / h).ceil() as usize + 4;
        let ny = ((hi[1] - lo[1]) / h).ceil() as usize + 4;
        Ok(Self { origin, h, nx, ny })
    }

    pub fn center(&self, cell: usize) -> Point {
        let (ix, iy) = (cell % self.nx, cell / self.nx);
        [self.origin[0] + (ix as f64 + 0.5) * self.h, self.origin[1] + (iy as f64 + 0.5) * self.h]
    }
}

/// Assembled symmetric positive definite system.
pub struct DiscreteProblem {
    pub frame: GridFrame,
    /// Cell index of each unknown.
    pub cells: Vec<usize>,
    diag: Vec<f64>,
    nbr: Vec<[u32; 4]>,
    nbr_w: Vec<[f64; 4]>,
    rhs: Vec<f64>,
    /// `(p, q, jump)` with `p < q`, unit conductance.
    links: Vec<(u32, u32, f64)>,
    /// `(p, conductance, boundary value)`.
    cuts: Vec<(u32, f64, f64)>,
}

const NONE: u32 = u32::MAX;

impl DiscreteProblem {
    /// `in_domain` is a per-cell mask; `jump_ray` starts a `+x` ray across
    /// which the potential drops by one when crossed upward.
    pub fn assemble(
        frame: GridFrame,
        in_domain: &[bool],
        segments: Vec<(Point, Point, Condition)>,
        jump_ray: Option<Point>,
    ) -> Result<Self> {
        let GridFrame { origin, h, nx, ny } = frame;
        let mut node_of = vec![NONE; nx * ny];
        let mut cells = Vec::new();
        for (c, &inside) in in_domain.iter().enumerate() {
            if inside {
                node_of[c] = cells.len() as u32;
                cells.push(c);
            }
        }
        if cells.is_empty() {
            return Err(Error::Degenerate("no grid nodes inside the domain".into()));
        }
        let bucket = 4.0 * h;
        let bnx = ((nx as f64 * h) / bucket).ceil() as usize + 1;
        let bny = ((ny as f64 * h) / bucket).ceil() as usize + 1;
        let index = SegmentIndex::new(segments, origin, bucket, bnx, bny);
        let ray_y = jump_ray.map(|p| origin[1] + ((p[1] - origin[1]) / h).round() * h);

        let n = cells.len();
        let per_node: Vec<([u32; 4], [f64; 4], f64, f64, Vec<(f64, f64)>)> = cells
            .par_iter()
            .map(|&c| {
                let (ix, iy) = ((c % nx) as i64, (c / nx) as i64);
                let p = frame.center(c);
                let mut nb = [NONE; 4];
                let mut nw = [0.0; 4];
                let (mut diag, mut rhs) = (0.0, 0.0);
                let mut cut = Vec::new();
                for (k, (dx, dy)) in [(1i64, 0i64), (0, 1), (-1, 0), (0, -1)].into_iter().enumerate() {
                    let (jx, jy) = (ix + dx, iy + dy);
                    let q = [p[0] + dx as f64 * h, p[1] + dy as f64 * h];
                    if let Some((t, cond)) = index.first_crossing(p, q) {
                        if let Condition::Dirichlet(g) = cond {
                            let w = 1.0 / t.max(MIN_THETA);
                            diag += w;
                            rhs += w * g;
                            cut.push((w, g));
                        }
                        continue;
                    }
                    if jx < 0 || jy < 0 || jx >= nx as i64 || jy >= ny as i64 {
                        continue;
                    }
                    let qn = node_of[jy as usize * nx + jx as usize];
                    if qn == NONE {
                        continue;
                    }
                    nb[k] = qn;
                    nw[k] = 1.0;
                    diag += 1.0;
                    if let (Some(y0), Some(r)) = (ray_y, jump_ray) {
                        if dx == 0 && p[0] > r[0] && (p[1] - y0) * (q[1] - y0) < 0.0 {
                            // energy (u_above - u_below + 1)²
                            rhs += if dy > 0 { 1.0 } else { -1.0 };
                        }
                    }
                }
                (nb, nw, diag, rhs, cut)
            })
            .collect();

        let mut diag = Vec::with_capacity(n);
        let mut nbr = Vec::with_capacity(n);
        let mut nbr_w = Vec::with_capacity(n);
        let mut rhs = Vec::with_capacity(n);
        let mut links = Vec::new();
        let mut cuts = Vec::new();
        for (i, (nb, nw, d, r, cut)) in per_node.into_iter().enumerate() {
            for (k, &j) in nb.iter().enumerate() {
                if j != NONE && (i as u32) < j {
                    let p = frame.center(cells[i]);
                    let jump = match (ray_y, jump_ray) {
                        (Some(y0), Some(r0)) if k == 1 && p[0] > r0[0] && p[1] < y0 && p[1] + h > y0 => -1.0,
                        _ => 0.0,
                    };
                    links.push((i as u32, j, jump));
                }
            }
            for (w, g) in cut {
                cuts.push((i as u32, w, g));
            }
            nbr.push(nb);
            nbr_w.push(nw);
            diag.push(d);
            rhs.push(r);
        }
        let mut prob = Self { frame, cells, diag, nbr, nbr_w, rhs, links, cuts };
        prob.pin_floating_components();
        Ok(prob)
    }

    /// Components without a Dirichlet link get a unit spring to zero at their
    /// first node; this fixes the additive constant without changing the energy
    /// of the minimizer.
    fn pin_floating_components(&mut self) {
        let n = self.cells.len();
        let mut comp = vec![u32::MAX; n];
        let mut anchored = Vec::new();
        let mut stack = Vec::new();
        let has_cut: Vec<bool> = {
            let mut v = vec![false; n];
            for &(p, _, _) in &self.cuts {
                v[p as usize] = true;
            }
            v
        };
        for s in 0..n {
            if comp[s] != u32::MAX {
                continue;
            }
            let id = anchored.len() as u32;
            let mut anchor = false;
            comp[s] = id;
            stack.push(s);
            while let Some(i) = stack.pop() {
                anchor |= has_cut[i];
                for &j in &self.nbr[i] {
                    if j != NONE && comp[j as usize] == u32::MAX {
                        comp[j as usize] = id;
                        stack.push(j as usize);
                    }
                }
            }
            anchored.push(anchor);
            if !anchor {
                self.diag[s] += 1.0;
            }
        }
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        y.par_iter_mut().enumerate().for_each(|(i, yi)| {
            let mut acc = self.diag[i] * x[i];
            for k in 0..4 {
                let j = self.nbr[i][k];
                if j != NONE {
                    acc -= self.nbr_w[i][k] * x[j as usize];
                }
            }
            *yi = acc;
        });
    }

    /// Jacobi-preconditioned conjugate gradients from zero.
    pub fn solve(&self) -> Result<Solution> {
        let n = self.len();
        let mut x = vec![0.0; n];
        let mut r = self.rhs.clone();
        let b_norm = dot(&r, &r).sqrt();
        if b_norm == 0.0 {
            return Ok(Solution { values: x, residual: 0.0, iterations: 0 });
        }
        let mut z: Vec<f64> = r.iter().zip(&self.diag).map(|(r, d)| r / d).collect();
        let mut p = z.clone();
        let mut ap = vec![0.0; n];
        let mut rz = dot(&r, &z);
        let mut res = 1.0;
        for it in 1..=MAX_ITERATIONS {
            self.apply(&p, &mut ap);
            let alpha = rz / dot(&p, &ap);
            x.par_iter_mut().zip(&p).for_each(|(x, p)| *x += alpha * p);
            r.par_iter_mut().zip(&ap).for_each(|(r, ap)| *r -= alpha * ap);
            res = dot(&r, &r).sqrt() / b_norm;
            if res <= RESIDUAL_TOL {
                // recompute the true residual to guard against drift
                let mut ax = vec![0.0; n];
                self.apply(&x, &mut ax);
                let true_res = ax.iter().zip(&self.rhs).map(|(a, b)| (b - a) * (b - a)).sum::<f64>().sqrt() / b_norm;
                if true_res <= RESIDUAL_TOL * 10.0 {
                    return Ok(Solution { values: x, residual: true_res, iterations: it });
                }
                r = self.rhs.iter().zip(&ax).map(|(b, a)| b - a).collect();
            }
            z.par_iter_mut().zip(&r).zip(&self.diag).for_each(|((z, r), d)| *z = r / d);
            let rz_new = dot(&r, &z);
            let beta = rz_new / rz;
            rz = rz_new;
            p.par_iter_mut().zip(&z).for_each(|(p, z)| *p = z + beta * *p);
        }
        Err(Error::NoConvergence { residual: res, iterations: MAX_ITERATIONS })
    }

    /// Discrete energy of nodal values `u`.
    pub fn energy(&self, u: &[f64]) -> f64 {
        let links: f64 = self.links.iter().map(|&(p, q, s)| (u[q as usize] - u[p as usize] - s).powi(2)).sum();
        let cuts: f64 = self.cuts.iter().map(|&(p, w, g)| w * (u[p as usize] - g).powi(2)).sum();
        links + cuts
    }

    /// Energy of `f` sampled at the nodes.
    pub fn energy_of<F: Fn(Point) -> f64>(&self, f: F) -> f64 {
        let u: Vec<f64> = self.cells.iter().map(|&c| f(self.frame.center(c))).collect();
        self.energy(&u)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    const CHUNK: usize = 4096;
    let parts: Vec<f64> = a
        .par_chunks(CHUNK)
        .zip(b.par_chunks(CHUNK))
        .map(|(x, y)| x.iter().zip(y).map(|(x, y)| x * y).sum::<f64>())
        .collect();
    parts.iter().sum()
}

#[derive(Debug, Clone)]
pub struct Solution {
    pub values: Vec<f64>,
    pub residual: f64,
    pub iterations: usize,
}

fn curve_segments(curve: &JordanCurve, cond: Condition) -> Vec<(Point, Point, Condition)> {
    (0..curve.len())
        .map(|i| {
            let (a, b) = curve.edge(i);
            (a, b, cond)
        })
        .collect()
}

/// Smallest distance between two polylines.
pub fn polyline_distance(a: &[Point], b: &[Point]) -> f64 {
    let seg_d = |p: Point, q: Point, r: Point, s: Point| {
        if segments_intersect(p, q, r, s) {
            0.0
        } else {
            point_segment_distance(p, r, s)
                .min(point_segment_distance(q, r, s))
                .min(point_segment_distance(r, p, q))
                .min(point_segment_distance(s, p, q))
        }
    };
    let segs = |v: &[Point]| -> Vec<(Point, Point)> {
        if v.len() == 1 {
            vec![(v[0], v[0])]
        } else {
            v.windows(2).map(|w| (w[0], w[1])).collect()
        }
    };
    let (sa, sb) = (segs(a), segs(b));
    sa.par_iter()
        .map(|&(p, q)| sb.iter().map(|&(r, s)| seg_d(p, q, r, s)).fold(f64::INFINITY, f64::min))
        .reduce(|| f64::INFINITY, f64::min)
}

fn closed(curve: &JordanCurve) -> Vec<Point> {
    let mut v = curve.vertices().to_vec();
    v.push(v[0]);
    v
}

/// Doubly connected region between two nested curves.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RingProblem {
    pub inner: JordanCurve,
    pub outer: JordanCurve,
    pub grid: usize,
}

impl RingProblem {
    pub fn new(inner: JordanCurve, outer: JordanCurve, grid: usize) -> Result<Self> {
        if !inner.vertices().iter().all(|&v| outer.contains(v)) || outer.vertices().iter().any(|&v| inner.contains(v)) {
            return Err(Error::InvalidParameter("inner curve must lie strictly inside the outer curve".into()));
        }
        let gap = polyline_distance(&closed(&inner), &closed(&outer));
        if gap == 0.0 {
            return Err(Error::InvalidParameter("boundaries intersect".into()));
        }
        let (lo, hi) = outer.bbox();
        let frame = GridFrame::covering(lo, hi, grid)?;
        if gap < MIN_GAP_CELLS * frame.h {
            return Err(Error::Unresolved(format!("gap {gap:e} is below {MIN_GAP_CELLS} cells of {:e}", frame.h)));
        }
        Ok(Self { inner, outer, grid })
    }

    /// Concentric regular `n`-gons inscribed in circles of radii `r < big_r`.
    pub fn circles(r: f64, big_r: f64, center: Point, n: usize, grid: usize) -> Result<Self> {
        if !(r > 0.0 && big_r > r) {
            return Err(Error::InvalidParameter("need 0 < r < R".into()));
        }
        let circle = |rad: f64| {
            JordanCurve::new(
                (0..n)
                    .map(|k| {
                        let t = TAU * k as f64 / n as f64;
                        [center[0] + rad * t.cos(), center[1] + rad * t.sin()]
                    })
                    .collect(),
            )
        };
        Self::new(circle(r)?, circle(big_r)?, grid)
    }

    pub fn frame(&self) -> Result<GridFrame> {
        let (lo, hi) = self.outer.bbox();
        GridFrame::covering(lo, hi, self.grid)
    }

    fn domain(&self, frame: &GridFrame) -> Vec<bool> {
        let out = interior_mask(&self.outer, frame.origin, frame.h, frame.nx, frame.ny);
        let inn = interior_mask(&self.inner, frame.origin, frame.h, frame.nx, frame.ny);
        out.iter().zip(&inn).map(|(o, i)| *o && !*i).collect()
    }

    /// Potential `u = 0` on the inner curve, `u = 1` on the outer curve.
    pub fn potential_problem(&self) -> Result<DiscreteProblem> {
        let frame = self.frame()?;
        let mut segs = curve_segments(&self.inner, Condition::Dirichlet(0.0));
        segs.extend(curve_segments(&self.outer, Condition::Dirichlet(1.0)));
        DiscreteProblem::assemble(frame, &self.domain(&frame), segs, None)
    }

    /// Conjugate potential: insulated on both curves, unit period around the hole.
    pub fn conjugate_problem(&self) -> Result<DiscreteProblem> {
        let frame = self.frame()?;
        let mut segs = curve_segments(&self.inner, Condition::Neumann);
        segs.extend(curve_segments(&self.outer, Condition::Neumann));
        DiscreteProblem::assemble(frame, &self.domain(&frame), segs, Some(interior_point(&self.inner)?))
    }
}

/// A point well inside the curve: the deepest sampled cell center.
pub fn interior_point(curve: &JordanCurve) -> Result<Point> {
    let v = curve.vertices();
    let centroid = [v.iter().map(|p| p[0]).sum::<f64>() / v.len() as f64, v.iter().map(|p| p[1]).sum::<f64>() / v.len() as f64];
    if curve.contains(centroid) && curve.distance_to_boundary(centroid) > 1e-9 * curve.diameter() {
        return Ok(centroid);
    }
    let (lo, hi) = curve.bbox();
    let frame = GridFrame::covering(lo, hi, 64)?;
    let mask = interior_mask(curve, frame.origin, frame.h, frame.nx, frame.ny);
    mask.iter()
        .enumerate()
        .filter(|(_, &m)| m)
        .map(|(c, _)| frame.center(c))
        .max_by(|a, b| curve.distance_to_boundary(*a).total_cmp(&curve.distance_to_boundary(*b)))
        .ok_or_else(|| Error::Degenerate("curve too thin to host an interior point".into()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RingModulus {
    /// Energy of the potential: modulus of curves joining the two boundaries.
    pub modulus_connecting: f64,
    /// Energy of the conjugate potential: modulus of curves separating them.
    pub modulus_separating: f64,
    /// `1 / modulus_connecting`.
    pub reciprocal_connecting: f64,
    /// `modulus_connecting × modulus_separating`; 1 in the continuum.
    pub duality_product: f64,
    pub residual: f64,
    pub iterations: usize,
    pub grid: usize,
    pub cell: f64,
}

pub fn ring_modulus(p: &RingProblem) -> Result<RingModulus> {
    let pot = p.potential_problem()?;
    let u = pot.solve()?;
    let conj = p.conjugate_problem()?;
    let v = conj.solve()?;
    let connecting = pot.energy(&u.values);
    let separating = conj.energy(&v.values);
    Ok(RingModulus {
        modulus_connecting: connecting,
        modulus_separating: separating,
        reciprocal_connecting: 1.0 / connecting,
        duality_product: connecting * separating,
        residual: u.residual.max(v.residual),
        iterations: u.iterations.max(v.iterations),
        grid: p.grid,
        cell: pot.frame.h,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContinuaBounds {
    /// `dist(E, F) / min(diam E, diam F)`.
    pub t: f64,
    /// `1 / log(1 + t)`.
    pub kernel: f64,
    pub lower: String,
    pub upper: String,
    /// Modulus of curves joining `E` and `F` inside the ball.
    pub numeric: f64,
    /// Smallest `C₀` with `C₀ kernel ≤ numeric ≤ kernel / C₀`, as `C₀⁻¹`.
    pub empirical_c0: f64,
    pub residual: f64,
}

/// Two-sided kernel for continua `E`, `F` (polylines) in a ball, with the
/// numeric joining modulus on a `grid`-cell discretization of the ball.
pub fn continua_modulus_bounds(e: &[Point], f: &[Point], center: Point, radius: f64, grid: usize) -> Result<ContinuaBounds> {
    let (de, df) = (hull::diameter(e), hull::diameter(f));
    if e.len() < 2 || f.len() < 2 || de == 0.0 || df == 0.0 {
        return Err(Error::Degenerate("continua must have positive diameter".into()));
    }
    if e.iter().chain(f).any(|&p| dist(p, center) >= radius) {
        return Err(Error::InvalidParameter("continua must lie inside the ball".into()));
    }
    let gap = polyline_distance(e, f);
    if gap == 0.0 {
        return Err(Error::InvalidParameter("continua intersect".into()));
    }
    let t = gap / de.min(df);
    let kernel = 1.0 / t.ln_1p();
    let frame = GridFrame::covering([center[0] - radius, center[1] - radius], [center[0] + radius, center[1] + radius], grid)?;
    let dom: Vec<bool> = (0..frame.nx * frame.ny).map(|c| dist(frame.center(c), center) < radius).collect();
    let mut segs: Vec<(Point, Point, Condition)> = e.windows(2).map(|w| (w[0], w[1], Condition::Dirichlet(0.0))).collect();
    segs.extend(f.windows(2).map(|w| (w[0], w[1], Condition::Dirichlet(1.0))));
    let prob = DiscreteProblem::assemble(frame, &dom, segs, None)?;
    let sol = prob.solve()?;
    let numeric = prob.energy(&sol.values);
    Ok(ContinuaBounds {
        t,
        kernel,
        lower: "C0·kernel".into(),
        upper: "C0⁻¹·kernel".into(),
        numeric,
        empirical_c0: (numeric / kernel).max(kernel / numeric),
        residual: sol.residual,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Lemma36Report {
    /// Modulus of curves in the domain joining the two arcs.
    pub modulus: f64,
    /// `dist(α₁, α₂)`.
    pub d: f64,
    /// `min(diam α₁, diam α₂)`.
    pub min_diam: f64,
    /// `ψ(ψ(d))`.
    pub psi_psi_d: f64,
    /// `min_diam / ψ(ψ(d))`.
    pub slack: f64,
    /// `(1/2π) log(ψ⁻¹(r/2) / ψ(d))` when positive.
    pub proof_lower_bound: Option<f64>,
    pub lower_bound_respected: bool,
    /// `ψ(ψ(d))` exceeds the domain's diameter.
    pub vacuous: bool,
    pub holds: bool,
    pub residual: f64,
}

/// Mixed problem on the interior of `curve`: `u = 0` on the forward vertex arc
/// `alpha1 = (i0, i1)`, `u = 1` on `alpha2`, insulated elsewhere.
pub fn lemma36_check(
    curve: &JordanCurve,
    alpha1: (usize, usize),
    alpha2: (usize, usize),
    psi: &ControlFunction,
    grid: usize,
) -> Result<Lemma36Report> {
    let n = curve.len();
    let span = |(a, b): (usize, usize)| -> Result<Vec<usize>> {
        if a >= n || b >= n || a == b {
            return Err(Error::InvalidParameter("arc endpoints must be distinct vertex indices".into()));
        }
        Ok((0..=(b + n - a) % n).map(|k| (a + k) % n).collect())
    };
    let (s1, s2) = (span(alpha1)?, span(alpha2)?);
    let mut tag = vec![0u8; n];
    for &i in &s1 {
        tag[i] = 1;
    }
    for &i in &s2 {
        if tag[i] != 0 || tag[(i + 1) % n] == 1 || tag[(i + n - 1) % n] == 1 {
            return Err(Error::InvalidParameter("arcs must be disjoint and non-adjacent".into()));
        }
        tag[i] = 2;
    }
    let v = curve.vertices();
    let p1: Vec<Point> = s1.iter().map(|&i| v[i]).collect();
    let p2: Vec<Point> = s2.iter().map(|&i| v[i]).collect();
    let d = polyline_distance(&p1, &p2);
    let r = hull::diameter(&p1).min(hull::diameter(&p2));

    let (lo, hi) = curve.bbox();
    let frame = GridFrame::covering(lo, hi, grid)?;
    let dom = interior_mask(curve, frame.origin, frame.h, frame.nx, frame.ny);
    let segs: Vec<(Point, Point, Condition)> = (0..n)
        .map(|i| {
            let (a, b) = curve.edge(i);
            let j = (i + 1) % n;
            let cond = match (tag[i], tag[j]) {
                (1, 1) => Condition::Dirichlet(0.0),
                (2, 2) => Condition::Dirichlet(1.0),
                _ => Condition::Neumann,
            };
            (a, b, cond)
        })
        .collect();
    let prob = DiscreteProblem::assemble(frame, &dom, segs, None)?;
    let sol = prob.solve()?;
    let modulus = prob.energy(&sol.values);

    let psi_psi_d = psi.eval(d).and_then(|x| psi.eval(x)).unwrap_or(f64::INFINITY);
    let vacuous = psi_psi_d >= curve.diameter();
    let slack = r / psi_psi_d;
    let proof_lower_bound = match (psi.inverse_eval(r / 2.0), psi.eval(d)) {
        (Ok(a), Ok(b)) if a > b => Some((a / b).ln() / TAU),
        _ => None,
    };
    let lower_bound_respected = proof_lower_bound.is_none_or(|lb| modulus >= lb);
    Ok(Lemma36Report {
        modulus,
        d,
        min_diam: r,
        psi_psi_d,
        slack,
        proof_lower_bound,
        lower_bound_respected,
        vacuous,
        holds: vacuous || (slack <= 2.0 && lower_bound_respected),
        residual: sol.residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn annulus_modulus_coarse() {
        let p = RingProblem::circles(1.0, 2.0, [0.0, 0.0], 512, 128).unwrap();
        let m = ring_modulus(&p).unwrap();
        let want = 2f64.ln() / TAU;
        assert!((m.reciprocal_connecting / want - 1.0).abs() < 0.03, "{m:?}");
        assert!((m.modulus_separating / want - 1.0).abs() < 0.05, "{m:?}");
        assert!(m.residual <= 1e-9);
    }

    #[test]
    fn discrete_minimizer_beats_exact_samples() {
        let p = RingProblem::circles(1.0, 3.0, [0.0, 0.0], 256, 64).unwrap();
        let prob = p.potential_problem().unwrap();
        let sol = prob.solve().unwrap();
        let e = prob.energy(&sol.values);
        let exact = prob.energy_of(|q| (q[0].hypot(q[1])).ln() / 3f64.ln());
        assert!(e <= exact, "{e} > {exact}");
    }

    #[test]
    fn narrow_gap_rejected() {
        assert!(matches!(RingProblem::circles(1.0, 1.01, [0.0, 0.0], 128, 64), Err(Error::Unresolved(_))));
        assert!(RingProblem::circles(2.0, 1.0, [0.0, 0.0], 128, 64).is_err());
    }

    #[test]
    fn continua_kernel_arithmetic() {
        let circle = |cx: f64| -> Vec<Point> {
            (0..=64).map(|k| {
                let t = TAU * k as f64 / 64.0;
                [cx + 0.1 * t.cos(), 0.1 * t.sin()]
            }).collect()
        };
        let b = continua_modulus_bounds(&circle(-0.5), &circle(0.5), [0.0, 0.0], 2.0, 96).unwrap();
        assert!((b.t - 4.0).abs() < 2e-3, "{}", b.t);
        assert!((b.kernel - 1.0 / 5f64.ln()).abs() < 1e-3);
        assert!(b.numeric > 0.0 && b.empirical_c0 >= 1.0);
    }

    #[test]
    fn lemma36_disk_quarter_arcs() {
        let disk = crate::geometry::make_domain(crate::geometry::DomainFamily::Disk, 256).unwrap();
        let psi = ControlFunction::linear(1.0).unwrap();
        let r = lemma36_check(&disk, (224, 32), (96, 160), &psi, 128).unwrap();
        assert!(r.holds && !r.vacuous);
        assert!((r.slack - 1.0).abs() < 1e-12);
        // the symmetric quadrilateral has modulus one
        assert!((r.modulus - 1.0).abs() < 0.02, "{}", r.modulus);
        assert!(lemma36_check(&disk, (0, 40), (30, 100), &psi, 64).is_err());
    }

    #[test]
    fn lemma36_far_arcs_are_vacuous() {
        let disk = crate::geometry::make_domain(crate::geometry::DomainFamily::Disk, 256).unwrap();
        let r = lemma36_check(&disk, (254, 2), (126, 130), &ControlFunction::linear(2.0).unwrap(), 128).unwrap();
        assert!(r.vacuous && r.holds);
        assert!(r.modulus < 0.5);
    }
}
