//! Closed polylines and their basic measurements.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Point = [f64; 2];

pub(crate) fn sub(a: Point, b: Point) -> Point {
    [a[0] - b[0], a[1] - b[1]]
}

pub(crate) fn cross(a: Point, b: Point) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

pub(crate) fn dist(a: Point, b: Point) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

fn orient(a: Point, b: Point, c: Point) -> f64 {
    cross(sub(b, a), sub(c, a))
}

fn on_segment(a: Point, b: Point, p: Point) -> bool {
    p[0] >= a[0].min(b[0]) && p[0] <= a[0].max(b[0]) && p[1] >= a[1].min(b[1]) && p[1] <= a[1].max(b[1])
}

/// Closed segments `ab` and `cd` share a point.
pub fn segments_intersect(a: Point, b: Point, c: Point, d: Point) -> bool {
    let (o1, o2, o3, o4) = (orient(a, b, c), orient(a, b, d), orient(c, d, a), orient(c, d, b));
    if ((o1 > 0.0 && o2 < 0.0) || (o1 < 0.0 && o2 > 0.0)) && ((o3 > 0.0 && o4 < 0.0) || (o3 < 0.0 && o4 > 0.0)) {
        return true;
    }
    (o1 == 0.0 && on_segment(a, b, c))
        || (o2 == 0.0 && on_segment(a, b, d))
        || (o3 == 0.0 && on_segment(c, d, a))
        || (o4 == 0.0 && on_segment(c, d, b))
}

/// Distance from `p` to segment `ab`.
pub fn point_segment_distance(p: Point, a: Point, b: Point) -> f64 {
    let ab = sub(b, a);
    let len2 = ab[0] * ab[0] + ab[1] * ab[1];
    if len2 == 0.0 {
        return dist(p, a);
    }
    let t = (((p[0] - a[0]) * ab[0] + (p[1] - a[1]) * ab[1]) / len2).clamp(0.0, 1.0);
    dist(p, [a[0] + t * ab[0], a[1] + t * ab[1]])
}

/// Positively oriented simple closed polyline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JordanCurve {
    vertices: Vec<Point>,
    /// Cumulative arc length, `arc[0] = 0`, `arc[n] = perimeter`.
    arc: Vec<f64>,
    /// Tagged vertex indices (corners, cusp tips).
    features: Vec<usize>,
}

impl JordanCurve {
    /// Validates simplicity and reverses clockwise input.
    pub fn new(vertices: Vec<Point>) -> Result<Self> {
        Self::with_features(vertices, Vec::new())
    }

    pub fn with_features(mut vertices: Vec<Point>, mut features: Vec<usize>) -> Result<Self> {
        if vertices.len() > 1 && vertices.first() == vertices.last() {
            vertices.pop();
        }
        let n = vertices.len();
        if n < 3 {
            return Err(Error::InvalidParameter(format!("curve needs >= 3 vertices, got {n}")));
        }
        if vertices.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("non-finite vertex".into()));
        }
        if features.iter().any(|&f| f >= n) {
            return Err(Error::InvalidParameter("feature index out of range".into()));
        }
        check_simple(&vertices)?;
        let area = signed_area(&vertices);
        if area == 0.0 {
            return Err(Error::Degenerate("curve encloses zero area".into()));
        }
        if area < 0.0 {
            vertices.reverse();
            for f in &mut features {
                *f = n - 1 - *f;
            }
        }
        features.sort_unstable();
        features.dedup();
        let mut arc = Vec::with_capacity(n + 1);
        arc.push(0.0);
        for i in 0..n {
            arc.push(arc[i] + dist(vertices[i], vertices[(i + 1) % n]));
        }
        Ok(Self { vertices, arc, features })
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn features(&self) -> &[usize] {
        &self.features
    }

    pub fn arc_length(&self) -> &[f64] {
        &self.arc
    }

    pub fn perimeter(&self) -> f64 {
        self.arc[self.len()]
    }

    pub fn area(&self) -> f64 {
        signed_area(&self.vertices)
    }

    pub fn edge(&self, i: usize) -> (Point, Point) {
        (self.vertices[i], self.vertices[(i + 1) % self.len()])
    }

    /// `(min, max)` corners.
    pub fn bbox(&self) -> (Point, Point) {
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        for v in &self.vertices {
            for k in 0..2 {
                lo[k] = lo[k].min(v[k]);
                hi[k] = hi[k].max(v[k]);
            }
        }
        (lo, hi)
    }

    pub fn diameter(&self) -> f64 {
        super::hull::diameter(&self.vertices)
    }

    /// Even-odd point location.
    pub fn contains(&self, p: Point) -> bool {
        let mut inside = false;
        let n = self.len();
        let mut j = n - 1;
        for i in 0..n {
            let (a, b) = (self.vertices[i], self.vertices[j]);
            if (a[1] > p[1]) != (b[1] > p[1]) {
                let x = a[0] + (p[1] - a[1]) * (b[0] - a[0]) / (b[1] - a[1]);
                if p[0] < x {
                    inside = !inside;
                }
            }
            j = i;
        }
        inside
    }

    pub fn distance_to_boundary(&self, p: Point) -> f64 {
        (0..self.len())
            .map(|i| {
                let (a, b) = self.edge(i);
                point_segment_distance(p, a, b)
            })
            .fold(f64::INFINITY, f64::min)
    }

    /// Image under `p ↦ A p + b`; orientation is restored if `det A < 0`.
    pub fn transformed(&self, a: [[f64; 2]; 2], b: Point) -> Result<Self> {
        let vs = self
            .vertices
            .iter()
            .map(|v| [a[0][0] * v[0] + a[0][1] * v[1] + b[0], a[1][0] * v[0] + a[1][1] * v[1] + b[1]])
            .collect();
        Self::with_features(vs, self.features.clone())
    }

    /// Vertices of the forward arc from `i` to `j` inclusive.
    pub fn arc_vertices(&self, i: usize, j: usize) -> Vec<Point> {
        let n = self.len();
        let len = (j + n - i) % n + 1;
        (0..len).map(|k| self.vertices[(i + k) % n]).collect()
    }

    /// Vertex at fractional arc-length position `s ∈ [0, 1)`.
    pub fn vertex_at_fraction(&self, s: f64) -> usize {
        let target = s.rem_euclid(1.0) * self.perimeter();
        self.arc.partition_point(|&a| a <= target).saturating_sub(1).min(self.len() - 1)
    }

    /// CSV `x,y` rows with a header.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("x,y\n");
        for v in &self.vertices {
            s.push_str(&format!("{:e},{:e}\n", v[0], v[1]));
        }
        s
    }

    /// Parse `x,y` rows; a non-numeric first row is treated as a header.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut vs = Vec::new();
        for (k, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let parts: Vec<&str> = line.split(',').map(str::trim).collect();
            if parts.len() != 2 {
                return Err(Error::Config(format!("line {}: expected 2 columns", k + 1)));
            }
            match (parts[0].parse::<f64>(), parts[1].parse::<f64>()) {
                (Ok(x), Ok(y)) => vs.push([x, y]),
                _ if k == 0 => continue,
                _ => return Err(Error::Config(format!("line {}: not a number", k + 1))),
            }
        }
        Self::new(vs)
    }
}

pub(crate) fn signed_area(vs: &[Point]) -> f64 {
    let n = vs.len();
    0.5 * (0..n).map(|i| cross(vs[i], vs[(i + 1) % n])).sum::<f64>()
}

/// Sweep over edges sorted by `min x`; only edges with overlapping x-extent
/// are tested.
fn check_simple(vs: &[Point]) -> Result<()> {
    let n = vs.len();
    let edge = |i: usize| (vs[i], vs[(i + 1) % n]);
    for i in 0..n {
        let (a, b) = edge(i);
        if a == b {
            return Err(Error::Degenerate(format!("repeated vertex {i}")));
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    let xmin = |i: usize| vs[i][0].min(vs[(i + 1) % n][0]);
    let xmax = |i: usize| vs[i][0].max(vs[(i + 1) % n][0]);
    order.sort_by(|&p, &q| xmin(p).total_cmp(&xmin(q)));
    for (k, &i) in order.iter().enumerate() {
        let (a, b) = edge(i);
        let hi = xmax(i);
        for &j in &order[k + 1..] {
            if xmin(j) > hi {
                break;
            }
            let (c, d) = edge(j);
            let adjacent = (i + 1) % n == j || (j + 1) % n == i;
            if adjacent {
                // shared vertex; reject folding back along the same line
                let (shared, p, q) = if (i + 1) % n == j { (b, a, d) } else { (a, b, c) };
                let u = sub(p, shared);
                let v = sub(q, shared);
                if cross(u, v) == 0.0 && u[0] * v[0] + u[1] * v[1] > 0.0 {
                    return Err(Error::SelfIntersection(i.min(j), i.max(j)));
                }
                continue;
            }
            if segments_intersect(a, b, c, d) {
                return Err(Error::SelfIntersection(i.min(j), i.max(j)));
            }
        }
    }
    Ok(())
}
