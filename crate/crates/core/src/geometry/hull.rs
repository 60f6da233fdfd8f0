//! Convex hulls and diameters of planar point sets.

use super::curve::{cross, dist, sub, Point};

/// Andrew's monotone chain; counter-clockwise, no repeated end point.
pub fn convex_hull(points: &[Point]) -> Vec<Point> {
    let mut pts: Vec<Point> = points.to_vec();
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let mut hull: Vec<Point> = Vec::with_capacity(2 * pts.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &Point>> =
            if pass == 0 { Box::new(pts.iter()) } else { Box::new(pts.iter().rev()) };
        for &p in iter {
            while hull.len() >= start + 2 && cross(sub(hull[hull.len() - 1], hull[hull.len() - 2]), sub(p, hull[hull.len() - 2])) <= 0.0 {
                hull.pop();
            }
            hull.push(p);
        }
        hull.pop();
    }
    hull
}

/// Diameter by rotating calipers over the hull.
pub fn diameter(points: &[Point]) -> f64 {
    let h = convex_hull(points);
    match h.len() {
        0 | 1 => 0.0,
        2 => dist(h[0], h[1]),
        n => {
            let mut best = 0.0f64;
            let mut j = 1;
            for i in 0..n {
                let e = sub(h[(i + 1) % n], h[i]);
                while cross(e, sub(h[(j + 1) % n], h[i])) > cross(e, sub(h[j], h[i])) {
                    j = (j + 1) % n;
                }
                best = best.max(dist(h[i], h[j])).max(dist(h[(i + 1) % n], h[j]));
            }
            best
        }
    }
}

/// `O(k²)` reference diameter.
pub fn diameter_brute(points: &[Point]) -> f64 {
    let mut best = 0.0f64;
    for (i, &a) in points.iter().enumerate() {
        for &b in &points[i + 1..] {
            best = best.max(dist(a, b));
        }
    }
    best
}
