//! Gauss-Legendre rules on `[0, 1]`.
//!
//! Nodes are the roots of `P_n`, found by Newton iteration from the
//! Chebyshev-like initial guesses; weights follow from `P_n'` at the roots.

use std::f64::consts::PI;

#[derive(Debug, Clone, PartialEq)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Rule of the given order mapped to `[0, 1]`.
    pub fn new(order: usize) -> Self {
        assert!(order >= 1, "quadrature order must be positive");
        let n = order;
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            // map [-1, 1] -> [0, 1]
            nodes[i] = 0.5 * (1.0 - x);
            nodes[n - 1 - i] = 0.5 * (1.0 + x);
            weights[i] = 0.5 * w;
            weights[n - 1 - i] = 0.5 * w;
        }
        Self { nodes, weights }
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `∫_a^b f(u) du`.
    pub fn integrate<F: Fn(f64) -> f64>(&self, a: f64, b: f64, f: F) -> f64 {
        let len = b - a;
        let mut acc = 0.0;
        for (&x, &w) in self.nodes.iter().zip(&self.weights) {
            acc += w * f(a + len * x);
        }
        acc * len
    }

    /// `∫_a^b f(u) du` with the substitution `u = a + (b - a) v²`, which
    /// smooths an algebraic endpoint singularity at `a`.
    pub fn integrate_graded_left<F: Fn(f64) -> f64>(&self, a: f64, b: f64, f: F) -> f64 {
        let len = b - a;
        let mut acc = 0.0;
        for (&v, &w) in self.nodes.iter().zip(&self.weights) {
            acc += w * 2.0 * v * f(a + len * v * v);
        }
        acc * len
    }

    /// Mirror of [`Self::integrate_graded_left`], graded toward `b`.
    pub fn integrate_graded_right<F: Fn(f64) -> f64>(&self, a: f64, b: f64, f: F) -> f64 {
        let len = b - a;
        let mut acc = 0.0;
        for (&v, &w) in self.nodes.iter().zip(&self.weights) {
            acc += w * 2.0 * v * f(b - len * v * v);
        }
        acc * len
    }
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_to_one() {
        for n in [1, 2, 5, 16, 32, 64, 128] {
            let g = GaussLegendre::new(n);
            let s: f64 = g.weights().iter().sum();
            assert!((s - 1.0).abs() < 1e-14, "n = {n}: {s}");
        }
    }

    #[test]
    fn exact_for_polynomials_up_to_degree_2n_minus_1() {
        let g = GaussLegendre::new(8);
        for k in 0..16 {
            let got = g.integrate(0.0, 1.0, |x| x.powi(k));
            let want = 1.0 / (k as f64 + 1.0);
            assert!((got - want).abs() < 1e-14, "degree {k}");
        }
    }

    #[test]
    fn nodes_sorted_inside_unit_interval() {
        let g = GaussLegendre::new(64);
        assert!(g.nodes().windows(2).all(|w| w[0] < w[1]));
        assert!(g.nodes()[0] > 0.0 && g.nodes()[63] < 1.0);
    }

    #[test]
    fn graded_rule_handles_sqrt_singularity() {
        let g = GaussLegendre::new(32);
        let got = g.integrate_graded_left(0.0, 1.0, |x| x.powf(1.5));
        assert!((got - 0.4).abs() < 1e-14);
        let got = g.integrate_graded_right(0.0, 2.0, |x| (2.0 - x).sqrt());
        assert!((got - 2.0 * 2f64.sqrt() * 2.0 / 3.0).abs() < 1e-13);
    }
}
