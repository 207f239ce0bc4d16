//! Quadrature rules on `[0, T]`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    /// Composite trapezoid on `N` uniform nodes including both endpoints.
    Trapezoid,
    GaussLegendre,
}

/// Nodes and weights of an `n`-point rule on `[0, t_final]`.
pub fn nodes_weights(scheme: Scheme, t_final: f64, n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if n < 2 {
        return Err(Error::TooFewNodes(n));
    }
    match scheme {
        Scheme::Trapezoid => {
            let h = t_final / (n - 1) as f64;
            let nodes = (0..n)
                .map(|i| if i == n - 1 { t_final } else { i as f64 * h })
                .collect();
            let mut weights = vec![h; n];
            weights[0] *= 0.5;
            weights[n - 1] *= 0.5;
            Ok((nodes, weights))
        }
        Scheme::GaussLegendre => {
            let (x, w) = gauss_legendre(n);
            let half = 0.5 * t_final;
            Ok((
                x.iter().map(|xi| half * (xi + 1.0)).collect(),
                w.iter().map(|wi| half * wi).collect(),
            ))
        }
    }
}

/// Gauss–Legendre nodes (ascending) and weights on `[−1, 1]`.
///
/// Newton iteration on `P_n` from the Tricomi initial guess; converges to
/// machine precision in a handful of steps for any `n`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
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

/// A fixed Gauss–Legendre rule reused across panels.
#[derive(Debug, Clone)]
pub struct GaussRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussRule {
    pub fn new(order: usize) -> Self {
        let (nodes, weights) = gauss_legendre(order);
        GaussRule { nodes, weights }
    }

    /// Nodes and weights mapped to `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(x, w)| (mid + half * x, half * w))
    }

    /// Nodes and weights mapped to `[0, 1]`.
    pub fn unit(&self) -> Vec<(f64, f64)> {
        self.mapped(0.0, 1.0).collect()
    }

    /// `∫_a^b f` on `panels` equal panels.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F, a: f64, b: f64, panels: usize) -> f64 {
        let panels = panels.max(1);
        let h = (b - a) / panels as f64;
        let mut total = 0.0;
        for p in 0..panels {
            let lo = a + p as f64 * h;
            total += self.mapped(lo, lo + h).map(|(x, w)| w * f(x)).sum::<f64>();
        }
        total
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trapezoid_weights_sum_to_length() {
        let (x, w) = nodes_weights(Scheme::Trapezoid, 2.5, 11).unwrap();
        assert_eq!(x.len(), 11);
        assert_eq!(x[10], 2.5);
        assert!((w.iter().sum::<f64>() - 2.5).abs() < 1e-14);
    }

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        for n in [2, 5, 12, 40] {
            let (x, w) = nodes_weights(Scheme::GaussLegendre, 2.0, n).unwrap();
            let deg = 2 * n - 1;
            let quad: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg as i32)).sum();
            let exact = 2f64.powi(deg as i32 + 1) / (deg as f64 + 1.0);
            assert!((quad - exact).abs() < 1e-12 * exact, "n={n}: {quad} vs {exact}");
        }
    }

    #[test]
    fn composite_rule_on_oscillatory_integrand() {
        let rule = GaussRule::new(12);
        let val = rule.integrate(|x| (40.0 * x).cos(), 0.0, 3.0, 40);
        assert!((val - (120f64).sin() / 40.0).abs() < 1e-14);
    }

    #[test]
    fn too_few_nodes() {
        assert!(matches!(nodes_weights(Scheme::Trapezoid, 1.0, 1), Err(Error::TooFewNodes(1))));
    }
}
