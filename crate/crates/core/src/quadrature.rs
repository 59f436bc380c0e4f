//! Fixed-node quadrature rules on a finite interval.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::tolerances::{DENSITY_HALF_WIDTH, MIN_NODES_PER_AXIS};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QuadratureRule {
    Trapezoid,
    GaussLegendre,
}

/// Truncation and resolution of a discretized axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    /// Truncation half-width `L`, in standard deviations of the law on the axis.
    pub half_width: f64,
    /// Minimum number of nodes; routines add nodes when a kernel needs them.
    pub nodes_per_axis: usize,
    pub rule: QuadratureRule,
}

impl QuadratureSpec {
    pub fn new(half_width: f64, nodes_per_axis: usize, rule: QuadratureRule) -> Result<Self> {
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(domain(
                "half_width",
                half_width,
                "must be positive and finite",
            ));
        }
        if nodes_per_axis < 2 {
            return Err(domain(
                "nodes_per_axis",
                nodes_per_axis as f64,
                "must be at least 2",
            ));
        }
        Ok(Self {
            half_width,
            nodes_per_axis,
            rule,
        })
    }

    /// Same spec with twice the nodes; used for convergence checks.
    pub fn doubled(&self) -> Self {
        Self {
            nodes_per_axis: 2 * self.nodes_per_axis,
            ..*self
        }
    }

    /// Nodes and weights on `[lo, hi]` with at least `min_nodes` points.
    pub fn rule_on(&self, lo: f64, hi: f64, min_nodes: usize) -> (Vec<f64>, Vec<f64>) {
        let n = self.nodes_per_axis.max(min_nodes);
        match self.rule {
            QuadratureRule::Trapezoid => trapezoid(lo, hi, n),
            QuadratureRule::GaussLegendre => gauss_legendre(lo, hi, n),
        }
    }

    /// Node count such that the typical spacing on an interval of length
    /// `width` does not exceed `spacing`.
    pub fn nodes_for_spacing(&self, width: f64, spacing: f64) -> usize {
        // Gauss-Legendre nodes are sparsest at the centre, by a factor π/2.
        let stretch = match self.rule {
            QuadratureRule::Trapezoid => 1.0,
            QuadratureRule::GaussLegendre => std::f64::consts::FRAC_PI_2,
        };
        ((stretch * width / spacing).ceil() as usize + 1).max(self.nodes_per_axis)
    }
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            half_width: DENSITY_HALF_WIDTH,
            nodes_per_axis: 4 * MIN_NODES_PER_AXIS,
            rule: QuadratureRule::GaussLegendre,
        }
    }
}

/// Composite trapezoid rule with `n ≥ 2` equally spaced nodes.
pub fn trapezoid(lo: f64, hi: f64, n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 2 && hi > lo);
    let h = (hi - lo) / (n - 1) as f64;
    let nodes = (0..n).map(|i| lo + h * i as f64).collect();
    let weights = (0..n)
        .map(|i| if i == 0 || i == n - 1 { 0.5 * h } else { h })
        .collect();
    (nodes, weights)
}

/// `n`-point Gauss-Legendre rule mapped to `[lo, hi]`, nodes increasing.
pub fn gauss_legendre(lo: f64, hi: f64, n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1 && hi > lo);
    let (t, w) = gauss_legendre_unit(n);
    let half = 0.5 * (hi - lo);
    let mid = 0.5 * (hi + lo);
    (
        t.iter().map(|&ti| mid + half * ti).collect(),
        w.iter().map(|&wi| half * wi).collect(),
    )
}

/// Nodes and weights on `[-1, 1]` by Newton iteration on the three-term
/// Legendre recurrence.
fn gauss_legendre_unit(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    let nf = n as f64;
    for i in 0..m {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() <= 1e-16 * x.abs().max(1.0) {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        dp = if d.is_finite() { d } else { dp };
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
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
