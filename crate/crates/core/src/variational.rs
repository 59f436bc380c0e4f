//! Quadrature evaluation of the tilted functionals `Ω^{(μ,λ)}(q_X, Q)` and
//! `J^{(μ,λ)}(q_X)`, the tilted output law that minimizes `Ω` over `Q`, the
//! Gaussian saddle output, and the variational exponent `G_OH`.
//!
//! Densities are carried as log-masses on a node grid; every integrand is
//! assembled as a sum of logarithms and reduced with log-sum-exp.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::channel::{Channel, PowerBudget};
use crate::closed_form::{zeta, TiltParams};
use crate::error::{domain, Error, Result};
use crate::optim::{golden_section_min, nelder_mead_restarted, NelderMeadOptions};
use crate::quadrature::{QuadratureRule, QuadratureSpec};
use crate::tolerances::MASS_TOL;

const LN_2PI: f64 = 1.837_877_066_409_345_5;

/// `ln Σ exp(v_i)`, returning `-∞` for an empty or all `-∞` input.
pub fn log_sum_exp(values: impl IntoIterator<Item = f64> + Clone) -> f64 {
    let max = values.clone().into_iter().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY || max.is_nan() {
        return max;
    }
    let sum: f64 = values.into_iter().map(|v| (v - max).exp()).sum();
    max + sum.ln()
}

/// Probability law on a finite grid: node `x_i` carries mass `m_i` and the
/// quadrature weight `w_i` of its rule, so the density there is `m_i / w_i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscretizedDensity {
    nodes: Vec<f64>,
    rule_weights: Vec<f64>,
    log_masses: Vec<f64>,
}

impl DiscretizedDensity {
    /// Builds a law from explicit masses, which must sum to one within
    /// [`MASS_TOL`].
    pub fn from_masses(nodes: Vec<f64>, rule_weights: Vec<f64>, masses: &[f64]) -> Result<Self> {
        if masses.len() != nodes.len() {
            return Err(Error::Density("masses and nodes differ in length".into()));
        }
        if let Some(&m) = masses.iter().find(|m| !(m.is_finite() && **m >= 0.0)) {
            return Err(domain("mass", m, "must be nonnegative and finite"));
        }
        let total: f64 = masses.iter().sum();
        if (total - 1.0).abs() > MASS_TOL {
            return Err(domain("total mass", total, "must equal 1"));
        }
        let log_masses = masses.iter().map(|m| m.ln()).collect();
        Self::checked(nodes, rule_weights, log_masses)
    }

    /// Discretizes an unnormalized log-density on the given rule and
    /// renormalizes it.
    pub fn from_log_pdf(
        nodes: Vec<f64>,
        rule_weights: Vec<f64>,
        log_pdf: impl Fn(f64) -> f64,
    ) -> Result<Self> {
        if nodes.len() != rule_weights.len() {
            return Err(Error::Density(
                "nodes and rule weights differ in length".into(),
            ));
        }
        let raw: Vec<f64> = nodes
            .iter()
            .zip(&rule_weights)
            .map(|(&x, &w)| w.ln() + log_pdf(x))
            .collect();
        let log_total = log_sum_exp(raw.iter().copied());
        if !log_total.is_finite() {
            return Err(Error::Density(
                "log-density has no finite mass on the grid".into(),
            ));
        }
        let log_masses = raw.into_iter().map(|v| v - log_total).collect();
        Self::checked(nodes, rule_weights, log_masses)
    }

    fn checked(nodes: Vec<f64>, rule_weights: Vec<f64>, log_masses: Vec<f64>) -> Result<Self> {
        if nodes.is_empty() || nodes.len() != rule_weights.len() || nodes.len() != log_masses.len()
        {
            return Err(Error::Density(
                "grid, rule weights and masses must be nonempty and aligned".into(),
            ));
        }
        if nodes.iter().any(|x| !x.is_finite()) || nodes.windows(2).any(|p| p[0] >= p[1]) {
            return Err(Error::Density(
                "grid must be finite and strictly increasing".into(),
            ));
        }
        if rule_weights.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
            return Err(Error::Density("rule weights must be positive".into()));
        }
        Ok(Self {
            nodes,
            rule_weights,
            log_masses,
        })
    }

    /// Zero-mean Gaussian truncated at `±L·√variance`.
    pub fn gaussian(variance: f64, spec: &QuadratureSpec) -> Result<Self> {
        Self::gaussian_with_mean(0.0, variance, spec)
    }

    pub fn gaussian_with_mean(mean: f64, variance: f64, spec: &QuadratureSpec) -> Result<Self> {
        if !(variance.is_finite() && variance > 0.0) {
            return Err(domain("variance", variance, "must be positive and finite"));
        }
        let half = spec.half_width * variance.sqrt();
        let (nodes, weights) = spec.rule_on(mean - half, mean + half, 0);
        Self::gaussian_on(mean, variance, nodes, weights)
    }

    /// Gaussian `N(mean, variance)` on a caller-supplied rule.
    pub fn gaussian_on(
        mean: f64,
        variance: f64,
        nodes: Vec<f64>,
        rule_weights: Vec<f64>,
    ) -> Result<Self> {
        if !(variance.is_finite() && variance > 0.0) {
            return Err(domain("variance", variance, "must be positive and finite"));
        }
        Self::from_log_pdf(nodes, rule_weights, |x| {
            -0.5 * (x - mean) * (x - mean) / variance
        })
    }

    /// Uniform law on `[lo, hi]`, discretized on that interval.
    pub fn uniform(lo: f64, hi: f64, spec: &QuadratureSpec) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && hi > lo) {
            return Err(domain("hi", hi, "must exceed lo"));
        }
        let (nodes, weights) = spec.rule_on(lo, hi, 0);
        Self::from_log_pdf(nodes, weights, |_| 0.0)
    }

    /// Mixture of Gaussians given as `(weight, mean, variance)` triples, on one
    /// grid covering `±L` standard deviations of every component.
    pub fn gaussian_mixture(components: &[(f64, f64, f64)], spec: &QuadratureSpec) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::Density(
                "mixture needs at least one component".into(),
            ));
        }
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for &(w, m, v) in components {
            if !(w.is_finite() && w > 0.0) {
                return Err(domain("mixture weight", w, "must be positive"));
            }
            if !(v.is_finite() && v > 0.0) {
                return Err(domain("variance", v, "must be positive and finite"));
            }
            lo = lo.min(m - spec.half_width * v.sqrt());
            hi = hi.max(m + spec.half_width * v.sqrt());
        }
        let (nodes, weights) = spec.rule_on(lo, hi, 0);
        let comps = components.to_vec();
        Self::from_log_pdf(nodes, weights, move |x| {
            log_sum_exp(
                comps
                    .iter()
                    .map(|&(w, m, v)| w.ln() - 0.5 * v.ln() - 0.5 * (x - m) * (x - m) / v),
            )
        })
    }

    /// Discrete law with the given atoms; rule weights are unit, so it is
    /// meant for the input side only.
    pub fn point_masses(points: Vec<f64>, probabilities: &[f64]) -> Result<Self> {
        let ones = vec![1.0; points.len()];
        Self::from_masses(points, ones, probabilities)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn rule_weights(&self) -> &[f64] {
        &self.rule_weights
    }

    pub fn log_masses(&self) -> &[f64] {
        &self.log_masses
    }

    pub fn masses(&self) -> Vec<f64> {
        self.log_masses.iter().map(|v| v.exp()).collect()
    }

    pub fn total_mass(&self) -> f64 {
        self.masses().iter().sum()
    }

    /// Log-density `ln(m_i / w_i)` at each node.
    pub fn log_densities(&self) -> Vec<f64> {
        self.log_masses
            .iter()
            .zip(&self.rule_weights)
            .map(|(m, w)| m - w.ln())
            .collect()
    }

    pub fn mean(&self) -> f64 {
        self.nodes
            .iter()
            .zip(self.masses())
            .map(|(x, m)| x * m)
            .sum()
    }

    pub fn second_moment(&self) -> f64 {
        self.nodes
            .iter()
            .zip(self.masses())
            .map(|(x, m)| x * x * m)
            .sum()
    }

    /// Writes `node,weight` rows where the weight is the probability mass.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "node,weight")?;
        for (x, m) in self.nodes.iter().zip(self.masses()) {
            writeln!(out, "{x:.17e},{m:.17e}")?;
        }
        Ok(())
    }

    /// Reads the two-column format of [`write_csv`](Self::write_csv). Rule
    /// weights are rebuilt from the node spacing (half the distance to each
    /// neighbour), which is exact for trapezoid grids.
    pub fn read_csv<R: BufRead>(input: R) -> Result<Self> {
        let mut nodes = Vec::new();
        let mut masses = Vec::new();
        for (lineno, line) in input.lines().enumerate() {
            let line = line.map_err(|e| Error::Parse(e.to_string()))?;
            let line = line.trim();
            if line.is_empty() || (lineno == 0 && line.starts_with("node")) {
                continue;
            }
            let mut parts = line.split(',');
            let mut next = |what: &str| -> Result<f64> {
                parts
                    .next()
                    .ok_or_else(|| Error::Parse(format!("line {}: missing {what}", lineno + 1)))?
                    .trim()
                    .parse::<f64>()
                    .map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 1)))
            };
            nodes.push(next("node")?);
            masses.push(next("weight")?);
        }
        if nodes.is_empty() {
            return Err(Error::Parse("no rows".into()));
        }
        let weights = cell_widths(&nodes);
        Self::from_masses(nodes, weights, &masses)
    }
}

fn cell_widths(nodes: &[f64]) -> Vec<f64> {
    let n = nodes.len();
    if n == 1 {
        return vec![1.0];
    }
    (0..n)
        .map(|i| {
            let left = if i == 0 { 0.0 } else { nodes[i] - nodes[i - 1] };
            let right = if i == n - 1 {
                0.0
            } else {
                nodes[i + 1] - nodes[i]
            };
            0.5 * (left + right)
        })
        .collect()
}

/// `ξ(μ,λ,θ) = (1+λ)θ / (1 + 2μλθ)`.
pub fn xi_of_theta(tp: &TiltParams, theta: f64) -> f64 {
    (1.0 + tp.lambda) * theta / (1.0 + 2.0 * tp.mu * tp.lambda * theta)
}

/// `ln p_N(y - x)` for the channel noise.
fn log_noise_pdf(ch: &Channel, d: f64) -> f64 {
    let s2 = ch.noise_variance();
    -0.5 * (LN_2PI + s2.ln()) - 0.5 * d * d / s2
}

/// `Ω^{(μ,λ)}(q_X, Q)`: log of the double integral of
/// `q_X(x) p_N(y-x)^{1+λ} e^{-μλx²} / Q(y)^λ`, with `y` integrated on the
/// grid of `q_out`.
pub fn omega(
    qx: &DiscretizedDensity,
    q_out: &DiscretizedDensity,
    tp: &TiltParams,
    ch: &Channel,
) -> Result<f64> {
    let q_log = q_out.log_densities();
    if let Some(j) = q_log.iter().position(|v| !v.is_finite()) {
        return Err(domain(
            "Q",
            q_out.nodes[j],
            "output density must be positive on its grid",
        ));
    }
    let power = 1.0 + tp.lambda;
    let tilt: Vec<f64> = qx
        .nodes
        .iter()
        .zip(&qx.log_masses)
        .map(|(&x, &lm)| lm - tp.mu * tp.lambda * x * x)
        .collect();
    let per_y: Vec<f64> = q_out
        .nodes
        .iter()
        .zip(&q_out.rule_weights)
        .zip(&q_log)
        .map(|((&y, &w), &lq)| {
            let inner = log_sum_exp(
                qx.nodes
                    .iter()
                    .zip(&tilt)
                    .map(|(&x, &t)| t + power * log_noise_pdf(ch, y - x)),
            );
            w.ln() + inner - tp.lambda * lq
        })
        .collect();
    Ok(log_sum_exp(per_y))
}

/// Output grid for the tilted law with Ω-side exponent `lambda`: the input
/// support stretched by `√(1+λ)` plus `L` noise deviations, spaced at half the
/// width of the sharpened kernel.
fn tilted_output_rule(
    qx: &DiscretizedDensity,
    lambda: f64,
    ch: &Channel,
    spec: &QuadratureSpec,
) -> (Vec<f64>, Vec<f64>) {
    let s = (1.0 + lambda).sqrt();
    let sigma = ch.noise_variance().sqrt();
    let x_lo = qx.nodes[0];
    let x_hi = qx.nodes[qx.len() - 1];
    let lo = x_lo.min(s * x_lo) - spec.half_width * sigma;
    let hi = x_hi.max(s * x_hi) + spec.half_width * sigma;
    let n = spec.nodes_for_spacing(hi - lo, 0.5 * sigma / s);
    spec.rule_on(lo, hi, n)
}

/// `ln A(y) = ln ∫ q_X(x) p_N(y-x)^{1+λ} e^{-μλx²} dx` on the given nodes.
fn log_tilted_average(
    qx: &DiscretizedDensity,
    ys: &[f64],
    power: f64,
    mu_lambda: f64,
    ch: &Channel,
) -> Vec<f64> {
    let tilt: Vec<f64> = qx
        .nodes
        .iter()
        .zip(&qx.log_masses)
        .map(|(&x, &lm)| lm - mu_lambda * x * x)
        .collect();
    ys.iter()
        .map(|&y| {
            log_sum_exp(
                qx.nodes
                    .iter()
                    .zip(&tilt)
                    .map(|(&x, &t)| t + power * log_noise_pdf(ch, y - x)),
            )
        })
        .collect()
}

/// `J^{(μ,λ)}(q_X)` for `λ ∈ [0,1)`:
/// `ln ∫ dy [∫ dx q_X(x) {p_N(y-x) e^{-μλx²}}^{1/(1-λ)}]^{1-λ}`.
pub fn j_functional(
    qx: &DiscretizedDensity,
    tp: &TiltParams,
    ch: &Channel,
    spec: &QuadratureSpec,
) -> Result<f64> {
    if !(tp.lambda < 1.0) {
        return Err(domain("lambda", tp.lambda, "must lie in [0, 1)"));
    }
    let power = 1.0 / (1.0 - tp.lambda);
    let (ys, ws) = tilted_output_rule(qx, power - 1.0, ch, spec);
    let tilt: Vec<f64> = qx
        .nodes
        .iter()
        .zip(&qx.log_masses)
        .map(|(&x, &lm)| lm + power * (-tp.mu * tp.lambda * x * x))
        .collect();
    let per_y = ys.iter().zip(&ws).map(|(&y, &w)| {
        let inner = log_sum_exp(
            qx.nodes
                .iter()
                .zip(&tilt)
                .map(|(&x, &t)| t + power * log_noise_pdf(ch, y - x)),
        );
        w.ln() + (1.0 - tp.lambda) * inner
    });
    Ok(log_sum_exp(per_y.collect::<Vec<_>>()))
}

/// The minimizing output law and its log-normalizer `ln κ⁻¹`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TiltedOutput {
    pub density: DiscretizedDensity,
    pub log_normalizer: f64,
}

/// `Q(y) = κ A(y)^{1/(1+λ)}`, the output law minimizing `Ω^{(μ,λ)}(q_X, ·)`.
pub fn optimal_tilted_output(
    qx: &DiscretizedDensity,
    tp: &TiltParams,
    ch: &Channel,
    spec: &QuadratureSpec,
) -> Result<TiltedOutput> {
    let power = 1.0 + tp.lambda;
    let (ys, ws) = tilted_output_rule(qx, tp.lambda, ch, spec);
    let log_a = log_tilted_average(qx, &ys, power, tp.mu * tp.lambda, ch);
    let raw: Vec<f64> = ws
        .iter()
        .zip(&log_a)
        .map(|(w, la)| w.ln() + la / power)
        .collect();
    let log_normalizer = log_sum_exp(raw.iter().copied());
    if !log_normalizer.is_finite() {
        return Err(Error::Density("tilted output has no finite mass".into()));
    }
    let log_masses = raw.into_iter().map(|v| v - log_normalizer).collect();
    Ok(TiltedOutput {
        density: DiscretizedDensity::checked(ys, ws, log_masses)?,
        log_normalizer,
    })
}

/// `min_Q Ω^{(μ,λ)}(q_X, Q)`, attained at [`optimal_tilted_output`].
pub fn min_omega_over_q(
    qx: &DiscretizedDensity,
    tp: &TiltParams,
    ch: &Channel,
    spec: &QuadratureSpec,
) -> Result<f64> {
    let q = optimal_tilted_output(qx, tp, ch, spec)?;
    omega(qx, &q.density, tp, ch)
}

/// `N(0, variance)` discretized on a `y` grid that covers the integrand of
/// `Ω^{(μ,λ)}(q_X, ·)`. Fails when that integral diverges, i.e. when
/// `Q^{-λ}` grows faster than the sharpened kernel decays.
pub fn gaussian_output(
    qx: &DiscretizedDensity,
    tp: &TiltParams,
    ch: &Channel,
    variance: f64,
    spec: &QuadratureSpec,
) -> Result<DiscretizedDensity> {
    if !(variance.is_finite() && variance > 0.0) {
        return Err(domain("variance", variance, "must be positive and finite"));
    }
    let s2 = ch.noise_variance();
    // Precision of the y-integrand for a fixed x.
    let a = (1.0 + tp.lambda) / s2 - tp.lambda / variance;
    if !(a > 0.0) {
        return Err(domain(
            "variance",
            variance,
            "Omega diverges for this output variance",
        ));
    }
    let shift = (1.0 + tp.lambda) / (s2 * a);
    let sd = 1.0 / a.sqrt();
    let x_lo = qx.nodes[0];
    let x_hi = qx.nodes[qx.len() - 1];
    let q_sd = variance.sqrt();
    let lo = (shift * x_lo).min(x_lo) - spec.half_width * sd.max(q_sd.min(sd * 4.0));
    let hi = (shift * x_hi).max(x_hi) + spec.half_width * sd.max(q_sd.min(sd * 4.0));
    let kernel_sd = (s2 / (1.0 + tp.lambda)).sqrt();
    let n = spec.nodes_for_spacing(hi - lo, 0.5 * kernel_sd.min(sd));
    let (nodes, weights) = spec.rule_on(lo, hi, n);
    // The normalization must be the analytic one, not the grid's, since the
    // grid covers the integrand rather than Q itself.
    let log_norm = -0.5 * (LN_2PI + variance.ln());
    let log_masses = nodes
        .iter()
        .zip(&weights)
        .map(|(&y, &w)| w.ln() + log_norm - 0.5 * y * y / variance)
        .collect();
    DiscretizedDensity::checked(nodes, weights, log_masses)
}

/// `Ω^{(μ,λ)}(q_X, N(0, η+σ²))` at `η = 1/(2μ) - σ²/(1+λ)`; the Gaussian
/// output that makes `Ω` the same for every input law.
pub fn saddle_value(
    qx: &DiscretizedDensity,
    tp: &TiltParams,
    ch: &Channel,
    spec: &QuadratureSpec,
) -> Result<f64> {
    let eta = saddle_eta(tp, ch)?;
    let q = gaussian_output(qx, tp, ch, eta + ch.noise_variance(), spec)?;
    omega(qx, &q, tp, ch)
}

/// `η(μ,λ) = 1/(2μ) - σ²/(1+λ)`, defined for `0 < μ ≤ (1+λ)/(2σ²)`.
pub fn saddle_eta(tp: &TiltParams, ch: &Channel) -> Result<f64> {
    if !(tp.mu > 0.0) {
        return Err(domain("mu", tp.mu, "must be positive"));
    }
    let eta = 1.0 / (2.0 * tp.mu) - ch.noise_variance() / (1.0 + tp.lambda);
    if eta < 0.0 {
        return Err(domain("eta", eta, "mu exceeds (1+lambda)/(2 sigma^2)"));
    }
    Ok(eta)
}

/// Maximum of `ζ^{(μ,λ)}(ξ)` over `0 ≤ ξ < (1+λ)/(2μλ)` and where it sits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnderlineOmega {
    pub value: f64,
    pub argmax_xi: f64,
}

/// `max_ξ ζ^{(μ,λ)}(ξ)` by golden-section search; the Gaussian-family value
/// of `max_{q_X} min_Q Ω`.
pub fn underline_omega(tp: &TiltParams, ch: &Channel) -> Result<UnderlineOmega> {
    if tp.lambda == 0.0 {
        return Ok(UnderlineOmega {
            value: 0.0,
            argmax_xi: 0.0,
        });
    }
    if !(tp.mu > 0.0) {
        return Err(domain("mu", tp.mu, "must be positive when lambda > 0"));
    }
    let upper = (1.0 + tp.lambda) / (2.0 * tp.mu * tp.lambda);
    let (xi, neg) = golden_section_min(
        |xi| zeta(tp, xi, ch).map(|z| -z).unwrap_or(f64::INFINITY),
        0.0,
        upper,
    );
    Ok(UnderlineOmega {
        value: -neg,
        argmax_xi: xi,
    })
}

/// Search box for [`g_oh_numeric`]. `λ` is gridded through `ρ = λ/(1+λ)`
/// and `μ` through `t = 2σ²μ/(1+λ)`, so `t ≤ 1` is the region where the
/// Gaussian saddle exists.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GohGrid {
    pub rho_steps: usize,
    pub t_steps: usize,
    pub rho_max: f64,
    pub t_max: f64,
    pub refine: bool,
}

impl Default for GohGrid {
    fn default() -> Self {
        Self {
            rho_steps: 60,
            t_steps: 60,
            rho_max: 0.9999,
            t_max: 1.0,
            refine: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GohResult {
    pub value: f64,
    pub mu: f64,
    pub lambda: f64,
    /// `t = 2σ²μ/(1+λ)` at the maximizer.
    pub t: f64,
}

fn goh_objective(rho: f64, t: f64, rate: f64, pb: &PowerBudget, ch: &Channel) -> f64 {
    let lambda = rho / (1.0 - rho);
    let mu = t * (1.0 + lambda) / (2.0 * ch.noise_variance());
    if lambda == 0.0 {
        return 0.0;
    }
    match underline_omega(&TiltParams { mu, lambda }, ch) {
        Ok(u) => (lambda * (rate - mu * pb.gamma()) - u.value) / (1.0 + lambda),
        Err(_) => f64::NEG_INFINITY,
    }
}

/// `G_OH(R) = sup_{μ,λ ≥ 0} [λ(R - μΓ) - max_ξ ζ^{(μ,λ)}(ξ)] / (1+λ)` by a grid
/// search refined with Nelder-Mead.
pub fn g_oh_numeric(
    rate: f64,
    pb: &PowerBudget,
    ch: &Channel,
    grid: &GohGrid,
) -> Result<GohResult> {
    if !(rate.is_finite() && rate > 0.0) {
        return Err(domain("rate", rate, "must be positive and finite"));
    }
    if !(grid.rho_max > 0.0
        && grid.rho_max < 1.0
        && grid.t_max > 0.0
        && grid.rho_steps >= 1
        && grid.t_steps >= 1)
    {
        return Err(Error::Solver("invalid G_OH search grid".into()));
    }
    let mut best = (0.0, 0.0, 0.0);
    for i in 0..=grid.rho_steps {
        let rho = grid.rho_max * i as f64 / grid.rho_steps as f64;
        for j in 1..=grid.t_steps {
            let t = grid.t_max * j as f64 / grid.t_steps as f64;
            let v = goh_objective(rho, t, rate, pb, ch);
            if v > best.2 {
                best = (rho, t, v);
            }
        }
    }
    if grid.refine && best.2 > 0.0 {
        let (rho_max, t_max) = (grid.rho_max, grid.t_max);
        let f = |p: &[f64]| {
            if !(p[0] >= 0.0 && p[0] <= rho_max && p[1] > 0.0 && p[1] <= t_max) {
                return f64::NAN;
            }
            -goh_objective(p[0], p[1], rate, pb, ch)
        };
        let opts = NelderMeadOptions {
            initial_step: 0.5 / grid.rho_steps.min(grid.t_steps) as f64,
            ..NelderMeadOptions::default()
        };
        let m = nelder_mead_restarted(f, &[best.0, best.1], opts, 4);
        if -m.value > best.2 {
            best = (m.x[0], m.x[1], -m.value);
        }
    }
    let lambda = best.0 / (1.0 - best.0);
    Ok(GohResult {
        value: best.2,
        mu: best.1 * (1.0 + lambda) / (2.0 * ch.noise_variance()),
        lambda,
        t: best.1,
    })
}

/// Short name of a rule, for diagnostics.
pub fn rule_name(rule: QuadratureRule) -> &'static str {
    match rule {
        QuadratureRule::Trapezoid => "trapezoid",
        QuadratureRule::GaussLegendre => "gauss_legendre",
    }
}
