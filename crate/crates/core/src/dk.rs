//! Upper-bound exponent as a minimization of `[R - I]⁺ + D` over zero-mean
//! Gaussian inputs `N(0, θ)` and Gaussian test channels `Y = αX + N(0, ξ)`,
//! together with its Lagrangian forms in `μ` and `(μ, λ)`.

use serde::{Deserialize, Serialize};

use crate::channel::{
    capacity, gaussian_conditional_divergence, gaussian_mutual_information, positive_part, Channel,
    GaussianInputLaw, GaussianTestChannel, PowerBudget,
};
use crate::closed_form::nu_zero;
use crate::error::{domain, Result};
use crate::optim::{golden_section_min, nelder_mead_restarted, NelderMeadOptions};

/// Input variance `θ`, test-channel gain `α` and test noise variance `ξ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianJointParams {
    pub theta: f64,
    pub alpha: f64,
    pub xi: f64,
}

impl GaussianJointParams {
    pub fn new(theta: f64, alpha: f64, xi: f64) -> Result<Self> {
        if !(theta.is_finite() && theta >= 0.0) {
            return Err(domain("theta", theta, "must be nonnegative and finite"));
        }
        if !alpha.is_finite() {
            return Err(domain("alpha", alpha, "must be finite"));
        }
        if !(xi.is_finite() && xi > 0.0) {
            return Err(domain("xi", xi, "must be positive and finite"));
        }
        Ok(Self { theta, alpha, xi })
    }

    /// The channel itself driven at full power.
    pub fn true_channel(pb: &PowerBudget, ch: &Channel) -> Self {
        Self {
            theta: pb.gamma(),
            alpha: 1.0,
            xi: ch.noise_variance(),
        }
    }

    pub fn mutual_information(&self) -> f64 {
        gaussian_mutual_information(
            &GaussianInputLaw { theta: self.theta },
            &self.test_channel(),
        )
    }

    pub fn divergence(&self, ch: &Channel) -> f64 {
        gaussian_conditional_divergence(
            &GaussianInputLaw { theta: self.theta },
            &self.test_channel(),
            ch,
        )
    }

    pub fn test_channel(&self) -> GaussianTestChannel {
        GaussianTestChannel {
            alpha: self.alpha,
            xi: self.xi,
        }
    }
}

/// `[R - I(θ,α,ξ)]⁺ + D(θ,α,ξ‖σ²)`. The power constraint `θ ≤ Γ` is the
/// caller's responsibility.
pub fn dk_objective(p: &GaussianJointParams, rate: f64, _pb: &PowerBudget, ch: &Channel) -> f64 {
    positive_part(rate - p.mutual_information()) + p.divergence(ch)
}

/// Which candidate produced the minimum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DkBranch {
    /// The channel itself, `θ = Γ, α = 1, ξ = σ²`.
    TrueChannel,
    /// Test channels with `I = R`, where the objective reduces to `D`.
    RateBoundary,
    /// Test channels with `I ≤ R`, where the objective is `R - I + D`.
    Linear,
    /// Direct search on the kinked objective.
    Direct,
    /// The limit `θ → 0` (Lagrangian forms only).
    ZeroInput,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DkSolution {
    pub value: f64,
    pub params: GaussianJointParams,
    pub branch: DkBranch,
    pub mutual_information: f64,
    pub divergence: f64,
}

/// Fixed start table `(θ/Γ, α, ξ/σ²)` for the direct searches.
const STARTS: [(f64, f64, f64); 8] = [
    (1.0, 1.0, 1.0),
    (1.0, 0.8, 0.5),
    (1.0, 1.2, 0.3),
    (0.5, 0.5, 1.0),
    (0.9, 1.5, 0.8),
    (0.2, 0.3, 2.0),
    (1.0, 0.6, 0.2),
    (0.7, 1.0, 0.1),
];

fn nm_opts(step: f64) -> NelderMeadOptions {
    NelderMeadOptions {
        initial_step: step,
        ..NelderMeadOptions::default()
    }
}

/// Collects candidates and keeps the first strict minimum of the true
/// objective, so ties resolve by insertion order.
struct Best {
    solution: Option<DkSolution>,
}

impl Best {
    fn offer(&mut self, params: GaussianJointParams, value: f64, branch: DkBranch, ch: &Channel) {
        if !value.is_finite() {
            return;
        }
        if self.solution.map_or(true, |s| value < s.value) {
            self.solution = Some(DkSolution {
                value,
                params,
                branch,
                mutual_information: params.mutual_information(),
                divergence: params.divergence(ch),
            });
        }
    }
}

/// `e^{2R} - 1`: the test noise variance per unit `α²θ` at which `I = R`.
fn rate_snr(rate: f64) -> f64 {
    (2.0 * rate).exp_m1()
}

/// `θ = Γ cos² u` keeps the power constraint without clamping.
fn theta_of(u: f64, gamma: f64) -> f64 {
    let c = u.cos();
    gamma * c * c
}

/// Minimum of `[R - I]⁺ + D` over `θ ∈ [0, Γ]`, `α`, `ξ > 0`.
pub fn g_dk_detailed(rate: f64, pb: &PowerBudget, ch: &Channel) -> Result<DkSolution> {
    if !(rate.is_finite() && rate > 0.0) {
        return Err(domain("rate", rate, "must be positive and finite"));
    }
    let gamma = pb.gamma();
    let s2 = ch.noise_variance();
    let eval = |p: &GaussianJointParams| dk_objective(p, rate, pb, ch);
    let mut best = Best { solution: None };

    let truth = GaussianJointParams::true_channel(pb, ch);
    best.offer(truth, eval(&truth), DkBranch::TrueChannel, ch);
    if rate <= capacity(ch, pb) {
        return Ok(best
            .solution
            .expect("true channel is always a finite candidate"));
    }

    let k = rate_snr(rate);
    let boundary = |x: &[f64]| -> Option<GaussianJointParams> {
        let theta = theta_of(x[0], gamma);
        let xi = x[1] * x[1] * theta / k;
        GaussianJointParams::new(theta, x[1], xi).ok()
    };
    for &(u0, a0) in &[(0.0, 1.0), (0.0, 0.5), (0.4, 1.5), (0.8, 0.8)] {
        let m = nelder_mead_restarted(
            |x| boundary(x).map_or(f64::NAN, |p| p.divergence(ch)),
            &[u0, a0],
            nm_opts(0.2),
            3,
        );
        if let Some(p) = boundary(&m.x) {
            best.offer(p, eval(&p), DkBranch::RateBoundary, ch);
        }
    }

    let full =
        |x: &[f64]| GaussianJointParams::new(theta_of(x[0], gamma), x[1], s2 * x[2].exp()).ok();
    for &(t0, a0, x0) in &STARTS {
        let start = [t0.sqrt().acos(), a0, x0.ln()];
        let linear = nelder_mead_restarted(
            |x| match full(x) {
                Some(p) if p.mutual_information() <= rate => {
                    rate - p.mutual_information() + p.divergence(ch)
                }
                _ => f64::NAN,
            },
            &start,
            nm_opts(0.25),
            3,
        );
        if let Some(p) = full(&linear.x) {
            if p.mutual_information() <= rate {
                best.offer(p, eval(&p), DkBranch::Linear, ch);
            }
        }
        let direct = nelder_mead_restarted(
            |x| full(x).map_or(f64::NAN, |p| eval(&p)),
            &start,
            nm_opts(0.25),
            3,
        );
        if let Some(p) = full(&direct.x) {
            best.offer(p, eval(&p), DkBranch::Direct, ch);
        }
    }
    Ok(best
        .solution
        .expect("true channel is always a finite candidate"))
}

/// Value of [`g_dk_detailed`].
pub fn g_dk(rate: f64, pb: &PowerBudget, ch: &Channel) -> Result<f64> {
    g_dk_detailed(rate, pb, ch).map(|s| s.value)
}

/// `min_{θ ≥ 0, α, ξ} [R - I]⁺ + D - μ(Γ - θ)`.
pub fn g_dk_mu_detailed(mu: f64, rate: f64, pb: &PowerBudget, ch: &Channel) -> Result<DkSolution> {
    if !(mu.is_finite() && mu >= 0.0) {
        return Err(domain("mu", mu, "must be nonnegative and finite"));
    }
    if !(rate.is_finite() && rate > 0.0) {
        return Err(domain("rate", rate, "must be positive and finite"));
    }
    let gamma = pb.gamma();
    let s2 = ch.noise_variance();
    let lagrangian =
        |p: &GaussianJointParams| dk_objective(p, rate, pb, ch) - mu * (gamma - p.theta);
    let mut best = Best { solution: None };

    // θ → 0 with the true channel leaves R - μΓ; θ large enough with the
    // true channel gives μ(θ - Γ) once I ≥ R.
    let zero = GaussianJointParams {
        theta: 0.0,
        alpha: 1.0,
        xi: s2,
    };
    best.offer(zero, lagrangian(&zero), DkBranch::ZeroInput, ch);
    let k = rate_snr(rate);
    let covering = GaussianJointParams {
        theta: s2 * k,
        alpha: 1.0,
        xi: s2,
    };
    best.offer(covering, lagrangian(&covering), DkBranch::TrueChannel, ch);
    if mu == 0.0 {
        return Ok(best.solution.expect("finite candidates"));
    }

    let boundary = |x: &[f64]| -> Option<GaussianJointParams> {
        let theta = x[0].exp();
        GaussianJointParams::new(theta, x[1], x[1] * x[1] * theta / k).ok()
    };
    let scale = gamma.ln();
    for &(t0, a0) in &[(0.0, 1.0), (0.0, 0.6), (1.0, 1.3), (-1.0, 0.8)] {
        let m = nelder_mead_restarted(
            |x| boundary(x).map_or(f64::NAN, |p| p.divergence(ch) + mu * (p.theta - gamma)),
            &[scale + t0, a0],
            nm_opts(0.2),
            3,
        );
        if let Some(p) = boundary(&m.x) {
            best.offer(p, lagrangian(&p), DkBranch::RateBoundary, ch);
        }
    }
    let full = |x: &[f64]| GaussianJointParams::new(x[0].exp(), x[1], s2 * x[2].exp()).ok();
    for &(t0, a0, x0) in &STARTS {
        let start = [(gamma * t0).ln(), a0, x0.ln()];
        let direct = nelder_mead_restarted(
            |x| full(x).map_or(f64::NAN, |p| lagrangian(&p)),
            &start,
            nm_opts(0.25),
            3,
        );
        if let Some(p) = full(&direct.x) {
            best.offer(p, lagrangian(&p), DkBranch::Direct, ch);
        }
    }
    Ok(best.solution.expect("finite candidates"))
}

pub fn g_dk_mu(mu: f64, rate: f64, pb: &PowerBudget, ch: &Channel) -> Result<f64> {
    g_dk_mu_detailed(mu, rate, pb, ch).map(|s| s.value)
}

/// `min_{θ ≥ 0, α, ξ} λ[R - I] - μΓ + μθ + D`, for `λ ∈ [0, 1]`.
pub fn g_dk_mu_lambda_detailed(
    mu: f64,
    lambda: f64,
    rate: f64,
    pb: &PowerBudget,
    ch: &Channel,
) -> Result<DkSolution> {
    if !(mu.is_finite() && mu >= 0.0) {
        return Err(domain("mu", mu, "must be nonnegative and finite"));
    }
    if !(0.0..=1.0).contains(&lambda) {
        return Err(domain("lambda", lambda, "must lie in [0, 1]"));
    }
    if !(rate.is_finite() && rate > 0.0) {
        return Err(domain("rate", rate, "must be positive and finite"));
    }
    let gamma = pb.gamma();
    let s2 = ch.noise_variance();
    let lagrangian = |p: &GaussianJointParams| {
        lambda * (rate - p.mutual_information()) - mu * gamma + mu * p.theta + p.divergence(ch)
    };
    let mut best = Best { solution: None };
    let zero = GaussianJointParams {
        theta: 0.0,
        alpha: 1.0,
        xi: s2,
    };
    best.offer(zero, lagrangian(&zero), DkBranch::ZeroInput, ch);
    if mu == 0.0 {
        // Without a power price the infimum is approached as θ → ∞ through
        // the true channel when λ > 0; report the θ → 0 value otherwise.
        if lambda > 0.0 {
            best.solution = Some(DkSolution {
                value: f64::NEG_INFINITY,
                params: GaussianJointParams::true_channel(pb, ch),
                branch: DkBranch::TrueChannel,
                mutual_information: f64::INFINITY,
                divergence: 0.0,
            });
        }
        return Ok(best.solution.expect("finite candidates"));
    }
    let full = |x: &[f64]| GaussianJointParams::new(x[0].exp(), x[1], s2 * x[2].exp()).ok();
    for &(t0, a0, x0) in STARTS.iter().take(4) {
        let start = [(gamma * t0).ln(), a0, x0.ln()];
        let m = nelder_mead_restarted(
            |x| full(x).map_or(f64::NAN, |p| lagrangian(&p)),
            &start,
            nm_opts(0.25),
            3,
        );
        if let Some(p) = full(&m.x) {
            best.offer(p, lagrangian(&p), DkBranch::Direct, ch);
        }
    }
    Ok(best.solution.expect("finite candidates"))
}

pub fn g_dk_mu_lambda(
    mu: f64,
    lambda: f64,
    rate: f64,
    pb: &PowerBudget,
    ch: &Channel,
) -> Result<f64> {
    g_dk_mu_lambda_detailed(mu, lambda, rate, pb, ch).map(|s| s.value)
}

/// Largest `μ` searched by the dual maximizations. The optimal multiplier is
/// `ν*/(2σ²) < ν₀/(2σ²)`, so this bracket always contains it.
fn mu_ceiling(pb: &PowerBudget, ch: &Channel) -> f64 {
    (nu_zero(pb, ch) + 0.5) / ch.noise_variance()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DkDualResult {
    pub value: f64,
    pub mu: f64,
    /// `λ` at the maximizer; `1` for the `μ`-only form.
    pub lambda: f64,
    /// Inner minimizer at the maximizing multipliers.
    pub inner: DkSolution,
    /// The maximizing `λ` sits on an end of `[0, 1]`.
    pub lambda_on_boundary: bool,
}

/// `max_{μ ≥ 0} g_dk_mu(μ)`. The dual function is concave in `μ`, so a
/// golden-section search on `[0, (ν₀ + ½)/σ²]` suffices.
pub fn g_dk_mu_max(rate: f64, pb: &PowerBudget, ch: &Channel) -> Result<DkDualResult> {
    let hi = mu_ceiling(pb, ch);
    let (mu, neg) = golden_section_min(
        |mu| g_dk_mu(mu, rate, pb, ch).map_or(f64::INFINITY, |v| -v),
        0.0,
        hi,
    );
    let inner = g_dk_mu_detailed(mu, rate, pb, ch)?;
    Ok(DkDualResult {
        value: -neg,
        mu,
        lambda: 1.0,
        inner,
        lambda_on_boundary: false,
    })
}

/// `max_{μ ≥ 0, λ ∈ [0,1]} g_dk_mu_lambda(μ, λ)` by an `11 × 21` grid refined
/// with Nelder-Mead.
pub fn g_dk_mu_lambda_max(rate: f64, pb: &PowerBudget, ch: &Channel) -> Result<DkDualResult> {
    let hi = mu_ceiling(pb, ch);
    let value = |lambda: f64, mu: f64| {
        g_dk_mu_lambda(mu, lambda, rate, pb, ch).unwrap_or(f64::NEG_INFINITY)
    };
    let mut best = (0.0, 0.0, value(0.0, 0.0));
    for i in 0..=10 {
        let lambda = i as f64 / 10.0;
        for j in 1..=20 {
            let mu = hi * j as f64 / 20.0;
            let v = value(lambda, mu);
            if v > best.2 {
                best = (lambda, mu, v);
            }
        }
    }
    let m = nelder_mead_restarted(
        |x| {
            if !((0.0..=1.0).contains(&x[0]) && x[1] > 0.0 && x[1] <= hi) {
                return f64::NAN;
            }
            -value(x[0], x[1])
        },
        &[best.0, best.1.max(hi / 40.0)],
        nm_opts(0.05),
        3,
    );
    if -m.value > best.2 {
        best = (m.x[0], m.x[1], -m.value);
    }
    let inner = g_dk_mu_lambda_detailed(best.1, best.0, rate, pb, ch)?;
    Ok(DkDualResult {
        value: best.2,
        mu: best.1,
        lambda: best.0,
        inner,
        lambda_on_boundary: best.0 <= 1e-6 || best.0 >= 1.0 - 1e-6,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closed_form::{exponent_at_rate, parametric_point};

    fn unit() -> (PowerBudget, Channel) {
        (PowerBudget::new(1.0).unwrap(), Channel::new(1.0).unwrap())
    }

    #[test]
    fn objective_examples() {
        let (pb, ch) = unit();
        let c = capacity(&ch, &pb);
        let truth = GaussianJointParams::true_channel(&pb, &ch);
        assert!(dk_objective(&truth, c, &pb, &ch).abs() < 1e-15);
        assert!((dk_objective(&truth, c + 0.2, &pb, &ch) - 0.2).abs() < 1e-12);
        let p = GaussianJointParams::new(1.0, 0.5, 1.0).unwrap();
        let v = dk_objective(&p, 1.0, &pb, &ch);
        assert!((v - (1.0 - 0.5 * 1.25f64.ln() + 0.125)).abs() < 1e-15);
        assert!((v - 1.013_428).abs() < 1e-6);
        assert!(GaussianJointParams::new(-1.0, 1.0, 1.0).is_err());
        assert!(GaussianJointParams::new(1.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn g_dk_matches_parametric() {
        let (pb, ch) = unit();
        let c = capacity(&ch, &pb);
        assert_eq!(g_dk(c, &pb, &ch).unwrap(), 0.0);
        let p = parametric_point(0.3, &pb, &ch).unwrap();
        let s = g_dk_detailed(p.rate, &pb, &ch).unwrap();
        assert!((s.value - p.exponent).abs() < 1e-6, "{s:?}");
        assert!(s.mutual_information <= p.rate + 1e-9 && s.divergence > 0.0);
        let v = g_dk(1.0, &pb, &ch).unwrap();
        assert!((v - exponent_at_rate(1.0, &pb, &ch).unwrap()).abs() < 1e-6);
    }

    #[test]
    fn lagrangian_forms_recover_g_dk() {
        let (pb, ch) = unit();
        let p = parametric_point(0.3, &pb, &ch).unwrap();
        let dual = g_dk_mu_max(p.rate, &pb, &ch).unwrap();
        assert!((dual.value - p.exponent).abs() < 1e-5, "{dual:?}");
        assert!((dual.inner.params.theta - 1.0).abs() < 1e-3, "{dual:?}");
        let dual2 = g_dk_mu_lambda_max(p.rate, &pb, &ch).unwrap();
        assert!((dual2.value - p.exponent).abs() < 1e-4, "{dual2:?}");
        for mu in [0.0, 0.3, 1.0] {
            assert!(g_dk_mu_lambda(mu, 0.0, p.rate, &pb, &ch).unwrap() <= 1e-12);
        }
    }
}
