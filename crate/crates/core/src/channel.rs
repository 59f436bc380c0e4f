//! Gaussian channel primitives shared by every exponent route.
//!
//! All quantities are in nats. The channel law is
//! `W(y|x) = exp(-(y-x)²/(2σ²)) / sqrt(2πσ²)`.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// Additive white Gaussian noise channel, specified by its noise variance σ².
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Channel {
    noise_variance: f64,
}

impl Channel {
    pub fn new(noise_variance: f64) -> Result<Self> {
        if !(noise_variance.is_finite() && noise_variance > 0.0) {
            return Err(domain(
                "noise_variance",
                noise_variance,
                "must be positive and finite",
            ));
        }
        Ok(Self { noise_variance })
    }

    pub fn noise_variance(&self) -> f64 {
        self.noise_variance
    }

    /// `ln W(y|x)`.
    pub fn log_density(&self, y: f64, x: f64) -> f64 {
        let d = y - x;
        -0.5 * d * d / self.noise_variance
            - 0.5 * (2.0 * std::f64::consts::PI * self.noise_variance).ln()
    }
}

/// Average power budget Γ on codewords, with cost `c(x) = x²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerBudget {
    gamma: f64,
}

impl PowerBudget {
    pub fn new(gamma: f64) -> Result<Self> {
        if !(gamma.is_finite() && gamma > 0.0) {
            return Err(domain("gamma", gamma, "must be positive and finite"));
        }
        Ok(Self { gamma })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Signal-to-noise ratio Γ/σ².
    pub fn snr(&self, ch: &Channel) -> f64 {
        self.gamma / ch.noise_variance
    }
}

/// Zero-mean Gaussian input law with variance θ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianInputLaw {
    pub(crate) theta: f64,
}

impl GaussianInputLaw {
    pub fn new(theta: f64) -> Result<Self> {
        if !(theta.is_finite() && theta >= 0.0) {
            return Err(domain("theta", theta, "must be nonnegative and finite"));
        }
        Ok(Self { theta })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }
}

/// Auxiliary Gaussian channel `Y = αX + S` with `S ~ N(0, ξ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianTestChannel {
    pub(crate) alpha: f64,
    pub(crate) xi: f64,
}

impl GaussianTestChannel {
    pub fn new(alpha: f64, xi: f64) -> Result<Self> {
        if !alpha.is_finite() {
            return Err(domain("alpha", alpha, "must be finite"));
        }
        if !(xi.is_finite() && xi > 0.0) {
            return Err(domain("xi", xi, "must be positive and finite"));
        }
        Ok(Self { alpha, xi })
    }

    /// The test channel that coincides with `ch`.
    pub fn identity(ch: &Channel) -> Self {
        Self {
            alpha: 1.0,
            xi: ch.noise_variance,
        }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn xi(&self) -> f64 {
        self.xi
    }
}

/// Capacity `½ ln(1 + Γ/σ²)` of the power-constrained channel.
pub fn capacity(ch: &Channel, pb: &PowerBudget) -> f64 {
    0.5 * pb.snr(ch).ln_1p()
}

/// Mutual information `½ ln(1 + α²θ/ξ)` of the jointly Gaussian pair.
pub fn gaussian_mutual_information(input: &GaussianInputLaw, tc: &GaussianTestChannel) -> f64 {
    0.5 * (tc.alpha * tc.alpha * input.theta / tc.xi).ln_1p()
}

/// Conditional divergence `D(q_{Y|X} ‖ W | q_X)` between the test channel and
/// the true channel under a Gaussian input:
/// `½(1-α)²θ/σ² + ½[ξ/σ² - 1 + ln(σ²/ξ)]`.
pub fn gaussian_conditional_divergence(
    input: &GaussianInputLaw,
    tc: &GaussianTestChannel,
    ch: &Channel,
) -> f64 {
    let s2 = ch.noise_variance;
    let r = tc.xi / s2;
    let gain_gap = 1.0 - tc.alpha;
    // r - 1 - ln r loses everything to cancellation near r = 1.
    let variance_term = if (r - 1.0).abs() < 1e-4 {
        let u = r - 1.0;
        u * u / 2.0 - u * u * u / 3.0 + u * u * u * u / 4.0
    } else {
        r - 1.0 - r.ln()
    };
    0.5 * gain_gap * gain_gap * input.theta / s2 + 0.5 * variance_term
}

/// Binary entropy in nats, with `0 ln 0 = 0`.
pub fn binary_entropy(p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(domain("p", p, "must lie in [0, 1]"));
    }
    Ok(xlogx_neg(p) + xlogx_neg(1.0 - p))
}

fn xlogx_neg(p: f64) -> f64 {
    if p <= 0.0 {
        0.0
    } else {
        -p * p.ln()
    }
}

/// `[t]⁺ = max(0, t)`.
pub fn positive_part(t: f64) -> f64 {
    t.max(0.0)
}
