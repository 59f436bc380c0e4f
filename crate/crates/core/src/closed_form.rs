//! Closed-form side of the exponent: the tilted log-moment `ζ`, the Lagrangian
//! objective `L` in both parameterizations, the parametric exponent curve and
//! the convex `(ρ, ν)` solver built on the analytic gradient and Hessian.
//!
//! Conventions: `g = Γ/σ²` is the signal-to-noise ratio; `F = -L` is the
//! convex objective minimized over the feasible region
//! `ν/(1+ν) ≤ ρ < 1, ν ≥ 0`.

use serde::{Deserialize, Serialize};

use crate::channel::{binary_entropy, capacity, Channel, PowerBudget};
use crate::error::{domain, Error, Result};
use crate::optim::golden_section_min;
use crate::tolerances::{NU_ZERO_BACKOFF, PARAM_TOL, RATE_ROOT_TOL, RHO_NU_GRID};

/// Lagrange multiplier μ for the power cost and tilting exponent λ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TiltParams {
    pub mu: f64,
    pub lambda: f64,
}

impl TiltParams {
    pub fn new(mu: f64, lambda: f64) -> Result<Self> {
        if !(mu.is_finite() && mu >= 0.0) {
            return Err(domain("mu", mu, "must be nonnegative and finite"));
        }
        if !(lambda.is_finite() && lambda >= 0.0) {
            return Err(domain("lambda", lambda, "must be nonnegative and finite"));
        }
        Ok(Self { mu, lambda })
    }

    /// `λ/(1+λ)`.
    pub fn rho(&self) -> f64 {
        self.lambda / (1.0 + self.lambda)
    }
}

/// Reparameterization `ρ = λ/(1+λ)`, `ν = 2λμσ²/(1+λ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RhoNuParams {
    pub rho: f64,
    pub nu: f64,
}

impl RhoNuParams {
    /// Builds a feasible pair, `0 ≤ ν/(1+ν) ≤ ρ < 1`.
    pub fn new(rho: f64, nu: f64) -> Result<Self> {
        let rn = Self { rho, nu };
        rn.check_feasible()?;
        Ok(rn)
    }

    pub fn is_feasible(&self) -> bool {
        self.check_feasible().is_ok()
    }

    fn check_feasible(&self) -> Result<()> {
        if !(self.nu.is_finite() && self.nu >= 0.0) {
            return Err(domain("nu", self.nu, "must be nonnegative and finite"));
        }
        if !(self.rho.is_finite() && (0.0..1.0).contains(&self.rho)) {
            return Err(domain("rho", self.rho, "must lie in [0, 1)"));
        }
        if self.rho < self.nu / (1.0 + self.nu) {
            return Err(domain("rho", self.rho, "must be at least nu/(1+nu)"));
        }
        Ok(())
    }

    fn check_interior(&self) -> Result<()> {
        if !(self.nu.is_finite() && self.nu > 0.0) {
            return Err(domain(
                "nu",
                self.nu,
                "must be positive at an interior point",
            ));
        }
        if !(self.rho.is_finite() && self.rho > 0.0 && self.rho < 1.0) {
            return Err(domain(
                "rho",
                self.rho,
                "must lie in (0, 1) at an interior point",
            ));
        }
        Ok(())
    }
}

/// One point `(R, G)` of the exponent curve and the parameter that produced it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentPoint {
    pub rate: f64,
    pub exponent: f64,
    pub nu: f64,
}

/// Which side of capacity a rate sits on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RateRegime {
    /// `R ≤ C`: the correct-decoding probability need not vanish; the
    /// exponent is reported as 0.
    BelowCapacity,
    AboveCapacity,
}

/// Exponent at a rate together with the optimal parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentSolution {
    pub rate: f64,
    pub exponent: f64,
    pub nu: f64,
    pub rho: f64,
    pub regime: RateRegime,
}

/// `ζ^{(μ,λ)}(η|σ²) = (λ/2) ln(1+η/σ²) + ½ ln(1 - (λ/(1+λ))·2μη)`.
pub fn zeta(tp: &TiltParams, eta: f64, ch: &Channel) -> Result<f64> {
    if !(eta.is_finite() && eta >= 0.0) {
        return Err(domain("eta", eta, "must be nonnegative and finite"));
    }
    let shrink = tp.rho() * 2.0 * tp.mu * eta;
    if shrink >= 1.0 {
        return Err(domain(
            "eta",
            eta,
            "1 - 2 mu eta lambda/(1+lambda) must be positive",
        ));
    }
    if tp.lambda == 0.0 {
        return Ok(0.0);
    }
    Ok(0.5 * tp.lambda * (eta / ch.noise_variance()).ln_1p() + 0.5 * (-shrink).ln_1p())
}

/// `L^{(μ,λ)}(R,Γ|σ²)` evaluated through its expanded two-logarithm form,
/// which stays defined for every `μ > 0`.
pub fn big_l_mu_lambda(tp: &TiltParams, rate: f64, pb: &PowerBudget, ch: &Channel) -> Result<f64> {
    if !(tp.mu > 0.0) {
        return Err(domain("mu", tp.mu, "must be positive"));
    }
    let s2 = ch.noise_variance();
    let rho = tp.rho();
    let one_minus = 1.0 / (1.0 + tp.lambda);
    let first = if rho == 0.0 {
        0.0
    } else {
        rho * (rate - tp.mu * pb.gamma()) - rho * 0.5 * (rho + 1.0 / (2.0 * s2 * tp.mu)).ln()
    };
    let second =
        -one_minus * 0.5 * (one_minus * (1.0 + 2.0 * tp.mu * tp.lambda * s2 * one_minus)).ln();
    Ok(first + second)
}

pub fn rho_nu_from_mu_lambda(tp: &TiltParams, ch: &Channel) -> RhoNuParams {
    let rho = tp.rho();
    RhoNuParams {
        rho,
        nu: rho * 2.0 * tp.mu * ch.noise_variance(),
    }
}

/// Inverse map `λ = ρ/(1-ρ)`, `μ = ν/(2ρσ²)`; at `ρ = ν = 0` returns `μ = 0`.
pub fn mu_lambda_from_rho_nu(rn: &RhoNuParams, ch: &Channel) -> Result<TiltParams> {
    if !(rn.rho.is_finite() && (0.0..1.0).contains(&rn.rho)) {
        return Err(domain("rho", rn.rho, "must lie in [0, 1)"));
    }
    if !(rn.nu.is_finite() && rn.nu >= 0.0) {
        return Err(domain("nu", rn.nu, "must be nonnegative and finite"));
    }
    let mu = if rn.nu == 0.0 {
        0.0
    } else if rn.rho == 0.0 {
        return Err(domain("rho", rn.rho, "must be positive when nu > 0"));
    } else {
        rn.nu / (2.0 * rn.rho * ch.noise_variance())
    };
    TiltParams::new(mu, rn.rho / (1.0 - rn.rho))
}

/// `L^{(ρ,ν)} = ρR - (ν/2)(Γ/σ²) - ½ln(1+ν) + (ρ/2)ln ν + ½h(ρ)`.
///
/// At `ν = 0` the value is `0` when `ρ = 0` and `-∞` otherwise.
pub fn big_l_rho_nu(rn: &RhoNuParams, rate: f64, pb: &PowerBudget, ch: &Channel) -> Result<f64> {
    rn.check_feasible()?;
    if rn.nu == 0.0 {
        return Ok(if rn.rho == 0.0 {
            0.0
        } else {
            f64::NEG_INFINITY
        });
    }
    let g = pb.snr(ch);
    let log_nu_term = if rn.rho == 0.0 {
        0.0
    } else {
        0.5 * rn.rho * rn.nu.ln()
    };
    Ok(rn.rho * rate - 0.5 * rn.nu * g - 0.5 * rn.nu.ln_1p()
        + log_nu_term
        + 0.5 * binary_entropy(rn.rho)?)
}

/// `ν₀`, the positive root of `ν(1+ν) = σ²/Γ`.
pub fn nu_zero(pb: &PowerBudget, ch: &Channel) -> f64 {
    let c = 1.0 / pb.snr(ch);
    // (-1 + sqrt(1+4c))/2 rewritten to avoid cancellation for small c.
    2.0 * c / (1.0 + (1.0 + 4.0 * c).sqrt())
}

fn rate_of_nu(nu: f64, g: f64) -> f64 {
    0.5 * ((g * (1.0 + nu)).ln_1p() - (-g * nu * (1.0 + nu)).ln_1p())
}

fn rate_of_nu_derivative(nu: f64, g: f64) -> f64 {
    0.5 * (g / (1.0 + g * (1.0 + nu)) + g * (1.0 + 2.0 * nu) / (1.0 - g * nu * (1.0 + nu)))
}

fn exponent_of_nu(nu: f64, g: f64) -> f64 {
    -0.5 * nu * g - 0.5 * (-g * nu * (1.0 + nu)).ln_1p()
}

/// Point of the parametric exponent curve for `ν ∈ [0, ν₀)`.
pub fn parametric_point(nu: f64, pb: &PowerBudget, ch: &Channel) -> Result<ExponentPoint> {
    let g = pb.snr(ch);
    if !(nu.is_finite() && nu >= 0.0) {
        return Err(domain("nu", nu, "must be nonnegative and finite"));
    }
    if nu >= nu_zero(pb, ch) || g * nu * (1.0 + nu) >= 1.0 {
        return Err(domain("nu", nu, "must be below nu_0"));
    }
    Ok(ExponentPoint {
        rate: rate_of_nu(nu, g),
        exponent: exponent_of_nu(nu, g),
        nu,
    })
}

/// Solves `R(ν) = rate` on `[0, ν₀)` and returns the optimal `(ν*, ρ*)` with the
/// exponent. Rates at or below capacity report exponent 0 at `ν = ρ = 0`.
pub fn exponent_solution(rate: f64, pb: &PowerBudget, ch: &Channel) -> Result<ExponentSolution> {
    if !(rate.is_finite() && rate > 0.0) {
        return Err(domain("rate", rate, "must be positive and finite"));
    }
    let g = pb.snr(ch);
    if rate <= capacity(ch, pb) {
        return Ok(ExponentSolution {
            rate,
            exponent: 0.0,
            nu: 0.0,
            rho: 0.0,
            regime: RateRegime::BelowCapacity,
        });
    }
    let nu0 = nu_zero(pb, ch);
    let mut backoff = NU_ZERO_BACKOFF;
    let mut hi = nu0 * (1.0 - backoff);
    while !(rate_of_nu(hi, g) >= rate) {
        backoff *= 1e-2;
        if backoff < 1e-15 {
            return Err(domain(
                "rate",
                rate,
                "exceeds the largest representable rate on the curve",
            ));
        }
        hi = nu0 * (1.0 - backoff);
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if rate_of_nu(mid, g) < rate {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut nu = 0.5 * (lo + hi);
    for _ in 0..5 {
        let step = (rate_of_nu(nu, g) - rate) / rate_of_nu_derivative(nu, g);
        let next = nu - step;
        if !(next > lo && next < hi) || step == 0.0 {
            break;
        }
        nu = next;
    }
    let residual = (rate_of_nu(nu, g) - rate).abs();
    // Close to ν₀ the curve is so steep that one ulp in ν exceeds the rate
    // tolerance; accept the residual implied by that conditioning.
    let attainable = 4.0 * f64::EPSILON * nu * rate_of_nu_derivative(nu, g);
    if residual > RATE_ROOT_TOL.max(attainable) {
        return Err(Error::Solver(format!(
            "rate inversion stalled with residual {residual:e} at rate {rate}"
        )));
    }
    Ok(ExponentSolution {
        rate,
        exponent: exponent_of_nu(nu, g),
        nu,
        rho: stationary_rho(nu, g),
        regime: RateRegime::AboveCapacity,
    })
}

/// Optimal correct-decoding exponent at `rate`; zero at or below capacity.
pub fn exponent_at_rate(rate: f64, pb: &PowerBudget, ch: &Channel) -> Result<f64> {
    exponent_solution(rate, pb, ch).map(|s| s.exponent)
}

/// Optimal `ρ* = ν/(1+ν) + νΓ/σ²` paired with `ν` on the parametric curve.
pub fn rho_star(nu: f64, pb: &PowerBudget, ch: &Channel) -> f64 {
    stationary_rho(nu, pb.snr(ch))
}

fn stationary_rho(nu: f64, g: f64) -> f64 {
    nu / (1.0 + nu) + nu * g
}

/// `(∂F/∂ρ, ∂F/∂ν)` for `F = -L^{(ρ,ν)}`.
pub fn f_gradient(rn: &RhoNuParams, rate: f64, pb: &PowerBudget, ch: &Channel) -> Result<[f64; 2]> {
    rn.check_interior()?;
    let g = pb.snr(ch);
    let (rho, nu) = (rn.rho, rn.nu);
    Ok([
        -rate - 0.5 * nu.ln() + 0.5 * (rho / (1.0 - rho)).ln(),
        0.5 * (g + 1.0 / (1.0 + nu) - rho / nu),
    ])
}

/// Hessian of `F`; it does not depend on the rate or the power budget.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Hessian2 {
    pub rho_rho: f64,
    pub rho_nu: f64,
    pub nu_nu: f64,
}

impl Hessian2 {
    /// `|B| = [ρ²/ν² - 1/(1+ν)²] / (ρ(1-ρ))`, the determinant of `2∇²F`
    /// (four times [`determinant`](Self::determinant)). Kept in factored form
    /// so that it vanishes on the boundary `ρ = ν/(1+ν)`.
    pub fn determinant_at(rn: &RhoNuParams) -> f64 {
        let (rho, nu) = (rn.rho, rn.nu);
        (rho / nu + 1.0 / (1.0 + nu)) * (rho / nu - 1.0 / (1.0 + nu)) / (rho * (1.0 - rho))
    }

    /// Determinant from the entries.
    pub fn determinant(&self) -> f64 {
        self.rho_rho * self.nu_nu - self.rho_nu * self.rho_nu
    }
}

pub fn f_hessian(rn: &RhoNuParams) -> Result<Hessian2> {
    rn.check_interior()?;
    let (rho, nu) = (rn.rho, rn.nu);
    Ok(Hessian2 {
        rho_rho: 1.0 / (2.0 * rho * (1.0 - rho)),
        rho_nu: -1.0 / (2.0 * nu),
        nu_nu: 0.5 * (rho / (nu * nu) - 1.0 / ((1.0 + nu) * (1.0 + nu))),
    })
}

/// Minimizer `(ρ*, ν*)` of `F` for a rate above capacity:
/// `ρ* = ν*/(1+ν*) + ν*Γ/σ²` with `ν*` solving the parametric rate equation.
pub fn stationary_point(rate: f64, pb: &PowerBudget, ch: &Channel) -> Result<RhoNuParams> {
    let sol = exponent_solution(rate, pb, ch)?;
    if sol.regime == RateRegime::BelowCapacity {
        return Err(domain("rate", rate, "must exceed capacity"));
    }
    Ok(RhoNuParams {
        rho: sol.rho,
        nu: sol.nu,
    })
}

/// Where the maximum of `L^{(ρ,ν)}` was found.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OptimumBranch {
    /// Strictly inside the feasible region.
    Interior,
    /// On the edge `ρ = ν/(1+ν)`.
    Boundary,
    /// At the corner `ρ = ν = 0`, where `L = 0`.
    Origin,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RhoNuOptimum {
    pub value: f64,
    pub params: RhoNuParams,
    pub branch: OptimumBranch,
    /// Best value on the coarse grid, before refinement.
    pub grid_value: f64,
    /// Best value found along the edge `ρ = ν/(1+ν)`.
    pub boundary_value: f64,
    pub newton_iterations: usize,
}

fn f_value(rho: f64, nu: f64, rate: f64, pb: &PowerBudget, ch: &Channel) -> f64 {
    match big_l_rho_nu(&RhoNuParams { rho, nu }, rate, pb, ch) {
        Ok(l) => -l,
        Err(_) => f64::INFINITY,
    }
}

fn strictly_interior(rho: f64, nu: f64) -> bool {
    nu > 0.0 && rho < 1.0 && rho > nu / (1.0 + nu)
}

/// Maximizes `L^{(ρ,ν)}` numerically: a `200 × 200` grid over
/// `[0,1) × [0,ν₀)`, a damped Newton refinement of the convex `F` from the
/// best interior cell, and a separate 1-D search along the edge
/// `ρ = ν/(1+ν)`.
pub fn optimize_rho_nu_detailed(rate: f64, pb: &PowerBudget, ch: &Channel) -> Result<RhoNuOptimum> {
    if !(rate.is_finite() && rate > 0.0) {
        return Err(domain("rate", rate, "must be positive and finite"));
    }
    let nu0 = nu_zero(pb, ch);
    let n = RHO_NU_GRID;

    let mut best = (0.0, 0.0, 0.0);
    let mut best_interior: Option<(f64, f64, f64)> = None;
    for i in 0..n {
        let rho = i as f64 / n as f64;
        for j in 0..n {
            let nu = nu0 * j as f64 / n as f64;
            let l = -f_value(rho, nu, rate, pb, ch);
            if l > best.2 {
                best = (rho, nu, l);
            }
            if strictly_interior(rho, nu) && best_interior.map_or(true, |b| l > b.2) {
                best_interior = Some((rho, nu, l));
            }
        }
    }
    let grid_value = best.2;

    let mut result = RhoNuOptimum {
        value: grid_value,
        params: RhoNuParams {
            rho: best.0,
            nu: best.1,
        },
        branch: if best.0 == 0.0 && best.1 == 0.0 {
            OptimumBranch::Origin
        } else if strictly_interior(best.0, best.1) {
            OptimumBranch::Interior
        } else {
            OptimumBranch::Boundary
        },
        grid_value,
        boundary_value: f64::NEG_INFINITY,
        newton_iterations: 0,
    };

    if let Some((rho0, nu0_start, _)) = best_interior {
        let (rho, nu, iterations) = newton_refine(rho0, nu0_start, rate, pb, ch);
        result.newton_iterations = iterations;
        let l = -f_value(rho, nu, rate, pb, ch);
        if l > result.value {
            result.value = l;
            result.params = RhoNuParams { rho, nu };
            result.branch = OptimumBranch::Interior;
        }
    }

    let (nu_edge, edge_value) = boundary_search(rate, pb, ch, nu0);
    result.boundary_value = edge_value;
    if edge_value > result.value {
        result.value = edge_value;
        result.params = RhoNuParams {
            rho: nu_edge / (1.0 + nu_edge),
            nu: nu_edge,
        };
        result.branch = OptimumBranch::Boundary;
    }
    Ok(result)
}

/// Value of [`optimize_rho_nu_detailed`].
pub fn optimize_rho_nu(rate: f64, pb: &PowerBudget, ch: &Channel) -> Result<f64> {
    optimize_rho_nu_detailed(rate, pb, ch).map(|o| o.value)
}

fn newton_refine(
    mut rho: f64,
    mut nu: f64,
    rate: f64,
    pb: &PowerBudget,
    ch: &Channel,
) -> (f64, f64, usize) {
    let mut f = f_value(rho, nu, rate, pb, ch);
    let mut iterations = 0;
    for it in 0..200 {
        iterations = it + 1;
        let rn = RhoNuParams { rho, nu };
        let (Ok(grad), Ok(h)) = (f_gradient(&rn, rate, pb, ch), f_hessian(&rn)) else {
            break;
        };
        let det = h.determinant();
        let (mut d_rho, mut d_nu) = if det > 0.0 && h.rho_rho > 0.0 {
            (
                -(h.nu_nu * grad[0] - h.rho_nu * grad[1]) / det,
                -(-h.rho_nu * grad[0] + h.rho_rho * grad[1]) / det,
            )
        } else {
            (
                -grad[0] / h.rho_rho.abs().max(1.0),
                -grad[1] / h.nu_nu.abs().max(1.0),
            )
        };
        let slope = grad[0] * d_rho + grad[1] * d_nu;
        if slope >= 0.0 {
            d_rho = -grad[0];
            d_nu = -grad[1];
        }
        let slope = grad[0] * d_rho + grad[1] * d_nu;
        let mut t = 1.0;
        let mut accepted = None;
        while t > 1e-20 {
            let (r, v) = (rho + t * d_rho, nu + t * d_nu);
            if strictly_interior(r, v) {
                let fv = f_value(r, v, rate, pb, ch);
                if fv <= f + 1e-4 * t * slope {
                    accepted = Some((r, v, fv));
                    break;
                }
            }
            t *= 0.5;
        }
        let Some((r, v, fv)) = accepted else { break };
        let moved = (r - rho).abs().max((v - nu).abs() / nu.max(1e-300));
        rho = r;
        nu = v;
        f = fv;
        if moved < PARAM_TOL * 1e-2 {
            break;
        }
    }
    (rho, nu, iterations)
}

/// Best value of `L` along `ρ = ν/(1+ν)`: a scan over `ν ∈ (0, 2ν₀ + 1]`
/// followed by golden-section refinement around the best scan point.
fn boundary_search(rate: f64, pb: &PowerBudget, ch: &Channel, nu0: f64) -> (f64, f64) {
    let edge = |nu: f64| -> f64 {
        if nu <= 0.0 {
            return f64::NEG_INFINITY;
        }
        -f_value(nu / (1.0 + nu), nu, rate, pb, ch)
    };
    let top = 2.0 * nu0 + 1.0;
    let steps = 2000;
    let mut best = (f64::NAN, f64::NEG_INFINITY, 0usize);
    for k in 1..=steps {
        let nu = top * k as f64 / steps as f64;
        let v = edge(nu);
        if v > best.1 {
            best = (nu, v, k);
        }
    }
    if best.1 == f64::NEG_INFINITY {
        return best_pair(best);
    }
    let lo = top * (best.2 as f64 - 1.0) / steps as f64;
    let hi = top * ((best.2 + 1).min(steps) as f64) / steps as f64;
    let (nu, neg) = golden_section_min(|nu| -edge(nu), lo.max(1e-300), hi);
    if -neg > best.1 {
        (nu, -neg)
    } else {
        best_pair(best)
    }
}

fn best_pair(b: (f64, f64, usize)) -> (f64, f64) {
    (b.0, b.1)
}
