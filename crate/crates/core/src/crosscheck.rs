//! Cross-route consistency suite: the four exponent routes against each
//! other and the quadrature identities against their closed forms.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::channel::{capacity, Channel, PowerBudget};
use crate::closed_form::{exponent_at_rate, optimize_rho_nu, parametric_point, zeta, TiltParams};
use crate::dk::g_dk;
use crate::error::Result;
use crate::quadrature::QuadratureSpec;
use crate::variational::{
    g_oh_numeric, gaussian_output, j_functional, min_omega_over_q, omega, saddle_eta, saddle_value,
    xi_of_theta, DiscretizedDensity, GohGrid,
};

/// Names of the checked identities, as reported on failure.
pub const ENDPOINT: &str = "parametric_endpoint";
pub const ROUTES_EXACT: &str = "route_agreement_exact";
pub const ROUTES_VARIATIONAL: &str = "route_agreement_variational";
pub const GAUSSIAN_PAIR: &str = "gaussian_pair_omega_zeta";
pub const TILTED_MINIMIZER: &str = "tilted_minimizer_j";
pub const SADDLE: &str = "saddle_input_independence";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrosscheckConfig {
    pub snr_ratios: Vec<f64>,
    pub noise_variance: f64,
    /// Rates per ratio, spread evenly over `(C, C + rate_span]`.
    pub rates_per_ratio: usize,
    pub rate_span: f64,
    /// Agreement required among parametric, `(ρ,ν)` and test-channel routes.
    pub exact_tolerance: f64,
    /// Agreement required of the variational route.
    pub variational_tolerance: f64,
    /// Tolerance of the quadrature identities.
    pub identity_tolerance: f64,
    /// Random `(μ, λ, θ)` draws per quadrature identity.
    pub samples: usize,
    pub seed: u64,
    pub quadrature: QuadratureSpec,
    /// Offset added to `ζ` on the closed-form side of the Gaussian-pair
    /// identity; nonzero only to exercise the failure path.
    pub zeta_bias: f64,
}

impl Default for CrosscheckConfig {
    fn default() -> Self {
        Self {
            snr_ratios: vec![0.25, 1.0, 4.0],
            noise_variance: 1.0,
            rates_per_ratio: 8,
            rate_span: 1.2,
            exact_tolerance: 1e-5,
            variational_tolerance: 1e-4,
            identity_tolerance: 1e-6,
            samples: 5,
            seed: 2024,
            quadrature: QuadratureSpec {
                half_width: 12.0,
                ..QuadratureSpec::default()
            },
            zeta_bias: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityCheck {
    pub identity: String,
    pub snr: f64,
    pub max_error: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RouteValues {
    pub snr: f64,
    pub rate: f64,
    pub parametric: f64,
    pub rho_nu: f64,
    pub dk: f64,
    pub variational: f64,
}

impl RouteValues {
    /// Largest pairwise gap among the parametric, `(ρ,ν)` and test-channel
    /// values.
    pub fn exact_spread(&self) -> f64 {
        spread(&[self.parametric, self.rho_nu, self.dk])
    }

    /// Largest pairwise gap among all four routes.
    pub fn spread(&self) -> f64 {
        spread(&[self.parametric, self.rho_nu, self.dk, self.variational])
    }
}

fn spread(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    max - min
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrosscheckReport {
    pub passed: bool,
    pub checks: Vec<IdentityCheck>,
    pub routes: Vec<RouteValues>,
}

impl CrosscheckReport {
    pub fn first_failure(&self) -> Option<&IdentityCheck> {
        self.checks.iter().find(|c| !c.passed)
    }
}

/// Evaluates all four routes at `rate`.
pub fn route_values(rate: f64, pb: &PowerBudget, ch: &Channel) -> Result<RouteValues> {
    Ok(RouteValues {
        snr: pb.snr(ch),
        rate,
        parametric: exponent_at_rate(rate, pb, ch)?,
        rho_nu: optimize_rho_nu(rate, pb, ch)?,
        dk: g_dk(rate, pb, ch)?,
        variational: g_oh_numeric(rate, pb, ch, &GohGrid::default())?.value,
    })
}

/// Rates `C + span·k/count` for `k = 1..=count`.
pub fn rate_grid(pb: &PowerBudget, ch: &Channel, count: usize, span: f64) -> Vec<f64> {
    let c = capacity(ch, pb);
    (1..=count)
        .map(|k| c + span * k as f64 / count as f64)
        .collect()
}

fn check(identity: &str, snr: f64, max_error: f64, tolerance: f64) -> IdentityCheck {
    IdentityCheck {
        identity: identity.to_string(),
        snr,
        max_error,
        tolerance,
        passed: max_error < tolerance,
    }
}

/// Input laws used by the quadrature identities.
pub fn test_laws(theta: f64, spec: &QuadratureSpec) -> Result<Vec<DiscretizedDensity>> {
    let sd = theta.sqrt();
    Ok(vec![
        DiscretizedDensity::gaussian(theta, spec)?,
        DiscretizedDensity::uniform(-3f64.sqrt() * sd, 3f64.sqrt() * sd, spec)?,
        DiscretizedDensity::gaussian_mixture(
            &[
                (0.5, -0.9 * sd, 0.19 * theta),
                (0.5, 0.9 * sd, 0.19 * theta),
            ],
            spec,
        )?,
        DiscretizedDensity::gaussian(0.3 * theta, spec)?,
        DiscretizedDensity::point_masses(vec![-sd, sd], &[0.5, 0.5])?,
    ])
}

/// Runs the suite. Checks are listed per signal-to-noise ratio in a fixed
/// order.
pub fn run_crosscheck(cfg: &CrosscheckConfig) -> Result<CrosscheckReport> {
    let ch = Channel::new(cfg.noise_variance)?;
    let spec = &cfg.quadrature;
    let mut checks = Vec::new();
    let mut routes = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    for &snr in &cfg.snr_ratios {
        let pb = PowerBudget::new(snr * cfg.noise_variance)?;
        let p0 = parametric_point(0.0, &pb, &ch)?;
        let endpoint = (p0.rate - capacity(&ch, &pb)).abs().max(p0.exponent.abs());
        checks.push(check(ENDPOINT, snr, endpoint, 1e-12));

        let mut exact = 0.0f64;
        let mut all = 0.0f64;
        for rate in rate_grid(&pb, &ch, cfg.rates_per_ratio, cfg.rate_span) {
            let v = route_values(rate, &pb, &ch)?;
            exact = exact.max(v.exact_spread());
            all = all.max(v.spread());
            routes.push(v);
        }
        checks.push(check(ROUTES_EXACT, snr, exact, cfg.exact_tolerance));
        checks.push(check(
            ROUTES_VARIATIONAL,
            snr,
            all,
            cfg.variational_tolerance,
        ));

        let theta = pb.gamma();
        let laws = test_laws(theta, spec)?;
        let mut pair = 0.0f64;
        let mut minimizer = 0.0f64;
        let mut saddle = 0.0f64;
        for _ in 0..cfg.samples {
            let lambda = rng.random_range(0.1..4.0);
            let mu = rng.random_range(0.1..1.0) * (1.0 + lambda) / (2.0 * cfg.noise_variance);
            let tp = TiltParams::new(mu, lambda)?;

            let xi = xi_of_theta(&tp, theta);
            let q = gaussian_output(&laws[0], &tp, &ch, xi + cfg.noise_variance, spec)?;
            let lhs = omega(&laws[0], &q, &tp, &ch)?;
            pair = pair.max((lhs - (zeta(&tp, xi, &ch)? + cfg.zeta_bias)).abs());

            let tp_j = TiltParams::new(mu, tp.rho())?;
            for qx in &laws[..3] {
                let m = min_omega_over_q(qx, &tp, &ch, spec)?;
                let j = j_functional(qx, &tp_j, &ch, spec)?;
                minimizer = minimizer.max((m - (1.0 + lambda) * j).abs());
            }

            let z = zeta(&tp, saddle_eta(&tp, &ch)?, &ch)?;
            for qx in &laws {
                saddle = saddle.max((saddle_value(qx, &tp, &ch, spec)? - z).abs());
            }
        }
        checks.push(check(GAUSSIAN_PAIR, snr, pair, cfg.identity_tolerance));
        checks.push(check(
            TILTED_MINIMIZER,
            snr,
            minimizer,
            cfg.identity_tolerance,
        ));
        checks.push(check(SADDLE, snr, saddle, cfg.identity_tolerance));
    }
    Ok(CrosscheckReport {
        passed: checks.iter().all(|c| c.passed),
        checks,
        routes,
    })
}
