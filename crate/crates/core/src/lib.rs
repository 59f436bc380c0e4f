//! Correct-decoding exponent of the AWGN channel above capacity.
//!
//! The exponent is computed four ways (parametric curve, convex `(ρ, ν)`
//! optimization, test-channel minimization, and the tilted variational form)
//! and checked against Monte Carlo runs of random block codes.
//! All quantities are in nats.

// Negated comparisons are used on purpose so that NaN fails domain checks.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod channel;
pub mod closed_form;
pub mod crosscheck;
pub mod dk;
pub mod error;
pub mod optim;
pub mod quadrature;
pub mod sim;
pub mod tolerances;
pub mod variational;

pub use channel::{
    binary_entropy, capacity, gaussian_conditional_divergence, gaussian_mutual_information,
    positive_part, Channel, GaussianInputLaw, GaussianTestChannel, PowerBudget,
};
pub use closed_form::{
    big_l_mu_lambda, big_l_rho_nu, exponent_at_rate, exponent_solution, f_gradient, f_hessian,
    mu_lambda_from_rho_nu, nu_zero, optimize_rho_nu, optimize_rho_nu_detailed, parametric_point,
    rho_nu_from_mu_lambda, rho_star, stationary_point, zeta, ExponentPoint, ExponentSolution,
    Hessian2, OptimumBranch, RateRegime, RhoNuOptimum, RhoNuParams, TiltParams,
};
pub use crosscheck::{
    run_crosscheck, CrosscheckConfig, CrosscheckReport, IdentityCheck, RouteValues,
};
pub use dk::{
    dk_objective, g_dk, g_dk_detailed, g_dk_mu, g_dk_mu_detailed, g_dk_mu_lambda,
    g_dk_mu_lambda_detailed, g_dk_mu_lambda_max, g_dk_mu_max, DkBranch, DkDualResult, DkSolution,
    GaussianJointParams,
};
pub use error::{Error, Result};
pub use quadrature::{QuadratureRule, QuadratureSpec};
pub use sim::{
    change_of_measure_diagnostic, codebook_size, direct_part_bound, generate_random_codebook,
    simulate_correct_probability, ChangeOfMeasure, Codebook, SimResult,
};
pub use variational::{
    g_oh_numeric, gaussian_output, j_functional, min_omega_over_q, omega, optimal_tilted_output,
    saddle_eta, saddle_value, underline_omega, xi_of_theta, DiscretizedDensity, GohGrid, GohResult,
    TiltedOutput, UnderlineOmega,
};
