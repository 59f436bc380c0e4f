//! Numerical tolerances and defaults used across the crate, kept in one table
//! so the acceptance thresholds and the solver settings can be audited
//! together.

/// Rate accuracy of the parametric-curve inversion `R(ν) = R`.
pub const RATE_ROOT_TOL: f64 = 1e-10;

/// Relative backoff from `ν₀` used as the upper end of the inversion bracket.
pub const NU_ZERO_BACKOFF: f64 = 1e-9;

/// Parameter accuracy of the `(ρ, ν)` Newton refinement.
pub const PARAM_TOL: f64 = 1e-8;

/// Grid resolution per axis of the coarse `(ρ, ν)` search.
pub const RHO_NU_GRID: usize = 200;

/// Golden-section stopping width, relative to the bracket.
pub const GOLDEN_TOL: f64 = 1e-12;

/// Simplex-size stopping criterion for Nelder-Mead.
pub const NELDER_MEAD_XTOL: f64 = 1e-10;

/// Function-value spread stopping criterion for Nelder-Mead.
pub const NELDER_MEAD_FTOL: f64 = 1e-14;

/// Truncation half-width of discretized densities, in standard deviations.
pub const DENSITY_HALF_WIDTH: f64 = 10.0;

/// Minimum nodes per quadrature axis for acceptance-grade evaluations.
pub const MIN_NODES_PER_AXIS: usize = 64;

/// Tolerance on the total mass of a discretized density.
pub const MASS_TOL: f64 = 1e-9;

/// Maximum codebook size accepted by the simulator.
pub const MAX_CODEWORDS: usize = 1_000_000;

/// Maximum block length accepted by the simulator.
pub const MAX_BLOCK_LENGTH: usize = 64;

/// Maximum number of Monte Carlo trials per run.
pub const MAX_TRIALS: u64 = 10_000_000;
