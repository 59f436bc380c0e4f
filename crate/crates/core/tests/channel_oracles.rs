//! Closed-form mutual information and divergence against Monte Carlo
//! expectations of the defining log-ratios.

use awgn_exponent::{
    capacity, gaussian_conditional_divergence, gaussian_mutual_information, Channel,
    GaussianInputLaw, GaussianTestChannel, PowerBudget,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

const SAMPLES: usize = 1_000_000;

fn log_normal_pdf(x: f64, mean: f64, var: f64) -> f64 {
    -0.5 * (2.0 * std::f64::consts::PI * var).ln() - 0.5 * (x - mean) * (x - mean) / var
}

/// Mean and standard error of `f(x, y)` with `X ~ N(0,θ)`, `Y = αX + N(0,ξ)`.
fn estimate(theta: f64, alpha: f64, xi: f64, seed: u64, f: impl Fn(f64, f64) -> f64) -> (f64, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut sum, mut sq) = (0.0, 0.0);
    for _ in 0..SAMPLES {
        let z1: f64 = rng.sample(StandardNormal);
        let z2: f64 = rng.sample(StandardNormal);
        let x = theta.sqrt() * z1;
        let y = alpha * x + xi.sqrt() * z2;
        let v = f(x, y);
        sum += v;
        sq += v * v;
    }
    let mean = sum / SAMPLES as f64;
    let var = sq / SAMPLES as f64 - mean * mean;
    (mean, (var / SAMPLES as f64).sqrt())
}

fn mi_oracle(theta: f64, alpha: f64, xi: f64, seed: u64) -> (f64, f64) {
    let out_var = alpha * alpha * theta + xi;
    estimate(theta, alpha, xi, seed, |x, y| {
        log_normal_pdf(y, alpha * x, xi) - log_normal_pdf(y, 0.0, out_var)
    })
}

fn divergence_oracle(theta: f64, alpha: f64, xi: f64, sigma2: f64, seed: u64) -> (f64, f64) {
    estimate(theta, alpha, xi, seed, |x, y| {
        log_normal_pdf(y, alpha * x, xi) - log_normal_pdf(y, x, sigma2)
    })
}

fn within(value: f64, (mean, se): (f64, f64)) -> bool {
    (value - mean).abs() <= 3.0 * se.max(1e-12)
}

#[test]
fn mutual_information_matches_monte_carlo() {
    for (k, (theta, alpha, xi)) in [(1.0, 1.0, 0.5), (2.0, 0.7, 1.3), (0.4, -1.2, 0.2)]
        .into_iter()
        .enumerate()
    {
        let closed = gaussian_mutual_information(
            &GaussianInputLaw::new(theta).unwrap(),
            &GaussianTestChannel::new(alpha, xi).unwrap(),
        );
        let mc = mi_oracle(theta, alpha, xi, 100 + k as u64);
        assert!(
            within(closed, mc),
            "theta={theta} alpha={alpha} xi={xi}: {closed} vs {mc:?}"
        );
    }
    let v = gaussian_mutual_information(
        &GaussianInputLaw::new(1.0).unwrap(),
        &GaussianTestChannel::new(1.0, 0.5).unwrap(),
    );
    assert!((v - 0.5 * 3f64.ln()).abs() < 1e-15);
}

#[test]
fn divergence_matches_monte_carlo() {
    for (k, (theta, alpha, xi, s2)) in [
        (3.0, 1.0, 2.0, 1.0),
        (4.0, 0.5, 1.0, 1.0),
        (1.5, 1.3, 0.4, 0.8),
    ]
    .into_iter()
    .enumerate()
    {
        let closed = gaussian_conditional_divergence(
            &GaussianInputLaw::new(theta).unwrap(),
            &GaussianTestChannel::new(alpha, xi).unwrap(),
            &Channel::new(s2).unwrap(),
        );
        let mc = divergence_oracle(theta, alpha, xi, s2, 200 + k as u64);
        assert!(within(closed, mc), "{closed} vs {mc:?}");
    }
}

#[test]
fn channel_itself_recovers_capacity() {
    let ch = Channel::new(1.7).unwrap();
    let pb = PowerBudget::new(2.3).unwrap();
    let i = gaussian_mutual_information(
        &GaussianInputLaw::new(2.3).unwrap(),
        &GaussianTestChannel::identity(&ch),
    );
    assert!((i - capacity(&ch, &pb)).abs() < 1e-15);
    let mc = mi_oracle(2.3, 1.0, 1.7, 300);
    assert!(within(i, mc));
}
