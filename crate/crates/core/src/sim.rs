//! Random Gaussian block codes under the power constraint, Monte Carlo
//! estimates of the correct-decoding probability with minimum-distance
//! decoding, and the change-of-measure diagnostic.
//!
//! Every trial draws its message and noise from its own ChaCha stream keyed
//! by `(seed, trial index)`, so results do not depend on how trials are
//! split across threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{binary_entropy, Channel, GaussianTestChannel, PowerBudget};
use crate::error::{domain, Error, Result};
use crate::tolerances::{MAX_BLOCK_LENGTH, MAX_CODEWORDS, MAX_TRIALS};

/// Received vectors decoded together; stored transposed so the inner
/// correlation loop runs over trials.
const BLOCK: usize = 64;

/// `M` codewords of length `n`, stored row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Codebook {
    n: usize,
    size: usize,
    codewords: Vec<f64>,
    power_limit: f64,
    theta: f64,
    rescaled: usize,
}

impl Codebook {
    /// Wraps explicit codewords, checking `‖x‖² ≤ nΓ` for each.
    pub fn from_codewords(n: usize, codewords: Vec<f64>, pb: &PowerBudget) -> Result<Self> {
        if n == 0 || codewords.is_empty() || codewords.len() % n != 0 {
            return Err(domain(
                "n",
                n as f64,
                "codeword buffer must hold a positive multiple of n",
            ));
        }
        let size = codewords.len() / n;
        let limit = n as f64 * pb.gamma();
        for x in codewords.chunks_exact(n) {
            let e: f64 = x.iter().map(|v| v * v).sum();
            if !(e <= limit) {
                return Err(domain("codeword energy", e, "exceeds n*gamma"));
            }
        }
        let theta = codewords.iter().map(|v| v * v).sum::<f64>() / codewords.len() as f64;
        Ok(Self {
            n,
            size,
            codewords,
            power_limit: pb.gamma(),
            theta,
            rescaled: 0,
        })
    }

    pub fn block_length(&self) -> usize {
        self.n
    }

    /// Number of codewords `M`.
    pub fn len(&self) -> usize {
        self.size
    }

    pub fn is_empty(&self) -> bool {
        self.size == 0
    }

    /// `ln M / n`.
    pub fn rate(&self) -> f64 {
        (self.size as f64).ln() / self.n as f64
    }

    pub fn codeword(&self, k: usize) -> &[f64] {
        &self.codewords[k * self.n..(k + 1) * self.n]
    }

    pub fn codewords(&self) -> impl Iterator<Item = &[f64]> {
        self.codewords.chunks_exact(self.n)
    }

    pub fn power_limit(&self) -> f64 {
        self.power_limit
    }

    /// Variance of the generating law (or the mean symbol energy for
    /// codebooks built from explicit codewords).
    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// Codewords that had to be scaled down to meet the power constraint.
    pub fn rescaled_count(&self) -> usize {
        self.rescaled
    }

    /// Mean codeword energy `(1/M) Σ ‖x_k‖²`.
    pub fn mean_energy(&self) -> f64 {
        self.codewords.iter().map(|v| v * v).sum::<f64>() / self.size as f64
    }
}

/// `⌈e^{nR}⌉`, snapping to an integer when `e^{nR}` is within rounding of it.
pub fn codebook_size(n: usize, rate: f64) -> f64 {
    let target = (n as f64 * rate).exp();
    let nearest = target.round();
    if (target - nearest).abs() <= 1e-9 * nearest.max(1.0) {
        nearest
    } else {
        target.ceil()
    }
}

/// `M = ⌈e^{nR}⌉` codewords with i.i.d. `N(0, θ)` entries, each scaled by
/// `min(1, √(nΓ)/‖x‖)`.
pub fn generate_random_codebook(
    n: usize,
    rate: f64,
    theta: f64,
    pb: &PowerBudget,
    seed: u64,
) -> Result<Codebook> {
    if n == 0 || n > MAX_BLOCK_LENGTH {
        return Err(domain(
            "n",
            n as f64,
            "block length out of the supported range",
        ));
    }
    if !(rate.is_finite() && rate >= 0.0) {
        return Err(domain("rate", rate, "must be nonnegative and finite"));
    }
    if !(theta.is_finite() && theta >= 0.0 && theta <= pb.gamma()) {
        return Err(domain("theta", theta, "must lie in [0, gamma]"));
    }
    let size = codebook_size(n, rate);
    if size > MAX_CODEWORDS as f64 {
        return Err(Error::CodebookTooLarge {
            requested: size,
            cap: MAX_CODEWORDS,
        });
    }
    let size = size as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sd = theta.sqrt();
    let limit = n as f64 * pb.gamma();
    let mut codewords = vec![0.0; size * n];
    let mut rescaled = 0;
    for x in codewords.chunks_exact_mut(n) {
        for v in x.iter_mut() {
            let z: f64 = rng.sample(StandardNormal);
            *v = sd * z;
        }
        let mut energy: f64 = x.iter().map(|v| v * v).sum();
        if energy > limit {
            rescaled += 1;
            let mut scale = (limit / energy).sqrt();
            loop {
                for v in x.iter_mut() {
                    *v *= scale;
                }
                energy = x.iter().map(|v| v * v).sum();
                if energy <= limit {
                    break;
                }
                scale = 1.0 - 4.0 * f64::EPSILON;
            }
        }
    }
    Ok(Codebook {
        n,
        size,
        codewords,
        power_limit: pb.gamma(),
        theta,
        rescaled,
    })
}

/// Outcome of a Monte Carlo run; the field order is the JSON key order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimResult {
    pub n: usize,
    pub rate_nats: f64,
    pub trials: u64,
    pub correct: u64,
    pub p_c_hat: f64,
    pub std_err: f64,
    /// `-(1/n) ln p̂_c`; `None` when no trial decoded correctly.
    pub measured_exponent: Option<f64>,
    pub seed: u64,
}

impl SimResult {
    fn new(cb: &Codebook, trials: u64, correct: u64, seed: u64) -> Self {
        let p = correct as f64 / trials as f64;
        let measured_exponent = if correct == 0 {
            None
        } else if correct == trials {
            Some(0.0)
        } else {
            Some(-p.ln() / cb.n as f64)
        };
        Self {
            n: cb.n,
            rate_nats: cb.rate(),
            trials,
            correct,
            p_c_hat: p,
            std_err: binomial_std_err(p, trials),
            measured_exponent,
            seed,
        }
    }

    /// Standard error of the measured exponent by the delta method,
    /// `se(p̂) / (n p̂)`.
    pub fn exponent_std_err(&self) -> Option<f64> {
        (self.correct > 0).then(|| self.std_err / (self.n as f64 * self.p_c_hat))
    }
}

fn binomial_std_err(p: f64, trials: u64) -> f64 {
    (p * (1.0 - p) / trials as f64).sqrt()
}

fn check_trials(trials: u64) -> Result<()> {
    if trials == 0 || trials > MAX_TRIALS {
        return Err(domain("trials", trials as f64, "must lie in [1, 10^7]"));
    }
    Ok(())
}

/// Estimates `P_c` for equiprobable messages over `Y = x + N(0, σ²)` with
/// minimum-distance decoding, ties going to the lowest index.
pub fn simulate_correct_probability(
    cb: &Codebook,
    ch: &Channel,
    trials: u64,
    seed: u64,
) -> Result<SimResult> {
    check_trials(trials)?;
    let correct = count_correct(cb, 1.0, ch.noise_variance().sqrt(), trials, seed);
    Ok(SimResult::new(cb, trials, correct, seed))
}

/// Correct decodings when codeword `x` is received as `gain·x + sd·Z`.
fn count_correct(cb: &Codebook, gain: f64, sd: f64, trials: u64, seed: u64) -> u64 {
    if cb.size == 1 {
        return trials;
    }
    let energies: Vec<f64> = cb
        .codewords()
        .map(|x| x.iter().map(|v| v * v).sum())
        .collect();
    let base = ChaCha8Rng::seed_from_u64(seed);
    let blocks = trials.div_ceil(BLOCK as u64);
    (0..blocks)
        .into_par_iter()
        .map(|b| decode_block(cb, &energies, &base, gain, sd, b * BLOCK as u64, trials))
        .sum()
}

fn decode_block(
    cb: &Codebook,
    energies: &[f64],
    base: &ChaCha8Rng,
    gain: f64,
    sd: f64,
    start: u64,
    trials: u64,
) -> u64 {
    let n = cb.n;
    let len = (trials - start).min(BLOCK as u64) as usize;
    let mut received = vec![[0.0f64; BLOCK]; n];
    let mut sent = [usize::MAX; BLOCK];
    for (j, slot) in sent.iter_mut().enumerate().take(len) {
        let mut rng = base.clone();
        rng.set_stream(start + j as u64);
        let k = rng.random_range(0..cb.size as u64) as usize;
        *slot = k;
        let x = cb.codeword(k);
        for t in 0..n {
            let z: f64 = rng.sample(StandardNormal);
            received[t][j] = gain * x[t] + sd * z;
        }
    }
    let mut best = [f64::NEG_INFINITY; BLOCK];
    let mut best_idx = [0usize; BLOCK];
    scan(cb, energies, &received, &mut best, &mut best_idx);
    (0..len).filter(|&j| best_idx[j] == sent[j]).count() as u64
}

/// Runs the correlation scan with wider vectors when the CPU has them. Only
/// plain multiplies and adds are used, so every path rounds identically.
fn scan(
    cb: &Codebook,
    energies: &[f64],
    received: &[[f64; BLOCK]],
    best: &mut [f64; BLOCK],
    best_idx: &mut [usize; BLOCK],
) {
    #[cfg(target_arch = "x86_64")]
    if std::is_x86_feature_detected!("avx2") {
        // SAFETY: the feature was detected at runtime.
        unsafe { scan_avx2(cb, energies, received, best, best_idx) };
        return;
    }
    scan_portable(cb, energies, received, best, best_idx);
}

#[cfg(target_arch = "x86_64")]
#[target_feature(enable = "avx2")]
unsafe fn scan_avx2(
    cb: &Codebook,
    energies: &[f64],
    received: &[[f64; BLOCK]],
    best: &mut [f64; BLOCK],
    best_idx: &mut [usize; BLOCK],
) {
    scan_portable(cb, energies, received, best, best_idx);
}

#[inline(always)]
fn scan_portable(
    cb: &Codebook,
    energies: &[f64],
    received: &[[f64; BLOCK]],
    best: &mut [f64; BLOCK],
    best_idx: &mut [usize; BLOCK],
) {
    for (c, (x, &energy)) in cb.codewords().zip(energies).enumerate() {
        let mut acc = [0.0f64; BLOCK];
        for (xt, row) in x.iter().zip(received) {
            for j in 0..BLOCK {
                acc[j] += xt * row[j];
            }
        }
        for j in 0..BLOCK {
            let score = 2.0 * acc[j] - energy;
            if score > best[j] {
                best[j] = score;
                best_idx[j] = c;
            }
        }
    }
}

/// `exp{-n[(1-δ)⁻¹D + h(1-δ)/(n(1-δ))]}`: lower bound on the correct
/// probability of a code whose correct probability under a test channel at
/// per-letter divergence `D` is at least `1-δ`.
pub fn direct_part_bound(divergence: f64, n: usize, delta: f64) -> Result<f64> {
    if !(divergence.is_finite() && divergence >= 0.0) {
        return Err(domain(
            "divergence",
            divergence,
            "must be nonnegative and finite",
        ));
    }
    if n == 0 {
        return Err(domain("n", 0.0, "must be positive"));
    }
    if !(delta.is_finite() && (0.0..0.5).contains(&delta)) {
        return Err(domain("delta", delta, "must lie in [0, 1/2)"));
    }
    let keep = 1.0 - delta;
    Ok((-(n as f64) * divergence / keep - binary_entropy(keep)? / keep).exp())
}

/// Estimates of the correct probability under the channel (`α̂`) and under a
/// test channel (`β̂`) for one codebook and decoder, and the terms of
/// `nD ≥ β ln(β/α) + β̄ ln(β̄/ᾱ) ≥ -h(β) - β ln α`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChangeOfMeasure {
    pub alpha_hat: f64,
    pub beta_hat: f64,
    pub alpha_std_err: f64,
    pub beta_std_err: f64,
    /// `n · D(q‖W)` averaged over the codewords.
    pub n_divergence: f64,
    /// `β ln(β/α) + β̄ ln(β̄/ᾱ)`.
    pub log_sum_term: f64,
    /// Delta-method standard error of `log_sum_term`.
    pub log_sum_std_err: f64,
    /// `-h(β) - β ln α`.
    pub lower_term: f64,
    /// Both inequalities hold, the first within three standard errors.
    pub chain_holds: bool,
    pub n: usize,
    pub trials: u64,
}

impl ChangeOfMeasure {
    /// Per-letter divergence `D`.
    pub fn divergence(&self) -> f64 {
        self.n_divergence / self.n as f64
    }

    /// When `β̂ ≥ 1-δ`, whether `α̂` clears [`direct_part_bound`] within three
    /// standard errors; `None` when the premise fails.
    pub fn direct_bound_holds(&self, delta: f64) -> Result<Option<bool>> {
        if self.beta_hat < 1.0 - delta {
            return Ok(None);
        }
        let bound = direct_part_bound(self.divergence(), self.n, delta)?;
        Ok(Some(self.alpha_hat + 3.0 * self.alpha_std_err >= bound))
    }
}

fn xlogy_ratio(p: f64, q: f64) -> f64 {
    if p == 0.0 {
        0.0
    } else {
        p * (p / q).ln()
    }
}

/// Runs the codebook through the channel and through `tc` with common
/// random numbers (the same message and noise draws per trial), so that
/// `tc` equal to the channel gives `β̂ = α̂` exactly.
pub fn change_of_measure_diagnostic(
    cb: &Codebook,
    tc: &GaussianTestChannel,
    ch: &Channel,
    trials: u64,
    seed: u64,
) -> Result<ChangeOfMeasure> {
    check_trials(trials)?;
    let alpha_count = count_correct(cb, 1.0, ch.noise_variance().sqrt(), trials, seed);
    let beta_count = count_correct(cb, tc.alpha(), tc.xi().sqrt(), trials, seed);
    let a = alpha_count as f64 / trials as f64;
    let b = beta_count as f64 / trials as f64;
    if alpha_count == 0 || alpha_count == trials {
        return Err(Error::DegenerateEstimate {
            name: "alpha_hat",
            value: a,
        });
    }
    let s2 = ch.noise_variance();
    let r = tc.xi() / s2;
    let letter_noise = 0.5 * (r - 1.0 - r.ln());
    let n_divergence =
        0.5 * (1.0 - tc.alpha()).powi(2) * cb.mean_energy() / s2 + cb.n as f64 * letter_noise;

    let log_sum_term = xlogy_ratio(b, a) + xlogy_ratio(1.0 - b, 1.0 - a);
    let lower_term = -binary_entropy(b)? - b * a.ln();
    let se_a = binomial_std_err(a, trials);
    let se_b = binomial_std_err(b, trials);
    let d_alpha = -b / a + (1.0 - b) / (1.0 - a);
    let d_beta_term = if se_b == 0.0 {
        0.0
    } else {
        ((b / a).ln() - ((1.0 - b) / (1.0 - a)).ln()) * se_b
    };
    let log_sum_std_err = ((d_alpha * se_a).powi(2) + d_beta_term.powi(2)).sqrt();
    let chain_holds =
        n_divergence + 3.0 * log_sum_std_err >= log_sum_term && log_sum_term >= lower_term - 1e-12;
    Ok(ChangeOfMeasure {
        alpha_hat: a,
        beta_hat: b,
        alpha_std_err: se_a,
        beta_std_err: se_b,
        n_divergence,
        log_sum_term,
        log_sum_std_err,
        lower_term,
        chain_holds,
        n: cb.n,
        trials,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::capacity;

    fn unit() -> (PowerBudget, Channel) {
        (PowerBudget::new(1.0).unwrap(), Channel::new(1.0).unwrap())
    }

    #[test]
    fn single_codeword() {
        let (pb, ch) = unit();
        let cb = generate_random_codebook(1, 0.0, 1.0, &pb, 3).unwrap();
        assert_eq!(cb.len(), 1);
        let r = simulate_correct_probability(&cb, &ch, 100, 1).unwrap();
        assert_eq!(r.p_c_hat, 1.0);
        assert_eq!(r.measured_exponent, Some(0.0));
    }

    #[test]
    fn size_cap() {
        let (pb, _) = unit();
        let err = generate_random_codebook(50, 0.5466, 1.0, &pb, 7).unwrap_err();
        assert!(matches!(err, Error::CodebookTooLarge { .. }));
        assert!(generate_random_codebook(20, 0.5, 1.5, &pb, 7).is_err());
    }

    #[test]
    fn codebook_size_rounding() {
        assert_eq!(codebook_size(1, 0.0), 1.0);
        assert_eq!(codebook_size(10, 2f64.ln() / 10.0 * 10.0), 1024.0);
        assert_eq!(codebook_size(20, 0.5), 22027.0);
    }

    #[test]
    fn power_invariant_and_determinism() {
        let (pb, _) = unit();
        let cb = generate_random_codebook(8, 0.6, 1.0, &pb, 42).unwrap();
        assert!(cb
            .codewords()
            .all(|x| x.iter().map(|v| v * v).sum::<f64>() <= 8.0));
        assert!(cb.rescaled_count() > 0);
        assert_eq!(cb, generate_random_codebook(8, 0.6, 1.0, &pb, 42).unwrap());
    }

    #[test]
    fn ties_go_to_lowest_index() {
        let pb = PowerBudget::new(1.0).unwrap();
        let ch = Channel::new(1.0).unwrap();
        let cb = Codebook::from_codewords(2, vec![0.5, 0.5, 0.5, 0.5], &pb).unwrap();
        let r = simulate_correct_probability(&cb, &ch, 1000, 5).unwrap();
        // Message 1 is never decoded; message 0 always is.
        assert!(r.p_c_hat > 0.4 && r.p_c_hat < 0.6);
    }

    #[test]
    fn below_capacity_sanity() {
        let (pb, ch) = unit();
        assert!(0.1 < capacity(&ch, &pb));
        let cb = generate_random_codebook(20, 0.1, 1.0, &pb, 11).unwrap();
        let r = simulate_correct_probability(&cb, &ch, 10_000, 2).unwrap();
        assert!(r.p_c_hat > 0.5, "{r:?}");
        assert_eq!(
            r,
            simulate_correct_probability(&cb, &ch, 10_000, 2).unwrap()
        );
    }

    #[test]
    fn direct_bound_examples() {
        assert_eq!(direct_part_bound(0.0, 5, 0.0).unwrap(), 1.0);
        let v = direct_part_bound(0.1, 20, 0.1).unwrap();
        let h = binary_entropy(0.9).unwrap();
        assert!((v - (-2.0 / 0.9 - h / 0.9).exp()).abs() < 1e-15);
        assert!((v - 0.075_514_882_270_193_11).abs() < 1e-12);
        assert!(direct_part_bound(0.2, 20, 0.1).unwrap() < v);
        assert!(direct_part_bound(0.1, 30, 0.1).unwrap() < v);
        assert!(direct_part_bound(0.1, 20, 0.5).is_err());
    }

    #[test]
    fn change_of_measure_with_true_channel() {
        let (pb, ch) = unit();
        let cb = generate_random_codebook(10, 0.5, 1.0, &pb, 4).unwrap();
        let tc = GaussianTestChannel::identity(&ch);
        let d = change_of_measure_diagnostic(&cb, &tc, &ch, 2000, 8).unwrap();
        assert_eq!(d.alpha_hat, d.beta_hat);
        assert_eq!(d.n_divergence, 0.0);
        assert_eq!(d.log_sum_term, 0.0);
        assert!(d.chain_holds);
    }

    #[test]
    fn log_sum_terms_match_two_point_divergence() {
        // Two-mass laws (β, 1-β) and (α, 1-α): the log-sum term is exactly
        // their divergence.
        let (a, b): (f64, f64) = (0.2, 0.7);
        let brute = b * (b / a).ln() + (1.0 - b) * ((1.0 - b) / (1.0 - a)).ln();
        assert!((xlogy_ratio(b, a) + xlogy_ratio(1.0 - b, 1.0 - a) - brute).abs() < 1e-15);
        assert!(brute >= -binary_entropy(b).unwrap() - b * a.ln());
    }
}
