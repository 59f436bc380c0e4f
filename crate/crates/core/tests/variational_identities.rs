use awgn_exponent::{
    capacity, exponent_at_rate, g_oh_numeric, gaussian_output, j_functional, min_omega_over_q,
    omega, optimal_tilted_output, saddle_eta, saddle_value, underline_omega, xi_of_theta, zeta,
    Channel, DiscretizedDensity, GohGrid, PowerBudget, QuadratureRule, QuadratureSpec, TiltParams,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn spec() -> QuadratureSpec {
    QuadratureSpec::new(12.0, 256, QuadratureRule::GaussLegendre).unwrap()
}

fn random_tilt(rng: &mut ChaCha8Rng, lambda_max: f64) -> TiltParams {
    TiltParams::new(
        rng.random_range(0.1..1.5),
        rng.random_range(0.1..lambda_max),
    )
    .unwrap()
}

#[test]
fn gaussian_pair_omega_equals_zeta() {
    let ch = Channel::new(1.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..10 {
        let tp = random_tilt(&mut rng, 4.0);
        let theta = rng.random_range(0.2..4.0);
        let qx = DiscretizedDensity::gaussian(theta, &spec()).unwrap();
        let xi = xi_of_theta(&tp, theta);
        let q = gaussian_output(&qx, &tp, &ch, xi + 1.0, &spec()).unwrap();
        let v = omega(&qx, &q, &tp, &ch).unwrap();
        let z = zeta(&tp, xi, &ch).unwrap();
        assert!(
            (v - z).abs() < 1e-6,
            "{tp:?} theta={theta} omega={v} zeta={z}"
        );
    }
}

#[test]
fn tilted_minimizer_matches_j() {
    let ch = Channel::new(1.0).unwrap();
    let s = spec();
    let laws = [
        DiscretizedDensity::gaussian(1.3, &s).unwrap(),
        DiscretizedDensity::uniform(-2.0, 2.0, &s).unwrap(),
        DiscretizedDensity::gaussian_mixture(&[(0.5, -1.5, 0.3), (0.5, 1.5, 0.3)], &s).unwrap(),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..10 {
        let tp = random_tilt(&mut rng, 4.0);
        let tp_j = TiltParams::new(tp.mu, tp.rho()).unwrap();
        for qx in &laws {
            let m = min_omega_over_q(qx, &tp, &ch, &s).unwrap();
            let j = j_functional(qx, &tp_j, &ch, &s).unwrap();
            assert!((m - (1.0 + tp.lambda) * j).abs() < 1e-6, "{tp:?} {m} {j}");
        }
    }
}

#[test]
fn tilted_output_of_gaussian_is_gaussian() {
    let ch = Channel::new(1.0).unwrap();
    let s = spec();
    let tp = TiltParams::new(0.5, 1.0).unwrap();
    let theta = 1.0;
    let qx = DiscretizedDensity::gaussian(theta, &s).unwrap();
    let out = optimal_tilted_output(&qx, &tp, &ch, &s).unwrap();
    let v = xi_of_theta(&tp, theta) + 1.0;
    let mut worst: f64 = 0.0;
    for (y, ld) in out.density.nodes().iter().zip(out.density.log_densities()) {
        let exact = (-0.5 * y * y / v).exp() / (2.0 * std::f64::consts::PI * v).sqrt();
        worst = worst.max((ld.exp() - exact).abs());
    }
    assert!(worst < 1e-6, "{worst}");
    let m = min_omega_over_q(&qx, &tp, &ch, &s).unwrap();
    assert!((m - zeta(&tp, v - 1.0, &ch).unwrap()).abs() < 1e-6);
}

#[test]
fn saddle_value_independent_of_input() {
    let ch = Channel::new(1.0).unwrap();
    let s = spec();
    let laws = [
        DiscretizedDensity::gaussian(0.5, &s).unwrap(),
        DiscretizedDensity::gaussian(3.0, &s).unwrap(),
        DiscretizedDensity::uniform(-3.0, 3.0, &s).unwrap(),
        DiscretizedDensity::gaussian_mixture(&[(0.4, -2.0, 0.2), (0.6, 1.0, 0.5)], &s).unwrap(),
        DiscretizedDensity::point_masses(vec![-1.0, 1.0], &[0.5, 0.5]).unwrap(),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..5 {
        let lambda = rng.random_range(0.1..4.0);
        let mu = rng.random_range(0.05..1.0) * (1.0 + lambda) / 2.0;
        let tp = TiltParams::new(mu, lambda).unwrap();
        let z = zeta(&tp, saddle_eta(&tp, &ch).unwrap(), &ch).unwrap();
        for qx in &laws {
            let v = saddle_value(qx, &tp, &ch, &s).unwrap();
            assert!((v - z).abs() < 1e-6, "{tp:?} {v} {z}");
        }
    }
}

#[test]
fn goh_matches_parametric() {
    for (g, s2) in [(0.25, 1.0), (1.0, 1.0), (4.0, 1.0)] {
        let pb = PowerBudget::new(g).unwrap();
        let ch = Channel::new(s2).unwrap();
        let c = capacity(&ch, &pb);
        for k in 1..=4 {
            let r = c + 0.3 * k as f64;
            let v = g_oh_numeric(r, &pb, &ch, &GohGrid::default()).unwrap();
            let e = exponent_at_rate(r, &pb, &ch).unwrap();
            assert!((v.value - e).abs() < 1e-6, "g={g} r={r} {v:?} {e}");
        }
    }
    let _ = underline_omega;
}
