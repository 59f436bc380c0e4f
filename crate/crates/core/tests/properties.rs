use awgn_exponent::{
    big_l_mu_lambda, big_l_rho_nu, binary_entropy, capacity, exponent_at_rate, f_gradient,
    f_hessian, gaussian_conditional_divergence, gaussian_mutual_information,
    generate_random_codebook, mu_lambda_from_rho_nu, nu_zero, parametric_point,
    rho_nu_from_mu_lambda, Channel, DiscretizedDensity, GaussianInputLaw, GaussianTestChannel,
    Hessian2, PowerBudget, QuadratureRule, QuadratureSpec, RhoNuParams, TiltParams,
};
use proptest::prelude::*;

fn feasible() -> impl Strategy<Value = RhoNuParams> {
    (0.01f64..3.0, 0.01f64..0.99).prop_map(|(nu, s)| {
        let edge = nu / (1.0 + nu);
        RhoNuParams::new(edge + (1.0 - edge) * s, nu).unwrap()
    })
}

fn setting() -> impl Strategy<Value = (PowerBudget, Channel)> {
    (0.05f64..20.0, 0.2f64..5.0)
        .prop_map(|(g, s2)| (PowerBudget::new(g * s2).unwrap(), Channel::new(s2).unwrap()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn rho_nu_round_trip(rn in feasible(), s2 in 0.2f64..5.0) {
        let ch = Channel::new(s2).unwrap();
        let tp = mu_lambda_from_rho_nu(&rn, &ch).unwrap();
        let back = rho_nu_from_mu_lambda(&tp, &ch);
        prop_assert!((back.rho - rn.rho).abs() < 1e-12);
        prop_assert!((back.nu - rn.nu).abs() < 1e-12 * rn.nu.max(1.0));
    }

    #[test]
    fn both_l_forms_agree(rn in feasible(), (pb, ch) in setting(), rate in 0.0f64..3.0) {
        let tp = mu_lambda_from_rho_nu(&rn, &ch).unwrap();
        let a = big_l_mu_lambda(&tp, rate, &pb, &ch).unwrap();
        let b = big_l_rho_nu(&rn, rate, &pb, &ch).unwrap();
        prop_assert!((a - b).abs() < 1e-10 * (1.0 + a.abs()), "{} vs {}", a, b);
    }

    #[test]
    fn gradient_matches_central_differences(rn in feasible(), (pb, ch) in setting(), rate in 0.1f64..3.0) {
        prop_assume!(rn.rho < 0.999 && rn.rho - rn.nu / (1.0 + rn.nu) > 1e-4);
        let g = f_gradient(&rn, rate, &pb, &ch).unwrap();
        let f = |rho: f64, nu: f64| -big_l_rho_nu(&RhoNuParams { rho, nu }, rate, &pb, &ch).unwrap();
        let h = 1e-6;
        let d_rho = (f(rn.rho + h, rn.nu) - f(rn.rho - h, rn.nu)) / (2.0 * h);
        let d_nu = (f(rn.rho, rn.nu + h) - f(rn.rho, rn.nu - h)) / (2.0 * h);
        prop_assert!((d_rho - g[0]).abs() <= 1e-5 * g[0].abs().max(1.0));
        prop_assert!((d_nu - g[1]).abs() <= 1e-5 * g[1].abs().max(1.0));
    }

    #[test]
    fn hessian_is_psd_on_feasible_region(rn in feasible()) {
        let h = f_hessian(&rn).unwrap();
        prop_assert!(Hessian2::determinant_at(&rn) >= -1e-10);
        prop_assert!(h.rho_rho > 0.0);
        prop_assert!(h.determinant() >= -1e-10);
    }

    #[test]
    fn exponent_shape((pb, ch) in setting(), a in 0.0f64..2.0, b in 0.01f64..1.0) {
        let c = capacity(&ch, &pb);
        let r1 = c + a + 1e-6;
        let r2 = r1 + b;
        let g1 = exponent_at_rate(r1, &pb, &ch).unwrap();
        let g2 = exponent_at_rate(r2, &pb, &ch).unwrap();
        let gm = exponent_at_rate(0.5 * (r1 + r2), &pb, &ch).unwrap();
        prop_assert!(g1 < g2);
        prop_assert!(g1 <= r1 && g2 <= r2);
        prop_assert!(gm <= 0.5 * (g1 + g2) + 1e-14);
    }

    #[test]
    fn parametric_rate_is_increasing((pb, ch) in setting(), s in 0.0f64..0.98, d in 0.001f64..0.02) {
        let nu0 = nu_zero(&pb, &ch);
        let p1 = parametric_point(s * nu0, &pb, &ch).unwrap();
        let p2 = parametric_point((s + d) * nu0, &pb, &ch).unwrap();
        prop_assert!(p1.rate < p2.rate && p1.exponent < p2.exponent);
        prop_assert!(p1.exponent >= 0.0 && p1.exponent <= p1.rate);
    }

    #[test]
    fn information_measures_are_nonnegative(theta in 0.0f64..10.0, alpha in -3.0f64..3.0, xi in 0.01f64..10.0, s2 in 0.1f64..5.0) {
        let input = GaussianInputLaw::new(theta).unwrap();
        let tc = GaussianTestChannel::new(alpha, xi).unwrap();
        prop_assert!(gaussian_mutual_information(&input, &tc) >= 0.0);
        prop_assert!(gaussian_conditional_divergence(&input, &tc, &Channel::new(s2).unwrap()) >= 0.0);
    }

    #[test]
    fn binary_entropy_bounds(p in 0.0f64..=1.0) {
        let h = binary_entropy(p).unwrap();
        prop_assert!((0.0..=std::f64::consts::LN_2 + 1e-15).contains(&h));
        prop_assert!((h - binary_entropy(1.0 - p).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn densities_sum_to_one(var in 0.05f64..20.0, nodes in 64usize..400, trapezoid in any::<bool>()) {
        let rule = if trapezoid { QuadratureRule::Trapezoid } else { QuadratureRule::GaussLegendre };
        let spec = QuadratureSpec::new(10.0, nodes, rule).unwrap();
        let d = DiscretizedDensity::gaussian(var, &spec).unwrap();
        prop_assert!((d.total_mass() - 1.0).abs() < 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn codewords_respect_power(n in 1usize..24, rate in 0.0f64..0.5, frac in 0.0f64..=1.0, seed in any::<u64>()) {
        let pb = PowerBudget::new(1.3).unwrap();
        let cb = generate_random_codebook(n, rate, frac * 1.3, &pb, seed).unwrap();
        let limit = n as f64 * 1.3;
        prop_assert!(cb.codewords().all(|x| x.iter().map(|v| v * v).sum::<f64>() <= limit));
        prop_assert!(!cb.is_empty());
    }
}

#[test]
fn zero_tilt_has_zero_objective() {
    let ch = Channel::new(1.0).unwrap();
    let pb = PowerBudget::new(1.0).unwrap();
    for mu in [0.1, 0.25, 0.5] {
        let v = big_l_mu_lambda(&TiltParams::new(mu, 0.0).unwrap(), 1.3, &pb, &ch).unwrap();
        assert!(v.abs() < 1e-15);
    }
}
