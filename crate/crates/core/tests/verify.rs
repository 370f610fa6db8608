use pathline::integrate::{trace, IntegratorConfig};
use pathline::scenes::builtin;
use pathline::verify::{
    energy_check, estimate_lipschitz, gronwall_check, phi_functional, pull_back_transmission_residual, twin_experiment,
    FlatteningTransform, HeightFunction, UniquenessMonitor,
};
use pathline::extend::ExtensionConfig;
use pathline::fields::{sample_interface, Phase};
use pathline::vector;

#[test]
fn phi_functional_example() {
    let s1 = builtin("S1").unwrap();
    assert!((phi_functional(&s1, 0.0, &vector(&[0.0, 1.0]), &vector(&[0.0, -1.0])) - 3.0).abs() < 1e-12);
}

#[test]
fn separations_scale_linearly() {
    for (name, x0, t_end) in [("S1", vec![0.0, -1.0], 2.0), ("S2", vec![0.5, 0.1], 3.0)] {
        let scene = builtin(name).unwrap();
        let rep = twin_experiment(&scene, &IntegratorConfig::rk4(1e-3), 0.0, &vector(&x0), &[1e-3, 1e-4, 1e-5], t_end).unwrap();
        assert!(rep.continuity_pass, "{name}: spread {}", rep.gain_spread);
        assert!(rep.zero_pass && rep.gronwall_pass, "{name}: {rep:?}");
    }
}

#[test]
fn difference_quotients_respect_the_lipschitz_bound() {
    // |φ′| ≤ |ρ|∞ |u|∞ + Lipschitz terms; on S2 bounded by 1.1 × measured.
    let s2 = builtin("S2").unwrap();
    let cfg = IntegratorConfig::rk4(1e-3);
    let a = trace(&s2, &cfg, 0.0, &vector(&[0.5, 0.1]), 3.0).unwrap();
    let b = trace(&s2, &cfg, 0.0, &vector(&[0.5007, 0.1007]), 3.0).unwrap();
    let mon = UniquenessMonitor::new(&s2, &a, &b);
    let series = mon.series(&mon.sample_times());
    let fit = gronwall_check(&series);
    let lip = estimate_lipschitz(&s2, Phase::Minus, 0.0, &vector(&[0.0, 0.0]), 0.9, 4000, 1)
        .max(estimate_lipschitz(&s2, Phase::Plus, 0.0, &vector(&[1.8, 0.0]), 0.6, 4000, 2));
    let bound = 2.0 * lip * fit.max_phi;
    assert!(fit.max_quotient <= 1.1 * bound, "{} vs {}", fit.max_quotient, bound);
    // Energy inequality with the sampled constant.
    assert!(energy_check(&series, 2.0 * lip) <= 1e-12);
}

#[test]
fn transpose_identity_in_three_dimensions() {
    let h = HeightFunction::new(
        |y| 0.2 * y[0] * y[1],
        |y| vector(&[0.2 * y[1], 0.2 * y[0]]),
    );
    let flat = FlatteningTransform::new(3, h, 0.3, 2.0).unwrap();
    for xp in [vector(&[0.1, 0.4]), vector(&[-1.0, 0.7])] {
        assert!(flat.transpose_identity_residual(&xp) < 1e-12);
        assert!(flat.normal_column_residual(&xp) < 1e-15);
    }
}

#[test]
fn pulled_back_transmission_on_the_circle() {
    let s2 = builtin("S2").unwrap();
    let ext = ExtensionConfig::with_resolution(2, 8, 16).unwrap();
    for y in sample_interface(s2.chart(), 0.0, 4) {
        let r = pull_back_transmission_residual(&s2, &ext, &IntegratorConfig::rk4(0.05), 0.0, &y, 0.5).unwrap();
        assert!(r < 1e-6, "{r:e}");
    }
}
