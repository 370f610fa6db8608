mod common;

use proptest::prelude::*;

use pathline::geometry::{intrinsic_velocity, normal, normal_speed, subtangential_residual, tangent_projector};
use pathline::scenes::builtin;
use pathline::{vector, Point};

fn offset_fd(scene: &pathline::fields::TwoPhaseScene, t: f64, x: &Point) -> Point {
    let h = 1e-6;
    Point::from_fn(x.len(), |k, _| {
        let mut xp = x.clone();
        let mut xm = x.clone();
        xp[k] += h;
        xm[k] -= h;
        let dp = scene.chart().project(t, &xp).unwrap().distance;
        let dm = scene.chart().project(t, &xm).unwrap().distance;
        (dp - dm) / (2.0 * h)
    })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 200, ..ProptestConfig::default() })]

    #[test]
    fn chart_invariants_on_the_ellipse(s in 0.0f64..std::f64::consts::TAU, d in -0.14f64..0.14, t in 0.0f64..5.0) {
        let scene = builtin("S3").unwrap();
        let chart = scene.chart();
        // Points below the focal distance of the rotating ellipse.
        let (c, sn) = ((0.5 * t).cos(), (0.5 * t).sin());
        let body = vector(&[1.5 * s.cos(), s.sin()]);
        let on = vector(&[c * body[0] - sn * body[1], sn * body[0] + c * body[1]]);
        let n = normal(scene.iface(), t, &on).unwrap();
        let x = &on + &n * d;
        let cp = chart.project(t, &x).unwrap();
        prop_assert!((x.clone() - (&cp.foot + &cp.normal * cp.distance)).norm() <= chart.chart_tol);
        prop_assert!(scene.iface().phi(t, &cp.foot).abs() <= chart.newton_tol);
        prop_assert!((cp.distance - d).abs() < 1e-10);
        prop_assert!((offset_fd(&scene, t, &x).norm() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn projector_is_idempotent_and_kills_the_normal(a in -3.0f64..3.0, b in -3.0f64..3.0, c in -3.0f64..3.0) {
        let v = vector(&[a, b, c]);
        prop_assume!(v.norm() > 1e-3);
        let n = &v / v.norm();
        let p = tangent_projector(&n);
        prop_assert!((&p * &p - &p).norm() < 1e-12);
        prop_assert!((&p * &n).norm() < 1e-12);
    }
}

#[test]
fn circle_normal_speed_and_intrinsic_velocity() {
    let s2 = builtin("S2").unwrap();
    let t = 1.0;
    let x = vector(&[0.0, 1.2]);
    assert!((normal_speed(s2.iface(), t, &x).unwrap() - 0.2).abs() < 1e-14);
    assert!((intrinsic_velocity(s2.iface(), t, &x).unwrap() - vector(&[0.0, 0.2])).norm() < 1e-14);
}

#[test]
fn moving_with_the_interface_is_subtangential() {
    let s1 = builtin("S1").unwrap();
    let x = vector(&[0.3, 0.2]);
    let w = intrinsic_velocity(s1.iface(), 1.0, &x).unwrap();
    for h in [1e-2, 1e-4] {
        assert!(subtangential_residual(s1.chart(), 1.0, &x, 1.0, &w, h).unwrap() < 1e-10);
    }
    let off = subtangential_residual(s1.chart(), 1.0, &x, 1.0, &vector(&[0.0, 1.0]), 1e-4).unwrap();
    assert!((off - 0.8).abs() < 1e-10);
}

#[test]
fn tube_samples_are_reconstructed() {
    let s5 = builtin("S5").unwrap();
    for (x, p, d) in common::tube_points(&s5, 0.5, 50, 0.9) {
        let cp = s5.chart().project(0.5, &x).unwrap();
        assert!((cp.foot - p).norm() < 1e-12);
        assert!((cp.distance - d).abs() < 1e-12);
    }
}

#[test]
fn points_outside_the_tube_are_rejected() {
    let s2 = builtin("S2").unwrap();
    let err = s2.chart().project(0.0, &vector(&[2.9, 0.0])).unwrap_err();
    assert_eq!(err.name(), "ChartOutOfRange");
}
