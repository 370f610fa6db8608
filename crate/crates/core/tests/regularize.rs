use proptest::prelude::*;

use pathline::fields::{interface_state, phase_of, Phase};
use pathline::geometry::tangent_projector;
use pathline::integrate::{trace, IntegratorConfig};
use pathline::regularize::{inclusion_residual, krasovskii, trajectory_residual, KrasovskiiSet};
use pathline::scenes::builtin;
use pathline::{vector, Point};

fn brute_force(set: &KrasovskiiSet, u: &Point) -> f64 {
    match set {
        KrasovskiiSet::Singleton(v) => (v - u).norm(),
        KrasovskiiSet::Segment { v_plus, v_minus } => (0..=10_000)
            .map(|k| {
                let s = k as f64 / 10_000.0;
                (v_minus + (v_plus - v_minus) * s - u).norm()
            })
            .fold(f64::INFINITY, f64::min),
    }
}

proptest! {
    #[test]
    fn segment_distance_matches_sampling(ax in -2.0f64..2.0, ay in -2.0f64..2.0, bx in -2.0f64..2.0, by in -2.0f64..2.0, ux in -3.0f64..3.0, uy in -3.0f64..3.0) {
        let set = KrasovskiiSet::Segment { v_plus: vector(&[ax, ay]), v_minus: vector(&[bx, by]) };
        let u = vector(&[ux, uy]);
        let exact = inclusion_residual(&set, &u);
        let sampled = brute_force(&set, &u);
        prop_assert!(exact <= sampled + 1e-12);
        prop_assert!(sampled - exact <= 4e-4 * (1.0 + (ax - bx).hypot(ay - by)));
    }

    #[test]
    fn convex_combinations_are_included(s in 0.0f64..=1.0, x1 in -1.5f64..1.5) {
        let s1 = builtin("S1").unwrap();
        let x = vector(&[x1, 0.2]);
        let set = krasovskii(&s1, 1.0, &x);
        let u = s1.v_plus.eval(1.0, &x) * s + s1.v_minus.eval(1.0, &x) * (1.0 - s);
        prop_assert!(inclusion_residual(&set, &u) <= 1e-15);
    }
}

#[test]
fn unit_segment_examples() {
    let seg = KrasovskiiSet::Segment { v_plus: vector(&[0.0, 1.0]), v_minus: vector(&[0.0, 0.0]) };
    assert_eq!(inclusion_residual(&seg, &vector(&[0.0, 0.5])), 0.0);
    assert_eq!(inclusion_residual(&seg, &vector(&[1.0, 0.5])), 1.0);
    assert!((brute_force(&seg, &vector(&[1.0, 0.5])) - 1.0).abs() < 1e-12);
}

#[test]
fn sets_agree_with_the_phase_label() {
    let s2 = builtin("S2").unwrap();
    for x in [vector(&[0.3, 0.1]), vector(&[1.0, 0.0]), vector(&[2.0, 1.0])] {
        let phase = phase_of(&s2, 0.0, &x).unwrap();
        match krasovskii(&s2, 0.0, &x) {
            KrasovskiiSet::Singleton(v) => assert_eq!(v, s2.velocity(phase, 0.0, &x)),
            KrasovskiiSet::Segment { .. } => assert_eq!(phase, Phase::Interface),
        }
    }
}

#[test]
fn no_slip_segments_have_a_common_tangential_part() {
    let s2 = builtin("S2").unwrap();
    let x = vector(&[0.6, 0.8]);
    let KrasovskiiSet::Segment { v_plus, v_minus } = krasovskii(&s2, 0.0, &x) else {
        panic!("interface point expected");
    };
    let st = interface_state(&s2, 0.0, &x).unwrap();
    let p = tangent_projector(&st.normal);
    assert!((&p * v_plus - &p * v_minus).norm() <= s2.tolerances.noslip);
}

#[test]
fn certificates_on_crossing_traces() {
    for (name, x0) in [("S1", vec![0.0, -1.0]), ("S2", vec![0.5, 0.1]), ("S5", vec![0.3, 0.2, 0.1])] {
        let scene = builtin(name).unwrap();
        let traj = trace(&scene, &IntegratorConfig::default(), 0.0, &vector(&x0), 2.5).unwrap();
        let cert = trajectory_residual(&scene, &traj);
        assert!(cert.passes(1e-6), "{name}: {cert:?}");
    }
}

#[test]
fn a_wrong_path_is_not_certified() {
    // Following v⁺ below the plane is not a solution.
    let s1 = builtin("S1").unwrap();
    let mut traj = trace(&s1, &IntegratorConfig::rk4(1e-2), 0.0, &vector(&[0.0, -1.0]), 1.0).unwrap();
    let seg = &mut traj.segments[0];
    for (x, r) in seg.states.iter_mut().zip(seg.rates.iter_mut()) {
        let t = x[1] + 1.0;
        x[1] = -1.0 + 0.6 * t;
        r[1] = 0.6;
    }
    let cert = trajectory_residual(&s1, &traj);
    assert!(cert.max_residual > 0.3);
}
