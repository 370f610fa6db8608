use pathline::extend::{ExtendedVelocity, ExtensionConfig};
use pathline::fields::{sample_interface, Phase};
use pathline::integrate::{flow_map, integrate_surface, jacobian_flow, trace, write_csv, IntegratorConfig, Mode};
use pathline::scenes::builtin;
use pathline::vector;

#[test]
fn s1_closed_form_on_both_sides() {
    let s1 = builtin("S1").unwrap();
    let traj = trace(&s1, &IntegratorConfig::rk4(1e-3), 0.0, &vector(&[0.0, -1.0]), 2.0).unwrap();
    let ev = &traj.events[0];
    assert!((ev.time - 1.25).abs() < 1e-8);
    assert!((ev.u_plus - 0.4).abs() < 1e-12 && (ev.u_minus - 0.8).abs() < 1e-12);
    for t in [0.3, 1.0, 1.4, 1.9] {
        let exact = if t < 1.25 { -1.0 + t } else { 0.25 + 0.6 * (t - 1.25) };
        assert!((traj.state_at(t).unwrap()[1] - exact).abs() < 1e-9, "t = {t}");
    }
    assert_eq!(traj.phase_at(0.5), Some(Phase::Minus));
    assert_eq!(traj.phase_at(1.5), Some(Phase::Plus));
}

#[test]
fn rk4_self_convergence_order() {
    for (name, x0, t_end) in [("S1", vec![0.0, -1.0], 2.0), ("S2", vec![0.5, 0.1], 3.0)] {
        let scene = builtin(name).unwrap();
        let reference = trace(&scene, &IntegratorConfig::rk45(1e-13), 0.0, &vector(&x0), t_end).unwrap();
        let err = |h: f64| {
            let tr = trace(&scene, &IntegratorConfig::rk4(h), 0.0, &vector(&x0), t_end).unwrap();
            (tr.final_state() - reference.final_state()).amax()
        };
        let (e1, e2) = (err(0.1), err(0.05));
        if name == "S1" {
            // Piecewise constant field: RK4 is exact up to event location.
            assert!(e1 < 1e-9 && e2 < 1e-9);
        } else {
            let order = (e1 / e2).log2();
            assert!(order >= 3.0, "{name}: order {order} ({e1:e}, {e2:e})");
        }
    }
}

#[test]
fn rk4_and_rk45_agree_within_h4_plus_tol() {
    let s2 = builtin("S2").unwrap();
    let x0 = vector(&[0.5, 0.1]);
    for (h, tol) in [(1e-2, 1e-8), (5e-3, 1e-9)] {
        let a = trace(&s2, &IntegratorConfig::rk4(h), 0.0, &x0, 3.0).unwrap();
        let b = trace(&s2, &IntegratorConfig::rk45(tol), 0.0, &x0, 3.0).unwrap();
        let gap = (a.final_state() - b.final_state()).amax();
        assert!(gap <= 10.0 * (h.powi(4) + tol), "h {h}: {gap:e}");
    }
}

#[test]
fn grazing_start_follows_the_interface() {
    let s3 = builtin("S3").unwrap();
    let traj = trace(&s3, &IntegratorConfig::default(), 0.0, &vector(&[1.5, 0.0]), 2.0).unwrap();
    assert!(traj.events.is_empty());
    assert_eq!(traj.segments[0].phase, Phase::Interface);
    let x = traj.final_state();
    // Rigid rotation by angle 0.5·t.
    let exact = vector(&[1.5 * 1.0f64.cos(), 1.5 * 1.0f64.sin()]);
    assert!((x - exact).norm() < 1e-9, "{x}");
    let surf = integrate_surface(&s3, &IntegratorConfig::default(), 0.0, &vector(&[1.5, 0.0]), 2.0).unwrap();
    assert!(surf.diagnostics.max_constraint_drift < 1e-9);
}

#[test]
fn event_records_are_consistent() {
    let s2 = builtin("S2").unwrap();
    let traj = trace(&s2, &IntegratorConfig::default(), 0.0, &vector(&[0.5, 0.1]), 3.0).unwrap();
    assert_eq!(traj.events.len(), 1);
    let ev = &traj.events[0];
    assert_eq!((ev.from_phase, ev.to_phase, ev.sign, ev.mode), (Phase::Minus, Phase::Plus, 1, Mode::Cross));
    assert!(s2.chart().offset(ev.time, &ev.location).abs() <= 1e-10);
    // Segments abut.
    let (a, b) = (&traj.segments[0], &traj.segments[1]);
    assert!((a.states.last().unwrap() - &b.states[0]).norm() <= 1e-12);
}

#[test]
fn extended_flow_keeps_the_interface_invariant() {
    let s2 = builtin("S2").unwrap();
    let field = ExtendedVelocity::new(s2.clone(), ExtensionConfig::with_resolution(2, 8, 16).unwrap());
    let seeds = sample_interface(s2.chart(), 0.0, 20);
    assert!(seeds.len() >= 20);
    let cfg = IntegratorConfig::rk4(0.05);
    let moved = flow_map(&field, &cfg, 0.0, &seeds, 0.5).unwrap();
    let worst = moved.iter().map(|x| s2.chart().offset(0.5, x).abs()).fold(0.0, f64::max);
    assert!(worst <= 10.0 * cfg.tol_event, "{worst:e}");
}

#[test]
fn flow_jacobian_of_the_expanding_circle() {
    let s2 = builtin("S2").unwrap();
    let ext = ExtensionConfig::with_resolution(2, 8, 16).unwrap();
    let y = vector(&[1.0, 0.0]);
    let jac = jacobian_flow(&s2, &ext, &IntegratorConfig::rk4(0.05), 0.0, &y, 0.5).unwrap();
    // Radial field 0.2·x/|x|: radial stretch 1, tangential stretch r(t)/r(0).
    assert!((jac.position - vector(&[1.1, 0.0])).norm() < 1e-10);
    assert!((jac.matrix[(0, 0)] - 1.0).abs() < 1e-6);
    assert!((jac.matrix[(1, 1)] - 1.1).abs() < 1e-6);
}

#[test]
fn csv_has_one_event_row() {
    let s1 = builtin("S1").unwrap();
    let traj = trace(&s1, &IntegratorConfig::rk4(0.01), 0.0, &vector(&[0.0, -1.0]), 2.0).unwrap();
    let mut buf = Vec::new();
    write_csv(&mut buf, &[traj]).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let events: Vec<&str> = text.lines().filter(|l| l.ends_with(",interface,1")).collect();
    assert_eq!(events.len(), 1);
    let t: f64 = events[0].split(',').nth(1).unwrap().parse().unwrap();
    assert!((t - 1.25).abs() < 1e-8);
    assert_eq!(text.lines().next().unwrap(), "traj,t,x1,x2,phase,event");
}

#[test]
fn leaving_the_domain_is_reported() {
    let s0 = builtin("S0").unwrap();
    let err = trace(&s0, &IntegratorConfig::rk4(1e-2), 0.0, &vector(&[0.0, 5.0]), 4.0).unwrap_err();
    assert_eq!(err.name(), "LeftDomain");
}
