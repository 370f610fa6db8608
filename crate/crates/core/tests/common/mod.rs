#![allow(dead_code)]

use proptest::prelude::*;

use pathline::fields::sample_interface;
use pathline::fields::TwoPhaseScene;
use pathline::geometry;
use pathline::Point;

/// Source text of random well-formed expressions over `t, x1..x{dim}`.
pub fn expression(dim: usize) -> impl Strategy<Value = String> {
    let leaf = prop_oneof![
        (0.0f64..100.0).prop_map(|v| format!("{v}")),
        (0u32..20).prop_map(|v| v.to_string()),
        Just("t".to_string()),
        (1..=dim).prop_map(|k| format!("x{k}")),
        Just("norm(x)".to_string()),
        (1.0f64..9.0, -3i32..3).prop_map(|(m, e)| format!("{m:.3}e{e}")),
    ];
    leaf.prop_recursive(5, 48, 3, |inner| {
        prop_oneof![
            (inner.clone(), prop_oneof![Just("+"), Just("-"), Just("*"), Just("/"), Just("^")], inner.clone())
                .prop_map(|(a, op, b)| format!("{a} {op} {b}")),
            (inner.clone(), inner.clone(), prop_oneof![Just("+"), Just("*"), Just("-")])
                .prop_map(|(a, b, op)| format!("({a}) {op} ({b})")),
            inner.clone().prop_map(|a| format!("-{a}")),
            inner.clone().prop_map(|a| format!("({a})")),
            (prop_oneof![Just("sin"), Just("cos"), Just("exp"), Just("log"), Just("sqrt"), Just("abs")], inner.clone())
                .prop_map(|(f, a)| format!("{f}({a})")),
            (prop_oneof![Just("min"), Just("max")], inner.clone(), inner).prop_map(|(f, a, b)| format!("{f}({a}, {b})")),
        ]
    })
}

/// Points `p + d n(p)` with `p ∈ Σ(t)` and `|d| ≤ fraction · width`,
/// returned with their foot point and offset.
pub fn tube_points(scene: &TwoPhaseScene, t: f64, count: usize, fraction: f64) -> Vec<(Point, Point, f64)> {
    let feet = sample_interface(scene.chart(), t, count);
    let w = scene.chart().width;
    feet.iter()
        .enumerate()
        .map(|(i, p)| {
            let s = (i as f64 + 0.5) / feet.len() as f64;
            let d = fraction * w * (2.0 * s - 1.0);
            let n = geometry::normal(scene.iface(), t, p).unwrap();
            (p + n * d, p.clone(), d)
        })
        .collect()
}
