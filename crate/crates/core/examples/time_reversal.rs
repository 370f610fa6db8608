//! Forward trace followed by the backward trace from its end point.
//!
//! cargo run --example time_reversal

use pathline::integrate::{trace, trace_backward, IntegratorConfig};
use pathline::scenes::builtin;
use pathline::vector;

fn main() -> pathline::Result<()> {
    for (name, x0, t_end) in [("S1", [0.0, -1.0], 2.0), ("S2", [0.5, 0.1], 3.0)] {
        let scene = builtin(name)?;
        let cfg = IntegratorConfig::default();
        let fwd = trace(&scene, &cfg, 0.0, &vector(&x0), t_end)?;
        let back = trace_backward(&scene, &cfg, t_end, fwd.final_state(), 0.0)?;
        println!(
            "{name}: forward event at {:.10}, backward event at {:.10}, round-trip error {:.2e}",
            fwd.events[0].time,
            back.events[0].time,
            (back.final_state() - vector(&x0)).amax()
        );
    }
    Ok(())
}
