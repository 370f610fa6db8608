//! Grazing start on the rotating ellipse: the pathline stays on the
//! interface and is the rigid rotation of its start point. The normal-speed
//! surface motion of the same foot point differs by the tangential drift.
//! A defect scene with opposite normal speeds is rejected.
//!
//! cargo run --example grazing_surface_mode

use pathline::integrate::{integrate_surface, trace, IntegratorConfig};
use pathline::scenes::builtin;
use pathline::vector;

fn main() -> pathline::Result<()> {
    let s3 = builtin("S3")?;
    let cfg = IntegratorConfig::default();
    let traj = trace(&s3, &cfg, 0.0, &vector(&[1.5, 0.0]), 2.0)?;
    println!(
        "pathline: phase {}, x(2) = {:?} (rotation by 1 rad: ({:.12}, {:.12}))",
        traj.segments[0].phase,
        traj.final_state().as_slice(),
        1.5 * 1f64.cos(),
        1.5 * 1f64.sin()
    );
    let surf = integrate_surface(&s3, &cfg, 0.0, &vector(&[1.5, 0.0]), 2.0)?;
    println!("normal-speed motion: x(2) = {:?}, drift {:.2e}", surf.final_state().as_slice(), surf.diagnostics.max_constraint_drift);

    let defect = builtin("S4-transversality")?;
    match trace(&defect, &cfg, 0.0, &vector(&[0.0, -1.0]), 3.0) {
        Ok(_) => println!("unexpected success"),
        Err(e) => println!("{}: {e}", e.name()),
    }
    Ok(())
}
