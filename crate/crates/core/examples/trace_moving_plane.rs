//! Pathline through the moving plane `x2 = 0.2 t` of scene S1.
//!
//! cargo run --example trace_moving_plane

use pathline::integrate::{trace, write_csv, IntegratorConfig};
use pathline::scenes::builtin;
use pathline::vector;

fn main() -> pathline::Result<()> {
    let scene = builtin("S1")?;
    let traj = trace(&scene, &IntegratorConfig::rk4(0.05), 0.0, &vector(&[0.0, -1.0]), 2.0)?;
    for ev in &traj.events {
        println!(
            "# crossing at t = {:.12} from {} to {}; u+ = {}, u- = {}",
            ev.time, ev.from_phase, ev.to_phase, ev.u_plus, ev.u_minus
        );
    }
    println!("# x(2) = {:?} (closed form (0, 0.7))", traj.final_state().as_slice());
    write_csv(&mut std::io::stdout().lock(), &[traj])
}
