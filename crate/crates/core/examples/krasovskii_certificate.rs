//! Set-valued field on the interface and the inclusion certificate of a
//! traced pathline.
//!
//! cargo run --example krasovskii_certificate

use pathline::integrate::{trace, IntegratorConfig};
use pathline::regularize::{inclusion_residual, krasovskii, trajectory_residual};
use pathline::scenes::builtin;
use pathline::vector;

fn main() -> pathline::Result<()> {
    let scene = builtin("S1")?;
    let on = vector(&[0.5, 0.2]);
    let set = krasovskii(&scene, 1.0, &on);
    println!("F(1, (0.5, 0.2)) = {set:?}");
    for u in [vector(&[0.0, 0.8]), vector(&[0.3, 0.8]), vector(&[0.0, 1.4])] {
        println!("dist({:?}, F) = {:.3e}", u.as_slice(), inclusion_residual(&set, &u));
    }
    let traj = trace(&scene, &IntegratorConfig::default(), 0.0, &vector(&[0.0, -1.0]), 2.0)?;
    let cert = trajectory_residual(&scene, &traj);
    println!(
        "certificate: max residual {:.3e} at t = {:.3} over {} samples ({} in event bands)",
        cert.max_residual, cert.worst_time, cert.samples, cert.excluded
    );
    Ok(())
}
