//! Flow map and flow Jacobian of the extended velocity on the expanding
//! circle.
//!
//! cargo run --release --example flow_map_jacobian

use pathline::extend::{ExtendedVelocity, ExtensionConfig};
use pathline::fields::sample_interface;
use pathline::integrate::{flow_map, jacobian_flow, IntegratorConfig};
use pathline::scenes::builtin;

fn main() -> pathline::Result<()> {
    let scene = builtin("S2")?;
    let ext = ExtensionConfig::with_resolution(2, 8, 16)?;
    let cfg = IntegratorConfig::rk4(0.05);
    let seeds = sample_interface(scene.chart(), 0.0, 6);
    let field = ExtendedVelocity::new(scene.clone(), ext.clone());
    let moved = flow_map(&field, &cfg, 0.0, &seeds, 0.5)?;
    for (y, x) in seeds.iter().zip(&moved) {
        println!("{:?} -> {:?}, |d| = {:.2e}", y.as_slice(), x.as_slice(), scene.chart().offset(0.5, x).abs());
    }
    let jac = jacobian_flow(&scene, &ext, &cfg, 0.0, &seeds[0], 0.5)?;
    println!("D Phi at {:?}:\n{}det = {:.10}", seeds[0].as_slice(), jac.matrix, jac.determinant());
    Ok(())
}
