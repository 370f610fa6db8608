//! Writing a scene in the text format, diagnostics, and tracing it.
//!
//! cargo run --example scene_language

use pathline::integrate::{trace, IntegratorConfig};
use pathline::scenelang::{compile_str, parse, parse_expr};
use pathline::vector;

const SCENE: &str = "\
[scene]
name = tilted
dim = 2
time = (0, 4)
domain = (-3, 3) x (-3, 3)

[interface]
phi = x2 - 0.5*x1 - 0.1*t

[fields]
# relative normal speeds 0.3/sqrt(1.25) and 0.6/sqrt(1.25)
v_plus = (0, 0.4)
v_minus = (0, 0.7)

[densities]
rho_plus = 2
rho_minus = 1
";

fn main() -> pathline::Result<()> {
    let e = parse_expr("sin(x1)^2 + cos(x1)^2 - norm(x)/3")?;
    println!("parsed: {e}  value at x = (0.3, 0.4): {}", e.eval(0.0, &[0.3, 0.4]).unwrap());
    for bad in ["1 + * 2", "foo(x1)", "x1 + (2"] {
        println!("{bad:<10} -> {}", parse_expr(bad).unwrap_err());
    }
    let doc = parse(SCENE)?;
    println!("scene {} in {} dimensions, phi = {}", doc.name, doc.dim, doc.phi);
    let scene = compile_str(SCENE)?;
    let traj = trace(&scene, &IntegratorConfig::default(), 0.0, &vector(&[0.0, -1.0]), 3.0)?;
    println!("crossing at t = {:.10}, x(3) = {:?}", traj.events[0].time, traj.final_state().as_slice());
    Ok(())
}
