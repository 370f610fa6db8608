//! Twin experiments: identical data across schemes and perturbed data with
//! the Gronwall functional.
//!
//! cargo run --release --example uniqueness_twins

use pathline::integrate::IntegratorConfig;
use pathline::scenes::builtin;
use pathline::vector;
use pathline::verify::twin_experiment;

fn main() -> pathline::Result<()> {
    for (name, x0, t_end) in [("S1", [0.0, -1.0], 2.0), ("S2", [0.5, 0.1], 3.0)] {
        let scene = builtin(name)?;
        let rep = twin_experiment(&scene, &IntegratorConfig::rk4(1e-3), 0.0, &vector(&x0), &[1e-3, 1e-4, 1e-5], t_end)?;
        println!("scene {name}: pass = {}", rep.pass);
        for z in &rep.zero_twins {
            println!("  identical data, {:<8} max separation {:.2e}", z.variant, z.max_separation);
        }
        for p in &rep.perturbed {
            println!(
                "  delta {:.0e}: separation {:.3e} (gain {:.4}), K = {:.4} (refined {:.4}), envelope {}",
                p.delta, p.separation_end, p.gain, p.gronwall.k_fit, p.k_refined, p.gronwall.envelope_ok
            );
        }
    }
    Ok(())
}
