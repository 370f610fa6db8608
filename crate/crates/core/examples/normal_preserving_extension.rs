//! Extension of surface data into the tube and the normal-evolution
//! identity of the extended interface velocity.
//!
//! cargo run --release --example normal_preserving_extension

use pathline::extend::{extend_scalar, extend_velocity, extension_gradient, ExtensionConfig, SurfaceScalarField};
use pathline::fields::sample_interface;
use pathline::integrate::{normal_evolution_residual, IntegratorConfig};
use pathline::scenes::builtin;
use pathline::{scalar_fn, vector, Point};

fn main() -> pathline::Result<()> {
    let scene = builtin("S2")?;
    let cfg = ExtensionConfig::default_for(2)?;
    let f_surface = SurfaceScalarField::new(scalar_fn(|_, x: &Point| x[0]));
    let g = scalar_fn(|_, x: &Point| 1.0 + x[1]);
    let t = 0.0;
    println!("{:>8} {:>14} {:>30}", "d", "f", "grad f");
    for d in [0.2, 0.05, 1e-3, 0.0, -0.05] {
        let x = vector(&[0.6, 0.8]) * (1.0 + d);
        let f = extend_scalar(&f_surface, &g, scene.chart(), &cfg, t, &x)?;
        let grad = extension_gradient(&f_surface, &g, scene.chart(), &cfg, t, &x)?;
        println!("{d:>8} {f:>14.10} {:>30}", format!("({:.8}, {:.8})", grad[0], grad[1]));
    }
    let x = vector(&[0.0, 1.2]);
    println!("extended velocity at (0, 1.2): {:?}", extend_velocity(&scene, &cfg, t, &x)?.as_slice());

    let ellipse = builtin("S3")?;
    let feet = sample_interface(ellipse.chart(), 0.0, 3);
    for (h, r, a) in [(0.4, 4, 8), (0.2, 8, 16)] {
        let ext = ExtensionConfig::with_resolution(2, r, a)?;
        let worst = feet.iter().try_fold(0.0_f64, |m, y| {
            normal_evolution_residual(&ellipse, &ext, &IntegratorConfig::rk4(h), 0.0, y, 1.6).map(|v| m.max(v))
        })?;
        println!("ellipse, h = {h}, quadrature {r}x{a}: normal-evolution residual {worst:.3e}");
    }
    Ok(())
}
