//! Signed-distance chart of the rotating ellipse (scene S3). Points outside
//! the tube are reported as errors instead of returning a distant foot.
//!
//! cargo run --example closest_point_chart

use pathline::scenes::builtin;
use pathline::vector;

fn main() -> pathline::Result<()> {
    let scene = builtin("S3")?;
    let chart = scene.chart();
    let t = 1.0;
    println!("{:>22} {:>22} {:>12} {:>6} {:>10}", "x", "foot", "distance", "iters", "residual");
    for x in [vector(&[1.2, 0.9]), vector(&[0.2, 1.1]), vector(&[-1.0, -0.5]), vector(&[0.5, 0.3])] {
        let cp = match chart.project(t, &x) {
            Ok(cp) => cp,
            Err(e) => {
                println!("{:>22} {}", format!("({:.3}, {:.3})", x[0], x[1]), e.name());
                continue;
            }
        };
        println!(
            "{:>22} {:>22} {:>12.8} {:>6} {:>10.2e}",
            format!("({:.3}, {:.3})", x[0], x[1]),
            format!("({:.6}, {:.6})", cp.foot[0], cp.foot[1]),
            cp.distance,
            cp.iterations,
            cp.residual
        );
    }
    Ok(())
}
