use rayon::prelude::*;

use super::rk::rk4_step;
use super::{Diagnostics, IntegratorConfig, Segment, Trajectory};
use crate::extend::{ExtendedVelocity, ExtensionConfig};
use crate::fields::{Phase, TwoPhaseScene};
use crate::geometry;
use crate::{Error, Matrix, Point, Result};

/// Gradient step of the extended velocity in the variational equation.
const GRADIENT_STEP: f64 = 1e-5;

/// Equal steps of size at most `h` from `t0` to `t` (either direction).
fn uniform_steps(t0: f64, t: f64, h: f64) -> (usize, f64) {
    let span = t - t0;
    if span == 0.0 {
        return (0, 0.0);
    }
    let n = (span.abs() / h - 1e-9).ceil().max(1.0) as usize;
    (n, span / n as f64)
}

/// Flow map `Φᵗ_{t0}` of an arbitrary field by fixed-step RK4, one point
/// per task.
pub fn flow_map_with<F>(field: &F, cfg: &IntegratorConfig, t0: f64, points: &[Point], t: f64) -> Result<Vec<Point>>
where
    F: Fn(f64, &Point) -> Result<Point> + Sync,
{
    let (n, h) = uniform_steps(t0, t, cfg.h);
    points
        .par_iter()
        .map(|p| {
            let mut f = |s: f64, y: &Point| field(s, y);
            let mut x = p.clone();
            for k in 0..n {
                let s = t0 + k as f64 * h;
                let k1 = f(s, &x)?;
                x = rk4_step(&mut f, s, &x, &k1, h)?;
                if !x.iter().all(|v| v.is_finite()) {
                    return Err(Error::NonFinite { t: s + h, x: x.iter().copied().collect() });
                }
            }
            Ok(x)
        })
        .collect()
}

/// Flow map of the extended interface velocity. Points of `Σ(t0)` stay on
/// `Σ(t)` up to the integration error.
pub fn flow_map(field: &ExtendedVelocity, cfg: &IntegratorConfig, t0: f64, points: &[Point], t: f64) -> Result<Vec<Point>> {
    flow_map_with(&|s: f64, y: &Point| field.eval(s, y), cfg, t0, points, t)
}

/// Position and derivative `D_yΦᵗ_{t0}` of the extended flow.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowJacobian {
    pub time: f64,
    pub position: Point,
    pub matrix: Matrix,
}

impl FlowJacobian {
    pub fn determinant(&self) -> f64 {
        self.matrix.determinant()
    }
}

/// Co-integrates `ẋ = v̂(t,x)`, `Ṁ = ∇ₓv̂(t,x) M`, `M(t0) = I` by RK4, with
/// `∇ₓv̂` from central differences of step `1e-5`.
pub fn jacobian_flow(
    scene: &TwoPhaseScene,
    ext: &ExtensionConfig,
    cfg: &IntegratorConfig,
    t0: f64,
    y: &Point,
    t: f64,
) -> Result<FlowJacobian> {
    let dim = y.len();
    let field = ExtendedVelocity::new(scene.clone(), ext.clone());
    let pack = |x: &Point, m: &Matrix| -> Point {
        Point::from_iterator(dim + dim * dim, x.iter().chain(m.iter()).copied())
    };
    let unpack = |z: &Point| -> (Point, Matrix) {
        (z.rows(0, dim).into_owned(), Matrix::from_iterator(dim, dim, z.rows(dim, dim * dim).iter().copied()))
    };
    let mut rhs = |s: f64, z: &Point| -> Result<Point> {
        let (x, m) = unpack(z);
        let v = field.eval(s, &x)?;
        let g = field.gradient(s, &x, GRADIENT_STEP)?;
        Ok(pack(&v, &(g * m)))
    };
    let (n, h) = uniform_steps(t0, t, cfg.h);
    let mut z = pack(y, &Matrix::identity(dim, dim));
    for k in 0..n {
        let s = t0 + k as f64 * h;
        let k1 = rhs(s, &z)?;
        z = rk4_step(&mut rhs, s, &z, &k1, h)?;
    }
    let (position, matrix) = unpack(&z);
    let det = matrix.determinant();
    if !(det.abs() > 1e-12) {
        return Err(Error::SingularJacobian { condition: 1.0 / det.abs() });
    }
    Ok(FlowJacobian { time: t, position, matrix })
}

/// `‖n(t, Φᵗ(y)) − DΦᵗ(y) n(t0, y)‖` for `y ∈ Σ(t0)`.
pub fn normal_evolution_residual(
    scene: &TwoPhaseScene,
    ext: &ExtensionConfig,
    cfg: &IntegratorConfig,
    t0: f64,
    y: &Point,
    t: f64,
) -> Result<f64> {
    let jac = jacobian_flow(scene, ext, cfg, t0, y, t)?;
    let n0 = geometry::normal(scene.iface(), t0, y)?;
    let n1 = geometry::normal(scene.iface(), t, &jac.position)?;
    Ok((n1 - &jac.matrix * n0).norm())
}

/// Solves `ẋ = w^Σ(t, x)` from `x0 ∈ Σ(t0)` with RK4 and re-projection
/// onto `Σ(t)` after every step.
pub fn integrate_surface(
    scene: &TwoPhaseScene,
    cfg: &IntegratorConfig,
    t0: f64,
    x0: &Point,
    t_end: f64,
) -> Result<Trajectory> {
    cfg.check(scene.chart().width)?;
    let chart = scene.chart();
    let iface = scene.iface();
    let start = chart.project(t0, x0)?;
    if start.distance.abs() > scene.tolerances.interface {
        return Err(Error::InvalidInput(format!(
            "surface integration needs a point on the interface (distance {:e})",
            start.distance
        )));
    }
    let mut f = |s: f64, y: &Point| geometry::intrinsic_velocity(iface, s, y);
    let (n, h) = uniform_steps(t0, t_end, cfg.h);
    let mut seg = Segment::new(Phase::Interface);
    let mut diag = Diagnostics::default();
    let mut x = start.foot;
    let mut rate = f(t0, &x)?;
    seg.push(t0, x.clone(), rate.clone());
    for k in 0..n {
        let s = t0 + k as f64 * h;
        let s1 = if k + 1 == n { t_end } else { t0 + (k + 1) as f64 * h };
        if diag.steps >= cfg.max_steps {
            return Err(Error::MaxStepsExceeded { steps: diag.steps, t: s });
        }
        diag.steps += 1;
        let moved = rk4_step(&mut f, s, &x, &rate, s1 - s)?;
        let cp = chart.project(s1, &moved)?;
        diag.max_constraint_drift = diag.max_constraint_drift.max(cp.distance.abs());
        x = cp.foot;
        if !scene.domain().contains(&x) {
            return Err(Error::LeftDomain { t: s1, x: x.iter().copied().collect() });
        }
        rate = f(s1, &x)?;
        if cfg.dense_output || k + 1 == n {
            seg.push(s1, x.clone(), rate.clone());
        }
    }
    Ok(Trajectory {
        dim: scene.dim(),
        segments: vec![seg],
        events: Vec::new(),
        diagnostics: diag,
        backward: t_end < t0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenes::builtin;
    use crate::vector;

    #[test]
    fn surface_motion_on_expanding_circle_is_radial() {
        let s2 = builtin("S2").unwrap();
        let traj = integrate_surface(&s2, &IntegratorConfig::rk4(1e-2), 0.0, &vector(&[1.0, 0.0]), 2.0).unwrap();
        assert!((traj.final_state() - vector(&[1.4, 0.0])).norm() < 1e-12);
        assert!(traj.diagnostics.max_constraint_drift < 1e-9);
    }

    #[test]
    fn surface_motion_on_translating_plane() {
        let s1 = builtin("S1").unwrap();
        let traj = integrate_surface(&s1, &IntegratorConfig::rk4(0.1), 0.5, &vector(&[0.3, 0.1]), 1.5).unwrap();
        assert!((traj.final_state() - vector(&[0.3, 0.3])).norm() < 1e-13);
    }

    #[test]
    fn translating_plane_flow_is_a_translation() {
        let s1 = builtin("S1").unwrap();
        let ext = ExtensionConfig::with_resolution(2, 4, 8).unwrap();
        let cfg = IntegratorConfig::rk4(0.05);
        let jac = jacobian_flow(&s1, &ext, &cfg, 0.0, &vector(&[0.2, 0.0]), 0.5).unwrap();
        assert!((&jac.position - vector(&[0.2, 0.1])).norm() < 1e-10);
        assert!((&jac.matrix - Matrix::identity(2, 2)).norm() < 1e-6);
        let r = normal_evolution_residual(&s1, &ext, &cfg, 0.0, &vector(&[0.2, 0.0]), 0.5).unwrap();
        assert!(r <= 1e-10, "residual {r}");
    }

    #[test]
    fn flow_map_keeps_points_on_the_interface() {
        let s2 = builtin("S2").unwrap();
        let field = ExtendedVelocity::new(s2.clone(), ExtensionConfig::with_resolution(2, 4, 8).unwrap());
        let pts: Vec<Point> = (0..6)
            .map(|k| {
                let a = k as f64;
                vector(&[a.cos(), a.sin()])
            })
            .collect();
        let out = flow_map(&field, &IntegratorConfig::rk4(0.05), 0.0, &pts, 0.5).unwrap();
        for p in out {
            assert!((p.norm() - 1.1).abs() < 1e-9);
        }
    }
}
