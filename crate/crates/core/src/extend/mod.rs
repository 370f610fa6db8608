//! Normal-preserving extensions of surface data into the tube around `Σ(t)`.
//!
//! A surface scalar `f^Σ` and a bulk scalar `g` define
//!
//! ```text
//! f(t, x) = f^Σ(t, π(t,x)) − d(t,x) · mean_{B(x, |d|)} g
//! ```
//!
//! whose gradient on `Σ` is `∇_Σ f^Σ − g n`. The intrinsic velocity
//! `w = V n` is extended the same way with the ball average of
//! `Σ_k ⟨∂w/∂τ_k, n⟩ τ_k`, which makes the flow of the extension map
//! interface normals to interface normals.

mod quadrature;

pub use quadrature::{gauss_legendre, BallQuadrature};

use std::sync::Arc;

use crate::fields::TwoPhaseScene;
use crate::geometry::{self, ChartPoint, InterfaceChart};
use crate::{Error, Matrix, Point, Result, ScalarFn, VectorFn};

/// Smallest singular direction accepted when orthonormalizing seeds.
const FRAME_MIN_NORM: f64 = 1e-6;

/// Scalar data on the interface.
#[derive(Clone)]
pub struct SurfaceScalarField {
    eval: ScalarFn,
    surface_grad: Option<VectorFn>,
}

impl SurfaceScalarField {
    /// Field with surface gradient from projected central differences.
    pub fn new(eval: ScalarFn) -> Self {
        Self { eval, surface_grad: None }
    }

    pub fn with_surface_grad<G>(mut self, grad: G) -> Self
    where
        G: Fn(f64, &Point) -> Point + Send + Sync + 'static,
    {
        self.surface_grad = Some(Arc::new(grad));
        self
    }

    pub fn constant(value: f64) -> Self {
        Self::new(Arc::new(move |_, _| value))
            .with_surface_grad(|_, x: &Point| Point::zeros(x.len()))
    }

    pub fn eval(&self, t: f64, x: &Point) -> f64 {
        (self.eval)(t, x)
    }

    /// Tangential gradient at `x ∈ Σ(t)`.
    pub fn surface_grad(&self, chart: &InterfaceChart, config: &ExtensionConfig, t: f64, x: &Point) -> Result<Point> {
        let n = geometry::normal(chart.iface(), t, x)?;
        if let Some(g) = &self.surface_grad {
            let g = g(t, x);
            return Ok(&g - &n * g.dot(&n));
        }
        let frame = tangent_frame(chart, t, x, config.seeds.as_deref())?;
        let mut out = Point::zeros(x.len());
        for tau in &frame.vectors {
            let dv = surface_derivative(chart, t, x, tau, config.fd_step, |p| Ok(self.eval(t, p)))?;
            out += tau * dv;
        }
        Ok(out)
    }
}

/// Orthonormal basis of the tangent space of `Σ(t)` at `point`.
#[derive(Debug, Clone)]
pub struct TangentFrame {
    pub time: f64,
    pub point: Point,
    pub normal: Point,
    pub vectors: Vec<Point>,
    pub seeds: Vec<Point>,
}

/// The `n − 1` coordinate axes least aligned with `normal`.
pub fn default_seeds(normal: &Point) -> Vec<Point> {
    let n = normal.len();
    let drop = normal.iamax();
    (0..n).filter(|&k| k != drop).map(|k| Point::from_fn(n, |i, _| f64::from(i == k))).collect()
}

/// Gram–Schmidt on the tangential projections of the seed vectors.
/// Without seeds, [`default_seeds`] is used.
pub fn tangent_frame(
    chart: &InterfaceChart,
    t: f64,
    x: &Point,
    seeds: Option<&[Point]>,
) -> Result<TangentFrame> {
    let normal = geometry::normal(chart.iface(), t, x)?;
    frame_from_normal(t, x, normal, seeds)
}

fn frame_from_normal(t: f64, x: &Point, normal: Point, seeds: Option<&[Point]>) -> Result<TangentFrame> {
    let seeds: Vec<Point> = match seeds {
        Some(s) => s.to_vec(),
        None => default_seeds(&normal),
    };
    if seeds.len() + 1 != normal.len() {
        return Err(Error::InvalidInput(format!(
            "{} seed vectors given for a {}-dimensional space",
            seeds.len(),
            normal.len()
        )));
    }
    let mut vectors: Vec<Point> = Vec::with_capacity(seeds.len());
    let mut min_norm = f64::INFINITY;
    for s in &seeds {
        let mut v = s - &normal * s.dot(&normal);
        for u in &vectors {
            v -= u * v.dot(u);
        }
        let norm = v.norm() / s.norm().max(f64::MIN_POSITIVE);
        min_norm = min_norm.min(norm);
        if !(norm > FRAME_MIN_NORM) {
            return Err(Error::DegenerateFrame { t, min_norm });
        }
        // Second pass keeps orthogonality at roundoff level.
        for u in &vectors {
            v -= u * v.dot(u);
        }
        v -= &normal * v.dot(&normal);
        vectors.push(v.normalize());
    }
    Ok(TangentFrame { time: t, point: x.clone(), normal, vectors, seeds })
}

/// Directional derivative of surface data along the tangent `tau` at
/// `x ∈ Σ(t)`: central differences of `q ∘ π` along straight steps.
pub fn surface_derivative<T, F>(
    chart: &InterfaceChart,
    t: f64,
    x: &Point,
    tau: &Point,
    step: f64,
    mut q: F,
) -> Result<T>
where
    T: std::ops::Sub<Output = T> + std::ops::Mul<f64, Output = T>,
    F: FnMut(&Point) -> Result<T>,
{
    let fwd = chart.project(t, &(x + tau * step))?;
    let bwd = chart.project(t, &(x - tau * step))?;
    Ok((q(&fwd.foot)? - q(&bwd.foot)?) * (0.5 / step))
}

/// Resolution and step sizes of the extension operators.
#[derive(Debug, Clone)]
pub struct ExtensionConfig {
    pub quadrature: BallQuadrature,
    /// Step of the tangential and composed-map differences.
    pub fd_step: f64,
    /// Ball radii below `small_ball · width` use the center value.
    pub small_ball: f64,
    /// Offsets `|d| ≤ on_surface` count as on `Σ`.
    pub on_surface: f64,
    pub seeds: Option<Vec<Point>>,
}

impl ExtensionConfig {
    pub fn new(quadrature: BallQuadrature) -> Self {
        Self { quadrature, fd_step: 1e-6, small_ball: 1e-9, on_surface: 1e-12, seeds: None }
    }

    /// 32 × 64 rule.
    pub fn default_for(dim: usize) -> Result<Self> {
        Ok(Self::new(BallQuadrature::default_for(dim)?))
    }

    pub fn with_resolution(dim: usize, radial: usize, angular: usize) -> Result<Self> {
        Ok(Self::new(BallQuadrature::new(dim, radial, angular)?))
    }

    pub fn with_seeds(mut self, seeds: Vec<Point>) -> Self {
        self.seeds = Some(seeds);
        self
    }
}

fn check_ball(chart: &InterfaceChart, cp: &ChartPoint) -> Result<()> {
    let r = cp.distance.abs();
    if 2.0 * r > chart.width {
        return Err(Error::QuadratureBallEscapesTube { radius: r, width: chart.width });
    }
    Ok(())
}

fn check_dim(chart: &InterfaceChart, config: &ExtensionConfig) -> Result<()> {
    let n = chart.dim();
    if n != config.quadrature.dim() {
        return Err(Error::NotImplementedDimension(n));
    }
    Ok(())
}

/// `f(t,x) = f^Σ(π) − d · mean_{B(x,|d|)} g`.
pub fn extend_scalar(
    f_surface: &SurfaceScalarField,
    g: &ScalarFn,
    chart: &InterfaceChart,
    config: &ExtensionConfig,
    t: f64,
    x: &Point,
) -> Result<f64> {
    check_dim(chart, config)?;
    let cp = chart.project(t, x)?;
    check_ball(chart, &cp)?;
    let base = f_surface.eval(t, &cp.foot);
    let d = cp.distance;
    if d.abs() <= config.on_surface {
        return Ok(base);
    }
    if d.abs() <= config.small_ball * chart.width {
        return Ok(base - d * g(t, x));
    }
    let mean = config.quadrature.ball_mean(x, d, 0.0, |y| Ok(g(t, y)))?;
    Ok(base - d * mean)
}

/// Gradient of [`extend_scalar`]. Off `Σ`:
///
/// ```text
/// ∂ₖf = ∂ₖ(f^Σ∘π) + (n−1) nₖ M − n nₖ S − sgn(d) n S₁ₖ
/// ```
///
/// with `M` the ball mean of `g`, `S` its sphere mean and `S₁ₖ` the sphere
/// mean of `g νₖ`. On `Σ` the limit `∇_Σ f^Σ − g n` is returned.
pub fn extension_gradient(
    f_surface: &SurfaceScalarField,
    g: &ScalarFn,
    chart: &InterfaceChart,
    config: &ExtensionConfig,
    t: f64,
    x: &Point,
) -> Result<Point> {
    check_dim(chart, config)?;
    let n = chart.dim();
    let cp = chart.project(t, x)?;
    check_ball(chart, &cp)?;
    let d = cp.distance;
    if d.abs() <= config.on_surface {
        let gs = f_surface.surface_grad(chart, config, t, &cp.foot)?;
        return Ok(gs - &cp.normal * g(t, &cp.foot));
    }
    let h = config.fd_step * (1.0 + x.norm());
    let mut composed = Point::zeros(n);
    for k in 0..n {
        let mut xp = x.clone();
        let mut xm = x.clone();
        xp[k] += h;
        xm[k] -= h;
        let fp = f_surface.eval(t, &chart.project(t, &xp)?.foot);
        let fm = f_surface.eval(t, &chart.project(t, &xm)?.foot);
        composed[k] = (fp - fm) / (2.0 * h);
    }
    let quad = &config.quadrature;
    let nf = n as f64;
    let (m, s, s1) = if d.abs() <= config.small_ball * chart.width {
        let gx = g(t, x);
        (gx, gx, Point::zeros(n))
    } else {
        let m = quad.ball_mean(x, d, 0.0, |y| Ok(g(t, y)))?;
        let area = quad.area(d);
        let mut s = 0.0;
        let mut s1 = Point::zeros(n);
        for (y, nu, w) in quad.sphere(x, d) {
            let gy = g(t, &y);
            s += gy * w / area;
            s1 += nu * (gy * w / area);
        }
        (m, s, s1)
    };
    let normal = &cp.normal;
    Ok(composed + normal * ((nf - 1.0) * m - nf * s) - s1 * (d.signum() * nf))
}

/// Integrand `Σ_k ⟨∂w/∂τ_k, n⟩ τ_k` of the velocity extension, evaluated at
/// the foot point of `y`.
fn normal_variation(scene: &TwoPhaseScene, config: &ExtensionConfig, t: f64, foot: &Point) -> Result<Point> {
    let chart = scene.chart();
    let iface = scene.iface();
    let frame = tangent_frame(chart, t, foot, config.seeds.as_deref())?;
    let mut out = Point::zeros(foot.len());
    for tau in &frame.vectors {
        let dw = surface_derivative(chart, t, foot, tau, config.fd_step, |p| {
            geometry::intrinsic_velocity(iface, t, p)
        })?;
        out += tau * dw.dot(&frame.normal);
    }
    Ok(out)
}

/// Extension `v̂(t,x) = w(t, π) − d · mean_{B(x,|d|)} F` of the intrinsic
/// interface velocity, with `F = Σ_k ⟨∂w/∂τ_k, n⟩ τ_k` at the foot point.
pub fn extend_velocity(scene: &TwoPhaseScene, config: &ExtensionConfig, t: f64, x: &Point) -> Result<Point> {
    let chart = scene.chart();
    check_dim(chart, config)?;
    let cp = chart.project(t, x)?;
    check_ball(chart, &cp)?;
    let w = geometry::intrinsic_velocity(scene.iface(), t, &cp.foot)?;
    let d = cp.distance;
    if d.abs() <= config.on_surface {
        return Ok(w);
    }
    if d.abs() <= config.small_ball * chart.width {
        return Ok(w - normal_variation(scene, config, t, &cp.foot)? * d);
    }
    let n = x.len();
    let mean = config.quadrature.ball_mean(x, d, Point::zeros(n), |y| {
        let foot = chart.project(t, y)?.foot;
        normal_variation(scene, config, t, &foot)
    })?;
    Ok(w - mean * d)
}

/// Central-difference Jacobian `∇ₓv̂` with the given step.
pub fn extended_velocity_gradient(
    scene: &TwoPhaseScene,
    config: &ExtensionConfig,
    t: f64,
    x: &Point,
    step: f64,
) -> Result<Matrix> {
    let n = x.len();
    let mut jac = Matrix::zeros(n, n);
    for k in 0..n {
        let mut xp = x.clone();
        let mut xm = x.clone();
        xp[k] += step;
        xm[k] -= step;
        let col = (extend_velocity(scene, config, t, &xp)? - extend_velocity(scene, config, t, &xm)?) / (2.0 * step);
        jac.set_column(k, &col);
    }
    Ok(jac)
}

/// The extended velocity of a scene as a callable vector field.
#[derive(Clone)]
pub struct ExtendedVelocity {
    pub scene: TwoPhaseScene,
    pub config: ExtensionConfig,
}

impl ExtendedVelocity {
    pub fn new(scene: TwoPhaseScene, config: ExtensionConfig) -> Self {
        Self { scene, config }
    }

    pub fn eval(&self, t: f64, x: &Point) -> Result<Point> {
        extend_velocity(&self.scene, &self.config, t, x)
    }

    pub fn gradient(&self, t: f64, x: &Point, step: f64) -> Result<Matrix> {
        extended_velocity_gradient(&self.scene, &self.config, t, x, step)
    }
}
