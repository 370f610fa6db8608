//! Height-function flattening of a graph interface onto `{xₙ = 0}` and the
//! interface conditions in flattened coordinates.

use std::sync::Arc;

use crate::extend::ExtensionConfig;
use crate::fields::{Phase, TwoPhaseScene};
use crate::geometry;
use crate::integrate::{jacobian_flow, IntegratorConfig};
use crate::{Error, Matrix, Point, Result, ScalarFn, VectorFn};

/// Largest admissible condition number of `H′`.
pub const COND_MAX: f64 = 1e12;

type GraphFn = Arc<dyn Fn(&Point) -> f64 + Send + Sync>;
type GraphGrad = Arc<dyn Fn(&Point) -> Point + Send + Sync>;
type GraphHessian = Arc<dyn Fn(&Point) -> Matrix + Send + Sync>;

/// `h: ℝⁿ⁻¹ → ℝ` with gradient and optional Hessian.
#[derive(Clone)]
pub struct HeightFunction {
    h: GraphFn,
    grad: GraphGrad,
    hessian: Option<GraphHessian>,
}

impl HeightFunction {
    pub fn new<H, G>(h: H, grad: G) -> Self
    where
        H: Fn(&Point) -> f64 + Send + Sync + 'static,
        G: Fn(&Point) -> Point + Send + Sync + 'static,
    {
        Self { h: Arc::new(h), grad: Arc::new(grad), hessian: None }
    }

    pub fn with_hessian<F>(mut self, hessian: F) -> Self
    where
        F: Fn(&Point) -> Matrix + Send + Sync + 'static,
    {
        self.hessian = Some(Arc::new(hessian));
        self
    }

    /// `h ≡ 0` on `ℝᵐ`.
    pub fn flat(m: usize) -> Self {
        Self::new(|_| 0.0, move |_| Point::zeros(m)).with_hessian(move |_| Matrix::zeros(m, m))
    }

    /// `h(x′) = a·sin(x′₁)`.
    pub fn sine(m: usize, a: f64) -> Self {
        Self::new(move |y| a * y[0].sin(), move |y| {
            let mut g = Point::zeros(m);
            g[0] = a * y[0].cos();
            g
        })
        .with_hessian(move |y| {
            let mut hm = Matrix::zeros(m, m);
            hm[(0, 0)] = -a * y[0].sin();
            hm
        })
    }

    pub fn value(&self, y: &Point) -> f64 {
        (self.h)(y)
    }

    pub fn gradient(&self, y: &Point) -> Point {
        (self.grad)(y)
    }

    /// Hessian, by central differences of the gradient when none is given.
    pub fn hessian(&self, y: &Point) -> Matrix {
        if let Some(hs) = &self.hessian {
            return hs(y);
        }
        let m = y.len();
        let step = 1e-6 * (1.0 + y.norm());
        let mut out = Matrix::zeros(m, m);
        for j in 0..m {
            let mut yp = y.clone();
            let mut ym = y.clone();
            yp[j] += step;
            ym[j] -= step;
            let col = ((self.grad)(&yp) - (self.grad)(&ym)) / (2.0 * step);
            out.set_column(j, &col);
        }
        0.5 * (&out + out.transpose())
    }
}

impl std::fmt::Debug for HeightFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("HeightFunction").field("analytic_hessian", &self.hessian.is_some()).finish()
    }
}

/// `H(x′, xₙ) = (x′, h(x′)) + xₙ ν(x′)` with `ν = (−∇h, 1)/√(1+‖∇h‖²)`,
/// valid on `{|xₙ| < thickness} ∩ B_radius(0)`.
#[derive(Debug, Clone)]
pub struct FlatteningTransform {
    pub height: HeightFunction,
    pub dim: usize,
    pub thickness: f64,
    pub radius: f64,
}

impl FlatteningTransform {
    pub fn new(dim: usize, height: HeightFunction, thickness: f64, radius: f64) -> Result<Self> {
        if dim < 2 {
            return Err(Error::NotImplementedDimension(dim));
        }
        if !(thickness > 0.0 && radius > 0.0) {
            return Err(Error::InvalidInput("flattening box must have positive size".into()));
        }
        Ok(Self { height, dim, thickness, radius })
    }

    fn split(&self, y: &Point) -> (Point, f64) {
        (y.rows(0, self.dim - 1).into_owned(), y[self.dim - 1])
    }

    /// Unit normal `ν(x′)` of the graph, pointing to `xₙ > 0`.
    pub fn graph_normal(&self, xp: &Point) -> Point {
        let g = self.height.gradient(xp);
        let s = (1.0 + g.norm_squared()).sqrt();
        Point::from_iterator(self.dim, g.iter().map(|gi| -gi / s).chain(std::iter::once(1.0 / s)))
    }

    pub fn in_box(&self, y: &Point) -> bool {
        y[self.dim - 1].abs() < self.thickness && y.norm() < self.radius
    }

    pub fn map(&self, y: &Point) -> Point {
        let (xp, xn) = self.split(y);
        let base = Point::from_iterator(self.dim, xp.iter().copied().chain(std::iter::once(self.height.value(&xp))));
        base + self.graph_normal(&xp) * xn
    }

    /// `H′(y)`: columns `(e_k, ∂_k h) + xₙ ∂_k ν` for `k < n` and `ν`.
    pub fn jacobian(&self, y: &Point) -> Matrix {
        let n = self.dim;
        let (xp, xn) = self.split(y);
        let g = self.height.gradient(&xp);
        let nu = self.graph_normal(&xp);
        let mut jac = Matrix::zeros(n, n);
        let dnu = if xn != 0.0 {
            // ∂_k ν = (−h_{·k}, 0)/s − ν (g·h_{·k})/s², s = √(1+‖g‖²).
            let hs = self.height.hessian(&xp);
            let s2 = 1.0 + g.norm_squared();
            let s = s2.sqrt();
            let mut d = Matrix::zeros(n, n - 1);
            for k in 0..n - 1 {
                let hk = hs.column(k);
                let gh = g.dot(&hk);
                for i in 0..n {
                    let lead = if i < n - 1 { -hk[i] / s } else { 0.0 };
                    d[(i, k)] = lead - nu[i] * gh / s2;
                }
            }
            Some(d)
        } else {
            None
        };
        for k in 0..n - 1 {
            jac[(k, k)] = 1.0;
            jac[(n - 1, k)] = g[k];
            if let Some(d) = &dnu {
                for i in 0..n {
                    jac[(i, k)] += xn * d[(i, k)];
                }
            }
        }
        jac.set_column(n - 1, &nu);
        jac
    }

    /// 2-norm condition number of `H′(y)`.
    pub fn condition(&self, y: &Point) -> f64 {
        let sv = self.jacobian(y).singular_values();
        let max = sv.max();
        let min = sv.min();
        if min > 0.0 {
            max / min
        } else {
            f64::INFINITY
        }
    }

    /// `H⁻¹(x)` by Newton's method from `(x′, xₙ − h(x′))`.
    pub fn inverse(&self, x: &Point) -> Result<Point> {
        let n = self.dim;
        let (xp, xn) = self.split(x);
        let mut y = xp.clone().insert_row(n - 1, xn - self.height.value(&xp));
        let scale = 1.0 + x.norm();
        for it in 0..60 {
            let r = self.map(&y) - x;
            if r.norm() <= 1e-14 * scale {
                return Ok(y);
            }
            let jac = self.jacobian(&y);
            let step = jac.lu().solve(&r).ok_or(Error::SingularJacobian { condition: f64::INFINITY })?;
            y -= step;
            if it == 59 {
                return Err(Error::NoConvergence { iterations: 60, residual: r.norm() });
            }
        }
        Ok(y)
    }

    /// `‖H′(x′,0)ᵀ (−∇h, 1) − √(1+‖∇h‖²) eₙ‖`.
    pub fn transpose_identity_residual(&self, xp: &Point) -> f64 {
        let n = self.dim;
        let y = xp.clone().insert_row(n - 1, 0.0);
        let g = self.height.gradient(xp);
        let m = Point::from_iterator(n, g.iter().map(|gi| -gi).chain(std::iter::once(1.0)));
        let mut target = Point::zeros(n);
        target[n - 1] = (1.0 + g.norm_squared()).sqrt();
        (self.jacobian(&y).transpose() * m - target).norm()
    }

    /// `‖H′(x′,0) eₙ − ν(x′)‖`, zero by construction up to rounding.
    pub fn normal_column_residual(&self, xp: &Point) -> f64 {
        let y = xp.clone().insert_row(self.dim - 1, 0.0);
        (self.jacobian(&y).column(self.dim - 1) - self.graph_normal(xp)).norm()
    }

    /// Regular `count^(n−1)` grid of points `(x′, 0)` in the validity box.
    pub fn interface_grid(&self, count: usize) -> Vec<Point> {
        let m = self.dim - 1;
        let half = 0.9 * self.radius / (m as f64).sqrt();
        let node = |i: usize| if count <= 1 { 0.0 } else { -half + 2.0 * half * i as f64 / (count - 1) as f64 };
        let total = count.pow(m as u32);
        (0..total)
            .map(|mut k| {
                let mut y = Point::zeros(self.dim);
                for slot in 0..m {
                    y[slot] = node(k % count);
                    k /= count;
                }
                y
            })
            .collect()
    }
}

/// One-sided velocities and densities on a common domain.
#[derive(Clone)]
pub struct PhaseFields {
    pub v_plus: VectorFn,
    pub v_minus: VectorFn,
    pub rho_plus: ScalarFn,
    pub rho_minus: ScalarFn,
}

impl std::fmt::Debug for PhaseFields {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("PhaseFields")
    }
}

impl PhaseFields {
    /// The one-sided fields of a scene, taken as relative velocities of a
    /// static interface.
    pub fn from_scene(scene: &TwoPhaseScene) -> Self {
        Self {
            v_plus: scene.v_plus.function().clone(),
            v_minus: scene.v_minus.function().clone(),
            rho_plus: scene.rho_plus.function().clone(),
            rho_minus: scene.rho_minus.function().clone(),
        }
    }

    /// Relative velocities `v± − w^Σ`, with `w^Σ` from the level set at the
    /// evaluation point.
    pub fn relative_to_interface(scene: &TwoPhaseScene) -> Self {
        let rel = |v: VectorFn| -> VectorFn {
            let iface = scene.iface().clone();
            Arc::new(move |t, x| match geometry::intrinsic_velocity(&iface, t, x) {
                Ok(w) => v(t, x) - w,
                Err(_) => Point::from_element(x.len(), f64::NAN),
            })
        };
        Self {
            v_plus: rel(scene.v_plus.function().clone()),
            v_minus: rel(scene.v_minus.function().clone()),
            rho_plus: scene.rho_plus.function().clone(),
            rho_minus: scene.rho_minus.function().clone(),
        }
    }

    pub fn velocity(&self, phase: Phase, t: f64, x: &Point) -> Point {
        match phase {
            Phase::Minus => (self.v_minus)(t, x),
            _ => (self.v_plus)(t, x),
        }
    }

    pub fn density(&self, phase: Phase, t: f64, x: &Point) -> f64 {
        match phase {
            Phase::Minus => (self.rho_minus)(t, x),
            _ => (self.rho_plus)(t, x),
        }
    }

    /// Physical fields `f(x) = H′(y) g(t, y)`, `ρ(x) = ρ̃(y)` with
    /// `y = H⁻¹(x)`, for flat-coordinate fields `self`. Points where the
    /// inverse fails evaluate to NaN.
    pub fn push_forward(&self, flat: &FlatteningTransform) -> PhaseFields {
        let vec_of = |g: VectorFn| -> VectorFn {
            let flat = flat.clone();
            Arc::new(move |t, x| match flat.inverse(x) {
                Ok(y) => flat.jacobian(&y) * g(t, &y),
                Err(_) => Point::from_element(x.len(), f64::NAN),
            })
        };
        let scal_of = |r: ScalarFn| -> ScalarFn {
            let flat = flat.clone();
            Arc::new(move |t, x| match flat.inverse(x) {
                Ok(y) => r(t, &y),
                Err(_) => f64::NAN,
            })
        };
        PhaseFields {
            v_plus: vec_of(self.v_plus.clone()),
            v_minus: vec_of(self.v_minus.clone()),
            rho_plus: scal_of(self.rho_plus.clone()),
            rho_minus: scal_of(self.rho_minus.clone()),
        }
    }
}

/// `g(t,y) = H′(y)⁻¹ f(t, H(y))` for the phase-`phase` field of `fields`.
pub fn flatten_field(fields: &PhaseFields, flat: &FlatteningTransform, phase: Phase, t: f64, y: &Point) -> Result<Point> {
    let cond = flat.condition(y);
    if !(cond <= COND_MAX) {
        return Err(Error::SingularJacobian { condition: cond });
    }
    let f = fields.velocity(phase, t, &flat.map(y));
    flat.jacobian(y).lu().solve(&f).ok_or(Error::SingularJacobian { condition: cond })
}

/// `max |ρ̃⁺ g⁺ₙ − ρ̃⁻ g⁻ₙ|` over `grid ⊂ {xₙ = 0}`.
pub fn check_flat_transmission(fields: &PhaseFields, flat: &FlatteningTransform, t: f64, grid: &[Point]) -> Result<f64> {
    let n = flat.dim - 1;
    let mut worst = 0.0_f64;
    for y in grid {
        let x = flat.map(y);
        let gp = flatten_field(fields, flat, Phase::Plus, t, y)?;
        let gm = flatten_field(fields, flat, Phase::Minus, t, y)?;
        let r = fields.density(Phase::Plus, t, &x) * gp[n] - fields.density(Phase::Minus, t, &x) * gm[n];
        worst = worst.max(r.abs());
    }
    Ok(worst)
}

/// `max |g±_k|`, `k < n`, over `grid ⊂ {xₙ = 0}`.
pub fn check_flat_tangential(fields: &PhaseFields, flat: &FlatteningTransform, t: f64, grid: &[Point]) -> Result<f64> {
    let n = flat.dim - 1;
    let mut worst = 0.0_f64;
    for y in grid {
        for phase in [Phase::Plus, Phase::Minus] {
            let g = flatten_field(fields, flat, phase, t, y)?;
            worst = g.rows(0, n).iter().fold(worst, |w, gk| w.max(gk.abs()));
        }
    }
    Ok(worst)
}

/// Transmission residual of the fields conjugated by the extended flow:
/// with `x = Φᵗ(y)`, `M = DΦᵗ(y)` and `f± = M⁻¹(v± − v̂)(t, x)`, returns
/// `|ρ⁺ f⁺·n₀ − ρ⁻ f⁻·n₀|` where `n₀ = n(t0, y)`. Diagnostic only.
pub fn pull_back_transmission_residual(
    scene: &TwoPhaseScene,
    ext: &ExtensionConfig,
    cfg: &IntegratorConfig,
    t0: f64,
    y: &Point,
    t: f64,
) -> Result<f64> {
    let jac = jacobian_flow(scene, ext, cfg, t0, y, t)?;
    let x = &jac.position;
    let n0 = geometry::normal(scene.iface(), t0, y)?;
    let vhat = crate::extend::extend_velocity(scene, ext, t, x)?;
    let lu = jac.matrix.clone().lu();
    let pull = |v: Point| lu.solve(&(v - &vhat)).ok_or(Error::SingularJacobian { condition: f64::INFINITY });
    let fp = pull(scene.v_plus.eval(t, x))?;
    let fm = pull(scene.v_minus.eval(t, x))?;
    Ok((scene.rho_plus.eval(t, x) * fp.dot(&n0) - scene.rho_minus.eval(t, x) * fm.dot(&n0)).abs())
}
