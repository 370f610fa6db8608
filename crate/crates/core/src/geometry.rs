//! Moving interfaces given by a level-set function, and the signed-distance
//! chart of their tubular neighborhood.
//!
//! Orientation is fixed once for the whole crate: the unit normal is
//! `n = ∇φ/‖∇φ‖` and points into `Ω⁺ = {φ > 0}`.

use std::sync::Arc;

use crate::{Aabb, Error, Matrix, Point, Result, ScalarFn, TimeWindow, VectorFn};

/// Gradients with a norm below this value are treated as degenerate.
pub const DEFAULT_GRAD_FLOOR: f64 = 1e-12;

/// Level-set description of a family of moving hypersurfaces.
///
/// `phi` is mandatory; spatial gradient and time derivative fall back to
/// central finite differences when not supplied.
#[derive(Clone)]
pub struct MovingInterface {
    dim: usize,
    phi: ScalarFn,
    phi_grad: Option<VectorFn>,
    phi_dt: Option<ScalarFn>,
    time_window: TimeWindow,
    domain: Aabb,
    grad_floor: f64,
}

impl std::fmt::Debug for MovingInterface {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("MovingInterface")
            .field("dim", &self.dim)
            .field("analytic_grad", &self.phi_grad.is_some())
            .field("analytic_dt", &self.phi_dt.is_some())
            .field("time_window", &self.time_window)
            .field("domain", &self.domain)
            .finish()
    }
}

impl MovingInterface {
    pub fn new(dim: usize, phi: ScalarFn, time_window: TimeWindow, domain: Aabb) -> Self {
        assert!(dim >= 1, "ambient dimension must be positive");
        assert_eq!(domain.dim(), dim, "domain dimension mismatch");
        Self {
            dim,
            phi,
            phi_grad: None,
            phi_dt: None,
            time_window,
            domain,
            grad_floor: DEFAULT_GRAD_FLOOR,
        }
    }

    /// Supplies an analytic spatial gradient `∇ₓφ`.
    pub fn with_gradient(mut self, grad: VectorFn) -> Self {
        self.phi_grad = Some(grad);
        self
    }

    /// Supplies an analytic time derivative `∂ₜφ`.
    pub fn with_time_derivative(mut self, dt: ScalarFn) -> Self {
        self.phi_dt = Some(dt);
        self
    }

    pub fn with_grad_floor(mut self, floor: f64) -> Self {
        self.grad_floor = floor;
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn time_window(&self) -> TimeWindow {
        self.time_window
    }

    pub fn domain(&self) -> &Aabb {
        &self.domain
    }

    pub fn has_analytic_gradient(&self) -> bool {
        self.phi_grad.is_some()
    }

    pub fn phi(&self, t: f64, x: &Point) -> f64 {
        (self.phi)(t, x)
    }

    pub fn grad(&self, t: f64, x: &Point) -> Point {
        match &self.phi_grad {
            Some(g) => g(t, x),
            None => {
                let h = 1e-6 * (1.0 + x.norm());
                let mut xp = x.clone();
                Point::from_fn(self.dim, |i, _| {
                    let xi = x[i];
                    xp[i] = xi + h;
                    let fp = (self.phi)(t, &xp);
                    xp[i] = xi - h;
                    let fm = (self.phi)(t, &xp);
                    xp[i] = xi;
                    (fp - fm) / (2.0 * h)
                })
            }
        }
    }

    pub fn dt(&self, t: f64, x: &Point) -> f64 {
        match &self.phi_dt {
            Some(d) => d(t, x),
            None => {
                let h = 1e-6 * (1.0 + t.abs());
                ((self.phi)(t + h, x) - (self.phi)(t - h, x)) / (2.0 * h)
            }
        }
    }

    /// Spatial Hessian by central differences of the gradient. Only used to
    /// drive the closest-point iteration, so its accuracy affects the
    /// convergence rate but not the converged foot point.
    pub fn hessian(&self, t: f64, x: &Point) -> Matrix {
        let n = self.dim;
        let h = if self.phi_grad.is_some() { 1e-6 } else { 1e-4 } * (1.0 + x.norm());
        let mut hess = Matrix::zeros(n, n);
        let mut xp = x.clone();
        for j in 0..n {
            let xj = x[j];
            xp[j] = xj + h;
            let gp = self.grad(t, &xp);
            xp[j] = xj - h;
            let gm = self.grad(t, &xp);
            xp[j] = xj;
            hess.set_column(j, &((gp - gm) / (2.0 * h)));
        }
        (&hess + hess.transpose()) * 0.5
    }

    /// Same family with time reversed about `pivot`: `φ̃(s, x) = φ(2·pivot − s, x)`.
    pub fn time_reversed(&self, pivot: f64) -> Self {
        let phi = self.phi.clone();
        let mut out = Self {
            dim: self.dim,
            phi: Arc::new(move |s, x| phi(2.0 * pivot - s, x)),
            phi_grad: None,
            phi_dt: None,
            time_window: TimeWindow::new(
                2.0 * pivot - self.time_window.end,
                2.0 * pivot - self.time_window.start,
            ),
            domain: self.domain.clone(),
            grad_floor: self.grad_floor,
        };
        if let Some(g) = self.phi_grad.clone() {
            out.phi_grad = Some(Arc::new(move |s, x| g(2.0 * pivot - s, x)));
        }
        if let Some(d) = self.phi_dt.clone() {
            out.phi_dt = Some(Arc::new(move |s, x| -d(2.0 * pivot - s, x)));
        }
        out
    }
}

/// Unit normal `∇φ/‖∇φ‖`, pointing into `Ω⁺`.
pub fn normal(iface: &MovingInterface, t: f64, x: &Point) -> Result<Point> {
    let g = iface.grad(t, x);
    let norm = g.norm();
    if !(norm >= iface.grad_floor) {
        return Err(Error::DegenerateGradient { t, norm });
    }
    Ok(g / norm)
}

/// Speed of normal displacement `V_Σ = −∂ₜφ/‖∇φ‖` at a point of `Σ(t)`.
pub fn normal_speed(iface: &MovingInterface, t: f64, x: &Point) -> Result<f64> {
    let norm = iface.grad(t, x).norm();
    if !(norm >= iface.grad_floor) {
        return Err(Error::DegenerateGradient { t, norm });
    }
    Ok(-iface.dt(t, x) / norm)
}

/// Intrinsic interface velocity `w^Σ = V_Σ n_Σ`.
pub fn intrinsic_velocity(iface: &MovingInterface, t: f64, x: &Point) -> Result<Point> {
    let g = iface.grad(t, x);
    let norm = g.norm();
    if !(norm >= iface.grad_floor) {
        return Err(Error::DegenerateGradient { t, norm });
    }
    let speed = -iface.dt(t, x) / norm;
    Ok(g * (speed / norm))
}

/// Tangent projector `P = I − n ⊗ n`.
pub fn tangent_projector(n: &Point) -> Matrix {
    Matrix::identity(n.len(), n.len()) - n * n.transpose()
}

/// Result of the closest-point projection.
#[derive(Debug, Clone, PartialEq)]
pub struct ChartPoint {
    /// Foot point `π_Σ(t, x)` on `Σ(t)`.
    pub foot: Point,
    /// Signed distance `d_Σ(t, x)`, positive in `Ω⁺`.
    pub distance: f64,
    /// Unit normal at the foot point.
    pub normal: Point,
    /// Reconstruction defect `‖x − (π + d n)‖`.
    pub residual: f64,
    pub iterations: usize,
}

/// Signed-distance chart `x ↦ (π_Σ(t,x), d_Σ(t,x))` on the tube of
/// half-width `width` around `Σ(t)`.
#[derive(Debug, Clone)]
pub struct InterfaceChart {
    iface: MovingInterface,
    pub width: f64,
    pub newton_tol: f64,
    pub newton_max_iter: usize,
    pub chart_tol: f64,
}

impl InterfaceChart {
    /// Chart with the default width `0.1 × domain diameter`.
    pub fn new(iface: MovingInterface) -> Self {
        let width = 0.1 * iface.domain().diameter();
        Self::with_width(iface, width)
    }

    pub fn with_width(iface: MovingInterface, width: f64) -> Self {
        assert!(width > 0.0, "chart width must be positive");
        Self {
            iface,
            width,
            newton_tol: 1e-12,
            newton_max_iter: 50,
            chart_tol: 1e-9,
        }
    }

    pub fn iface(&self) -> &MovingInterface {
        &self.iface
    }

    pub fn dim(&self) -> usize {
        self.iface.dim()
    }

    /// Closest-point projection onto `Σ(t)`.
    pub fn project(&self, t: f64, x: &Point) -> Result<ChartPoint> {
        signed_distance(self, t, x)
    }

    /// Signed offset from `Σ(t)`: the exact signed distance inside the
    /// tube, otherwise the first-order estimate `φ/‖∇φ‖` (which carries the
    /// correct sign). Used for event monitoring.
    pub fn offset(&self, t: f64, x: &Point) -> f64 {
        let phi = self.iface.phi(t, x);
        let g = self.iface.grad(t, x).norm();
        let estimate = if g > 0.0 { phi / g } else { phi };
        if estimate.abs() > 0.5 * self.width {
            return estimate;
        }
        match self.project(t, x) {
            Ok(cp) => cp.distance,
            Err(_) => estimate,
        }
    }

    /// Same chart on the time-reversed interface family.
    pub fn time_reversed(&self, pivot: f64) -> Self {
        Self {
            iface: self.iface.time_reversed(pivot),
            ..self.clone()
        }
    }
}

/// Closest-point projection by a damped Newton iteration on the system
/// `φ(p) = 0`, `p + λ∇φ(p) = x`.
///
/// The signed distance is `d = λ‖∇φ(p)‖`; its sign agrees with `φ(t, x)`.
pub fn signed_distance(chart: &InterfaceChart, t: f64, x: &Point) -> Result<ChartPoint> {
    let iface = &chart.iface;
    let n = iface.dim();
    let phi_x = iface.phi(t, x);
    let g_x = iface.grad(t, x);
    let gn2 = g_x.norm_squared();
    if !(gn2.sqrt() >= iface.grad_floor) {
        return Err(Error::DegenerateGradient { t, norm: gn2.sqrt() });
    }
    let estimate = phi_x / gn2.sqrt();
    if !(estimate.abs() <= chart.width) {
        return Err(Error::ChartOutOfRange { t, distance: estimate, width: chart.width });
    }

    let scale = 1.0 + x.norm();
    let mut lambda = phi_x / gn2;
    let mut p = x - &g_x * lambda;

    let residual_of = |p: &Point, lambda: f64| -> Result<(Point, f64, Point)> {
        let g = iface.grad(t, p);
        let r_geom = p + &g * lambda - x;
        let r_phi = iface.phi(t, p);
        Ok((r_geom, r_phi, g))
    };

    let (mut r_geom, mut r_phi, mut g) = residual_of(&p, lambda)?;
    let mut iterations = 0;
    // One extra full step after convergence brings the foot point to
    // rounding level.
    let mut polishing = false;
    loop {
        let merit = r_geom.norm() / scale + r_phi.abs();
        if r_geom.norm() <= chart.newton_tol * scale && r_phi.abs() <= chart.newton_tol {
            if polishing {
                break;
            }
            polishing = true;
        } else if iterations >= chart.newton_max_iter {
            return Err(Error::NoConvergence { iterations, residual: merit });
        }
        iterations += 1;

        let hess = iface.hessian(t, &p);
        let mut jac = Matrix::zeros(n + 1, n + 1);
        for i in 0..n {
            for j in 0..n {
                jac[(i, j)] = hess[(i, j)] * lambda + if i == j { 1.0 } else { 0.0 };
            }
            jac[(i, n)] = g[i];
            jac[(n, i)] = g[i];
        }
        let mut rhs = Point::zeros(n + 1);
        for i in 0..n {
            rhs[i] = -r_geom[i];
        }
        rhs[n] = -r_phi;
        let step = match jac.lu().solve(&rhs) {
            Some(s) => s,
            None if polishing => break,
            None => return Err(Error::NoConvergence { iterations, residual: merit }),
        };
        if polishing {
            let p_try = &p + step.rows(0, n);
            let l_try = lambda + step[n];
            let (rg, rp, gt) = residual_of(&p_try, l_try)?;
            if rg.norm() / scale + rp.abs() <= merit {
                p = p_try;
                lambda = l_try;
                g = gt;
            }
            break;
        }

        // Backtracking on the merit function.
        let mut alpha = 1.0;
        let mut accepted = None;
        for _ in 0..12 {
            let p_try = &p + step.rows(0, n) * alpha;
            let l_try = lambda + step[n] * alpha;
            let (rg, rp, gt) = residual_of(&p_try, l_try)?;
            let m_try = rg.norm() / scale + rp.abs();
            if m_try.is_finite() && (m_try < merit || alpha < 1e-3) {
                accepted = Some((p_try, l_try, rg, rp, gt));
                break;
            }
            alpha *= 0.5;
        }
        let Some((p_new, l_new, rg, rp, gt)) = accepted else {
            return Err(Error::NoConvergence { iterations, residual: merit });
        };
        p = p_new;
        lambda = l_new;
        r_geom = rg;
        r_phi = rp;
        g = gt;

        if (&p - x).norm() > 2.0 * chart.width {
            return Err(Error::ChartOutOfRange { t, distance: (&p - x).norm(), width: chart.width });
        }
    }

    let gnorm = g.norm();
    if !(gnorm >= iface.grad_floor) {
        return Err(Error::DegenerateGradient { t, norm: gnorm });
    }
    let distance = lambda * gnorm;
    if distance.abs() > chart.width {
        return Err(Error::ChartOutOfRange { t, distance, width: chart.width });
    }
    let normal = g / gnorm;
    let residual = (x - (&p + &normal * distance)).norm();
    Ok(ChartPoint { foot: p, distance, normal, residual, iterations })
}

/// Difference quotient `dist(x + h v, Σ(t + h τ)) / h` from the intermediate
/// cone: tends to zero as `h → 0+` iff `(τ, v)` is subtangential to the
/// space-time graph of the interface at `(t, x)`.
pub fn subtangential_residual(
    chart: &InterfaceChart,
    t: f64,
    x: &Point,
    tau: f64,
    v: &Point,
    h: f64,
) -> Result<f64> {
    assert!(h > 0.0, "step must be positive");
    let moved = x + v * h;
    let cp = chart.project(t + h * tau, &moved)?;
    Ok(cp.distance.abs() / h)
}
