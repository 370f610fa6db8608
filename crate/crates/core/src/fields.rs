//! Two-phase scenes: one-sided bulk velocities and densities around a moving
//! interface, and sampling-based checks of the kinematic interface
//! conditions (no-slip, mass-flux transmission, transversality, growth).

use serde::Serialize;

use crate::geometry::{self, InterfaceChart, MovingInterface};
use crate::{Aabb, Error, Point, Result, ScalarFn, TimeWindow, VectorFn};

/// Phase label of a point relative to `Σ(t)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Phase {
    Plus,
    Minus,
    Interface,
}

impl Phase {
    pub fn as_str(&self) -> &'static str {
        match self {
            Phase::Plus => "plus",
            Phase::Minus => "minus",
            Phase::Interface => "interface",
        }
    }

    /// `+1` for `Ω⁺`, `−1` for `Ω⁻`, `0` on the interface.
    pub fn sign(&self) -> f64 {
        match self {
            Phase::Plus => 1.0,
            Phase::Minus => -1.0,
            Phase::Interface => 0.0,
        }
    }

    pub fn from_sign(s: f64) -> Phase {
        if s > 0.0 {
            Phase::Plus
        } else if s < 0.0 {
            Phase::Minus
        } else {
            Phase::Interface
        }
    }
}

impl std::fmt::Display for Phase {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Velocity of one bulk phase, continuous up to the interface.
#[derive(Clone)]
pub struct BulkField {
    eval: VectorFn,
    /// Lipschitz constant, if known.
    pub lipschitz_hint: Option<f64>,
    /// Constant `c` of the linear growth bound `‖v‖ ≤ c(1 + ‖x‖)`.
    /// `None` means the validator only reports the sampled ratio.
    pub growth_const: Option<f64>,
}

impl BulkField {
    pub fn new(eval: VectorFn) -> Self {
        Self { eval, lipschitz_hint: None, growth_const: None }
    }

    pub fn with_growth_const(mut self, c: f64) -> Self {
        self.growth_const = Some(c);
        self
    }

    pub fn eval(&self, t: f64, x: &Point) -> Point {
        (self.eval)(t, x)
    }

    pub fn function(&self) -> &VectorFn {
        &self.eval
    }
}

/// Positive density of one bulk phase.
#[derive(Clone)]
pub struct DensityField {
    eval: ScalarFn,
    /// Lower bound `α > 0` required of the density.
    pub lower_bound: f64,
}

impl DensityField {
    pub fn new(eval: ScalarFn, lower_bound: f64) -> Self {
        Self { eval, lower_bound }
    }

    pub fn eval(&self, t: f64, x: &Point) -> f64 {
        (self.eval)(t, x)
    }

    pub fn function(&self) -> &ScalarFn {
        &self.eval
    }
}

/// Pass/fail thresholds of a scene.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SceneTolerances {
    /// Half-width of the band `|d_Σ| ≤ tol_interface` classified as interface.
    pub interface: f64,
    /// Relative normal speeds at or below this magnitude count as zero.
    /// `None` selects `1e-10 · (1 + max ‖v±‖)` pointwise.
    pub grazing: Option<f64>,
    pub noslip: f64,
    pub transmission: f64,
}

impl Default for SceneTolerances {
    fn default() -> Self {
        Self { interface: 1e-8, grazing: None, noslip: 1e-9, transmission: 1e-9 }
    }
}

/// A moving interface with one-sided velocities and densities.
#[derive(Clone)]
pub struct TwoPhaseScene {
    pub name: String,
    pub description: String,
    chart: InterfaceChart,
    pub v_plus: BulkField,
    pub v_minus: BulkField,
    pub rho_plus: DensityField,
    pub rho_minus: DensityField,
    pub tolerances: SceneTolerances,
}

impl std::fmt::Debug for TwoPhaseScene {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TwoPhaseScene")
            .field("name", &self.name)
            .field("dim", &self.dim())
            .field("chart_width", &self.chart.width)
            .field("tolerances", &self.tolerances)
            .finish()
    }
}

impl TwoPhaseScene {
    pub fn new(
        name: impl Into<String>,
        chart: InterfaceChart,
        v_plus: BulkField,
        v_minus: BulkField,
        rho_plus: DensityField,
        rho_minus: DensityField,
    ) -> Self {
        Self {
            name: name.into(),
            description: String::new(),
            chart,
            v_plus,
            v_minus,
            rho_plus,
            rho_minus,
            tolerances: SceneTolerances::default(),
        }
    }

    pub fn with_tolerances(mut self, tolerances: SceneTolerances) -> Self {
        self.tolerances = tolerances;
        self
    }

    pub fn with_description(mut self, text: impl Into<String>) -> Self {
        self.description = text.into();
        self
    }

    pub fn dim(&self) -> usize {
        self.chart.dim()
    }

    pub fn iface(&self) -> &MovingInterface {
        self.chart.iface()
    }

    pub fn chart(&self) -> &InterfaceChart {
        &self.chart
    }

    pub fn time_window(&self) -> TimeWindow {
        self.iface().time_window()
    }

    pub fn domain(&self) -> &Aabb {
        self.iface().domain()
    }

    pub fn velocity(&self, phase: Phase, t: f64, x: &Point) -> Point {
        match phase {
            Phase::Plus => self.v_plus.eval(t, x),
            Phase::Minus => self.v_minus.eval(t, x),
            Phase::Interface => (self.v_plus.eval(t, x) + self.v_minus.eval(t, x)) * 0.5,
        }
    }

    pub fn density(&self, phase: Phase, t: f64, x: &Point) -> f64 {
        match phase {
            Phase::Plus => self.rho_plus.eval(t, x),
            Phase::Minus => self.rho_minus.eval(t, x),
            Phase::Interface => 0.5 * (self.rho_plus.eval(t, x) + self.rho_minus.eval(t, x)),
        }
    }

    /// Grazing threshold at a point with one-sided velocities `vp`, `vm`.
    pub fn grazing_tol(&self, vp: &Point, vm: &Point) -> f64 {
        self.tolerances
            .grazing
            .unwrap_or_else(|| 1e-10 * (1.0 + vp.amax().max(vm.amax())))
    }

    /// Time-reversed scene about `pivot`: `ṽ(s,x) = −v(2·pivot − s, x)`
    /// with the backward-moving interface. The intrinsic interface velocity
    /// of the reversed family is `−w^Σ`.
    pub fn time_reversed(&self, pivot: f64) -> Self {
        let rev_v = |f: &BulkField| {
            let g = f.function().clone();
            BulkField {
                eval: std::sync::Arc::new(move |s, x| -g(2.0 * pivot - s, x)),
                lipschitz_hint: f.lipschitz_hint,
                growth_const: f.growth_const,
            }
        };
        let rev_rho = |f: &DensityField| {
            let g = f.function().clone();
            DensityField::new(std::sync::Arc::new(move |s, x| g(2.0 * pivot - s, x)), f.lower_bound)
        };
        Self {
            name: format!("{}~reversed", self.name),
            description: self.description.clone(),
            chart: self.chart.time_reversed(pivot),
            v_plus: rev_v(&self.v_plus),
            v_minus: rev_v(&self.v_minus),
            rho_plus: rev_rho(&self.rho_plus),
            rho_minus: rev_rho(&self.rho_minus),
            tolerances: self.tolerances,
        }
    }
}

/// Phase of `(t, x)`: interface iff `|d_Σ(t,x)| ≤ tol_interface`, else the
/// sign of `φ`.
pub fn phase_of(scene: &TwoPhaseScene, t: f64, x: &Point) -> Result<Phase> {
    let iface = scene.iface();
    let phi = iface.phi(t, x);
    let g = iface.grad(t, x).norm();
    let estimate = if g > 0.0 { phi / g } else { phi };
    let tol = scene.tolerances.interface;
    // Far from the interface the first-order estimate decides.
    if estimate.abs() > 0.5 * scene.chart().width || estimate.abs() > 1e3 * tol {
        return Ok(Phase::from_sign(phi));
    }
    let cp = scene.chart().project(t, x)?;
    if cp.distance.abs() <= tol {
        Ok(Phase::Interface)
    } else {
        Ok(Phase::from_sign(cp.distance))
    }
}

/// Interface quantities at a point of `Σ(t)`.
#[derive(Debug, Clone)]
pub struct InterfaceState {
    pub point: Point,
    pub normal: Point,
    /// Speed of normal displacement `V_Σ`.
    pub speed: f64,
    pub v_plus: Point,
    pub v_minus: Point,
    /// Relative normal speeds `u± = (v± − w^Σ)·n`.
    pub u_plus: f64,
    pub u_minus: f64,
}

impl InterfaceState {
    pub fn w(&self) -> Point {
        &self.normal * self.speed
    }
}

/// Evaluates normal, normal speed and one-sided velocities at `x ∈ Σ(t)`.
pub fn interface_state(scene: &TwoPhaseScene, t: f64, x: &Point) -> Result<InterfaceState> {
    let iface = scene.iface();
    let normal = geometry::normal(iface, t, x)?;
    let speed = geometry::normal_speed(iface, t, x)?;
    let v_plus = scene.v_plus.eval(t, x);
    let v_minus = scene.v_minus.eval(t, x);
    let u_plus = v_plus.dot(&normal) - speed;
    let u_minus = v_minus.dot(&normal) - speed;
    Ok(InterfaceState { point: x.clone(), normal, speed, v_plus, v_minus, u_plus, u_minus })
}

/// Quantity whose jump across the interface is taken.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JumpField {
    Velocity,
    /// Mass flux `ρ (v − w^Σ)·n_Σ` (scalar, returned as a 1-vector).
    MassFlux,
}

/// Jump `⟦q⟧ = q⁺ − q⁻` at `x ∈ Σ(t)` by direct one-sided evaluation.
pub fn jump(scene: &TwoPhaseScene, t: f64, x: &Point, field: JumpField) -> Result<Point> {
    let st = interface_state(scene, t, x)?;
    Ok(match field {
        JumpField::Velocity => &st.v_plus - &st.v_minus,
        JumpField::MassFlux => {
            let fp = scene.rho_plus.eval(t, x) * st.u_plus;
            let fm = scene.rho_minus.eval(t, x) * st.u_minus;
            Point::from_element(1, fp - fm)
        }
    })
}

/// `‖P_Σ (v⁺ − v⁻)‖`.
pub fn validate_no_slip(scene: &TwoPhaseScene, t: f64, x: &Point) -> Result<f64> {
    let st = interface_state(scene, t, x)?;
    let dv = &st.v_plus - &st.v_minus;
    Ok((&dv - &st.normal * dv.dot(&st.normal)).norm())
}

/// `|ρ⁺(v⁺ − w^Σ)·n − ρ⁻(v⁻ − w^Σ)·n|`.
pub fn validate_transmission(scene: &TwoPhaseScene, t: f64, x: &Point) -> Result<f64> {
    let st = interface_state(scene, t, x)?;
    let fp = scene.rho_plus.eval(t, x) * st.u_plus;
    let fm = scene.rho_minus.eval(t, x) * st.u_minus;
    Ok((fp - fm).abs())
}

/// `sgn₀` with a zero band.
pub fn sgn0(value: f64, tol: f64) -> i8 {
    if value > tol {
        1
    } else if value < -tol {
        -1
    } else {
        0
    }
}

/// Common sign of the relative normal speeds at `x ∈ Σ(t)`. Fails only if
/// the signs are strictly opposite; if one speed lies in the zero band the
/// sign of the other is returned.
pub fn transversality_sign(scene: &TwoPhaseScene, t: f64, x: &Point) -> Result<i8> {
    let st = interface_state(scene, t, x)?;
    let tol = scene.grazing_tol(&st.v_plus, &st.v_minus);
    transversality_of(t, &st, tol)
}

pub(crate) fn transversality_of(t: f64, st: &InterfaceState, tol: f64) -> Result<i8> {
    let sp = sgn0(st.u_plus, tol);
    let sm = sgn0(st.u_minus, tol);
    if sp * sm < 0 {
        return Err(Error::TransversalityViolation {
            t,
            x: st.point.iter().copied().collect(),
            u_plus: st.u_plus,
            u_minus: st.u_minus,
        });
    }
    Ok(if sp != 0 { sp } else { sm })
}

/// Sampling resolution of [`validate_scene`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidationGrid {
    pub times: usize,
    pub points: usize,
    /// Bulk samples per time level for the growth and density checks.
    pub bulk_points: usize,
    pub seed: u64,
}

impl Default for ValidationGrid {
    fn default() -> Self {
        Self { times: 50, points: 50, bulk_points: 200, seed: 0 }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ConditionReport {
    pub condition: String,
    pub max_residual: f64,
    pub tolerance: f64,
    pub samples: usize,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    pub scene: String,
    pub interface_samples: usize,
    pub conditions: Vec<ConditionReport>,
}

impl ValidationReport {
    pub fn pass(&self) -> bool {
        self.conditions.iter().all(|c| c.pass)
    }

    pub fn condition(&self, name: &str) -> Option<&ConditionReport> {
        self.conditions.iter().find(|c| c.condition == name)
    }
}

impl std::fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "scene {} ({} interface samples)", self.scene, self.interface_samples)?;
        writeln!(f, "{:<16} {:>14} {:>12}  result", "condition", "max residual", "tolerance")?;
        for c in &self.conditions {
            writeln!(
                f,
                "{:<16} {:>14.3e} {:>12.3e}  {}",
                c.condition,
                c.max_residual,
                c.tolerance,
                if c.pass { "PASS" } else { "FAIL" }
            )?;
        }
        write!(f, "overall: {}", if self.pass() { "PASS" } else { "FAIL" })
    }
}

/// Points on `Σ(t)` inside the domain box, found from sign changes of `φ`
/// along the edges of a regular grid and polished by the closest-point
/// projection. Returns up to `count` points, spread evenly over the hits.
pub fn sample_interface(chart: &InterfaceChart, t: f64, count: usize) -> Vec<Point> {
    let iface = chart.iface();
    let dom = iface.domain();
    let n = iface.dim();
    let per_axis: usize = match n {
        1 => 400,
        2 => 120,
        3 => 32,
        _ => 10,
    };
    let total: usize = per_axis.pow(n as u32);
    let node = |idx: &[usize]| -> Point {
        Point::from_fn(n, |i, _| {
            dom.lower[i] + (dom.upper[i] - dom.lower[i]) * (idx[i] as f64 + 0.5) / per_axis as f64
        })
    };
    let unravel = |mut k: usize| -> Vec<usize> {
        let mut idx = vec![0; n];
        for slot in idx.iter_mut() {
            *slot = k % per_axis;
            k /= per_axis;
        }
        idx
    };
    let values: Vec<f64> = (0..total).map(|k| iface.phi(t, &node(&unravel(k)))).collect();
    let mut hits = Vec::new();
    for k in 0..total {
        let idx = unravel(k);
        for axis in 0..n {
            if idx[axis] + 1 >= per_axis {
                continue;
            }
            let stride = per_axis.pow(axis as u32);
            let (fa, fb) = (values[k], values[k + stride]);
            if !(fa.is_finite() && fb.is_finite()) || fa.signum() == fb.signum() {
                continue;
            }
            let a = node(&idx);
            let mut idx_b = idx.clone();
            idx_b[axis] += 1;
            let b = node(&idx_b);
            // Bisection along the edge.
            let (mut lo, mut hi, mut flo) = (0.0_f64, 1.0_f64, fa);
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                let fm = iface.phi(t, &(&a + (&b - &a) * mid));
                if fm == 0.0 {
                    lo = mid;
                    hi = mid;
                    break;
                }
                if fm.signum() == flo.signum() {
                    lo = mid;
                    flo = fm;
                } else {
                    hi = mid;
                }
            }
            hits.push(&a + (&b - &a) * (0.5 * (lo + hi)));
        }
    }
    if hits.is_empty() || count == 0 {
        return Vec::new();
    }
    let picked: Vec<Point> = if hits.len() <= count {
        hits
    } else {
        (0..count).map(|i| hits[i * hits.len() / count].clone()).collect()
    };
    picked
        .into_iter()
        .filter_map(|p| chart.project(t, &p).ok().map(|cp| cp.foot))
        .filter(|p| dom.contains(p))
        .collect()
}

/// Samples the graph of `Σ` on a (time × surface) grid and reports the
/// largest residual of each interface condition.
pub fn validate_scene(scene: &TwoPhaseScene, grid: &ValidationGrid) -> ValidationReport {
    use rand::{Rng, SeedableRng};

    let tw = scene.time_window();
    let dom = scene.domain();
    let n = scene.dim();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(grid.seed);

    let mut noslip = 0.0_f64;
    let mut transmission = 0.0_f64;
    let mut sign_disagreements = 0usize;
    let mut reconstruction = 0.0_f64;
    let mut samples = 0usize;
    let mut failures = 0usize;
    let mut growth_ratio = 0.0_f64;
    let mut density_min = f64::INFINITY;
    let mut density_bound = 0.0_f64;
    let mut bulk_samples = 0usize;

    for i in 0..grid.times {
        let t = tw.start + (tw.end - tw.start) * (i as f64 + 0.5) / grid.times as f64;
        for p in sample_interface(scene.chart(), t, grid.points) {
            samples += 1;
            match (
                validate_no_slip(scene, t, &p),
                validate_transmission(scene, t, &p),
                transversality_sign(scene, t, &p),
            ) {
                (Ok(a), Ok(b), sign) => {
                    noslip = noslip.max(a);
                    transmission = transmission.max(b);
                    if sign.is_err() {
                        sign_disagreements += 1;
                    }
                }
                _ => failures += 1,
            }
            if let Ok(cp) = scene.chart().project(t, &p) {
                reconstruction = reconstruction.max(cp.residual);
            }
        }
        for _ in 0..grid.bulk_points {
            let x = Point::from_fn(n, |k, _| rng.random_range(dom.lower[k]..=dom.upper[k]));
            let phase = match phase_of(scene, t, &x) {
                Ok(Phase::Interface) | Err(_) => continue,
                Ok(p) => p,
            };
            bulk_samples += 1;
            let v = scene.velocity(phase, t, &x);
            growth_ratio = growth_ratio.max(v.norm() / (1.0 + x.norm()));
            let (rho, alpha) = match phase {
                Phase::Plus => (scene.rho_plus.eval(t, &x), scene.rho_plus.lower_bound),
                _ => (scene.rho_minus.eval(t, &x), scene.rho_minus.lower_bound),
            };
            density_min = density_min.min(rho);
            density_bound = density_bound.max(alpha);
        }
    }

    let growth_tol = match (scene.v_plus.growth_const, scene.v_minus.growth_const) {
        (Some(a), Some(b)) => a.max(b),
        (Some(a), None) | (None, Some(a)) => a,
        (None, None) => f64::INFINITY,
    };
    let cond = |name: &str, value: f64, tol: f64, count: usize, pass: bool| ConditionReport {
        condition: name.to_string(),
        max_residual: value,
        tolerance: tol,
        samples: count,
        pass,
    };
    let mut conditions = vec![
        cond("no-slip", noslip, scene.tolerances.noslip, samples, noslip <= scene.tolerances.noslip),
        cond(
            "transmission",
            transmission,
            scene.tolerances.transmission,
            samples,
            transmission <= scene.tolerances.transmission,
        ),
        cond(
            "transversality",
            sign_disagreements as f64,
            0.0,
            samples,
            sign_disagreements == 0,
        ),
        cond("growth", growth_ratio, growth_tol, bulk_samples, growth_ratio <= growth_tol),
        cond(
            "density",
            if density_min.is_finite() { density_min } else { 0.0 },
            density_bound,
            bulk_samples,
            density_min >= density_bound && density_min > 0.0,
        ),
        cond(
            "chart",
            reconstruction,
            scene.chart().chart_tol,
            samples,
            reconstruction <= scene.chart().chart_tol,
        ),
    ];
    conditions.push(cond(
        "sampling",
        failures as f64,
        0.0,
        samples,
        failures == 0 && samples > 0,
    ));
    ValidationReport { scene: scene.name.clone(), interface_samples: samples, conditions }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenes::builtin;
    use crate::vector;

    #[test]
    fn phase_labels_on_expanding_circle() {
        let s2 = builtin("S2").unwrap();
        // R(0) = 1
        assert_eq!(phase_of(&s2, 0.0, &vector(&[2.0, 0.0])).unwrap(), Phase::Plus);
        assert_eq!(phase_of(&s2, 0.0, &vector(&[0.0, 1.0])).unwrap(), Phase::Interface);
        assert_eq!(phase_of(&s2, 0.0, &vector(&[0.5, 0.0])).unwrap(), Phase::Minus);
        let tol = s2.tolerances.interface;
        assert_eq!(phase_of(&s2, 0.0, &vector(&[1.0 + 1.5 * tol, 0.0])).unwrap(), Phase::Plus);
        assert_eq!(phase_of(&s2, 0.0, &vector(&[1.0 - 1.5 * tol, 0.0])).unwrap(), Phase::Minus);
        assert_eq!(phase_of(&s2, 0.0, &vector(&[1.0 + 0.5 * tol, 0.0])).unwrap(), Phase::Interface);
    }

    #[test]
    fn jumps_on_moving_plane() {
        let s1 = builtin("S1").unwrap();
        let x = vector(&[0.3, 0.2]);
        let jv = jump(&s1, 1.0, &x, JumpField::Velocity).unwrap();
        assert!((jv - vector(&[0.0, -0.4])).norm() < 1e-15);
        let jm = jump(&s1, 1.0, &x, JumpField::MassFlux).unwrap();
        assert!(jm[0].abs() < 1e-14);
        assert!(validate_no_slip(&s1, 1.0, &x).unwrap() < 1e-15);
        assert!(validate_transmission(&s1, 1.0, &x).unwrap() < 1e-14);
        assert_eq!(transversality_sign(&s1, 1.0, &x).unwrap(), 1);
    }

    #[test]
    fn relative_speeds_on_moving_plane() {
        let s1 = builtin("S1").unwrap();
        let st = interface_state(&s1, 0.5, &vector(&[0.0, 0.1])).unwrap();
        assert!((st.u_plus - 0.4).abs() < 1e-14);
        assert!((st.u_minus - 0.8).abs() < 1e-14);
        assert!((st.speed - 0.2).abs() < 1e-14);
    }

    #[test]
    fn defects_are_detected() {
        let ns = builtin("S4-noslip").unwrap();
        let r = validate_no_slip(&ns, 1.0, &vector(&[0.0, 0.2])).unwrap();
        assert!((r - 0.1).abs() < 1e-14);
        let tr = builtin("S4-transversality").unwrap();
        assert!(matches!(
            transversality_sign(&tr, 1.0, &vector(&[0.0, 0.2])),
            Err(Error::TransversalityViolation { .. })
        ));
    }

    #[test]
    fn grazing_scene_has_zero_sign() {
        let s3 = builtin("S3").unwrap();
        for p in sample_interface(s3.chart(), 0.4, 10) {
            assert_eq!(transversality_sign(&s3, 0.4, &p).unwrap(), 0);
        }
    }

    #[test]
    fn static_interface_with_resting_fluid_is_valid() {
        let scene = crate::scenelang::compile_str(
            "[scene]\nname = rest\ndim = 2\ntime = (0, 1)\ndomain = (-1, 1) x (-1, 1)\n\
             [interface]\nphi = x2\n[fields]\nv_plus = (0, 0)\nv_minus = (0, 0)\n\
             [densities]\nrho_plus = 1\nrho_minus = 3\n",
        )
        .unwrap();
        let x = vector(&[0.1, 0.0]);
        assert_eq!(validate_no_slip(&scene, 0.5, &x).unwrap(), 0.0);
        assert_eq!(validate_transmission(&scene, 0.5, &x).unwrap(), 0.0);
        assert_eq!(transversality_sign(&scene, 0.5, &x).unwrap(), 0);
    }

    #[test]
    fn interface_sampling_lands_on_sigma() {
        let s2 = builtin("S2").unwrap();
        let pts = sample_interface(s2.chart(), 1.0, 50);
        assert!(pts.len() >= 40);
        for p in pts {
            assert!((p.norm() - 1.2).abs() < 1e-12);
        }
    }
}
