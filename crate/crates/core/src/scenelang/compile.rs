use std::sync::Arc;

use super::document::{parse, SceneDocument};
use super::expr::Expr;
use crate::fields::{
    validate_scene, BulkField, DensityField, SceneTolerances, TwoPhaseScene, ValidationGrid,
    ValidationReport,
};
use crate::geometry::{InterfaceChart, MovingInterface};
use crate::{Aabb, Point, Result, ScalarFn, TimeWindow, VectorFn};

/// Lower density bound used when a scene does not declare `rho_min`.
const DEFAULT_RHO_MIN: f64 = 1e-12;

fn scalar(e: &Expr) -> ScalarFn {
    let e = Arc::new(e.clone());
    Arc::new(move |t, x: &Point| e.eval(t, x.as_slice()).unwrap_or(f64::NAN))
}

fn vector(items: &[Expr]) -> VectorFn {
    let items: Arc<Vec<Expr>> = Arc::new(items.to_vec());
    Arc::new(move |t, x: &Point| {
        Point::from_iterator(
            items.len(),
            items.iter().map(|e| e.eval(t, x.as_slice()).unwrap_or(f64::NAN)),
        )
    })
}

/// Builds the scene. `∇φ` and `∂tφ` come from forward-mode differentiation
/// of the `phi` expression. Evaluation errors at run time yield NaN, which
/// the integrators report as non-finite states.
pub fn compile(doc: &SceneDocument) -> TwoPhaseScene {
    let dim = doc.dim;
    let phi = Arc::new(doc.phi.clone());
    let grad_expr = phi.clone();
    let dt_expr = phi.clone();
    let grad: VectorFn = Arc::new(move |t, x: &Point| match grad_expr.eval_jet(t, x.as_slice()) {
        Ok(j) => Point::from_vec(j.grad(dim)),
        Err(_) => Point::from_element(dim, f64::NAN),
    });
    let dt: ScalarFn =
        Arc::new(move |t, x: &Point| dt_expr.eval_jet(t, x.as_slice()).map_or(f64::NAN, |j| j.dt()));
    let domain = Aabb::new(
        doc.domain.iter().map(|(lo, _)| *lo).collect(),
        doc.domain.iter().map(|(_, hi)| *hi).collect(),
    );
    let iface = MovingInterface::new(dim, scalar(&phi), TimeWindow::new(doc.time.0, doc.time.1), domain)
        .with_gradient(grad)
        .with_time_derivative(dt);
    let chart = match doc.chart_width {
        Some(w) => InterfaceChart::with_width(iface, w),
        None => InterfaceChart::new(iface),
    };

    let bulk = |items: &[Expr]| {
        let mut f = BulkField::new(vector(items));
        f.growth_const = doc.growth;
        f.lipschitz_hint = doc.lipschitz;
        f
    };
    let alpha = doc.rho_min.unwrap_or(DEFAULT_RHO_MIN);
    let defaults = SceneTolerances::default();
    let tol = &doc.tolerances;
    let tolerances = SceneTolerances {
        interface: tol.interface.unwrap_or(defaults.interface),
        grazing: tol.grazing.or(defaults.grazing),
        noslip: tol.noslip.unwrap_or(defaults.noslip),
        transmission: tol.transmission.unwrap_or(defaults.transmission),
    };
    TwoPhaseScene::new(
        doc.name.clone(),
        chart,
        bulk(&doc.v_plus),
        bulk(&doc.v_minus),
        DensityField::new(scalar(&doc.rho_plus), alpha),
        DensityField::new(scalar(&doc.rho_minus), alpha),
    )
    .with_tolerances(tolerances)
    .with_description(doc.description.clone())
}

/// Parses and compiles scene text.
pub fn compile_str(source: &str) -> Result<TwoPhaseScene> {
    Ok(compile(&parse(source)?))
}

/// Parses, compiles and runs the interface-condition validator.
pub fn compile_validated(
    source: &str,
    grid: &ValidationGrid,
) -> Result<(TwoPhaseScene, ValidationReport)> {
    let scene = compile_str(source)?;
    let report = validate_scene(&scene, grid);
    Ok((scene, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vector as pt;

    const CIRCLE: &str = "\
[scene]
name = circle
dim = 2
time = (0, 2)
domain = (-3, 3) x (-3, 3)
chart_width = 0.5
[interface]
phi = x1^2 + x2^2 - (1 + 0.2*t)^2
[fields]
v_plus = (x1, x2)
v_minus = (x1, x2)
growth = 1
[densities]
rho_plus = 1
rho_minus = 1
rho_min = 0.5
[tolerances]
noslip = 1e-6
";

    #[test]
    fn compiled_interface_has_exact_derivatives() {
        let scene = compile_str(CIRCLE).unwrap();
        let iface = scene.iface();
        assert!(iface.has_analytic_gradient());
        let x = pt(&[0.6, -0.3]);
        let g = iface.grad(0.5, &x);
        assert_eq!(g, pt(&[1.2, -0.6]));
        assert_eq!(iface.dt(0.5, &x), -2.0 * 1.1 * 0.2);
        assert_eq!(scene.chart().width, 0.5);
        assert_eq!(scene.tolerances.noslip, 1e-6);
        assert_eq!(scene.rho_plus.lower_bound, 0.5);
        assert_eq!(scene.v_plus.growth_const, Some(1.0));
        assert_eq!(scene.v_minus.eval(0.0, &x), x);
    }

    #[test]
    fn runtime_errors_become_nan() {
        let src = CIRCLE.replace("v_plus = (x1, x2)", "v_plus = (x1, 1/(x2 - 2.9999))");
        let scene = compile_str(&src).unwrap();
        let v = scene.v_plus.eval(0.0, &pt(&[0.0, 2.9999]));
        assert!(v[1].is_nan());
    }
}
