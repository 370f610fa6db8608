//! Explicit Runge–Kutta steps on `ẋ = f(t, x)`.

use crate::{Point, Result};

/// Classical fourth-order step. Returns the new state.
pub fn rk4_step<F>(f: &mut F, t: f64, x: &Point, k1: &Point, h: f64) -> Result<Point>
where
    F: FnMut(f64, &Point) -> Result<Point>,
{
    let k2 = f(t + 0.5 * h, &(x + k1 * (0.5 * h)))?;
    let k3 = f(t + 0.5 * h, &(x + &k2 * (0.5 * h)))?;
    let k4 = f(t + h, &(x + &k3 * h))?;
    Ok(x + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0))
}

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// Dormand–Prince 5(4) step: fifth-order state, its rate at the end
/// point (FSAL) and the embedded error estimate.
pub fn dp45_step<F>(f: &mut F, t: f64, x: &Point, k1: &Point, h: f64) -> Result<(Point, Point, Point)>
where
    F: FnMut(f64, &Point) -> Result<Point>,
{
    let mut k: Vec<Point> = Vec::with_capacity(7);
    k.push(k1.clone());
    for s in 1..7 {
        let mut y = x.clone();
        for (j, kj) in k.iter().enumerate() {
            if A[s][j] != 0.0 {
                y += kj * (h * A[s][j]);
            }
        }
        k.push(f(t + C[s] * h, &y)?);
    }
    let mut x5 = x.clone();
    let mut err = Point::zeros(x.len());
    for (s, ks) in k.iter().enumerate() {
        if B5[s] != 0.0 {
            x5 += ks * (h * B5[s]);
        }
        err += ks * (h * (B5[s] - B4[s]));
    }
    Ok((x5, k[6].clone(), err))
}

/// Cubic Hermite interpolation on `[t0, t1]`.
pub fn hermite(t0: f64, x0: &Point, f0: &Point, t1: f64, x1: &Point, f1: &Point, t: f64) -> Point {
    let h = t1 - t0;
    if h == 0.0 {
        return x0.clone();
    }
    let s = (t - t0) / h;
    let h00 = (1.0 + 2.0 * s) * (1.0 - s) * (1.0 - s);
    let h10 = s * (1.0 - s) * (1.0 - s);
    let h01 = s * s * (3.0 - 2.0 * s);
    let h11 = s * s * (s - 1.0);
    x0 * h00 + f0 * (h10 * h) + x1 * h01 + f1 * (h11 * h)
}

/// Time derivative of [`hermite`].
pub fn hermite_rate(t0: f64, x0: &Point, f0: &Point, t1: f64, x1: &Point, f1: &Point, t: f64) -> Point {
    let h = t1 - t0;
    if h == 0.0 {
        return f0.clone();
    }
    let s = (t - t0) / h;
    let d00 = 6.0 * s * s - 6.0 * s;
    let d10 = 3.0 * s * s - 4.0 * s + 1.0;
    let d01 = -6.0 * s * s + 6.0 * s;
    let d11 = 3.0 * s * s - 2.0 * s;
    x0 * (d00 / h) + f0 * d10 + x1 * (d01 / h) + f1 * d11
}
