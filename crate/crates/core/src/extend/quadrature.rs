use std::f64::consts::PI;

use crate::{Error, Point, Result};

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n > 0);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// Product rules on the unit ball and unit sphere in two or three dimensions.
///
/// Two dimensions: trapezoid in angle times Gauss–Legendre in radius.
/// Three dimensions: Gauss–Legendre in `cos θ`, trapezoid in azimuth, and
/// Gauss–Legendre in radius. Rules scale to radius `r`.
#[derive(Debug, Clone)]
pub struct BallQuadrature {
    dim: usize,
    radial: usize,
    angular: usize,
    ball_nodes: Vec<Point>,
    ball_weights: Vec<f64>,
    sphere_nodes: Vec<Point>,
    sphere_weights: Vec<f64>,
}

impl BallQuadrature {
    pub fn new(dim: usize, radial: usize, angular: usize) -> Result<Self> {
        if dim != 2 && dim != 3 {
            return Err(Error::NotImplementedDimension(dim));
        }
        if radial == 0 || angular == 0 {
            return Err(Error::InvalidInput("quadrature needs at least one node per direction".into()));
        }
        let mut sphere_nodes = Vec::new();
        let mut sphere_weights = Vec::new();
        if dim == 2 {
            for j in 0..angular {
                let a = 2.0 * PI * j as f64 / angular as f64;
                sphere_nodes.push(Point::from_vec(vec![a.cos(), a.sin()]));
                sphere_weights.push(2.0 * PI / angular as f64);
            }
        } else {
            let polar = angular.div_ceil(2);
            let (zs, wz) = gauss_legendre(polar);
            for (z, wz) in zs.iter().zip(&wz) {
                let s = (1.0 - z * z).sqrt();
                for j in 0..angular {
                    let a = 2.0 * PI * j as f64 / angular as f64;
                    sphere_nodes.push(Point::from_vec(vec![s * a.cos(), s * a.sin(), *z]));
                    sphere_weights.push(wz * 2.0 * PI / angular as f64);
                }
            }
        }
        let (rs, wr) = gauss_legendre(radial);
        let mut ball_nodes = Vec::new();
        let mut ball_weights = Vec::new();
        for (r, w) in rs.iter().zip(&wr) {
            let r = 0.5 * (r + 1.0);
            let w = 0.5 * w * r.powi(dim as i32 - 1);
            for (p, ws) in sphere_nodes.iter().zip(&sphere_weights) {
                ball_nodes.push(p * r);
                ball_weights.push(w * ws);
            }
        }
        Ok(Self { dim, radial, angular, ball_nodes, ball_weights, sphere_nodes, sphere_weights })
    }

    /// 32 radial by 64 angular nodes.
    pub fn default_for(dim: usize) -> Result<Self> {
        Self::new(dim, 32, 64)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn radial(&self) -> usize {
        self.radial
    }

    pub fn angular(&self) -> usize {
        self.angular
    }

    pub fn len(&self) -> usize {
        self.ball_nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ball_nodes.is_empty()
    }

    /// Volume of the unit ball, `ωₙ`.
    pub fn unit_volume(&self) -> f64 {
        if self.dim == 2 {
            PI
        } else {
            4.0 * PI / 3.0
        }
    }

    /// `V(r) = ωₙ |r|ⁿ`.
    pub fn volume(&self, r: f64) -> f64 {
        self.unit_volume() * r.abs().powi(self.dim as i32)
    }

    /// `A(r) = n ωₙ |r|ⁿ⁻¹`.
    pub fn area(&self, r: f64) -> f64 {
        self.dim as f64 * self.unit_volume() * r.abs().powi(self.dim as i32 - 1)
    }

    /// Nodes and weights of the ball of radius `r` about `center`.
    pub fn ball(&self, center: &Point, r: f64) -> impl Iterator<Item = (Point, f64)> + '_ {
        let r = r.abs();
        let scale = r.powi(self.dim as i32);
        let center = center.clone();
        self.ball_nodes.iter().zip(&self.ball_weights).map(move |(p, w)| (&center + p * r, w * scale))
    }

    /// Nodes, outward unit normals and weights of the sphere of radius `r`.
    pub fn sphere(&self, center: &Point, r: f64) -> impl Iterator<Item = (Point, &Point, f64)> + '_ {
        let r = r.abs();
        let scale = r.powi(self.dim as i32 - 1);
        let center = center.clone();
        self.sphere_nodes
            .iter()
            .zip(&self.sphere_weights)
            .map(move |(p, w)| (&center + p * r, p, w * scale))
    }

    /// Mean of `f` over the ball.
    pub fn ball_mean<T, F>(&self, center: &Point, r: f64, zero: T, mut f: F) -> Result<T>
    where
        T: std::ops::Add<Output = T> + std::ops::Mul<f64, Output = T>,
        F: FnMut(&Point) -> Result<T>,
    {
        let vol = self.volume(r);
        let mut acc = zero;
        for (p, w) in self.ball(center, r) {
            acc = acc + f(&p)? * (w / vol);
        }
        Ok(acc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        for n in 1..12 {
            let (x, w) = gauss_legendre(n);
            for deg in 0..(2 * n) {
                let q: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg as i32)).sum();
                let exact = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
                assert!((q - exact).abs() < 1e-13, "n={n} deg={deg}: {q} vs {exact}");
            }
        }
    }

    #[test]
    fn weights_reproduce_volume_and_area() {
        for dim in [2, 3] {
            let q = BallQuadrature::new(dim, 7, 12).unwrap();
            for r in [1e-3, 0.3, 2.0] {
                let c = Point::from_element(dim, 0.4);
                let vol: f64 = q.ball(&c, r).map(|(_, w)| w).sum();
                let area: f64 = q.sphere(&c, r).map(|(_, _, w)| w).sum();
                assert!((vol / q.volume(r) - 1.0).abs() < 1e-12);
                assert!((area / q.area(r) - 1.0).abs() < 1e-12);
            }
        }
        assert!(matches!(BallQuadrature::new(4, 4, 4), Err(Error::NotImplementedDimension(4))));
    }

    #[test]
    fn moments_match_closed_forms() {
        // ∫_B |y|² dy = n ωₙ r^{n+2} / (n + 2)
        for dim in [2, 3] {
            let q = BallQuadrature::new(dim, 6, 10).unwrap();
            let c = Point::zeros(dim);
            let r = 0.7;
            let m: f64 = q.ball(&c, r).map(|(p, w)| w * p.norm_squared()).sum();
            let exact = dim as f64 * q.unit_volume() * r.powi(dim as i32 + 2) / (dim as f64 + 2.0);
            assert!((m - exact).abs() < 1e-13);
            // ∫_S y₁² dS = A(r) r² / n
            let s: f64 = q.sphere(&c, r).map(|(p, _, w)| w * p[0] * p[0]).sum();
            assert!((s - q.area(r) * r * r / dim as f64).abs() < 1e-13);
        }
    }
}
