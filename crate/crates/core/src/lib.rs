//! Pathlines of two-phase flow velocity fields.
//!
//! A two-phase velocity field is smooth inside each bulk phase but jumps
//! across a moving interface `Σ(t) = {φ(t,·) = 0}`. This crate traces
//! pathlines of such fields with event detection at the interface, builds
//! the set-valued (Krasovskii) regularization and its inclusion residuals,
//! provides the normal-preserving extension of the intrinsic interface
//! velocity together with flow maps and flow Jacobians, and ships numerical
//! verifiers for the uniqueness argument (flattening transform, Gronwall
//! functional, energy functional, twin experiments).
//!
//! Scenes are written in a small text format (see [`scenelang`]) or taken
//! from the built-in registry in [`scenes`].
//!
//! ```no_run
//! use pathline::{integrate::{trace, IntegratorConfig}, scenes, vector};
//!
//! let scene = scenes::builtin("S1").unwrap();
//! let traj = trace(&scene, &IntegratorConfig::default(), 0.0, &vector(&[0.0, -1.0]), 2.0).unwrap();
//! println!("crossed at t = {}", traj.events[0].time);
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod extend;
pub mod fields;
pub mod geometry;
pub mod integrate;
pub mod regularize;
pub mod scenelang;
pub mod scenes;
pub mod verify;

mod numfmt;

pub use error::{Error, Result};

use std::sync::Arc;

/// Points and vectors in `ℝⁿ`.
pub type Point = nalgebra::DVector<f64>;
/// Dense `n × n` matrices.
pub type Matrix = nalgebra::DMatrix<f64>;

/// Time-dependent scalar field `(t, x) ↦ f(t, x)`.
pub type ScalarFn = Arc<dyn Fn(f64, &Point) -> f64 + Send + Sync>;
/// Time-dependent vector field `(t, x) ↦ v(t, x)`.
pub type VectorFn = Arc<dyn Fn(f64, &Point) -> Point + Send + Sync>;

/// Builds a [`Point`] from a slice.
pub fn vector(components: &[f64]) -> Point {
    Point::from_column_slice(components)
}

/// Wraps a closure as a [`ScalarFn`].
pub fn scalar_fn<F>(f: F) -> ScalarFn
where
    F: Fn(f64, &Point) -> f64 + Send + Sync + 'static,
{
    Arc::new(f)
}

/// Wraps a closure as a [`VectorFn`].
pub fn vector_fn<F>(f: F) -> VectorFn
where
    F: Fn(f64, &Point) -> Point + Send + Sync + 'static,
{
    Arc::new(f)
}

/// Axis-aligned box in `ℝⁿ`.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Aabb {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl Aabb {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Self {
        assert_eq!(lower.len(), upper.len(), "box bounds must have equal length");
        Self { lower, upper }
    }

    /// Cube `[-half, half]ⁿ`.
    pub fn cube(dim: usize, half: f64) -> Self {
        Self::new(vec![-half; dim], vec![half; dim])
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn contains(&self, x: &Point) -> bool {
        x.iter()
            .zip(self.lower.iter().zip(&self.upper))
            .all(|(&xi, (&lo, &hi))| xi >= lo && xi <= hi)
    }

    pub fn diameter(&self) -> f64 {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(lo, hi)| (hi - lo) * (hi - lo))
            .sum::<f64>()
            .sqrt()
    }

    pub fn center(&self) -> Point {
        Point::from_iterator(
            self.dim(),
            self.lower.iter().zip(&self.upper).map(|(lo, hi)| 0.5 * (lo + hi)),
        )
    }
}

/// Open time interval `J = (a, b)`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct TimeWindow {
    pub start: f64,
    pub end: f64,
}

impl TimeWindow {
    pub fn new(start: f64, end: f64) -> Self {
        assert!(start < end, "empty time window");
        Self { start, end }
    }

    pub fn contains(&self, t: f64) -> bool {
        t > self.start && t < self.end
    }

    /// Closed containment, used for integration end points.
    pub fn contains_closed(&self, t: f64) -> bool {
        t >= self.start && t <= self.end
    }
}
