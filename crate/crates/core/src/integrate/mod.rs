//! Time integration of pathlines through a moving interface.
//!
//! [`trace`] integrates the one-sided field of the current phase, detects
//! sign changes of the signed distance at step ends, and localizes each
//! crossing on the entered side of `Σ` to within `tol_event`. At a crossing
//! the relative normal speeds `u± = (v± − w)·n` decide the continuation:
//! a common nonzero sign crosses into the entered phase, a common zero
//! (grazing) switches to motion on the interface, and opposite signs abort
//! with [`Error::TransversalityViolation`](crate::Error::TransversalityViolation).

mod flow;
mod output;
mod rk;
mod trace;

pub use flow::{
    flow_map, flow_map_with, integrate_surface, jacobian_flow, normal_evolution_residual, FlowJacobian,
};
pub use output::{trajectory_json, write_csv};
pub use rk::{dp45_step, hermite, hermite_rate, rk4_step};
pub use trace::{trace, trace_backward};

use serde::Serialize;

use crate::fields::Phase;
use crate::{Error, Point, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    /// Classical RK4 with fixed step `h` on the grid `t0 + k h`.
    Rk4,
    /// Dormand–Prince 5(4) with mixed absolute/relative tolerance.
    Rk45 { tol: f64 },
}

impl Scheme {
    pub fn name(&self) -> &'static str {
        match self {
            Scheme::Rk4 => "rk4",
            Scheme::Rk45 { .. } => "rk45",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IntegratorConfig {
    /// Fixed step (RK4, surface mode) or initial step (RK45).
    pub h: f64,
    pub scheme: Scheme,
    /// Required `|d_Σ|` at a located crossing.
    pub tol_event: f64,
    /// Zero band for the relative normal speeds; `None` uses the scene's.
    pub tol_grazing: Option<f64>,
    pub max_steps: usize,
    /// Keep every step; otherwise only segment end points are stored.
    pub dense_output: bool,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            h: 1e-3,
            scheme: Scheme::Rk4,
            tol_event: 1e-10,
            tol_grazing: None,
            max_steps: 10_000_000,
            dense_output: true,
        }
    }
}

impl IntegratorConfig {
    pub fn rk4(h: f64) -> Self {
        Self { h, ..Self::default() }
    }

    pub fn rk45(tol: f64) -> Self {
        Self { scheme: Scheme::Rk45 { tol }, ..Self::default() }
    }

    pub fn check(&self, chart_width: f64) -> Result<()> {
        if !(self.h > 0.0 && self.h.is_finite()) {
            return Err(Error::InvalidInput(format!("step h = {} must be positive", self.h)));
        }
        if !(self.tol_event > 0.0 && self.tol_event < chart_width) {
            return Err(Error::InvalidInput(format!(
                "tol_event = {} must lie in (0, chart width = {chart_width})",
                self.tol_event
            )));
        }
        if let Scheme::Rk45 { tol } = self.scheme {
            if !(tol > 0.0) {
                return Err(Error::InvalidInput(format!("rk45 tolerance {tol} must be positive")));
            }
        }
        Ok(())
    }
}

/// Continuation after an event.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Cross,
    Surface,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CrossingEvent {
    pub time: f64,
    pub location: Point,
    pub from_phase: Phase,
    pub to_phase: Phase,
    pub u_plus: f64,
    pub u_minus: f64,
    /// Common sign of `u±` (0 when grazing).
    pub sign: i8,
    pub mode: Mode,
}

/// Samples of one phase-labeled piece; `rates` are the one-sided field
/// values used for Hermite interpolation.
#[derive(Debug, Clone, PartialEq)]
pub struct Segment {
    pub phase: Phase,
    pub times: Vec<f64>,
    pub states: Vec<Point>,
    pub rates: Vec<Point>,
}

impl Segment {
    pub(crate) fn new(phase: Phase) -> Self {
        Self { phase, times: Vec::new(), states: Vec::new(), rates: Vec::new() }
    }

    pub(crate) fn push(&mut self, t: f64, x: Point, rate: Point) {
        self.times.push(t);
        self.states.push(x);
        self.rates.push(rate);
    }

    pub fn start_time(&self) -> f64 {
        self.times[0]
    }

    pub fn end_time(&self) -> f64 {
        *self.times.last().expect("segment has samples")
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    fn covers(&self, t: f64) -> bool {
        let (a, b) = (self.start_time(), self.end_time());
        a.min(b) <= t && t <= a.max(b)
    }

    fn bracket(&self, t: f64) -> usize {
        let dir = if self.end_time() >= self.start_time() { 1.0 } else { -1.0 };
        let i = self.times.partition_point(|&s| (s - t) * dir < 0.0);
        i.clamp(1, self.times.len() - 1)
    }

    fn interpolate(&self, t: f64) -> (Point, Point) {
        if self.times.len() == 1 {
            return (self.states[0].clone(), self.rates[0].clone());
        }
        let i = self.bracket(t);
        let (t0, t1) = (self.times[i - 1], self.times[i]);
        let (x0, x1) = (&self.states[i - 1], &self.states[i]);
        let (f0, f1) = (&self.rates[i - 1], &self.rates[i]);
        (hermite(t0, x0, f0, t1, x1, f1, t), hermite_rate(t0, x0, f0, t1, x1, f1, t))
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Diagnostics {
    pub steps: usize,
    pub rejected_steps: usize,
    /// Largest `|d_Σ|` before re-projection in surface mode.
    pub max_constraint_drift: f64,
    pub max_inclusion_residual: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub dim: usize,
    pub segments: Vec<Segment>,
    pub events: Vec<CrossingEvent>,
    pub diagnostics: Diagnostics,
    /// Integrated backward in time (sample times decrease).
    pub backward: bool,
}

impl Trajectory {
    pub fn start_time(&self) -> f64 {
        self.segments[0].start_time()
    }

    pub fn end_time(&self) -> f64 {
        self.segments.last().expect("trajectory has segments").end_time()
    }

    pub fn initial_state(&self) -> &Point {
        &self.segments[0].states[0]
    }

    pub fn final_state(&self) -> &Point {
        self.segments.last().and_then(|s| s.states.last()).expect("trajectory has samples")
    }

    fn segment_at(&self, t: f64) -> Option<&Segment> {
        // At a junction the later segment wins.
        self.segments.iter().rev().find(|s| s.covers(t))
    }

    /// Dense-output state at `t`.
    pub fn state_at(&self, t: f64) -> Option<Point> {
        self.segment_at(t).map(|s| s.interpolate(t).0)
    }

    /// Dense-output velocity at `t` (one-sided at junctions).
    pub fn rate_at(&self, t: f64) -> Option<Point> {
        self.segment_at(t).map(|s| s.interpolate(t).1)
    }

    pub fn phase_at(&self, t: f64) -> Option<Phase> {
        self.segment_at(t).map(|s| s.phase)
    }

    pub fn event_times(&self) -> Vec<f64> {
        self.events.iter().map(|e| e.time).collect()
    }

    /// All stored samples in integration order, junction points once.
    pub fn samples(&self) -> impl Iterator<Item = (f64, &Point, Phase)> {
        self.segments.iter().enumerate().flat_map(|(k, seg)| {
            let skip = usize::from(k > 0);
            seg.times
                .iter()
                .zip(&seg.states)
                .skip(skip)
                .map(move |(t, x)| (*t, x, seg.phase))
        })
    }

    pub fn sample_count(&self) -> usize {
        self.samples().count()
    }
}
