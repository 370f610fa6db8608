//! Set-valued regularization of the two-phase field and inclusion
//! residuals of candidate trajectories.
//!
//! Off the interface the regularized field is the one-sided velocity of
//! the containing phase; on the interface it is the segment
//! `conv{v⁺, v⁻}`. For fields continuous up to the interface from each
//! side, Filippov's regularization yields the same sets, so only this one
//! is computed.

use serde::Serialize;

use crate::fields::{phase_of, Phase, TwoPhaseScene};
use crate::integrate::Trajectory;
use crate::Point;

#[derive(Debug, Clone, PartialEq)]
pub enum KrasovskiiSet {
    Singleton(Point),
    Segment { v_plus: Point, v_minus: Point },
}

impl KrasovskiiSet {
    /// Closest point of the set to `u`.
    pub fn project(&self, u: &Point) -> Point {
        match self {
            KrasovskiiSet::Singleton(v) => v.clone(),
            KrasovskiiSet::Segment { v_plus, v_minus } => {
                let dir = v_plus - v_minus;
                let len2 = dir.norm_squared();
                if len2 == 0.0 {
                    return v_minus.clone();
                }
                let s = ((u - v_minus).dot(&dir) / len2).clamp(0.0, 1.0);
                v_minus + dir * s
            }
        }
    }

    pub fn contains(&self, u: &Point, tol: f64) -> bool {
        inclusion_residual(self, u) <= tol
    }
}

/// Regularized field at `(t, x)`. Points whose phase cannot be resolved
/// (outside every chart) fall back to the sign of `φ`.
pub fn krasovskii(scene: &TwoPhaseScene, t: f64, x: &Point) -> KrasovskiiSet {
    let phase = phase_of(scene, t, x).unwrap_or_else(|_| Phase::from_sign(scene.iface().phi(t, x)));
    match phase {
        Phase::Interface => KrasovskiiSet::Segment {
            v_plus: scene.v_plus.eval(t, x),
            v_minus: scene.v_minus.eval(t, x),
        },
        p => KrasovskiiSet::Singleton(scene.velocity(p, t, x)),
    }
}

/// Euclidean distance from `u` to the set.
pub fn inclusion_residual(set: &KrasovskiiSet, u: &Point) -> f64 {
    (set.project(u) - u).norm()
}

#[derive(Debug, Clone, Serialize)]
pub struct InclusionCertificate {
    pub max_residual: f64,
    /// Time of the largest residual.
    pub worst_time: f64,
    pub samples: usize,
    /// Samples skipped because they lie within the band around an event.
    pub excluded: usize,
}

impl InclusionCertificate {
    pub fn passes(&self, tol: f64) -> bool {
        self.max_residual <= tol
    }
}

/// Largest inclusion residual of `ẋ(t)` over the stored sample times, with
/// `ẋ` from centered differences of the dense output. Samples within two
/// local steps of an event (and the end points) are excluded.
pub fn trajectory_residual(scene: &TwoPhaseScene, traj: &Trajectory) -> InclusionCertificate {
    let times: Vec<f64> = traj.samples().map(|(t, _, _)| t).collect();
    let events = traj.event_times();
    let mut cert = InclusionCertificate { max_residual: 0.0, worst_time: f64::NAN, samples: 0, excluded: 0 };
    for i in 1..times.len().saturating_sub(1) {
        let t = times[i];
        let step = (times[i + 1] - t).abs().min((t - times[i - 1]).abs());
        if step == 0.0 || events.iter().any(|e| (e - t).abs() <= 2.0 * (times[i + 1] - times[i - 1]).abs()) {
            cert.excluded += 1;
            continue;
        }
        let (Some(xp), Some(xm), Some(x)) =
            (traj.state_at(t + step), traj.state_at(t - step), traj.state_at(t))
        else {
            cert.excluded += 1;
            continue;
        };
        let rate = (xp - xm) / (2.0 * step);
        let r = inclusion_residual(&krasovskii(scene, t, &x), &rate);
        cert.samples += 1;
        if r > cert.max_residual || cert.worst_time.is_nan() {
            cert.max_residual = cert.max_residual.max(r);
            cert.worst_time = t;
        }
    }
    cert
}
