//! Uniqueness diagnostics for pairs of pathlines: the density-weighted gap
//! functional `φ`, its Gronwall bound, the energy `ψ` and twin experiments.

use rand::{Rng, SeedableRng};
use rayon::prelude::*;
use serde::Serialize;

use crate::fields::{Phase, TwoPhaseScene};
use crate::integrate::{trace, IntegratorConfig, Scheme, Trajectory};
use crate::{Point, Result};

/// Numerical zero for twins with identical initial data.
pub const ATOL_UNIQUE: f64 = 1e-7;
/// Absolute slack on `φ′ − Kφ`.
pub const K_SLACK: f64 = 1e-8;
/// Two fitted constants agree if within this relative distance, or if both
/// are below [`K_FLOOR`] in magnitude.
pub const K_REL_TOL: f64 = 0.2;
pub const K_FLOOR: f64 = 1e-6;

/// Chart coordinates `(π(t,x), d(t,x))`; outside the tube the first-order
/// estimate `d ≈ φ/‖∇φ‖`, `π ≈ x − d n` is used.
pub fn flat_coordinates(scene: &TwoPhaseScene, t: f64, x: &Point) -> (Point, f64) {
    if let Ok(cp) = scene.chart().project(t, x) {
        return (cp.foot, cp.distance);
    }
    let iface = scene.iface();
    let g = iface.grad(t, x);
    let gn = g.norm();
    if !(gn > 0.0) {
        return (x.clone(), iface.phi(t, x));
    }
    let d = iface.phi(t, x) / gn;
    (x - g * (d / gn), d)
}

/// `φ = |ρ xₙ − ρ̄ x̄ₙ| + ‖x_∥ − x̄_∥‖`, densities taken on the side of each
/// point at the midpoint of the two feet.
pub fn phi_functional(scene: &TwoPhaseScene, t: f64, x: &Point, xbar: &Point) -> f64 {
    let (p, d) = flat_coordinates(scene, t, x);
    let (pb, db) = flat_coordinates(scene, t, xbar);
    let mid = (&p + &pb) * 0.5;
    let rho = |d: f64| scene.density(Phase::from_sign(d), t, &mid);
    (rho(d) * d - rho(db) * db).abs() + (p - pb).norm()
}

/// `ψ = ½‖x − x̄‖²`.
pub fn psi_energy(x: &Point, xbar: &Point) -> f64 {
    0.5 * (x - xbar).norm_squared()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TwinSample {
    pub t: f64,
    pub phi: f64,
    pub psi: f64,
    pub separation: f64,
    /// Within the event band of either trajectory.
    pub excluded: bool,
}

/// A pair of trajectories of one scene.
pub struct UniquenessMonitor<'a> {
    scene: &'a TwoPhaseScene,
    pub x: &'a Trajectory,
    pub xbar: &'a Trajectory,
}

impl<'a> UniquenessMonitor<'a> {
    pub fn new(scene: &'a TwoPhaseScene, x: &'a Trajectory, xbar: &'a Trajectory) -> Self {
        Self { scene, x, xbar }
    }

    pub fn phi(&self, t: f64) -> Option<f64> {
        Some(phi_functional(self.scene, t, &self.x.state_at(t)?, &self.xbar.state_at(t)?))
    }

    pub fn psi(&self, t: f64) -> Option<f64> {
        Some(psi_energy(&self.x.state_at(t)?, &self.xbar.state_at(t)?))
    }

    /// Sample times of the first trajectory covered by both.
    pub fn sample_times(&self) -> Vec<f64> {
        let (a, b) = (self.xbar.start_time(), self.xbar.end_time());
        let (lo, hi) = (a.min(b), a.max(b));
        self.x.samples().map(|(t, _, _)| t).filter(|&t| t >= lo && t <= hi).collect()
    }

    /// `φ`, `ψ` and separation on `times`; samples within `2·h` of an event
    /// of either trajectory are flagged, `h` the local sample spacing.
    pub fn series(&self, times: &[f64]) -> Vec<TwinSample> {
        let mut events = self.x.event_times();
        events.extend(self.xbar.event_times());
        (0..times.len())
            .filter_map(|i| {
                let t = times[i];
                let prev = if i > 0 { (t - times[i - 1]).abs() } else { 0.0 };
                let next = if i + 1 < times.len() { (times[i + 1] - t).abs() } else { 0.0 };
                let band = 2.0 * prev.max(next);
                let (x, xb) = (self.x.state_at(t)?, self.xbar.state_at(t)?);
                Some(TwinSample {
                    t,
                    phi: phi_functional(self.scene, t, &x, &xb),
                    psi: psi_energy(&x, &xb),
                    separation: (x - xb).amax(),
                    excluded: events.iter().any(|e| (e - t).abs() <= band),
                })
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GronwallFit {
    /// Smallest `K ≥ 0` with `φ′ ≤ Kφ + slack` on the admitted samples.
    pub k_fit: f64,
    /// Least-squares slope of `log φ`.
    pub k_lsq: f64,
    pub phi0: f64,
    pub max_phi: f64,
    pub max_quotient: f64,
    pub envelope_ok: bool,
    pub used: usize,
    pub excluded: usize,
    pub pass: bool,
}

/// Fits the Gronwall constant from centered difference quotients of `φ`
/// (event bands excluded) and checks the envelope
/// `φ(t) ≤ (φ(t0) + slack·τ) e^{Kτ}`. For `φ(t0) ≤ ATOL_UNIQUE` the
/// check is that `φ` stays below `ATOL_UNIQUE`.
pub fn gronwall_check(samples: &[TwinSample]) -> GronwallFit {
    let mut fit = GronwallFit {
        k_fit: 0.0,
        k_lsq: 0.0,
        phi0: samples.first().map_or(0.0, |s| s.phi),
        max_phi: samples.iter().fold(0.0, |m, s| m.max(s.phi)),
        max_quotient: 0.0,
        envelope_ok: true,
        used: 0,
        excluded: 0,
        pass: true,
    };
    for i in 1..samples.len().saturating_sub(1) {
        let (a, s, b) = (&samples[i - 1], &samples[i], &samples[i + 1]);
        if a.excluded || s.excluded || b.excluded {
            fit.excluded += 1;
            continue;
        }
        let dphi = (b.phi - a.phi) / (b.t - a.t);
        fit.used += 1;
        fit.max_quotient = fit.max_quotient.max(dphi.abs());
        let excess = dphi - K_SLACK;
        if excess > 0.0 {
            fit.k_fit = fit.k_fit.max(if s.phi > 0.0 { excess / s.phi } else { f64::INFINITY });
        }
    }
    let logs: Vec<(f64, f64)> = samples.iter().filter(|s| s.phi > 0.0).map(|s| (s.t, s.phi.ln())).collect();
    if logs.len() >= 2 {
        let m = logs.len() as f64;
        let (st, sl) = logs.iter().fold((0.0, 0.0), |(a, b), (t, l)| (a + t, b + l));
        let (mt, ml) = (st / m, sl / m);
        let (num, den) = logs.iter().fold((0.0, 0.0), |(a, b), (t, l)| (a + (t - mt) * (l - ml), b + (t - mt).powi(2)));
        fit.k_lsq = if den > 0.0 { num / den } else { 0.0 };
    }
    if let Some(first) = samples.first() {
        for s in samples.iter().filter(|s| !s.excluded) {
            let tau = (s.t - first.t).abs();
            let bound = (first.phi + K_SLACK * tau) * (fit.k_fit * tau).exp();
            if s.phi > bound * (1.0 + 1e-9) + 1e-15 {
                fit.envelope_ok = false;
            }
        }
    }
    fit.pass = if fit.phi0 <= ATOL_UNIQUE { fit.max_phi <= ATOL_UNIQUE } else { fit.envelope_ok && fit.k_fit.is_finite() };
    fit
}

/// Largest `ψ′ − 2Lψ` over admitted samples; non-positive means the energy
/// inequality holds with constant `L`.
pub fn energy_check(samples: &[TwinSample], lipschitz: f64) -> f64 {
    let mut worst = f64::NEG_INFINITY;
    for i in 1..samples.len().saturating_sub(1) {
        let (a, s, b) = (&samples[i - 1], &samples[i], &samples[i + 1]);
        if a.excluded || s.excluded || b.excluded {
            continue;
        }
        let dpsi = (b.psi - a.psi) / (b.t - a.t);
        worst = worst.max(dpsi - 2.0 * lipschitz * s.psi);
    }
    worst
}

/// Lower bound on the Lipschitz constant of the phase-`phase` field in the
/// ball `B_radius(center)` at time `t`, from `samples` random pairs in that
/// phase.
pub fn estimate_lipschitz(
    scene: &TwoPhaseScene,
    phase: Phase,
    t: f64,
    center: &Point,
    radius: f64,
    samples: usize,
    seed: u64,
) -> f64 {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let n = center.len();
    let iface = scene.iface();
    let draw = |rng: &mut rand_chacha::ChaCha8Rng| -> Point {
        loop {
            let p = Point::from_fn(n, |_, _| rng.random_range(-1.0..1.0));
            if p.norm() <= 1.0 {
                return center + p * radius;
            }
        }
    };
    let in_phase = |x: &Point| Phase::from_sign(iface.phi(t, x)) == phase;
    let mut best = 0.0_f64;
    for _ in 0..samples {
        let (a, b) = (draw(&mut rng), draw(&mut rng));
        if !(in_phase(&a) && in_phase(&b)) {
            continue;
        }
        let dist = (&a - &b).norm();
        if dist > 0.0 {
            let q = (scene.velocity(phase, t, &a) - scene.velocity(phase, t, &b)).norm() / dist;
            if q.is_finite() {
                best = best.max(q);
            }
        }
    }
    best
}

#[derive(Debug, Clone, Serialize)]
pub struct ZeroTwin {
    pub variant: String,
    pub max_separation: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct PerturbedTwin {
    pub delta: f64,
    pub separation_end: f64,
    pub max_separation: f64,
    /// `separation_end / delta`.
    pub gain: f64,
    pub gronwall: GronwallFit,
    /// Fit repeated with half the step.
    pub k_refined: f64,
    pub k_stable: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct TwinReport {
    pub scene: String,
    pub t0: f64,
    pub t_end: f64,
    pub x0: Vec<f64>,
    pub zero_twins: Vec<ZeroTwin>,
    pub zero_pass: bool,
    pub perturbed: Vec<PerturbedTwin>,
    /// Largest over smallest gain across the perturbation sizes.
    pub gain_spread: f64,
    pub continuity_pass: bool,
    pub gronwall_pass: bool,
    /// Sampled lower bound on the Lipschitz constant of `v±` near `x0`.
    pub lipschitz_lower_bound: f64,
    pub pass: bool,
}

fn max_separation(a: &Trajectory, b: &Trajectory) -> f64 {
    a.samples()
        .filter_map(|(t, x, _)| b.state_at(t).map(|y| (x - y).amax()))
        .fold(0.0, f64::max)
}

pub fn k_agree(a: f64, b: f64) -> bool {
    (a.abs() <= K_FLOOR && b.abs() <= K_FLOOR) || (a - b).abs() <= K_REL_TOL * a.abs().max(b.abs())
}

/// Base trajectory from `(t0, x0)` against (i) traces from the same data
/// with RK4 `h`, RK4 `h/4` and RK45, and (ii) traces from `x0 + δ e` with
/// `e = (1,…,1)/√n` for every `δ` in `deltas`.
pub fn twin_experiment(
    scene: &TwoPhaseScene,
    cfg: &IntegratorConfig,
    t0: f64,
    x0: &Point,
    deltas: &[f64],
    t_end: f64,
) -> Result<TwinReport> {
    let base_cfg = IntegratorConfig { scheme: Scheme::Rk4, ..*cfg };
    let fine_cfg = IntegratorConfig { h: cfg.h / 4.0, ..base_cfg };
    let half_cfg = IntegratorConfig { h: cfg.h / 2.0, ..base_cfg };
    let adaptive_cfg = IntegratorConfig { scheme: Scheme::Rk45 { tol: 1e-11 }, ..base_cfg };

    let base = trace(scene, &base_cfg, t0, x0, t_end)?;
    let variants = [("rk4 h", &base_cfg), ("rk4 h/4", &fine_cfg), ("rk45", &adaptive_cfg)];
    let zero_twins = variants
        .par_iter()
        .map(|(name, c)| {
            let other = trace(scene, c, t0, x0, t_end)?;
            Ok(ZeroTwin { variant: name.to_string(), max_separation: max_separation(&base, &other) })
        })
        .collect::<Result<Vec<_>>>()?;
    let zero_pass = zero_twins.iter().all(|z| z.max_separation <= ATOL_UNIQUE);

    let n = x0.len();
    let dir = Point::from_element(n, 1.0 / (n as f64).sqrt());
    let base_half = trace(scene, &half_cfg, t0, x0, t_end)?;
    let perturbed = deltas
        .par_iter()
        .map(|&delta| {
            let y0 = x0 + &dir * delta;
            let twin = trace(scene, &base_cfg, t0, &y0, t_end)?;
            let mon = UniquenessMonitor::new(scene, &base, &twin);
            let gronwall = gronwall_check(&mon.series(&mon.sample_times()));
            let twin_half = trace(scene, &half_cfg, t0, &y0, t_end)?;
            let mon_half = UniquenessMonitor::new(scene, &base_half, &twin_half);
            let k_refined = gronwall_check(&mon_half.series(&mon_half.sample_times())).k_fit;
            let separation_end = (base.final_state() - twin.final_state()).amax();
            Ok(PerturbedTwin {
                delta,
                separation_end,
                max_separation: max_separation(&base, &twin),
                gain: separation_end / delta,
                gronwall,
                k_refined,
                k_stable: k_agree(gronwall.k_fit, k_refined),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let (gmin, gmax) = perturbed.iter().fold((f64::INFINITY, 0.0_f64), |(lo, hi), p| (lo.min(p.gain), hi.max(p.gain)));
    let gain_spread = if perturbed.is_empty() { 1.0 } else { gmax / gmin };
    let continuity_pass = gain_spread <= 3.0;
    let gronwall_pass = perturbed.iter().all(|p| p.gronwall.pass && p.k_stable);
    let phase = Phase::from_sign(scene.iface().phi(t0, x0));
    let phase = if phase == Phase::Interface { Phase::Plus } else { phase };
    let lipschitz_lower_bound = estimate_lipschitz(scene, phase, t0, x0, 0.1, 2000, 0);
    Ok(TwinReport {
        scene: scene.name.clone(),
        t0,
        t_end,
        x0: x0.iter().copied().collect(),
        zero_twins,
        zero_pass,
        perturbed,
        gain_spread,
        continuity_pass,
        gronwall_pass,
        lipschitz_lower_bound,
        pass: zero_pass && continuity_pass && gronwall_pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenes::builtin;
    use crate::vector;

    #[test]
    fn phi_of_mirrored_pair_on_s1() {
        let s1 = builtin("S1").unwrap();
        let phi = phi_functional(&s1, 0.0, &vector(&[0.0, 1.0]), &vector(&[0.0, -1.0]));
        assert!((phi - 3.0).abs() < 1e-12, "{phi}");
        assert_eq!(phi_functional(&s1, 0.5, &vector(&[0.3, 0.4]), &vector(&[0.3, 0.4])), 0.0);
    }

    #[test]
    fn identical_twins_have_zero_functionals() {
        let s1 = builtin("S1").unwrap();
        let cfg = IntegratorConfig::rk4(1e-2);
        let a = trace(&s1, &cfg, 0.0, &vector(&[0.0, -1.0]), 2.0).unwrap();
        let mon = UniquenessMonitor::new(&s1, &a, &a);
        let series = mon.series(&mon.sample_times());
        assert!(series.iter().all(|s| s.phi == 0.0 && s.psi == 0.0));
        let fit = gronwall_check(&series);
        assert!(fit.pass && fit.k_fit == 0.0);
        assert!(energy_check(&series, 0.0) <= 0.0);
    }

    #[test]
    fn s1_phi_is_conserved_through_the_crossing() {
        let s1 = builtin("S1").unwrap();
        let cfg = IntegratorConfig::rk4(1e-3);
        let a = trace(&s1, &cfg, 0.0, &vector(&[0.0, -1.0]), 2.0).unwrap();
        let b = trace(&s1, &cfg, 0.0, &vector(&[0.0, -1.0 + 1e-3]), 2.0).unwrap();
        let mon = UniquenessMonitor::new(&s1, &a, &b);
        for t in [0.5, 1.0, 1.5, 2.0] {
            assert!((mon.phi(t).unwrap() - 1e-3).abs() < 1e-10, "t = {t}: {}", mon.phi(t).unwrap());
        }
        let fit = gronwall_check(&mon.series(&mon.sample_times()));
        assert!(fit.pass, "{fit:?}");
        assert!(fit.k_fit <= K_FLOOR);
    }

    #[test]
    fn lipschitz_estimate_of_linear_field() {
        let s2 = builtin("S2").unwrap();
        let l = estimate_lipschitz(&s2, Phase::Minus, 0.0, &vector(&[0.0, 0.0]), 0.5, 500, 3);
        assert!((l - 0.5).abs() < 1e-9, "{l}");
    }

    #[test]
    fn agreement_of_constants() {
        assert!(k_agree(0.5, 0.55));
        assert!(!k_agree(0.5, 0.7));
        assert!(k_agree(1e-7, -5e-7));
    }
}
