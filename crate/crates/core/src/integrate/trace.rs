use super::rk::{dp45_step, rk4_step};
use super::{CrossingEvent, Diagnostics, IntegratorConfig, Mode, Scheme, Segment, Trajectory};
use crate::fields::{interface_state, phase_of, transversality_of, InterfaceState, Phase, TwoPhaseScene};
use crate::geometry;
use crate::{Error, Point, Result};

const MAX_ROOT_ITERATIONS: usize = 200;

fn finite(t: f64, x: &Point) -> Result<()> {
    if x.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite { t, x: x.iter().copied().collect() })
    }
}

fn bulk_rate(scene: &TwoPhaseScene, phase: Phase, t: f64, x: &Point) -> Result<Point> {
    let v = scene.velocity(phase, t, x);
    finite(t, &v).map_err(|_| Error::NonFinite { t, x: x.iter().copied().collect() })?;
    Ok(v)
}

/// Velocity on the interface: normal part `V n`, tangential part the
/// average of the one-sided tangential velocities.
pub(crate) fn surface_rate(scene: &TwoPhaseScene, t: f64, x: &Point) -> Result<Point> {
    let iface = scene.iface();
    let n = geometry::normal(iface, t, x)?;
    let speed = geometry::normal_speed(iface, t, x)?;
    let avg = scene.velocity(Phase::Interface, t, x);
    let v = &n * (speed - avg.dot(&n)) + avg;
    finite(t, &v)?;
    Ok(v)
}

enum Motion {
    Bulk(Phase),
    Surface,
}

struct Tracer<'a> {
    scene: &'a TwoPhaseScene,
    cfg: IntegratorConfig,
    t0: f64,
    t_end: f64,
    segments: Vec<Segment>,
    events: Vec<CrossingEvent>,
    diag: Diagnostics,
}

impl<'a> Tracer<'a> {
    /// Next point of the step grid `t0 + k h` after `t`, clipped to `t_end`.
    fn next_grid_time(&self, t: f64) -> f64 {
        let h = self.cfg.h;
        let k = ((t - self.t0) / h + 1e-9).floor() + 1.0;
        let mut next = self.t0 + k * h;
        if next - t < 1e-6 * h {
            next += h;
        }
        next.min(self.t_end)
    }

    fn check_domain(&self, t: f64, x: &Point) -> Result<()> {
        if self.scene.domain().contains(x) {
            Ok(())
        } else {
            Err(Error::LeftDomain { t, x: x.iter().copied().collect() })
        }
    }

    /// Interface quantities at the foot point of `x` and the common sign of
    /// the relative normal speeds.
    fn classify(&self, t: f64, x: &Point) -> Result<(InterfaceState, i8)> {
        let foot = match self.scene.chart().project(t, x) {
            Ok(cp) => cp.foot,
            Err(_) => x.clone(),
        };
        let st = interface_state(self.scene, t, &foot)?;
        let tol = self.cfg.tol_grazing.unwrap_or_else(|| self.scene.grazing_tol(&st.v_plus, &st.v_minus));
        let sign = transversality_of(t, &st, tol)?;
        Ok((st, sign))
    }

    fn sub_step(&self, phase: Phase, t: f64, x: &Point, k1: &Point, tau: f64) -> Result<Point> {
        let mut f = |s: f64, y: &Point| bulk_rate(self.scene, phase, s, y);
        match self.cfg.scheme {
            Scheme::Rk4 => rk4_step(&mut f, t, x, k1, tau),
            Scheme::Rk45 { .. } => dp45_step(&mut f, t, x, k1, tau).map(|r| r.0),
        }
    }

    /// Illinois iteration on `τ ↦ d(t + τ, step(x, τ))` over `[0, h]`.
    /// Returns a point on the entered side with `|d| ≤ tol_event`.
    #[allow(clippy::too_many_arguments)]
    fn locate(
        &self,
        phase: Phase,
        t: f64,
        x: &Point,
        k1: &Point,
        h: f64,
        s0: f64,
        s1: f64,
    ) -> Result<(f64, Point)> {
        let chart = self.scene.chart();
        let target = -phase.sign();
        if s1 == 0.0 {
            return Ok((h, self.sub_step(phase, t, x, k1, h)?));
        }
        let (mut a, mut fa, mut b, mut fb) = (0.0, s0, h, s1);
        let mut last_side = 0i8;
        for _ in 0..MAX_ROOT_ITERATIONS {
            let mut c = b - fb * (b - a) / (fb - fa);
            if !(c > a && c < b) {
                c = 0.5 * (a + b);
            }
            let xc = self.sub_step(phase, t, x, k1, c)?;
            let fc = chart.offset(t + c, &xc);
            if target * fc > 0.0 {
                if fc.abs() <= self.cfg.tol_event {
                    return Ok((c, xc));
                }
                b = c;
                fb = fc;
                if last_side == 1 {
                    fa *= 0.5;
                }
                last_side = 1;
            } else {
                a = c;
                fa = fc;
                if last_side == -1 {
                    fb *= 0.5;
                }
                last_side = -1;
            }
            if b - a <= 4.0 * f64::EPSILON * (t.abs() + h) {
                return Ok((b, self.sub_step(phase, t, x, k1, b)?));
            }
        }
        Err(Error::NoConvergence { iterations: MAX_ROOT_ITERATIONS, residual: fb.abs() })
    }

    fn push(&mut self, t: f64, x: Point, rate: Point) {
        let seg = self.segments.last_mut().expect("active segment");
        seg.push(t, x, rate);
    }

    /// Keeps a sample unless dense output is off and it is interior.
    fn record(&mut self, t: f64, x: &Point, rate: &Point) {
        if self.cfg.dense_output || t >= self.t_end {
            self.push(t, x.clone(), rate.clone());
        }
    }

    fn start_segment(&mut self, phase: Phase, t: f64, x: &Point, rate: Point) {
        let mut seg = Segment::new(phase);
        seg.push(t, x.clone(), rate);
        self.segments.push(seg);
    }

    fn close_segment(&mut self, t: f64, x: &Point, rate: &Point) {
        let seg = self.segments.last_mut().expect("active segment");
        if seg.end_time() != t {
            seg.push(t, x.clone(), rate.clone());
        }
    }

    fn run(mut self, x0: &Point) -> Result<Trajectory> {
        let scene = self.scene;
        let chart = scene.chart();
        let mut t = self.t0;
        let mut x = x0.clone();
        let mut skip_detection = false;
        let mut motion = match phase_of(scene, t, &x)? {
            Phase::Interface => {
                let (st, sign) = self.classify(t, &x)?;
                if sign == 0 {
                    x = st.point;
                    Motion::Surface
                } else {
                    skip_detection = true;
                    Motion::Bulk(Phase::from_sign(f64::from(sign)))
                }
            }
            p => Motion::Bulk(p),
        };
        let rate0 = match motion {
            Motion::Bulk(p) => bulk_rate(scene, p, t, &x)?,
            Motion::Surface => surface_rate(scene, t, &x)?,
        };
        let label = match motion {
            Motion::Bulk(p) => p,
            Motion::Surface => Phase::Interface,
        };
        self.start_segment(label, t, &x, rate0.clone());
        let mut rate = rate0;
        let mut h_adapt = self.cfg.h;

        while t < self.t_end {
            if self.diag.steps >= self.cfg.max_steps {
                return Err(Error::MaxStepsExceeded { steps: self.diag.steps, t });
            }
            self.diag.steps += 1;
            match motion {
                Motion::Bulk(phase) => {
                    let k1 = rate.clone();
                    let (t_new, x_new) = match self.cfg.scheme {
                        Scheme::Rk4 => {
                            let tn = self.next_grid_time(t);
                            (tn, self.sub_step(phase, t, &x, &k1, tn - t)?)
                        }
                        Scheme::Rk45 { tol } => loop {
                            let h = h_adapt.min(self.t_end - t);
                            let mut f = |s: f64, y: &Point| bulk_rate(scene, phase, s, y);
                            let (x5, _, err) = dp45_step(&mut f, t, &x, &k1, h)?;
                            let en = err
                                .iter()
                                .zip(x.iter().zip(x5.iter()))
                                .map(|(e, (a, b))| e.abs() / (tol * (1.0 + a.abs().max(b.abs()))))
                                .fold(0.0, f64::max);
                            let factor = if en > 0.0 { 0.9 * en.powf(-0.2) } else { 5.0 };
                            if en <= 1.0 && en.is_finite() {
                                h_adapt = h * factor.clamp(0.2, 5.0);
                                break (t + h, x5);
                            }
                            self.diag.rejected_steps += 1;
                            h_adapt = h * factor.clamp(0.1, 0.9);
                            if !(h_adapt > 1e-14 * (1.0 + t.abs())) {
                                return Err(Error::NonFinite { t, x: x.iter().copied().collect() });
                            }
                        },
                    };
                    finite(t_new, &x_new)?;
                    let sigma = phase.sign();
                    let s0 = chart.offset(t, &x);
                    let s1 = chart.offset(t_new, &x_new);
                    if !skip_detection && sigma * s0 > 0.0 && sigma * s1 <= 0.0 {
                        let (tau, xe) = self.locate(phase, t, &x, &k1, t_new - t, s0, s1)?;
                        let te = t + tau;
                        self.check_domain(te, &xe)?;
                        let re = bulk_rate(scene, phase, te, &xe)?;
                        self.close_segment(te, &xe, &re);
                        let (st, sign) = self.classify(te, &xe)?;
                        let entered = Phase::from_sign(-sigma);
                        let crosses = f64::from(sign) == -sigma;
                        self.events.push(CrossingEvent {
                            time: te,
                            location: xe.clone(),
                            from_phase: phase,
                            to_phase: if crosses { entered } else { Phase::Interface },
                            u_plus: st.u_plus,
                            u_minus: st.u_minus,
                            sign,
                            mode: if crosses { Mode::Cross } else { Mode::Surface },
                        });
                        t = te;
                        if crosses {
                            x = xe;
                            rate = bulk_rate(scene, entered, t, &x)?;
                            self.start_segment(entered, t, &x, rate.clone());
                            motion = Motion::Bulk(entered);
                        } else {
                            x = st.point;
                            rate = surface_rate(scene, t, &x)?;
                            self.start_segment(Phase::Interface, t, &x, rate.clone());
                            motion = Motion::Surface;
                        }
                        skip_detection = false;
                        continue;
                    }
                    skip_detection = false;
                    self.check_domain(t_new, &x_new)?;
                    rate = bulk_rate(scene, phase, t_new, &x_new)?;
                    t = t_new;
                    x = x_new;
                    self.record(t, &x, &rate);
                }
                Motion::Surface => {
                    let tn = self.next_grid_time(t);
                    let mut f = |s: f64, y: &Point| surface_rate(scene, s, y);
                    let moved = rk4_step(&mut f, t, &x, &rate, tn - t)?;
                    finite(tn, &moved)?;
                    let cp = chart.project(tn, &moved)?;
                    self.diag.max_constraint_drift = self.diag.max_constraint_drift.max(cp.distance.abs());
                    let foot = cp.foot;
                    self.check_domain(tn, &foot)?;
                    let (st, sign) = self.classify(tn, &foot)?;
                    t = tn;
                    x = foot;
                    rate = surface_rate(scene, t, &x)?;
                    if sign != 0 {
                        let entered = Phase::from_sign(f64::from(sign));
                        self.close_segment(t, &x, &rate);
                        self.events.push(CrossingEvent {
                            time: t,
                            location: x.clone(),
                            from_phase: Phase::Interface,
                            to_phase: entered,
                            u_plus: st.u_plus,
                            u_minus: st.u_minus,
                            sign,
                            mode: Mode::Cross,
                        });
                        rate = bulk_rate(scene, entered, t, &x)?;
                        self.start_segment(entered, t, &x, rate.clone());
                        motion = Motion::Bulk(entered);
                        skip_detection = true;
                    } else {
                        self.record(t, &x, &rate);
                    }
                }
            }
        }
        self.close_segment(t, &x, &rate);
        Ok(Trajectory {
            dim: scene.dim(),
            segments: self.segments,
            events: self.events,
            diagnostics: self.diag,
            backward: false,
        })
    }
}

fn check_inputs(scene: &TwoPhaseScene, cfg: &IntegratorConfig, t0: f64, x0: &Point, t1: f64) -> Result<()> {
    cfg.check(scene.chart().width)?;
    let tw = scene.time_window();
    for t in [t0, t1] {
        if !tw.contains_closed(t) || !t.is_finite() {
            return Err(Error::InvalidInput(format!(
                "time {t} is outside the scene window [{}, {}]",
                tw.start, tw.end
            )));
        }
    }
    if x0.len() != scene.dim() {
        return Err(Error::InvalidInput(format!(
            "initial point has {} components, scene dimension is {}",
            x0.len(),
            scene.dim()
        )));
    }
    if !scene.domain().contains(x0) {
        return Err(Error::LeftDomain { t: t0, x: x0.iter().copied().collect() });
    }
    Ok(())
}

/// Pathline from `(t0, x0)` to `t_end`. A `t_end` before `t0` delegates
/// to [`trace_backward`].
pub fn trace(scene: &TwoPhaseScene, cfg: &IntegratorConfig, t0: f64, x0: &Point, t_end: f64) -> Result<Trajectory> {
    if t_end < t0 {
        return trace_backward(scene, cfg, t0, x0, t_end);
    }
    check_inputs(scene, cfg, t0, x0, t_end)?;
    Tracer {
        scene,
        cfg: *cfg,
        t0,
        t_end,
        segments: Vec::new(),
        events: Vec::new(),
        diag: Diagnostics::default(),
    }
    .run(x0)
}

/// Pathline from `(t0, x0)` backward to `t_start < t0`: the forward trace
/// of the reversed scene `ṽ(s,x) = −v(2t0 − s, x)`, mapped back to
/// physical time. Event speeds and signs are reported for the original
/// scene.
pub fn trace_backward(
    scene: &TwoPhaseScene,
    cfg: &IntegratorConfig,
    t0: f64,
    x0: &Point,
    t_start: f64,
) -> Result<Trajectory> {
    if t_start > t0 {
        return Err(Error::InvalidInput(format!("backward trace needs t_start = {t_start} <= t0 = {t0}")));
    }
    check_inputs(scene, cfg, t0, x0, t_start)?;
    let reversed = scene.time_reversed(t0);
    let s_end = 2.0 * t0 - t_start;
    let mut traj = Tracer {
        scene: &reversed,
        cfg: *cfg,
        t0,
        t_end: s_end,
        segments: Vec::new(),
        events: Vec::new(),
        diag: Diagnostics::default(),
    }
    .run(x0)?;
    for seg in &mut traj.segments {
        for t in &mut seg.times {
            *t = 2.0 * t0 - *t;
        }
        for r in &mut seg.rates {
            *r = -&*r;
        }
    }
    for ev in &mut traj.events {
        ev.time = 2.0 * t0 - ev.time;
        ev.u_plus = -ev.u_plus;
        ev.u_minus = -ev.u_minus;
        ev.sign = -ev.sign;
    }
    traj.backward = true;
    Ok(traj)
}
