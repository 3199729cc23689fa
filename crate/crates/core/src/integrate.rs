//! Time integration: fixed-step RK4, adaptive embedded RK5(4) with PI-free
//! step control, exact stroboscopic sampling by step clamping, and augmented
//! state + tangent propagation for Lyapunov estimates.

use crate::error::{Error, Result};
use crate::model::{self, Params, State};
use std::f64::consts::TAU;

/// Adaptive integrator settings. Local error is controlled componentwise
/// against `abs_tol + rel_tol * |state|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub h_init: f64,
    pub h_max: f64,
    pub max_steps: u64,
}

impl IntegratorConfig {
    /// Defaults for a drive frequency: tolerances 1e-9, h_max resolving the
    /// drive period by at least 20 steps.
    pub fn for_drive(omega: f64) -> Self {
        Self {
            rel_tol: 1e-9,
            abs_tol: 1e-9,
            h_init: 1e-3,
            h_max: TAU / (20.0 * omega),
            max_steps: 100_000_000,
        }
    }

    /// Same settings with both tolerances replaced.
    pub fn with_tol(mut self, tol: f64) -> Self {
        self.rel_tol = tol;
        self.abs_tol = tol;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.rel_tol > 0.0
            && self.abs_tol > 0.0
            && self.h_init > 0.0
            && self.h_max > 0.0
            && self.h_init <= self.h_max
            && [self.rel_tol, self.abs_tol, self.h_init, self.h_max].iter().all(|v| v.is_finite())
            && self.max_steps >= 1;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidConfig(format!("bad integrator config: {self:?}")))
        }
    }
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self::for_drive(1.0)
    }
}

/// Accepted-step record of an adaptive run. Sample times are strictly
/// increasing and every state is finite.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub samples: Vec<(f64, State)>,
    pub n_steps: u64,
    pub n_rejected: u64,
}

impl Trajectory {
    pub fn final_state(&self) -> State {
        self.samples.last().expect("trajectory holds at least the initial sample").1
    }
}

/// Poincare-section samples: (x, y) once per drive period, transient discarded.
#[derive(Debug, Clone, PartialEq)]
pub struct StroboSeries {
    pub params: Params,
    pub samples: Vec<(f64, f64)>,
    pub n_transient: u32,
}

// Dormand-Prince 5(4) tableau. Stage 7 is the FSAL derivative at the proposal.
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// b - bhat, the embedded 4th-order error weights.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const SAFETY: f64 = 0.9;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 5.0;

/// Adaptive RK5(4) stepper over a generic RHS. Deterministic: the step
/// sequence is a pure function of (rhs, y0, t0, targets, config).
pub(crate) struct Dopri5<const N: usize, F> {
    f: F,
    cfg: IntegratorConfig,
    t: f64,
    y: [f64; N],
    h: f64,
    k1: [f64; N],
    n_steps: u64,
    n_rejected: u64,
}

impl<const N: usize, F: Fn(f64, &[f64; N]) -> [f64; N]> Dopri5<N, F> {
    pub fn new(f: F, t0: f64, y0: [f64; N], cfg: &IntegratorConfig) -> Result<Self> {
        cfg.validate()?;
        if !(y0.iter().all(|v| v.is_finite()) && t0.is_finite()) {
            return Err(Error::Divergence { t: t0 });
        }
        let k1 = f(t0, &y0);
        if !k1.iter().all(|v| v.is_finite()) {
            return Err(Error::Divergence { t: t0 });
        }
        let h = cfg.h_init.min(cfg.h_max);
        Ok(Self { f, cfg: *cfg, t: t0, y: y0, h, k1, n_steps: 0, n_rejected: 0 })
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn y(&self) -> &[f64; N] {
        &self.y
    }

    pub fn n_steps(&self) -> u64 {
        self.n_steps
    }

    pub fn n_rejected(&self) -> u64 {
        self.n_rejected
    }

    /// Replace the state in place (phase snap, tangent renormalization) and
    /// refresh the FSAL derivative.
    pub fn set_state(&mut self, y: [f64; N]) {
        self.y = y;
        self.k1 = (self.f)(self.t, &self.y);
    }

    /// Advance to exactly `t_end` (last step clamped), invoking `observe`
    /// after every accepted step.
    pub fn advance_to(&mut self, t_end: f64, mut observe: impl FnMut(f64, &[f64; N])) -> Result<()> {
        while self.t < t_end {
            if self.n_steps + self.n_rejected >= self.cfg.max_steps {
                return Err(Error::StepBudget { t: self.t, budget: self.cfg.max_steps });
            }
            let mut h = self.h.min(self.cfg.h_max);
            let clamped = self.t + h >= t_end;
            if clamped {
                h = t_end - self.t;
            }
            if !(h > 0.0) || self.t + h == self.t {
                return Err(Error::StepUnderflow { t: self.t });
            }

            let (y_new, err) = self.try_step(h);
            if !err.is_finite() || !y_new.iter().all(|v| v.is_finite()) {
                return Err(Error::Divergence { t: self.t });
            }

            if err <= 1.0 {
                self.t = if clamped { t_end } else { self.t + h };
                self.y = y_new;
                self.k1 = (self.f)(self.t, &self.y);
                self.n_steps += 1;
                let fac = (SAFETY * err.powf(-0.2)).clamp(FAC_MIN, FAC_MAX);
                if !clamped {
                    self.h = (h * fac).min(self.cfg.h_max);
                }
                observe(self.t, &self.y);
            } else {
                self.n_rejected += 1;
                let fac = (SAFETY * err.powf(-0.2)).clamp(FAC_MIN, 1.0);
                self.h = h * fac;
            }
        }
        Ok(())
    }

    /// One trial step of size h: returns the 5th-order proposal and the
    /// weighted max-norm error estimate (acceptable when <= 1).
    fn try_step(&mut self, h: f64) -> ([f64; N], f64) {
        let (t, y, k1) = (self.t, &self.y, &self.k1);
        let f = &self.f;

        let mut ys = [0.0; N];
        for i in 0..N {
            ys[i] = y[i] + h * (A21 * k1[i]);
        }
        let k2 = f(t + C2 * h, &ys);
        for i in 0..N {
            ys[i] = y[i] + h * (A31 * k1[i] + A32 * k2[i]);
        }
        let k3 = f(t + C3 * h, &ys);
        for i in 0..N {
            ys[i] = y[i] + h * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i]);
        }
        let k4 = f(t + C4 * h, &ys);
        for i in 0..N {
            ys[i] = y[i] + h * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i]);
        }
        let k5 = f(t + C5 * h, &ys);
        for i in 0..N {
            ys[i] = y[i] + h * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i] + A65 * k5[i]);
        }
        let k6 = f(t + h, &ys);

        let mut y_new = [0.0; N];
        for i in 0..N {
            y_new[i] = y[i] + h * (B1 * k1[i] + B3 * k3[i] + B4 * k4[i] + B5 * k5[i] + B6 * k6[i]);
        }
        let k7 = f(t + h, &y_new);

        let mut err: f64 = 0.0;
        for i in 0..N {
            let e = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            let sc = self.cfg.abs_tol + self.cfg.rel_tol * y[i].abs().max(y_new[i].abs());
            err = err.max((e / sc).abs());
        }
        (y_new, err)
    }
}

/// RHS of the first-order system as a plain array function.
pub(crate) fn pdm_rhs(p: Params) -> impl Fn(f64, &[f64; 3]) -> [f64; 3] {
    move |_t, y| {
        let d = model::vector_field(&State::new(y[0], y[1], y[2]), &p);
        [d.x, d.y, d.z]
    }
}

/// Augmented state + tangent RHS: tangent evolves by v' = J(x, y, z) v.
pub(crate) fn pdm_tangent_rhs(p: Params) -> impl Fn(f64, &[f64; 5]) -> [f64; 5] {
    move |_t, y| {
        let s = State::new(y[0], y[1], y[2]);
        let d = model::vector_field(&s, &p);
        let jv = model::jacobian_xy(&s, &p).apply([y[3], y[4]]);
        [d.x, d.y, d.z, jv[0], jv[1]]
    }
}

/// Augmented state + accumulated power RHS: W' = power_balance_rhs.
fn pdm_energy_rhs(p: Params) -> impl Fn(f64, &[f64; 4]) -> [f64; 4] {
    move |_t, y| {
        let s = State::new(y[0], y[1], y[2]);
        let d = model::vector_field(&s, &p);
        [d.x, d.y, d.z, model::power_balance_rhs(&s, &p)]
    }
}

/// Classical RK4 step over a generic RHS.
pub(crate) fn rk4_step_arr<const N: usize>(
    f: &impl Fn(f64, &[f64; N]) -> [f64; N],
    t: f64,
    y: &[f64; N],
    h: f64,
) -> [f64; N] {
    let k1 = f(t, y);
    let mut ys = [0.0; N];
    for i in 0..N {
        ys[i] = y[i] + 0.5 * h * k1[i];
    }
    let k2 = f(t + 0.5 * h, &ys);
    for i in 0..N {
        ys[i] = y[i] + 0.5 * h * k2[i];
    }
    let k3 = f(t + 0.5 * h, &ys);
    for i in 0..N {
        ys[i] = y[i] + h * k3[i];
    }
    let k4 = f(t + h, &ys);
    let mut out = [0.0; N];
    for i in 0..N {
        out[i] = y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    out
}

/// One fixed RK4 step of the system. h = 0 returns the state unchanged.
pub fn rk4_step(s: &State, t: f64, h: f64, p: &Params) -> Result<State> {
    if h < 0.0 || !h.is_finite() {
        return Err(Error::InvalidConfig(format!("rk4 step must be >= 0, got {h}")));
    }
    if h == 0.0 {
        return Ok(*s);
    }
    let out = rk4_step_arr(&pdm_rhs(*p), t, &s.to_array(), h);
    let out = State::from_array(out);
    if out.is_finite() {
        Ok(out)
    } else {
        Err(Error::Divergence { t })
    }
}

/// Adaptive integration from t0 to exactly t1, recording every accepted step.
/// t1 = t0 yields the single-sample trajectory (t0, s0).
pub fn integrate_adaptive(
    s0: &State,
    t0: f64,
    t1: f64,
    p: &Params,
    cfg: &IntegratorConfig,
) -> Result<Trajectory> {
    if !(t1 >= t0) {
        return Err(Error::InvalidConfig(format!("t1 = {t1} must be >= t0 = {t0}")));
    }
    let mut st = Dopri5::new(pdm_rhs(*p), t0, s0.to_array(), cfg)?;
    let mut samples = vec![(t0, *s0)];
    st.advance_to(t1, |t, y| samples.push((t, State::from_array(*y))))?;
    Ok(Trajectory { samples, n_steps: st.n_steps(), n_rejected: st.n_rejected() })
}

/// Stroboscopic run core: also reports the recorded drive phases and the
/// final full state, for phase-exactness checks and continuation seeding.
pub(crate) fn strobe_core(
    s0: &State,
    p: &Params,
    n_transient: u32,
    n_samples: u32,
    cfg: &IntegratorConfig,
) -> Result<(StroboSeries, Vec<f64>, State)> {
    if n_samples < 1 {
        return Err(Error::InvalidConfig("n_samples must be >= 1".into()));
    }
    let period = p.drive_period();
    let mut st = Dopri5::new(pdm_rhs(*p), 0.0, s0.to_array(), cfg)?;
    let total = n_transient as u64 + n_samples as u64;
    let mut samples = Vec::with_capacity(n_samples as usize);
    let mut phases = Vec::with_capacity(n_samples as usize);
    for m in 0..total {
        if m > 0 {
            st.advance_to(m as f64 * period, |_, _| {})?;
            // Section times are exact period multiples, so the phase there is
            // z0 + m * 2 pi; snap to it to keep long runs drift-free.
            let mut y = *st.y();
            y[2] = s0.z + m as f64 * TAU;
            st.set_state(y);
        }
        if m >= n_transient as u64 {
            samples.push((st.y()[0], st.y()[1]));
            phases.push(st.y()[2]);
        }
    }
    let final_state = State::from_array(*st.y());
    Ok((StroboSeries { params: *p, samples, n_transient }, phases, final_state))
}

/// Integrate n_transient drive periods (discarded), then sample (x, y) at
/// exactly one section point per period, n_samples times.
pub fn integrate_strobe(
    s0: &State,
    p: &Params,
    n_transient: u32,
    n_samples: u32,
    cfg: &IntegratorConfig,
) -> Result<StroboSeries> {
    strobe_core(s0, p, n_transient, n_samples, cfg).map(|(series, _, _)| series)
}

/// Propagate the augmented system (state plus 2-d tangent). The tangent is
/// normalized at start, then after each `renorm_interval` the log-norm is
/// recorded and the tangent rescaled to unit length. Records count is
/// floor(duration / renorm_interval); integration continues to `duration`.
pub fn integrate_with_tangent(
    s0: &State,
    v0: [f64; 2],
    p: &Params,
    duration: f64,
    renorm_interval: f64,
    cfg: &IntegratorConfig,
) -> Result<(State, Vec<f64>)> {
    let nv0 = f64::hypot(v0[0], v0[1]);
    if !(nv0 > 0.0) || !nv0.is_finite() {
        return Err(Error::InvalidConfig("initial tangent must be nonzero and finite".into()));
    }
    if !(renorm_interval > 0.0) || !(duration >= 0.0) {
        return Err(Error::InvalidConfig("need renorm_interval > 0 and duration >= 0".into()));
    }
    let y0 = [s0.x, s0.y, s0.z, v0[0] / nv0, v0[1] / nv0];
    let mut st = Dopri5::new(pdm_tangent_rhs(*p), 0.0, y0, cfg)?;
    // Guard against duration = k * interval rounding to k - epsilon.
    let n_records = (duration / renorm_interval + 1e-9).floor() as u64;
    let mut logs = Vec::with_capacity(n_records as usize);
    for i in 1..=n_records {
        st.advance_to(i as f64 * renorm_interval, |_, _| {})?;
        let y = *st.y();
        let nv = f64::hypot(y[3], y[4]);
        if !nv.is_finite() {
            return Err(Error::Divergence { t: st.t() });
        }
        if nv == 0.0 {
            return Err(Error::DegenerateTangent { t: st.t() });
        }
        logs.push(nv.ln());
        let mut y = y;
        y[3] /= nv;
        y[4] /= nv;
        st.set_state(y);
    }
    st.advance_to(duration, |_, _| {})?;
    let y = st.y();
    Ok((State::new(y[0], y[1], y[2]), logs))
}

/// Energy-balance check along one adaptive run: integrates the state together
/// with W = accumulated power_balance_rhs and compares against E(t1) - E(t0).
#[derive(Debug, Clone, Copy)]
pub struct EnergyBalance {
    pub e_start: f64,
    pub e_end: f64,
    pub work: f64,
    /// |e_end - e_start - work|
    pub residual: f64,
}

pub fn energy_balance(
    s0: &State,
    t0: f64,
    t1: f64,
    p: &Params,
    cfg: &IntegratorConfig,
) -> Result<EnergyBalance> {
    if !(t1 >= t0) {
        return Err(Error::InvalidConfig(format!("t1 = {t1} must be >= t0 = {t0}")));
    }
    let mut st = Dopri5::new(pdm_energy_rhs(*p), t0, [s0.x, s0.y, s0.z, 0.0], cfg)?;
    st.advance_to(t1, |_, _| {})?;
    let y = st.y();
    let e_start = model::energy(s0, p).total;
    let e_end = model::energy(&State::new(y[0], y[1], y[2]), p).total;
    let work = y[3];
    Ok(EnergyBalance { e_start, e_end, work, residual: (e_end - e_start - work).abs() })
}
