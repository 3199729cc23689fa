//! Dynamical verdicts: stroboscopic period detection, largest Lyapunov
//! exponent by tangent-space renormalization, attractor classification, and
//! the exact-solution oracle for the undriven constant-frequency orbit.

use crate::error::{Error, Result};
use crate::integrate::{integrate_strobe, integrate_with_tangent, Dopri5, IntegratorConfig, StroboSeries};
use crate::model::{Params, State};
use std::f64::consts::TAU;
use std::fmt;

/// Attractor label from combined period-detection and Lyapunov evidence.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Label {
    Periodic(u32),
    Chaotic,
    Unresolved,
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Periodic(n) => write!(f, "Periodic({n})"),
            Label::Chaotic => write!(f, "Chaotic"),
            Label::Unresolved => write!(f, "Unresolved"),
        }
    }
}

/// Verdict plus both pieces of evidence it was based on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Classification {
    pub label: Label,
    pub lambda_max: f64,
    pub detected_period: Option<u32>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LyapunovResult {
    pub lambda_max: f64,
    /// Renormalizations contributing to the average (one per drive period).
    pub n_renorms: u32,
    /// Time actually averaged over, after the discarded transient.
    pub duration: f64,
}

/// Protocol knobs for `classify`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassifyConfig {
    pub n_transient: u32,
    pub n_samples: u32,
    pub n_max: u32,
    pub tol_abs: f64,
    pub tol_rel: f64,
    /// Minimum positive lambda_max for a Chaotic verdict.
    pub chaos_threshold: f64,
    pub lyap_transient_periods: f64,
    pub lyap_average_periods: f64,
    pub integrator: IntegratorConfig,
}

impl Default for ClassifyConfig {
    fn default() -> Self {
        Self {
            n_transient: 200,
            n_samples: 128,
            n_max: 16,
            tol_abs: 1e-4,
            tol_rel: 1e-3,
            chaos_threshold: 0.01,
            lyap_transient_periods: 200.0,
            lyap_average_periods: 2000.0,
            integrator: IntegratorConfig::default(),
        }
    }
}

/// True when every lag-n pair in the window agrees within tol in both
/// coordinates. Requires at least one comparison pair.
fn accepts_period(window: &[(f64, f64)], n: usize, tol: f64) -> bool {
    window.len() > n
        && window
            .iter()
            .zip(&window[n..])
            .all(|(&(x0, y0), &(x1, y1))| (x1 - x0).abs() <= tol && (y1 - y0).abs() <= tol)
}

/// Smallest n <= n_max such that the last half of the series repeats with
/// period n, within tol_abs + tol_rel * (series max amplitude). None when no
/// period that small fits.
pub fn detect_period(
    series: &StroboSeries,
    n_max: u32,
    tol_abs: f64,
    tol_rel: f64,
) -> Result<Option<u32>> {
    if n_max < 1 || !(tol_abs >= 0.0) || !(tol_rel >= 0.0) {
        return Err(Error::InvalidConfig(format!(
            "need n_max >= 1 and nonnegative tolerances, got {n_max}, {tol_abs}, {tol_rel}"
        )));
    }
    let len = series.samples.len();
    let need = 2 * n_max as usize;
    if len < need {
        return Err(Error::InsufficientData { len, need });
    }
    let amp = series.samples.iter().fold(0.0f64, |m, &(x, y)| m.max(x.abs()).max(y.abs()));
    let tol = tol_abs + tol_rel * amp;
    let window = &series.samples[len - len / 2..];
    Ok((1..=n_max).find(|&n| accepts_period(window, n as usize, tol)))
}

/// Largest Lyapunov exponent: evolve one tangent vector, renormalize each
/// drive period, discard the transient, average the remaining log-growths.
pub fn lyapunov_max(
    s0: &State,
    p: &Params,
    t_transient: f64,
    t_average: f64,
    cfg: &IntegratorConfig,
) -> Result<LyapunovResult> {
    let period = p.drive_period();
    if !(t_transient >= 0.0) || !t_transient.is_finite() {
        return Err(Error::InvalidConfig(format!("bad t_transient {t_transient}")));
    }
    if !(t_average >= 100.0 * period) || !t_average.is_finite() {
        return Err(Error::InvalidConfig(format!(
            "t_average = {t_average} must span at least 100 drive periods ({})",
            100.0 * period
        )));
    }
    let n_skip = (t_transient / period - 1e-9).ceil().max(0.0) as usize;
    let n_avg = (t_average / period + 1e-9).floor() as usize;
    let duration = (n_skip + n_avg) as f64 * period;
    let (_, logs) = integrate_with_tangent(s0, [1.0, 0.0], p, duration, period, cfg)?;
    debug_assert_eq!(logs.len(), n_skip + n_avg);
    let averaged_time = n_avg as f64 * period;
    let lambda_max = logs[n_skip..].iter().sum::<f64>() / averaged_time;
    Ok(LyapunovResult { lambda_max, n_renorms: n_avg as u32, duration: averaged_time })
}

/// Run the stroboscopic and Lyapunov protocols from one initial state and
/// combine the evidence. Contradictory evidence yields Unresolved, never a
/// forced label.
pub fn classify(p: &Params, s0: &State, knobs: &ClassifyConfig) -> Result<Classification> {
    let series = integrate_strobe(s0, p, knobs.n_transient, knobs.n_samples, &knobs.integrator)?;
    let detected = detect_period(&series, knobs.n_max, knobs.tol_abs, knobs.tol_rel)?;
    let period = p.drive_period();
    let lyap = lyapunov_max(
        s0,
        p,
        knobs.lyap_transient_periods * period,
        knobs.lyap_average_periods * period,
        &knobs.integrator,
    )?;
    let label = match detected {
        Some(n) if lyap.lambda_max < 0.0 => Label::Periodic(n),
        None if lyap.lambda_max > knobs.chaos_threshold => Label::Chaotic,
        _ => Label::Unresolved,
    };
    Ok(Classification { label, lambda_max: lyap.lambda_max, detected_period: detected })
}

/// Amplitude-dependent frequency of the undriven, undamped, lambda-free
/// oscillator: Omega = omega0 / sqrt(1 + xi A^2).
pub fn ml_frequency(amplitude: f64, p: &Params) -> f64 {
    (p.omega0_sq() / (1.0 + p.xi() * amplitude * amplitude)).sqrt()
}

/// Exact orbit x(t) = A sin(Omega t), y(t) = A Omega cos(Omega t). Only xi
/// and omega0^2 of p are used; drive, damping and the quartic term do not
/// enter this limit.
pub fn ml_exact_solution(amplitude: f64, t: f64, p: &Params) -> (f64, f64) {
    let om = ml_frequency(amplitude, p);
    (amplitude * (om * t).sin(), amplitude * om * (om * t).cos())
}

/// First-order form of (1 + xi x^2) x'' - xi x x'^2 + omega0^2 x = 0.
pub(crate) fn ml_rhs(p: Params) -> impl Fn(f64, &[f64; 2]) -> [f64; 2] {
    move |_t, y| {
        let (x, v) = (y[0], y[1]);
        [v, (p.xi() * x * v * v - p.omega0_sq() * x) / (1.0 + p.xi() * x * x)]
    }
}

/// Max deviation between the adaptively integrated oscillator and
/// `ml_exact_solution`, sampled at every accepted step over n_periods of the
/// exact orbit.
pub fn ml_tracking_error(
    amplitude: f64,
    p: &Params,
    n_periods: u32,
    cfg: &IntegratorConfig,
) -> Result<f64> {
    let om = ml_frequency(amplitude, p);
    if !(om > 0.0) {
        return Err(Error::InvalidConfig(format!("degenerate oscillation frequency {om}")));
    }
    let t_end = n_periods as f64 * TAU / om;
    let (x0, y0) = ml_exact_solution(amplitude, 0.0, p);
    let mut st = Dopri5::new(ml_rhs(*p), 0.0, [x0, y0], cfg)?;
    let mut worst = 0.0f64;
    st.advance_to(t_end, |t, y| {
        let (xe, ye) = ml_exact_solution(amplitude, t, p);
        worst = worst.max((y[0] - xe).abs()).max((y[1] - ye).abs());
    })?;
    Ok(worst)
}
