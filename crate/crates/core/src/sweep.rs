//! Parameter sweeps over f or xi: bifurcation point clouds and Lyapunov
//! scans. FixedIC points are independent and run in parallel; results are
//! merged by index so output never depends on scheduling.

use crate::analysis::{lyapunov_max, Classification};
use crate::error::{Error, Result};
use crate::integrate::{strobe_core, IntegratorConfig, StroboSeries};
use crate::model::{Params, State};
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    Forcing,
    Xi,
}

impl SweepAxis {
    pub fn name(&self) -> &'static str {
        match self {
            SweepAxis::Forcing => "f",
            SweepAxis::Xi => "xi",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IcMode {
    /// Every point restarts from the configured initial state.
    FixedIc,
    /// Each point is seeded with the previous point's final state;
    /// strictly sequential.
    Continuation,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepConfig {
    pub axis: SweepAxis,
    pub start: f64,
    pub stop: f64,
    pub steps: u32,
    pub base: Params,
    pub s0: State,
    pub ic_mode: IcMode,
    pub n_transient: u32,
    pub n_samples: u32,
    pub integrator: IntegratorConfig,
}

impl SweepConfig {
    /// Figure-scale defaults for the given axis range.
    pub fn defaults(axis: SweepAxis, start: f64, stop: f64, base: Params) -> Self {
        Self {
            axis,
            start,
            stop,
            steps: 500,
            base,
            s0: State::new(0.1, 0.1, 0.0),
            ic_mode: IcMode::FixedIc,
            n_transient: 200,
            n_samples: 128,
            integrator: IntegratorConfig::for_drive(base.omega()),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.start < self.stop) || !self.start.is_finite() || !self.stop.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "need finite start < stop, got [{}, {}]",
                self.start, self.stop
            )));
        }
        if self.steps < 2 {
            return Err(Error::InvalidConfig(format!("need steps >= 2, got {}", self.steps)));
        }
        if self.axis == SweepAxis::Xi && self.start < 0.0 {
            return Err(Error::InvalidConfig(format!("xi axis must be nonnegative, got start {}", self.start)));
        }
        if self.n_samples < 1 {
            return Err(Error::InvalidConfig("need n_samples >= 1".into()));
        }
        if !self.s0.is_finite() {
            return Err(Error::InvalidConfig("initial state must be finite".into()));
        }
        self.integrator.validate()
    }

    /// The `steps` equally spaced axis values, endpoints included.
    pub fn axis_values(&self) -> Vec<f64> {
        let span = self.stop - self.start;
        let last = (self.steps - 1) as f64;
        (0..self.steps).map(|i| self.start + span * i as f64 / last).collect()
    }

    fn params_at(&self, v: f64) -> Result<Params> {
        match self.axis {
            SweepAxis::Forcing => self.base.with_f(v),
            SweepAxis::Xi => self.base.with_xi(v),
        }
    }
}

/// One sweep point: strobe samples, or an error message if the point failed.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub param: f64,
    pub samples: Vec<(f64, f64)>,
    pub classification: Option<Classification>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BifurcationData {
    pub config: SweepConfig,
    /// Ordered by axis value (ascending index), regardless of execution order.
    pub points: Vec<SweepPoint>,
}

impl BifurcationData {
    /// Successful data rows; steps * n_samples when no point failed.
    pub fn n_rows(&self) -> usize {
        self.points.iter().map(|p| p.samples.len()).sum()
    }

    /// View one point's samples as a strobe series (for period detection).
    pub fn series_at(&self, i: usize) -> Option<StroboSeries> {
        let point = self.points.get(i)?;
        if point.error.is_some() {
            return None;
        }
        let params = self.config.params_at(point.param).ok()?;
        Some(StroboSeries {
            params,
            samples: point.samples.clone(),
            n_transient: self.config.n_transient,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LyapunovRow {
    pub param: f64,
    pub lambda_max: Option<f64>,
    pub error: Option<String>,
}

/// Sweep parallelism: PDM_THREADS when set, else available parallelism.
pub fn parallelism() -> Result<usize> {
    match std::env::var("PDM_THREADS") {
        Err(std::env::VarError::NotPresent) => {
            Ok(std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1))
        }
        Err(std::env::VarError::NotUnicode(_)) => {
            Err(Error::InvalidConfig("PDM_THREADS is not valid unicode".into()))
        }
        Ok(s) => s
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&n| n >= 1)
            .ok_or_else(|| Error::InvalidConfig(format!("PDM_THREADS must be a positive integer, got {s:?}"))),
    }
}

fn pool(threads: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))
}

fn strobe_point(cfg: &SweepConfig, s0: &State, v: f64) -> (SweepPoint, Option<State>) {
    let run = cfg
        .params_at(v)
        .and_then(|p| strobe_core(s0, &p, cfg.n_transient, cfg.n_samples, &cfg.integrator));
    match run {
        Ok((series, _, end)) => (
            SweepPoint { param: v, samples: series.samples, classification: None, error: None },
            Some(end),
        ),
        Err(e) => (
            SweepPoint { param: v, samples: Vec::new(), classification: None, error: Some(e.to_string()) },
            None,
        ),
    }
}

/// Stroboscopic samples at each axis value. Per-point failures are recorded
/// on the point and the scan continues.
pub fn bifurcation_scan(cfg: &SweepConfig) -> Result<BifurcationData> {
    bifurcation_scan_threaded(cfg, parallelism()?)
}

pub fn bifurcation_scan_threaded(cfg: &SweepConfig, threads: usize) -> Result<BifurcationData> {
    cfg.validate()?;
    let values = cfg.axis_values();
    let points = match cfg.ic_mode {
        IcMode::FixedIc => pool(threads)?.install(|| {
            values.par_iter().map(|&v| strobe_point(cfg, &cfg.s0, v).0).collect::<Vec<_>>()
        }),
        IcMode::Continuation => {
            let mut points = Vec::with_capacity(values.len());
            let mut seed = cfg.s0;
            for &v in &values {
                let (point, end) = strobe_point(cfg, &seed, v);
                if let Some(end) = end {
                    // Carry (x, y); the drive phase restarts at z0, which the
                    // endpoint phase equals modulo 2 pi by construction.
                    seed = State::new(end.x, end.y, cfg.s0.z);
                }
                points.push(point);
            }
            points
        }
    };
    Ok(BifurcationData { config: *cfg, points })
}

fn lyapunov_point(cfg: &SweepConfig, average_periods: f64, v: f64) -> LyapunovRow {
    let run = cfg.params_at(v).and_then(|p| {
        let period = p.drive_period();
        lyapunov_max(
            &cfg.s0,
            &p,
            cfg.n_transient as f64 * period,
            average_periods * period,
            &cfg.integrator,
        )
    });
    match run {
        Ok(r) => LyapunovRow { param: v, lambda_max: Some(r.lambda_max), error: None },
        Err(e) => LyapunovRow { param: v, lambda_max: None, error: Some(e.to_string()) },
    }
}

/// One lambda_max per axis value, averaging over 2000 drive periods after a
/// transient of n_transient periods. Same ordering and failure-flagging
/// contract as bifurcation_scan. FixedIC protocol only: every point starts
/// from the configured state.
pub fn lyapunov_scan(cfg: &SweepConfig) -> Result<Vec<LyapunovRow>> {
    lyapunov_scan_with(cfg, 2000.0)
}

pub fn lyapunov_scan_with(cfg: &SweepConfig, average_periods: f64) -> Result<Vec<LyapunovRow>> {
    lyapunov_scan_threaded(cfg, average_periods, parallelism()?)
}

pub fn lyapunov_scan_threaded(
    cfg: &SweepConfig,
    average_periods: f64,
    threads: usize,
) -> Result<Vec<LyapunovRow>> {
    cfg.validate()?;
    let values = cfg.axis_values();
    Ok(pool(threads)?.install(|| {
        values.par_iter().map(|&v| lyapunov_point(cfg, average_periods, v)).collect()
    }))
}
