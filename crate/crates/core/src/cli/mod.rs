//! Command-line front end: simulate, phase, bifurcation, lyapunov, classify,
//! verify. Every emitted file embeds a manifest sufficient to re-run it
//! bit-exactly. Exit codes: 0 ok, 1 usage, 2 numerical/I-O, 3 verification.

pub mod csv;
pub mod manifest;
pub mod svg;

use crate::analysis::{self, ClassifyConfig};
use crate::error::{Error, Result};
use crate::integrate::{integrate_adaptive, IntegratorConfig};
use crate::model::{self, Params, State};
use crate::sweep::{self, IcMode, SweepAxis, SweepConfig};
use clap::{Args, Parser, Subcommand, ValueEnum};
use csv::Dataset;
use manifest::{fmt_f64, RunManifest};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

#[derive(Parser, Debug)]
#[command(
    name = "pdm",
    version,
    about = "Driven damped Duffing oscillator with position-dependent mass: \
             simulation, bifurcation diagrams, Lyapunov exponents"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Integrate one trajectory and emit t,x,y,z rows
    Simulate(SimulateArgs),
    /// Post-transient phase portrait (x, y), optionally rendered to SVG
    Phase(PhaseArgs),
    /// Stroboscopic sweep over f or xi: the bifurcation point cloud
    Bifurcation(BifurcationArgs),
    /// Largest-Lyapunov-exponent scan over f or xi
    Lyapunov(LyapunovArgs),
    /// Classify the attractor at one parameter point
    Classify(ClassifyArgs),
    /// Run the built-in oracle suite and print a pass/fail table
    Verify,
}

#[derive(Args, Debug)]
struct ParamFlags {
    /// Mass-gradient index (>= 0); 0 recovers constant mass
    #[arg(long, default_value_t = 0.0)]
    xi: f64,
    /// Drive amplitude
    #[arg(long, default_value_t = 5.0)]
    f: f64,
    /// Squared natural frequency
    #[arg(long, default_value_t = 0.25)]
    omega0_sq: f64,
    /// Cubic stiffness
    #[arg(long, default_value_t = 1.0)]
    lambda: f64,
    /// Damping coefficient
    #[arg(long, default_value_t = 0.2)]
    alpha: f64,
    /// Drive frequency
    #[arg(long, default_value_t = 1.0)]
    omega: f64,
}

impl ParamFlags {
    fn params(&self) -> Result<Params> {
        Params::new(self.xi, self.omega0_sq, self.lambda, self.alpha, self.f, self.omega)
    }

    fn fragment(&self, p: &Params) -> String {
        format!(
            "--xi {} --f {} --omega0-sq {} --lambda {} --alpha {} --omega {}",
            fmt_f64(p.xi()),
            fmt_f64(p.f()),
            fmt_f64(p.omega0_sq()),
            fmt_f64(p.lambda()),
            fmt_f64(p.alpha()),
            fmt_f64(p.omega())
        )
    }

    fn entry(&self, p: &Params) -> String {
        format!(
            "xi={} f={} omega0_sq={} lambda={} alpha={} omega={}",
            fmt_f64(p.xi()),
            fmt_f64(p.f()),
            fmt_f64(p.omega0_sq()),
            fmt_f64(p.lambda()),
            fmt_f64(p.alpha()),
            fmt_f64(p.omega())
        )
    }
}

#[derive(Args, Debug)]
struct IcFlags {
    /// Initial position
    #[arg(long, default_value_t = 0.1)]
    x0: f64,
    /// Initial velocity
    #[arg(long, default_value_t = 0.1)]
    y0: f64,
    /// Initial drive phase
    #[arg(long, default_value_t = 0.0)]
    z0: f64,
}

impl IcFlags {
    fn state(&self) -> Result<State> {
        let s = State::new(self.x0, self.y0, self.z0);
        if s.is_finite() {
            Ok(s)
        } else {
            Err(Error::InvalidConfig("initial state must be finite".into()))
        }
    }

    fn fragment(&self) -> String {
        format!("--x0 {} --y0 {} --z0 {}", fmt_f64(self.x0), fmt_f64(self.y0), fmt_f64(self.z0))
    }

    fn entry(&self) -> String {
        format!("x0={} y0={} z0={}", fmt_f64(self.x0), fmt_f64(self.y0), fmt_f64(self.z0))
    }
}

#[derive(Args, Debug)]
struct IntegratorFlags {
    /// Relative local-error tolerance
    #[arg(long, default_value_t = 1e-9)]
    rel_tol: f64,
    /// Absolute local-error tolerance
    #[arg(long, default_value_t = 1e-9)]
    abs_tol: f64,
    /// Initial step size
    #[arg(long, default_value_t = 1e-3)]
    h_init: f64,
    /// Maximum step size [default: 2*pi / (20*omega)]
    #[arg(long)]
    h_max: Option<f64>,
    /// Step-attempt budget per integration
    #[arg(long, default_value_t = 100_000_000)]
    max_steps: u64,
}

impl IntegratorFlags {
    fn config(&self, omega: f64) -> Result<IntegratorConfig> {
        let mut c = IntegratorConfig::for_drive(omega);
        c.rel_tol = self.rel_tol;
        c.abs_tol = self.abs_tol;
        c.h_init = self.h_init;
        if let Some(h) = self.h_max {
            c.h_max = h;
        }
        c.max_steps = self.max_steps;
        c.validate()?;
        Ok(c)
    }

    fn fragment(c: &IntegratorConfig) -> String {
        format!(
            "--rel-tol {} --abs-tol {} --h-init {} --h-max {} --max-steps {}",
            fmt_f64(c.rel_tol),
            fmt_f64(c.abs_tol),
            fmt_f64(c.h_init),
            fmt_f64(c.h_max),
            c.max_steps
        )
    }

    fn entry(c: &IntegratorConfig) -> String {
        format!(
            "rel_tol={} abs_tol={} h_init={} h_max={} max_steps={}",
            fmt_f64(c.rel_tol),
            fmt_f64(c.abs_tol),
            fmt_f64(c.h_init),
            fmt_f64(c.h_max),
            c.max_steps
        )
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq)]
enum AxisArg {
    F,
    Xi,
}

impl AxisArg {
    fn to_axis(self) -> SweepAxis {
        match self {
            AxisArg::F => SweepAxis::Forcing,
            AxisArg::Xi => SweepAxis::Xi,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq)]
enum IcModeArg {
    Fixed,
    Continuation,
}

impl IcModeArg {
    fn to_mode(self) -> IcMode {
        match self {
            IcModeArg::Fixed => IcMode::FixedIc,
            IcModeArg::Continuation => IcMode::Continuation,
        }
    }

    fn name(self) -> &'static str {
        match self {
            IcModeArg::Fixed => "fixed",
            IcModeArg::Continuation => "continuation",
        }
    }
}

#[derive(Args, Debug)]
struct SimulateArgs {
    #[command(flatten)]
    params: ParamFlags,
    #[command(flatten)]
    ic: IcFlags,
    #[command(flatten)]
    integ: IntegratorFlags,
    /// Integration span in time units
    #[arg(long, default_value_t = 100.0)]
    duration: f64,
    /// Output CSV path; stdout when omitted
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct PhaseArgs {
    #[command(flatten)]
    params: ParamFlags,
    #[command(flatten)]
    ic: IcFlags,
    #[command(flatten)]
    integ: IntegratorFlags,
    /// Discarded transient, in drive periods
    #[arg(long, default_value_t = 200)]
    transient: u32,
    /// Recorded portrait length, in drive periods
    #[arg(long, default_value_t = 5.0)]
    periods: f64,
    /// Output CSV path; stdout when omitted
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Also render the portrait to this SVG path
    #[arg(long)]
    svg: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct BifurcationArgs {
    #[command(flatten)]
    params: ParamFlags,
    #[command(flatten)]
    ic: IcFlags,
    #[command(flatten)]
    integ: IntegratorFlags,
    /// Swept parameter
    #[arg(long, value_enum)]
    axis: AxisArg,
    #[arg(long)]
    start: f64,
    #[arg(long)]
    stop: f64,
    /// Number of sweep points
    #[arg(long, default_value_t = 500)]
    steps: u32,
    /// Seeding protocol for successive points
    #[arg(long, value_enum, default_value_t = IcModeArg::Fixed)]
    ic_mode: IcModeArg,
    /// Discarded transient per point, in drive periods
    #[arg(long, default_value_t = 200)]
    transient: u32,
    /// Stroboscopic samples per point
    #[arg(long, default_value_t = 128)]
    samples: u32,
    /// Output CSV path; stdout when omitted
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Also render (param, x) to this SVG path
    #[arg(long)]
    svg: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct LyapunovArgs {
    #[command(flatten)]
    params: ParamFlags,
    #[command(flatten)]
    ic: IcFlags,
    #[command(flatten)]
    integ: IntegratorFlags,
    /// Swept parameter
    #[arg(long, value_enum)]
    axis: AxisArg,
    #[arg(long)]
    start: f64,
    #[arg(long)]
    stop: f64,
    /// Number of sweep points
    #[arg(long, default_value_t = 500)]
    steps: u32,
    /// Discarded transient per point, in drive periods
    #[arg(long, default_value_t = 200)]
    transient: u32,
    /// Averaging span per point, in drive periods (>= 100)
    #[arg(long, default_value_t = 2000.0)]
    average: f64,
    /// Output CSV path; stdout when omitted
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ClassifyArgs {
    #[command(flatten)]
    params: ParamFlags,
    #[command(flatten)]
    ic: IcFlags,
    #[command(flatten)]
    integ: IntegratorFlags,
    /// Discarded transient, in drive periods
    #[arg(long, default_value_t = 200)]
    transient: u32,
    /// Stroboscopic samples collected
    #[arg(long, default_value_t = 128)]
    samples: u32,
    /// Largest period tested
    #[arg(long, default_value_t = 16)]
    n_max: u32,
    /// Absolute period-match tolerance
    #[arg(long, default_value_t = 1e-4)]
    tol_abs: f64,
    /// Amplitude-relative period-match tolerance
    #[arg(long, default_value_t = 1e-3)]
    tol_rel: f64,
    /// Minimum positive lambda_max for a Chaotic verdict
    #[arg(long, default_value_t = 0.01)]
    chaos_threshold: f64,
    /// Lyapunov averaging span, in drive periods (>= 100)
    #[arg(long, default_value_t = 2000.0)]
    average: f64,
}

/// Parse argv and execute. Returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let code =
                if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) { 0 } else { 1 };
            let _ = e.print();
            return code;
        }
    };
    let result = match cli.cmd {
        Cmd::Verify => return cmd_verify(),
        Cmd::Simulate(a) => cmd_simulate(a),
        Cmd::Phase(a) => cmd_phase(a),
        Cmd::Bifurcation(a) => cmd_bifurcation(a),
        Cmd::Lyapunov(a) => cmd_lyapunov(a),
        Cmd::Classify(a) => cmd_classify(a),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn write_dataset(d: &Dataset, m: &RunManifest, path: Option<&Path>) -> Result<()> {
    match path {
        Some(p) => {
            let file = std::fs::File::create(p)?;
            let mut w = std::io::BufWriter::new(file);
            csv::write_csv(d, m, &mut w)?;
            w.flush()?;
        }
        None => {
            let stdout = std::io::stdout();
            csv::write_csv(d, m, &mut stdout.lock())?;
        }
    }
    Ok(())
}

fn write_svg(points: &[(f64, f64)], axes: &svg::AxesSpec, m: &RunManifest, path: &Path) -> Result<()> {
    std::fs::write(path, svg::render_svg(points, axes, m)?)?;
    Ok(())
}

fn report_wall(m: &RunManifest) {
    if let Some(w) = m.wall_secs {
        eprintln!("# wall_secs: {w:.3}");
    }
}

fn cmd_simulate(a: SimulateArgs) -> Result<()> {
    let p = a.params.params()?;
    let s0 = a.ic.state()?;
    let cfg = a.integ.config(p.omega())?;
    if !(a.duration >= 0.0) || !a.duration.is_finite() {
        return Err(Error::InvalidConfig(format!("bad duration {}", a.duration)));
    }
    let started = Instant::now();
    let tr = integrate_adaptive(&s0, 0.0, a.duration, &p, &cfg)?;
    let rows: Vec<_> = tr.samples.iter().map(|&(t, s)| (t, s.x, s.y, s.z)).collect();

    let mut m = RunManifest::new(format!(
        "pdm simulate {} {} {} --duration {}",
        a.params.fragment(&p),
        a.ic.fragment(),
        IntegratorFlags::fragment(&cfg),
        fmt_f64(a.duration)
    ));
    m.push("params", a.params.entry(&p));
    m.push("ic", a.ic.entry());
    m.push("integrator", IntegratorFlags::entry(&cfg));
    m.push("run", format!("duration={} n_steps={} n_rejected={}", fmt_f64(a.duration), tr.n_steps, tr.n_rejected));
    m.wall_secs = Some(started.elapsed().as_secs_f64());

    write_dataset(&Dataset::Trajectory(rows), &m, a.output.as_deref())?;
    report_wall(&m);
    Ok(())
}

fn cmd_phase(a: PhaseArgs) -> Result<()> {
    let p = a.params.params()?;
    let s0 = a.ic.state()?;
    let cfg = a.integ.config(p.omega())?;
    if !(a.periods > 0.0) || !a.periods.is_finite() {
        return Err(Error::InvalidConfig(format!("bad periods {}", a.periods)));
    }
    let started = Instant::now();
    let period = p.drive_period();
    let t_warm = a.transient as f64 * period;
    let warm = integrate_adaptive(&s0, 0.0, t_warm, &p, &cfg)?.final_state();
    let tr = integrate_adaptive(&warm, t_warm, t_warm + a.periods * period, &p, &cfg)?;
    let pts: Vec<(f64, f64)> = tr.samples.iter().map(|&(_, s)| (s.x, s.y)).collect();

    let mut m = RunManifest::new(format!(
        "pdm phase {} {} {} --transient {} --periods {}",
        a.params.fragment(&p),
        a.ic.fragment(),
        IntegratorFlags::fragment(&cfg),
        a.transient,
        fmt_f64(a.periods)
    ));
    m.push("params", a.params.entry(&p));
    m.push("ic", a.ic.entry());
    m.push("integrator", IntegratorFlags::entry(&cfg));
    m.push("run", format!("transient={} periods={}", a.transient, fmt_f64(a.periods)));
    m.wall_secs = Some(started.elapsed().as_secs_f64());

    write_dataset(&Dataset::Phase(pts.clone()), &m, a.output.as_deref())?;
    if let Some(path) = &a.svg {
        let title = format!("phase portrait: f={}, xi={}", p.f(), p.xi());
        write_svg(&pts, &svg::AxesSpec::new("x", "y", &title), &m, path)?;
    }
    report_wall(&m);
    Ok(())
}

fn sweep_config(
    axis: SweepAxis,
    start: f64,
    stop: f64,
    steps: u32,
    base: Params,
    s0: State,
    ic_mode: IcMode,
    transient: u32,
    samples: u32,
    integrator: IntegratorConfig,
) -> SweepConfig {
    SweepConfig {
        axis,
        start,
        stop,
        steps,
        base,
        s0,
        ic_mode,
        n_transient: transient,
        n_samples: samples,
        integrator,
    }
}

fn cmd_bifurcation(a: BifurcationArgs) -> Result<()> {
    let p = a.params.params()?;
    let s0 = a.ic.state()?;
    let cfg = a.integ.config(p.omega())?;
    let sc = sweep_config(
        a.axis.to_axis(),
        a.start,
        a.stop,
        a.steps,
        p,
        s0,
        a.ic_mode.to_mode(),
        a.transient,
        a.samples,
        cfg,
    );
    let started = Instant::now();
    let data = sweep::bifurcation_scan(&sc)?;

    let mut rows = Vec::with_capacity(data.n_rows());
    let mut failures = Vec::new();
    for pt in &data.points {
        if let Some(e) = &pt.error {
            failures.push(format!("param={} {e}", fmt_f64(pt.param)));
        }
        for (k, &(x, y)) in pt.samples.iter().enumerate() {
            rows.push((pt.param, k as u32, x, y));
        }
    }
    let svg_pts: Vec<(f64, f64)> = rows.iter().map(|&(v, _, x, _)| (v, x)).collect();

    let mut m = RunManifest::new(format!(
        "pdm bifurcation {} {} {} --axis {} --start {} --stop {} --steps {} --ic-mode {} --transient {} --samples {}",
        a.params.fragment(&p),
        a.ic.fragment(),
        IntegratorFlags::fragment(&cfg),
        sc.axis.name(),
        fmt_f64(a.start),
        fmt_f64(a.stop),
        a.steps,
        a.ic_mode.name(),
        a.transient,
        a.samples
    ));
    m.push("params", a.params.entry(&p));
    m.push("ic", a.ic.entry());
    m.push("integrator", IntegratorFlags::entry(&cfg));
    m.push(
        "sweep",
        format!(
            "axis={} start={} stop={} steps={} ic_mode={} transient={} samples={}",
            sc.axis.name(),
            fmt_f64(a.start),
            fmt_f64(a.stop),
            a.steps,
            a.ic_mode.name(),
            a.transient,
            a.samples
        ),
    );
    m.wall_secs = Some(started.elapsed().as_secs_f64());

    write_dataset(&Dataset::Bifurcation { rows, failures }, &m, a.output.as_deref())?;
    if let Some(path) = &a.svg {
        let fixed = match sc.axis {
            SweepAxis::Forcing => format!("xi={}", p.xi()),
            SweepAxis::Xi => format!("f={}", p.f()),
        };
        let title = format!("bifurcation diagram: x vs {} ({fixed})", sc.axis.name());
        write_svg(&svg_pts, &svg::AxesSpec::new(sc.axis.name(), "x", &title), &m, path)?;
    }
    report_wall(&m);
    Ok(())
}

fn cmd_lyapunov(a: LyapunovArgs) -> Result<()> {
    let p = a.params.params()?;
    let s0 = a.ic.state()?;
    let cfg = a.integ.config(p.omega())?;
    let sc = sweep_config(
        a.axis.to_axis(),
        a.start,
        a.stop,
        a.steps,
        p,
        s0,
        IcMode::FixedIc,
        a.transient,
        1,
        cfg,
    );
    let started = Instant::now();
    let scan = sweep::lyapunov_scan_with(&sc, a.average)?;

    let mut rows = Vec::with_capacity(scan.len());
    let mut failures = Vec::new();
    for row in &scan {
        match (row.lambda_max, &row.error) {
            (Some(l), _) => rows.push((row.param, l)),
            (None, Some(e)) => failures.push(format!("param={} {e}", fmt_f64(row.param))),
            (None, None) => unreachable!("sweep rows carry a value or an error"),
        }
    }

    let mut m = RunManifest::new(format!(
        "pdm lyapunov {} {} {} --axis {} --start {} --stop {} --steps {} --transient {} --average {}",
        a.params.fragment(&p),
        a.ic.fragment(),
        IntegratorFlags::fragment(&cfg),
        sc.axis.name(),
        fmt_f64(a.start),
        fmt_f64(a.stop),
        a.steps,
        a.transient,
        fmt_f64(a.average)
    ));
    m.push("params", a.params.entry(&p));
    m.push("ic", a.ic.entry());
    m.push("integrator", IntegratorFlags::entry(&cfg));
    m.push(
        "sweep",
        format!(
            "axis={} start={} stop={} steps={} transient={} average_periods={}",
            sc.axis.name(),
            fmt_f64(a.start),
            fmt_f64(a.stop),
            a.steps,
            a.transient,
            fmt_f64(a.average)
        ),
    );
    m.wall_secs = Some(started.elapsed().as_secs_f64());

    write_dataset(&Dataset::Lyapunov { rows, failures }, &m, a.output.as_deref())?;
    report_wall(&m);
    Ok(())
}

fn cmd_classify(a: ClassifyArgs) -> Result<()> {
    let p = a.params.params()?;
    let s0 = a.ic.state()?;
    let cfg = a.integ.config(p.omega())?;
    let knobs = ClassifyConfig {
        n_transient: a.transient,
        n_samples: a.samples,
        n_max: a.n_max,
        tol_abs: a.tol_abs,
        tol_rel: a.tol_rel,
        chaos_threshold: a.chaos_threshold,
        lyap_transient_periods: a.transient as f64,
        lyap_average_periods: a.average,
        integrator: cfg,
    };
    let started = Instant::now();
    let c = analysis::classify(&p, &s0, &knobs)?;
    println!("{}", c.label);
    println!("# lambda_max = {:.6}", c.lambda_max);
    match c.detected_period {
        Some(n) => println!("# detected_period = {n}"),
        None => println!("# detected_period = none"),
    }
    eprintln!("# wall_secs: {:.3}", started.elapsed().as_secs_f64());
    Ok(())
}

struct Check {
    name: &'static str,
    pass: bool,
    detail: String,
}

fn check_ml_oracle() -> Check {
    let p = Params::new(1.0, 0.25, 0.0, 0.0, 0.0, 1.0).expect("valid oracle params");
    let cfg = IntegratorConfig::default().with_tol(1e-10);
    match analysis::ml_tracking_error(1.0, &p, 10, &cfg) {
        Ok(err) => Check {
            name: "ml-exact-solution",
            pass: err < 1e-6,
            detail: format!("max_err={err:.3e} (limit 1e-6)"),
        },
        Err(e) => Check { name: "ml-exact-solution", pass: false, detail: format!("error: {e}") },
    }
}

fn check_jacobian_fd() -> Check {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x4a43_4f42);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let p = Params::new(
            rng.random_range(0.0..2.0),
            rng.random_range(0.05..1.0),
            rng.random_range(-1.0..2.0),
            rng.random_range(0.0..0.5),
            rng.random_range(0.0..8.0),
            rng.random_range(0.5..2.0),
        )
        .expect("sampled params are valid");
        let s = State::new(
            rng.random_range(-2.0..2.0),
            rng.random_range(-2.0..2.0),
            rng.random_range(0.0..std::f64::consts::TAU),
        );
        let j = model::jacobian_xy(&s, &p);
        let fd = model::fd_jacobian_xy(&s, &p, 1e-6);
        let scale = j.max_abs().max(1.0);
        for r in 0..2 {
            for c in 0..2 {
                worst = worst.max((j.0[r][c] - fd.0[r][c]).abs() / scale);
            }
        }
    }
    Check {
        name: "jacobian-vs-fd",
        pass: worst < 1e-5,
        detail: format!("max_rel_err={worst:.3e} on 100 states (limit 1e-5)"),
    }
}

fn check_energy_balance() -> Check {
    use std::f64::consts::TAU;
    let cfg = IntegratorConfig::default().with_tol(1e-10);
    let free = Params::new(0.8, 0.25, 1.0, 0.0, 0.0, 1.0).expect("valid params");
    let driven = Params::default().with_xi(0.5).expect("valid params");
    let a = crate::integrate::energy_balance(&State::new(1.0, 0.5, 0.0), 0.0, 50.0 * TAU, &free, &cfg);
    let b = crate::integrate::energy_balance(&State::new(0.1, 0.1, 0.0), 0.0, 100.0 * TAU, &driven, &cfg);
    match (a, b) {
        (Ok(a), Ok(b)) => {
            let ra = a.residual / a.e_start.abs().max(1.0);
            let rb = b.residual / b.e_end.abs().max(1.0);
            Check {
                name: "energy-balance",
                pass: ra < 1e-6 && rb < 1e-5,
                detail: format!("free_residual={ra:.3e} (limit 1e-6), driven_residual={rb:.3e} (limit 1e-5)"),
            }
        }
        (a, b) => Check {
            name: "energy-balance",
            pass: false,
            detail: format!("error: {:?} / {:?}", a.err(), b.err()),
        },
    }
}

fn check_linear_lyapunov() -> Check {
    use std::f64::consts::TAU;
    let p = Params::new(0.0, 0.25, 0.0, 0.2, 0.0, 1.0).expect("valid params");
    let cfg = IntegratorConfig::default();
    match analysis::lyapunov_max(&State::new(1.0, 0.0, 0.0), &p, 200.0 * TAU, 1000.0 * TAU, &cfg) {
        Ok(r) => Check {
            name: "linear-lyapunov",
            pass: (r.lambda_max + 0.1).abs() < 0.005,
            detail: format!("lambda_max={:.4} (expected -0.100 +- 0.005)", r.lambda_max),
        },
        Err(e) => Check { name: "linear-lyapunov", pass: false, detail: format!("error: {e}") },
    }
}

fn cmd_verify() -> i32 {
    let checks = [check_ml_oracle(), check_jacobian_fd(), check_energy_balance(), check_linear_lyapunov()];
    let mut all = true;
    for c in &checks {
        let status = if c.pass { "PASS" } else { "FAIL" };
        println!("{status}  {:<20} {}", c.name, c.detail);
        all &= c.pass;
    }
    if all {
        0
    } else {
        3
    }
}
