//! Acceptance gate. One test per criterion; each prints a single verdict
//! line (visible with --nocapture, or on failure) and then asserts it.
//! Tolerances are pinned as consts below.

use pdm_duffing::analysis::{self, ClassifyConfig, Label};
use pdm_duffing::cli::csv::{csv_to_string, Dataset};
use pdm_duffing::cli::manifest::RunManifest;
use pdm_duffing::cli::svg::{render_svg, AxesSpec};
use pdm_duffing::integrate::energy_balance;
use pdm_duffing::sweep::{bifurcation_scan, bifurcation_scan_threaded, SweepAxis, SweepConfig};
use pdm_duffing::{model, IntegratorConfig, Params, State};
use std::f64::consts::TAU;
use std::time::Instant;

const ML_TRACKING_LIMIT: f64 = 1e-6;
const ENERGY_FREE_LIMIT: f64 = 1e-6;
const ENERGY_DRIVEN_REL_LIMIT: f64 = 1e-5;
const JACOBIAN_REL_LIMIT: f64 = 1e-5;
const LINEAR_LYAPUNOV: f64 = -0.100;
const LINEAR_LYAPUNOV_TOL: f64 = 0.005;
const CHAOS_THRESHOLD: f64 = 0.01;
const P1_BAND: (f64, f64) = (0.5, 1.5);
const DOUBLING_RANGE: (f64, f64) = (2.0, 4.5);
const CHAOS_WINDOW: (f64, f64) = (5.0, 7.5);
const P3_RANGE: (f64, f64) = (8.2, 9.5);
const WINDOW_SLACK: f64 = 0.5;

fn verdict(criterion: u32, name: &str, started: Instant, ok: bool, detail: &str) {
    let status = if ok { "PASS" } else { "FAIL" };
    println!(
        "ACCEPT {criterion} {status} [{:6.2} s] {name}: {detail}",
        started.elapsed().as_secs_f64()
    );
    assert!(ok, "criterion {criterion} ({name}): {detail}");
}

fn within(started: Instant, secs: f64) -> bool {
    started.elapsed().as_secs_f64() < secs
}

#[test]
fn criterion_1_exact_solution_regression() {
    let started = Instant::now();
    let p = Params::new(1.0, 0.25, 0.0, 0.0, 0.0, 1.0).unwrap();
    let cfg = IntegratorConfig::default().with_tol(1e-10);
    let err = analysis::ml_tracking_error(1.0, &p, 10, &cfg).unwrap();
    let ok = err < ML_TRACKING_LIMIT && within(started, 1.0);
    verdict(1, "exact-solution tracking over 10 periods", started, ok, &format!("max_err={err:.3e} (limit {ML_TRACKING_LIMIT:.0e})"));
}

#[test]
fn criterion_2_energy_theorems() {
    let started = Instant::now();
    let cfg = IntegratorConfig::default().with_tol(1e-10);

    let free = Params::new(0.8, 0.25, 1.0, 0.0, 0.0, 1.0).unwrap();
    let a = energy_balance(&State::new(1.0, 0.5, 0.0), 0.0, 50.0 * TAU, &free, &cfg).unwrap();

    let driven = Params::default().with_xi(0.5).unwrap();
    let b = energy_balance(&State::new(0.1, 0.1, 0.0), 0.0, 100.0 * TAU, &driven, &cfg).unwrap();
    let rel_b = b.residual / b.e_end.abs().max(1.0);

    let ok = a.residual < ENERGY_FREE_LIMIT && rel_b < ENERGY_DRIVEN_REL_LIMIT && within(started, 5.0);
    verdict(
        2,
        "energy drift vs integrated power",
        started,
        ok,
        &format!(
            "thrust_residual={:.3e} (limit {ENERGY_FREE_LIMIT:.0e}), driven_rel_residual={rel_b:.3e} (limit {ENERGY_DRIVEN_REL_LIMIT:.0e})",
            a.residual
        ),
    );
}

#[test]
fn criterion_3_jacobian_vs_finite_difference() {
    use rand::{Rng, SeedableRng};
    let started = Instant::now();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x5044_4d31);
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
        .unwrap();
        let s = State::new(
            rng.random_range(-2.0..2.0),
            rng.random_range(-2.0..2.0),
            rng.random_range(0.0..TAU),
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
    let ok = worst < JACOBIAN_REL_LIMIT && within(started, 1.0);
    verdict(3, "analytic Jacobian vs central differences", started, ok, &format!("max_rel_err={worst:.3e} on 100 random states (limit {JACOBIAN_REL_LIMIT:.0e})"));
}

#[test]
fn criterion_4_linear_lyapunov_oracle() {
    let started = Instant::now();
    let p = Params::new(0.0, 0.25, 0.0, 0.2, 0.0, 1.0).unwrap();
    let cfg = IntegratorConfig::default();
    let r = analysis::lyapunov_max(&State::new(1.0, 0.0, 0.0), &p, 200.0 * TAU, 2000.0 * TAU, &cfg).unwrap();
    let ok = (r.lambda_max - LINEAR_LYAPUNOV).abs() < LINEAR_LYAPUNOV_TOL && within(started, 10.0);
    verdict(4, "linear-case largest Lyapunov exponent", started, ok, &format!("lambda_max={:.4} (expected {LINEAR_LYAPUNOV} +- {LINEAR_LYAPUNOV_TOL})", r.lambda_max));
}

#[test]
fn criterion_5_figure_one_classifications() {
    let started = Instant::now();
    let knobs = ClassifyConfig::default();
    let s0 = State::new(0.1, 0.1, 0.0);
    let expected: [(f64, fn(&Label) -> bool, &str); 4] = [
        (0.0, |l| *l == Label::Periodic(1), "Periodic(1)"),
        (0.2, |l| *l == Label::Periodic(4), "Periodic(4)"),
        (0.4, |l| *l == Label::Chaotic, "Chaotic"),
        (0.6, |l| *l == Label::Chaotic, "Chaotic"),
    ];
    let mut ok = true;
    let mut parts = Vec::new();
    for (xi, accepts, want) in expected {
        let p = Params::default().with_xi(xi).unwrap();
        let c = analysis::classify(&p, &s0, &knobs).unwrap();
        let sub = accepts(&c.label);
        ok &= sub;
        parts.push(format!(
            "xi={xi}: got {} (lambda={:+.4}), want {want} [{}]",
            c.label,
            c.lambda_max,
            if sub { "ok" } else { "MISMATCH" }
        ));
    }
    ok &= within(started, 120.0);
    verdict(5, "f=5 attractor sequence vs reported labels", started, ok, &parts.join("; "));
}

#[test]
fn criterion_6_forcing_sweep_structure() {
    let started = Instant::now();
    let base = Params::default().with_xi(0.5).unwrap();
    let cfg = SweepConfig::defaults(SweepAxis::Forcing, 0.1, 10.0, base);
    let data = bifurcation_scan(&cfg).unwrap();

    // Period per point from the recorded samples.
    let mut period_at = Vec::with_capacity(data.points.len());
    for i in 0..data.points.len() {
        let series = data.series_at(i).expect("no sweep point may fail");
        let n = analysis::detect_period(&series, 16, 1e-4, 1e-3).unwrap();
        period_at.push((data.points[i].param, n));
    }

    // (a) Period-1 throughout the low-forcing band, confirmed by full
    // classification at three representative points.
    let band: Vec<_> = period_at.iter().filter(|(f, _)| (P1_BAND.0..=P1_BAND.1).contains(f)).collect();
    let a_detect = !band.is_empty() && band.iter().all(|(_, n)| *n == Some(1));
    let knobs = ClassifyConfig::default();
    let a_classify = [P1_BAND.0, 1.0, P1_BAND.1].iter().all(|&f| {
        let p = base.with_f(f).unwrap();
        analysis::classify(&p, &cfg.s0, &knobs).unwrap().label == Label::Periodic(1)
    });

    // (b) First detected period >= 2 along ascending f.
    let first_doubling = period_at.iter().find(|(_, n)| matches!(n, Some(m) if *m >= 2)).map(|&(f, _)| f);
    let b = first_doubling.is_some_and(|f| f > DOUBLING_RANGE.0 && f < DOUBLING_RANGE.1);

    // (c) A chaotic point inside the window: no period and lambda_max above
    // threshold at one of the aperiodic candidates.
    let candidates: Vec<f64> = period_at
        .iter()
        .filter(|(f, n)| (CHAOS_WINDOW.0..=CHAOS_WINDOW.1).contains(f) && n.is_none())
        .map(|&(f, _)| f)
        .collect();
    let mut chaotic_at = None;
    for &f in candidates.iter().take(3) {
        let p = base.with_f(f).unwrap();
        let r = analysis::lyapunov_max(&cfg.s0, &p, 200.0 * TAU, 800.0 * TAU, &cfg.integrator).unwrap();
        if r.lambda_max > CHAOS_THRESHOLD {
            chaotic_at = Some((f, r.lambda_max));
            break;
        }
    }
    let c = chaotic_at.is_some();

    // (d) A period-3 point near the high-forcing range (stated window plus
    // slack for the unknown IC protocol).
    let p3: Vec<f64> = period_at.iter().filter(|(_, n)| *n == Some(3)).map(|&(f, _)| f).collect();
    let d = p3
        .iter()
        .any(|&f| f >= P3_RANGE.0 - WINDOW_SLACK && f <= P3_RANGE.1 + WINDOW_SLACK);

    let ok = a_detect && a_classify && b && c && d && within(started, 900.0);
    let p3_span = match (p3.first(), p3.last()) {
        (Some(lo), Some(hi)) => format!("[{lo:.2}, {hi:.2}]"),
        _ => "none".into(),
    };
    verdict(
        6,
        "xi=0.5 forcing sweep (500 points)",
        started,
        ok,
        &format!(
            "band period-1 {}/{} [{}]; first doubling at {:?} in ({}, {}) [{}]; chaotic point {:?} [{}]; period-3 seen at {} vs wanted [{}, {}] +- {WINDOW_SLACK} [{}]",
            band.iter().filter(|(_, n)| *n == Some(1)).count(),
            band.len(),
            if a_detect && a_classify { "ok" } else { "MISMATCH" },
            first_doubling,
            DOUBLING_RANGE.0,
            DOUBLING_RANGE.1,
            if b { "ok" } else { "MISMATCH" },
            chaotic_at,
            if c { "ok" } else { "MISMATCH" },
            p3_span,
            P3_RANGE.0,
            P3_RANGE.1,
            if d { "ok" } else { "MISMATCH" }
        ),
    );
}

#[test]
fn criterion_7_mass_gradient_spot_checks() {
    let started = Instant::now();
    let s0 = State::new(0.1, 0.1, 0.0);
    let cfg = IntegratorConfig::default();

    // f=5: regular again somewhere in xi [1.8, 2.0] ...
    let regular = [1.8, 1.9, 2.0].iter().any(|&xi| {
        let p = Params::default().with_xi(xi).unwrap();
        analysis::lyapunov_max(&s0, &p, 200.0 * TAU, 1000.0 * TAU, &cfg).unwrap().lambda_max < 0.0
    });
    // ... with a chaotic window at smaller xi.
    let window = [1.2, 1.4, 1.6].iter().any(|&xi| {
        let p = Params::default().with_xi(xi).unwrap();
        analysis::lyapunov_max(&s0, &p, 200.0 * TAU, 1000.0 * TAU, &cfg).unwrap().lambda_max > CHAOS_THRESHOLD
    });

    // f=8, xi=0 is chaotic.
    let p8 = Params::default().with_f(8.0).unwrap();
    let c8 = analysis::classify(&p8, &s0, &ClassifyConfig::default()).unwrap();
    let strong = c8.label == Label::Chaotic;

    let ok = regular && window && strong && within(started, 600.0);
    verdict(
        7,
        "xi-sweep spot checks at f=5 and f=8",
        started,
        ok,
        &format!(
            "regular near xi=1.9 [{}]; chaotic window below [{}]; f=8 xi=0 got {} (lambda={:+.4}) [{}]",
            if regular { "ok" } else { "MISMATCH" },
            if window { "ok" } else { "MISMATCH" },
            c8.label,
            c8.lambda_max,
            if strong { "ok" } else { "MISMATCH" }
        ),
    );
}

#[test]
fn criterion_8_sweep_determinism() {
    let started = Instant::now();
    let mut sc = SweepConfig::defaults(SweepAxis::Forcing, 4.0, 5.0, Params::default().with_xi(0.5).unwrap());
    sc.steps = 8;
    sc.n_transient = 60;
    sc.n_samples = 32;

    let render = |threads: usize| {
        let data = bifurcation_scan_threaded(&sc, threads).unwrap();
        let mut rows = Vec::new();
        for pt in &data.points {
            for (k, &(x, y)) in pt.samples.iter().enumerate() {
                rows.push((pt.param, k as u32, x, y));
            }
        }
        let svg_pts: Vec<(f64, f64)> = rows.iter().map(|&(f, _, x, _)| (f, x)).collect();
        let manifest = RunManifest::new("pdm acceptance determinism probe".into());
        let csv = csv_to_string(&Dataset::Bifurcation { rows, failures: Vec::new() }, &manifest);
        let svg = render_svg(&svg_pts, &AxesSpec::new("f", "x", "determinism probe"), &manifest).unwrap();
        (csv, svg)
    };

    let (csv1, svg1) = render(1);
    let (csv4, svg4) = render(4);
    let (csv1b, svg1b) = render(1);
    let ok = csv1 == csv4 && svg1 == svg4 && csv1 == csv1b && svg1 == svg1b && within(started, 60.0);
    verdict(
        8,
        "bit-identical sweep output at any parallelism",
        started,
        ok,
        &format!("csv {} bytes, svg {} bytes, 1 vs 4 threads and repeat all identical: {}", csv1.len(), svg1.len(), ok),
    );
}
