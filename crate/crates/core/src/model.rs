//! The physical system: position-dependent mass m(x) = 1/sqrt(1 + xi x^2),
//! the first-order vector field of the driven damped Duffing oscillator built
//! on it, the analytic (x, y) Jacobian, and energy/power bookkeeping.
//!
//! Equation of motion: m(x) x'' + m'(x) x'^2 + omega0^2 x + lambda x^3
//! + alpha x' = f cos(omega t), written as the first-order system
//!   x' = y
//!   y' = xi x y^2 / (1 + xi x^2) + sqrt(1 + xi x^2) (f cos z - omega0^2 x - lambda x^3 - alpha y)
//!   z' = omega

use crate::error::{Error, Result};

/// Physical parameters of the oscillator.
///
/// Constructed through [`Params::new`], which enforces xi >= 0, omega > 0 and
/// finiteness; fields are read-only afterwards, so every value in circulation
/// satisfies the invariants. xi < 0 is rejected rather than clamped: it makes
/// the mass profile singular at x^2 = -1/xi.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Params {
    xi: f64,
    omega0_sq: f64,
    lambda: f64,
    alpha: f64,
    f: f64,
    omega: f64,
}

impl Params {
    pub fn new(xi: f64, omega0_sq: f64, lambda: f64, alpha: f64, f: f64, omega: f64) -> Result<Self> {
        let all = [xi, omega0_sq, lambda, alpha, f, omega];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParams("all parameters must be finite".into()));
        }
        if xi < 0.0 {
            return Err(Error::InvalidParams(format!("xi must be >= 0, got {xi}")));
        }
        if omega <= 0.0 {
            return Err(Error::InvalidParams(format!("omega must be > 0, got {omega}")));
        }
        Ok(Self { xi, omega0_sq, lambda, alpha, f, omega })
    }

    pub fn with_xi(self, xi: f64) -> Result<Self> {
        Self::new(xi, self.omega0_sq, self.lambda, self.alpha, self.f, self.omega)
    }

    pub fn with_f(self, f: f64) -> Result<Self> {
        Self::new(self.xi, self.omega0_sq, self.lambda, self.alpha, f, self.omega)
    }

    pub fn xi(&self) -> f64 {
        self.xi
    }

    pub fn omega0_sq(&self) -> f64 {
        self.omega0_sq
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn f(&self) -> f64 {
        self.f
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    /// Drive period 2 pi / omega.
    pub fn drive_period(&self) -> f64 {
        std::f64::consts::TAU / self.omega
    }
}

/// Standard parameter set: omega = 1.0, omega0^2 = 0.25, alpha = 0.2,
/// lambda = 1.0, with constant mass (xi = 0) and drive amplitude f = 5.
impl Default for Params {
    fn default() -> Self {
        Self { xi: 0.0, omega0_sq: 0.25, lambda: 1.0, alpha: 0.2, f: 5.0, omega: 1.0 }
    }
}

/// Phase-space point: position x, velocity y = x', drive phase z = omega t.
/// z is kept unbounded (no modular reduction) so stroboscopic times stay exact.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct State {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl State {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    pub(crate) fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub(crate) fn from_array(a: [f64; 3]) -> Self {
        Self { x: a[0], y: a[1], z: a[2] }
    }
}

/// Energy bookkeeping at a state: T = 1/2 m(x) y^2, V = 1/2 omega0^2 x^2
/// + 1/4 lambda x^4, E = T + V, canonical momentum p = m(x) y.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyBreakdown {
    pub kinetic: f64,
    pub potential: f64,
    pub total: f64,
    pub momentum: f64,
}

/// Jacobian of (x', y') with respect to (x, y) at fixed drive phase.
/// Row-major; the top row is always (0, 1) since x' = y.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jacobian2(pub [[f64; 2]; 2]);

impl Jacobian2 {
    pub fn apply(&self, v: [f64; 2]) -> [f64; 2] {
        [
            self.0[0][0] * v[0] + self.0[0][1] * v[1],
            self.0[1][0] * v[0] + self.0[1][1] * v[1],
        ]
    }

    /// Largest absolute entry; scale for relative comparisons.
    pub fn max_abs(&self) -> f64 {
        self.0.iter().flatten().fold(0.0, |m, e| m.max(e.abs()))
    }
}

/// Mass profile m(x) = 1/sqrt(1 + xi x^2); in (0, 1], equals 1 at x = 0 or xi = 0.
pub fn mass(x: f64, p: &Params) -> f64 {
    1.0 / (1.0 + p.xi * x * x).sqrt()
}

/// dm/dx = -xi x (1 + xi x^2)^(-3/2); opposite sign to x for xi > 0.
pub fn mass_prime(x: f64, p: &Params) -> f64 {
    let u = 1.0 + p.xi * x * x;
    -p.xi * x / (u * u.sqrt())
}

/// Right-hand side (x', y', z') of the first-order system, packed as a `State`.
/// At xi = 0 this is exactly the classic forced damped Duffing field.
pub fn vector_field(s: &State, p: &Params) -> State {
    let u = 1.0 + p.xi * s.x * s.x;
    let g = p.f * s.z.cos() - p.omega0_sq * s.x - p.lambda * s.x * s.x * s.x - p.alpha * s.y;
    State {
        x: s.y,
        y: p.xi * s.x * s.y * s.y / u + u.sqrt() * g,
        z: p.omega,
    }
}

/// Analytic Jacobian of the (x, y) subsystem at fixed z.
pub fn jacobian_xy(s: &State, p: &Params) -> Jacobian2 {
    let (x, y) = (s.x, s.y);
    let u = 1.0 + p.xi * x * x;
    let su = u.sqrt();
    let g = p.f * s.z.cos() - p.omega0_sq * x - p.lambda * x * x * x - p.alpha * y;
    let j10 = p.xi * y * y * (1.0 - p.xi * x * x) / (u * u)
        + p.xi * x * g / su
        + su * (-p.omega0_sq - 3.0 * p.lambda * x * x);
    let j11 = 2.0 * p.xi * x * y / u - p.alpha * su;
    Jacobian2([[0.0, 1.0], [j10, j11]])
}

/// Central-finite-difference Jacobian of `vector_field` with the given step.
/// Independent cross-check for `jacobian_xy`; never calls it.
pub fn fd_jacobian_xy(s: &State, p: &Params, step: f64) -> Jacobian2 {
    let col = |dx: f64, dy: f64| {
        let plus = vector_field(&State::new(s.x + dx, s.y + dy, s.z), p);
        let minus = vector_field(&State::new(s.x - dx, s.y - dy, s.z), p);
        [
            (plus.x - minus.x) / (2.0 * step),
            (plus.y - minus.y) / (2.0 * step),
        ]
    };
    let cx = col(step, 0.0);
    let cy = col(0.0, step);
    Jacobian2([[cx[0], cy[0]], [cx[1], cy[1]]])
}

/// Kinetic/potential/total energy and canonical momentum at a state.
pub fn energy(s: &State, p: &Params) -> EnergyBreakdown {
    let m = mass(s.x, p);
    let kinetic = 0.5 * m * s.y * s.y;
    let x2 = s.x * s.x;
    let potential = 0.5 * p.omega0_sq * x2 + 0.25 * p.lambda * x2 * x2;
    EnergyBreakdown { kinetic, potential, total: kinetic + potential, momentum: m * s.y }
}

/// Power of the reacting thrust: dE/dt = -1/2 m'(x) y^3 for the undriven,
/// undamped system. Zero whenever xi = 0, x = 0, or y = 0.
pub fn thrust_power(s: &State, p: &Params) -> f64 {
    -0.5 * mass_prime(s.x, p) * s.y * s.y * s.y
}

/// Full power balance dE/dt along solutions of the driven damped system:
/// thrust power - alpha y^2 + f y cos z. Reduces to `thrust_power` at
/// alpha = f = 0.
pub fn power_balance_rhs(s: &State, p: &Params) -> f64 {
    thrust_power(s, p) - p.alpha * s.y * s.y + p.f * s.y * s.z.cos()
}
