//! Driven, damped Duffing oscillator with a position-dependent mass
//! m(x) = 1/sqrt(1 + xi x^2): vector field and energy bookkeeping, adaptive
//! integration, stroboscopic sampling, Lyapunov exponents, attractor
//! classification, and parameter sweeps, plus the `pdm` CLI on top.

pub mod analysis;
pub mod cli;
pub mod error;
pub mod integrate;
pub mod model;
pub mod sweep;

pub use analysis::{classify, detect_period, lyapunov_max, Classification, ClassifyConfig, Label, LyapunovResult};
pub use error::{Error, Result};
pub use integrate::{
    energy_balance, integrate_adaptive, integrate_strobe, integrate_with_tangent, rk4_step,
    EnergyBalance, IntegratorConfig, StroboSeries, Trajectory,
};
pub use model::{
    energy, jacobian_xy, mass, mass_prime, power_balance_rhs, thrust_power, vector_field,
    EnergyBreakdown, Jacobian2, Params, State,
};
pub use sweep::{
    bifurcation_scan, lyapunov_scan, BifurcationData, IcMode, LyapunovRow, SweepAxis, SweepConfig,
    SweepPoint,
};
