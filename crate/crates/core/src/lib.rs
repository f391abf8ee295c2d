//! Alpha-path families for second- and higher-order uncertain differential
//! equations
//!
//! ```text
//! x^(n)(t) = f(t, x, x', ..., x^(n-1)) + g(t, x, x', ..., x^(n-1)) * dC/dt
//! ```
//!
//! driven by a Liu process `C`. For each `alpha` in (0, 1) the alpha-path is
//! the deterministic solution of `x^(n) = f + |g| * phi_inv(alpha)`. Under
//! regularity (`g > 0`) and monotonicity of `f`, `g` in the position, the
//! family is strictly increasing in `alpha` and `alpha -> x(alpha, t)` is the
//! inverse uncertainty distribution of the solution at time `t`.
//!
//! The crate is organised around that pipeline:
//!
//! * [`expr`] parses the coefficient expressions,
//! * [`ude`] holds the validated equation, `phi_inv` and alpha grids,
//! * [`solver`] integrates alpha-paths and pathwise trajectories (RK4),
//! * [`analysis`] checks the hypotheses and builds distribution tables,
//! * [`oracle`] tests trajectory dominance with sampled Lipschitz paths,
//! * [`config`] and [`cli`] drive reproducible runs from a config file.
//!
//! Runnable walk-throughs live in `examples/`; `cargo run --example` lists them.

pub mod analysis;
pub mod cli;
pub mod config;
pub mod expr;
pub mod oracle;
pub mod quadrature;
pub mod solver;
pub mod ude;

pub use analysis::{
    check_condition_h, check_monotone, check_regularity, distribution_at, expected_value,
    inverse_distribution, DistributionTable, HypothesisReport,
};
pub use oracle::{dominance_check, sample_lipschitz_path, DominanceParams, DominanceReport, SamplePath, Side};
pub use solver::{
    integral_residual, rk4_step, solve_alpha_path, solve_fan, solve_sample_path, AlphaFan,
    AlphaPath, Trajectory,
};
pub use ude::{alpha_grid, companion_system, phi_inv, validate_spec, AlphaGridSpec, RawSpec, UdeSpec};
