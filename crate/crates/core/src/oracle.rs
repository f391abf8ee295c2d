//! Constructive dominance testing.
//!
//! A Liu-process sample path whose difference quotients all stay strictly
//! below `phi_inv(alpha - delta)` should drive a trajectory that stays
//! strictly below the alpha-path for every `t > 0` (and symmetrically
//! above). The oracle samples piecewise-linear surrogates with certified
//! slope envelopes, solves the pathwise ODE for each and checks the
//! ordering node by node.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::analysis::{check_condition_h, check_regularity};
use crate::solver::{solve_alpha_path, solve_fan, solve_sample_path, AlphaPath, SolveError};
use crate::ude::{phi_inv, TimeGrid, UdeError, UdeSpec};

/// Width of the slope window below (or above) the bound.
pub const SLOPE_WINDOW: f64 = 2.0;
/// Slopes keep at least this distance from the bound.
pub const SLOPE_MARGIN: f64 = 1e-6;
/// Random points used by the hypothesis pre-check.
pub const HYPOTHESIS_SAMPLES: usize = 256;
pub const HYPOTHESIS_FD_EPS: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("invalid sample path: {0}")]
    InvalidPath(String),
    #[error("invalid oracle parameter: {0}")]
    InvalidParameter(String),
    #[error(
        "hypotheses not met (regularity: {regularity}, condition (H): {condition_h}); \
         run `check` for details"
    )]
    Hypothesis { regularity: bool, condition_h: bool },
    #[error(transparent)]
    Ude(#[from] UdeError),
    #[error("alpha-path solve failed: {0}")]
    AlphaPath(SolveError),
    #[error("pathwise solve {path_index} failed: {source}")]
    Path { path_index: usize, source: SolveError },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Below,
    Above,
}

/// Piecewise-linear surrogate of a Liu-process sample path with `C(0) = 0`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SamplePath {
    breakpoints: Vec<f64>,
    slopes: Vec<f64>,
}

impl SamplePath {
    pub fn new(breakpoints: Vec<f64>, slopes: Vec<f64>) -> Result<Self, OracleError> {
        if breakpoints.len() < 2 || slopes.len() + 1 != breakpoints.len() {
            return Err(OracleError::InvalidPath(format!(
                "{} breakpoints need {} slopes, got {}",
                breakpoints.len(),
                breakpoints.len().saturating_sub(1),
                slopes.len()
            )));
        }
        if breakpoints[0] != 0.0 {
            return Err(OracleError::InvalidPath("first breakpoint must be 0".into()));
        }
        if !breakpoints.windows(2).all(|w| w[0] < w[1]) {
            return Err(OracleError::InvalidPath(
                "breakpoints must be strictly increasing".into(),
            ));
        }
        if slopes.iter().any(|s| !s.is_finite()) {
            return Err(OracleError::InvalidPath("slopes must be finite".into()));
        }
        Ok(Self {
            breakpoints,
            slopes,
        })
    }

    /// A single straight line `C(t) = slope * t` on `[0, horizon]`.
    pub fn constant(slope: f64, horizon: f64) -> Result<Self, OracleError> {
        Self::new(vec![0.0, horizon], vec![slope])
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn slopes(&self) -> &[f64] {
        &self.slopes
    }

    pub fn horizon(&self) -> f64 {
        *self.breakpoints.last().unwrap()
    }

    /// `C(t)`, linearly extended past the ends.
    pub fn value_at(&self, t: f64) -> f64 {
        let mut c = 0.0;
        for (seg, w) in self.breakpoints.windows(2).enumerate() {
            let last = seg + 2 == self.breakpoints.len();
            if t <= w[1] || last {
                return c + self.slopes[seg] * (t - w[0]);
            }
            c += self.slopes[seg] * (w[1] - w[0]);
        }
        c
    }

    /// Upper bound on `(C_s - C_t) / (s - t)` over all `s > t`.
    pub fn max_slope(&self) -> f64 {
        self.slopes.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min_slope(&self) -> f64 {
        self.slopes.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// Samples a piecewise-linear path with `segments` pieces whose breakpoints
/// sit on nodes of `grid`. Slopes are uniform on
/// `[bound - W, bound - eps]` (below) or `[bound + eps, bound + W]` (above).
pub fn sample_lipschitz_path(
    bound: f64,
    side: Side,
    grid: TimeGrid,
    segments: usize,
    seed: u64,
) -> Result<SamplePath, OracleError> {
    if segments == 0 || segments > grid.intervals {
        return Err(OracleError::InvalidParameter(format!(
            "segments must lie in 1..={}, got {segments}",
            grid.intervals
        )));
    }
    if !bound.is_finite() {
        return Err(OracleError::InvalidParameter(format!("bound {bound} is not finite")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let breakpoints = (0..=segments)
        .map(|k| {
            let node = (k as f64 * grid.intervals as f64 / segments as f64).round() as usize;
            grid.time(node)
        })
        .collect();
    let (lo, hi) = match side {
        Side::Below => (bound - SLOPE_WINDOW, bound - SLOPE_MARGIN),
        Side::Above => (bound + SLOPE_MARGIN, bound + SLOPE_WINDOW),
    };
    let slopes = (0..segments).map(|_| rng.random_range(lo..=hi)).collect();
    SamplePath::new(breakpoints, slopes)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DominanceParams {
    pub alpha: f64,
    pub delta: f64,
    pub n_paths: usize,
    pub segments: usize,
    pub side: Side,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DominanceViolation {
    pub path_index: usize,
    pub t: f64,
    pub x_path: f64,
    pub x_alpha: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DominanceReport {
    pub alpha: f64,
    pub delta: f64,
    pub side: Side,
    /// `phi_inv(alpha - delta)` below, `phi_inv(alpha + delta)` above.
    pub slope_bound: f64,
    pub paths_tested: usize,
    pub pass: bool,
    /// Smallest signed margin `x_alpha - x_path` (below) or
    /// `x_path - x_alpha` (above) over all paths and nodes with t > 0.
    pub min_margin: f64,
    pub min_margin_path: usize,
    pub min_margin_t: f64,
    pub violation_count: usize,
    pub violations: Vec<DominanceViolation>,
}

/// Per-path seed, decorrelated from neighbouring indices and sides.
fn path_seed(seed: u64, side: Side, index: usize) -> u64 {
    let side_bit = match side {
        Side::Below => 0u64,
        Side::Above => 1u64,
    };
    // splitmix64 finalizer
    let mut z = seed
        .wrapping_add((index as u64).wrapping_mul(2).wrapping_add(side_bit).wrapping_add(1))
        .wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Compares pathwise trajectories for the given sample paths against an
/// already solved alpha-path. Violations are sorted by (path, t).
pub fn compare_against_alpha_path(
    spec: &UdeSpec,
    alpha_path: &AlphaPath,
    delta: f64,
    side: Side,
    slope_bound: f64,
    paths: &[SamplePath],
) -> Result<DominanceReport, OracleError> {
    let mut report = DominanceReport {
        alpha: alpha_path.alpha,
        delta,
        side,
        slope_bound,
        paths_tested: paths.len(),
        pass: true,
        min_margin: f64::INFINITY,
        min_margin_path: 0,
        min_margin_t: f64::NAN,
        violation_count: 0,
        violations: Vec::new(),
    };
    let reference = &alpha_path.trajectory;
    for (path_index, c) in paths.iter().enumerate() {
        let traj = solve_sample_path(spec, c)
            .map_err(|source| OracleError::Path { path_index, source })?;
        for j in 1..traj.node_count() {
            let (x_path, x_alpha) = (traj.position(j), reference.position(j));
            let margin = match side {
                Side::Below => x_alpha - x_path,
                Side::Above => x_path - x_alpha,
            };
            if margin < report.min_margin {
                report.min_margin = margin;
                report.min_margin_path = path_index;
                report.min_margin_t = traj.time(j);
            }
            if !(margin > 0.0) {
                report.pass = false;
                report.violation_count += 1;
                report.violations.push(DominanceViolation {
                    path_index,
                    t: traj.time(j),
                    x_path,
                    x_alpha,
                });
            }
        }
    }
    Ok(report)
}

/// Runs the dominance oracle for one side.
///
/// Refuses to run unless the single-alpha fan passes regularity and
/// condition (H), since dominance is only claimed under those hypotheses.
pub fn dominance_check(
    spec: &UdeSpec,
    params: &DominanceParams,
) -> Result<DominanceReport, OracleError> {
    let DominanceParams {
        alpha,
        delta,
        n_paths,
        segments,
        side,
        seed,
    } = *params;
    if !(delta > 0.0) {
        return Err(OracleError::InvalidParameter(format!("delta must be > 0, got {delta}")));
    }
    let shifted = match side {
        Side::Below => alpha - delta,
        Side::Above => alpha + delta,
    };
    if !(shifted > 0.0 && shifted < 1.0 && alpha > 0.0 && alpha < 1.0) {
        return Err(OracleError::InvalidParameter(format!(
            "alpha = {alpha} with delta = {delta} leaves (0, 1) on the {side:?} side"
        )));
    }

    let fan = solve_fan(spec, &[alpha]).map_err(|e| OracleError::AlphaPath(e.source))?;
    let regularity = check_regularity(&fan).pass;
    let condition_h =
        check_condition_h(spec, &fan, HYPOTHESIS_SAMPLES, HYPOTHESIS_FD_EPS, seed).pass;
    if !(regularity && condition_h) {
        return Err(OracleError::Hypothesis {
            regularity,
            condition_h,
        });
    }

    let bound = phi_inv(shifted)?;
    let paths = (0..n_paths)
        .map(|i| sample_lipschitz_path(bound, side, spec.grid(), segments, path_seed(seed, side, i)))
        .collect::<Result<Vec<_>, _>>()?;
    let alpha_path = solve_alpha_path(spec, alpha).map_err(OracleError::AlphaPath)?;
    compare_against_alpha_path(spec, &alpha_path, delta, side, bound, &paths)
}
