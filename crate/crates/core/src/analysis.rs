//! Hypothesis checks on computed fans and the distribution-level outputs
//! assembled from them.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::expr::{Env, Var};
use crate::quadrature::trapezoid;
use crate::solver::AlphaFan;
use crate::ude::UdeSpec;

/// Partials of f and g in the position variable must be at least `-TOL_H`.
pub const TOL_H: f64 = 1e-8;

/// At most this many individual violations are kept in a report; the
/// total is always counted.
pub const MAX_RECORDED_VIOLATIONS: usize = 256;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalysisError {
    #[error("t = {t} is not within half a step of the fan's time grid")]
    OutOfRange { t: f64 },
    #[error("alpha-paths {alpha_lo} and {alpha_hi} are not strictly ordered at t = {t}")]
    Monotonicity { t: f64, alpha_lo: f64, alpha_hi: f64 },
    #[error("insufficient grid: at least two alpha values are required")]
    InsufficientGrid,
    #[error("alpha grid is not symmetric about 0.5")]
    NotSymmetric,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegularityViolation {
    pub alpha: f64,
    pub t: f64,
    pub g: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegularityReport {
    pub pass: bool,
    /// Smallest g over all paths and nodes with t > 0.
    pub min_g: f64,
    pub min_alpha: f64,
    pub min_t: f64,
    pub violation_count: usize,
    /// Latest time at which g <= 0 was seen.
    pub last_violation_t: Option<f64>,
    pub violations: Vec<RegularityViolation>,
}

/// Evaluates g at every node with `t > 0` of every path; passes iff g > 0 throughout.
pub fn check_regularity(fan: &AlphaFan) -> RegularityReport {
    let g = fan.spec.diffusion();
    let mut report = RegularityReport {
        pass: true,
        min_g: f64::INFINITY,
        min_alpha: f64::NAN,
        min_t: f64::NAN,
        violation_count: 0,
        last_violation_t: None,
        violations: Vec::new(),
    };
    for path in &fan.paths {
        let tr = &path.trajectory;
        for j in 1..tr.node_count() {
            let t = tr.time(j);
            // an evaluation failure counts as a violation
            let value = g.eval(&Env::new(t, tr.state(j))).unwrap_or(f64::NAN);
            if value < report.min_g || value.is_nan() && !report.min_g.is_nan() {
                report.min_g = value;
                report.min_alpha = path.alpha;
                report.min_t = t;
            }
            if !(value > 0.0) {
                report.pass = false;
                report.violation_count += 1;
                report.last_violation_t = Some(report.last_violation_t.map_or(t, |l| l.max(t)));
                if report.violations.len() < MAX_RECORDED_VIOLATIONS {
                    report.violations.push(RegularityViolation {
                        alpha: path.alpha,
                        t,
                        g: value,
                    });
                }
            }
        }
    }
    report
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Coefficient {
    F,
    G,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PartialSample {
    pub t: f64,
    pub x: Vec<f64>,
    pub which: Coefficient,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionHReport {
    pub pass: bool,
    pub tolerance: f64,
    pub sampled_points: usize,
    pub random_points: usize,
    pub min_partial_f: Option<PartialSample>,
    pub min_partial_g: Option<PartialSample>,
    pub violation_count: usize,
    /// Points where a coefficient could not be evaluated; not counted as violations.
    pub eval_failures: usize,
    pub violations: Vec<PartialSample>,
}

/// Checks `df/dx0 >= 0` and `dg/dx0 >= 0` by central differences at every
/// fan node and at `samples` seeded random points in the fan's state
/// bounding box, inflated by 10% of its width (half on each side).
pub fn check_condition_h(
    spec: &UdeSpec,
    fan: &AlphaFan,
    samples: usize,
    eps: f64,
    seed: u64,
) -> ConditionHReport {
    let mut report = ConditionHReport {
        pass: true,
        tolerance: TOL_H,
        sampled_points: 0,
        random_points: samples,
        min_partial_f: None,
        min_partial_g: None,
        violation_count: 0,
        eval_failures: 0,
        violations: Vec::new(),
    };
    let n = spec.order();
    let mut lo = vec![f64::INFINITY; n];
    let mut hi = vec![f64::NEG_INFINITY; n];

    let probe = |t: f64, x: &[f64], report: &mut ConditionHReport| {
        report.sampled_points += 1;
        let env = Env::new(t, x);
        for (which, expr) in [(Coefficient::F, spec.drift()), (Coefficient::G, spec.diffusion())] {
            let value = match expr.partial_fd(Var::State(0), &env, eps) {
                Ok(v) => v,
                Err(_) => {
                    report.eval_failures += 1;
                    continue;
                }
            };
            let sample = || PartialSample {
                t,
                x: x.to_vec(),
                which,
                value,
            };
            let slot = match which {
                Coefficient::F => &mut report.min_partial_f,
                Coefficient::G => &mut report.min_partial_g,
            };
            if slot.as_ref().is_none_or(|s| value < s.value) {
                *slot = Some(sample());
            }
            if value < -TOL_H {
                report.pass = false;
                report.violation_count += 1;
                if report.violations.len() < MAX_RECORDED_VIOLATIONS {
                    report.violations.push(sample());
                }
            }
        }
    };

    for path in &fan.paths {
        let tr = &path.trajectory;
        for j in 0..tr.node_count() {
            let x = tr.state(j);
            for k in 0..n {
                lo[k] = lo[k].min(x[k]);
                hi[k] = hi[k].max(x[k]);
            }
            probe(tr.time(j), x, &mut report);
        }
    }

    if lo.iter().all(|v| v.is_finite()) {
        let (lo, hi): (Vec<f64>, Vec<f64>) = lo
            .iter()
            .zip(&hi)
            .map(|(&a, &b)| {
                let width = b - a;
                let pad = if width > 0.0 {
                    0.05 * width
                } else {
                    0.05 * a.abs().max(1.0)
                };
                (a - pad, b + pad)
            })
            .unzip();
        let horizon = spec.horizon();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut x = vec![0.0; n];
        for _ in 0..samples {
            let t = rng.random_range(0.0..=horizon);
            for k in 0..n {
                x[k] = rng.random_range(lo[k]..=hi[k]);
            }
            probe(t, &x, &mut report);
        }
    }
    report
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GapLocation {
    pub alpha_lo: f64,
    pub alpha_hi: f64,
    pub t: f64,
    pub gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonotoneReport {
    pub pass: bool,
    pub insufficient_grid: bool,
    /// Adjacent paths coincide at t = 0.
    pub initial_equal: bool,
    pub pairs: usize,
    pub min_gap: Option<GapLocation>,
    /// Earliest (in time, then alpha) pair that is not strictly ordered.
    pub first_crossing: Option<GapLocation>,
    pub violation_count: usize,
}

/// Asserts `x(alpha_i, t) < x(alpha_{i+1}, t)` for every adjacent pair and
/// every node `t >= h`, and equality at `t = 0`.
pub fn check_monotone(fan: &AlphaFan) -> MonotoneReport {
    let mut report = MonotoneReport {
        pass: true,
        insufficient_grid: fan.paths.len() < 2,
        initial_equal: true,
        pairs: fan.paths.len().saturating_sub(1),
        min_gap: None,
        first_crossing: None,
        violation_count: 0,
    };
    if report.insufficient_grid {
        return report;
    }
    let nodes = fan.time_grid().node_count();
    for j in 0..nodes {
        for pair in fan.paths.windows(2) {
            let (a, b) = (&pair[0].trajectory, &pair[1].trajectory);
            let loc = GapLocation {
                alpha_lo: pair[0].alpha,
                alpha_hi: pair[1].alpha,
                t: a.time(j),
                gap: b.position(j) - a.position(j),
            };
            if j == 0 {
                if a.state(0) != b.state(0) {
                    report.initial_equal = false;
                    report.pass = false;
                }
                continue;
            }
            if report.min_gap.is_none_or(|m| loc.gap < m.gap) {
                report.min_gap = Some(loc);
            }
            if !(loc.gap > 0.0) {
                report.pass = false;
                report.violation_count += 1;
                if report.first_crossing.is_none() {
                    report.first_crossing = Some(loc);
                }
            }
        }
    }
    report
}

/// Regularity, condition (H) and monotonicity of one fan.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HypothesisReport {
    pub regularity: RegularityReport,
    pub condition_h: ConditionHReport,
    pub monotone: MonotoneReport,
}

impl HypothesisReport {
    pub fn run(fan: &AlphaFan, samples: usize, eps: f64, seed: u64) -> Self {
        Self {
            regularity: check_regularity(fan),
            condition_h: check_condition_h(&fan.spec, fan, samples, eps, seed),
            monotone: check_monotone(fan),
        }
    }

    pub fn pass(&self) -> bool {
        self.regularity.pass && self.condition_h.pass && self.monotone.pass
    }
}

/// Discrete inverse uncertainty distribution `alpha -> x(alpha, t)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistributionTable {
    pub t: f64,
    pub node: usize,
    /// At t = 0 every entry equals the initial position.
    pub degenerate: bool,
    pub entries: Vec<(f64, f64)>,
}

impl DistributionTable {
    pub fn alpha_min(&self) -> f64 {
        self.entries.first().map_or(f64::NAN, |e| e.0)
    }

    pub fn alpha_max(&self) -> f64 {
        self.entries.last().map_or(f64::NAN, |e| e.0)
    }
}

fn snap_node(fan: &AlphaFan, t: f64) -> Result<usize, AnalysisError> {
    fan.time_grid()
        .snap(t)
        .ok_or(AnalysisError::OutOfRange { t })
}

fn require_monotone_at(fan: &AlphaFan, j: usize) -> Result<(), AnalysisError> {
    for pair in fan.paths.windows(2) {
        let (a, b) = (&pair[0].trajectory, &pair[1].trajectory);
        if !(a.position(j) < b.position(j)) {
            return Err(AnalysisError::Monotonicity {
                t: a.time(j),
                alpha_lo: pair[0].alpha,
                alpha_hi: pair[1].alpha,
            });
        }
    }
    Ok(())
}

/// Table of `(alpha, x(alpha, t))` at the node nearest `t`.
pub fn inverse_distribution(fan: &AlphaFan, t: f64) -> Result<DistributionTable, AnalysisError> {
    let node = snap_node(fan, t)?;
    let degenerate = node == 0;
    if !degenerate {
        require_monotone_at(fan, node)?;
    }
    Ok(DistributionTable {
        t: fan.time_grid().time(node),
        node,
        degenerate,
        entries: fan.positions_at(node),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Saturation {
    Below,
    Above,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DistributionEstimate {
    pub alpha: f64,
    pub saturated: Option<Saturation>,
}

/// Forward distribution `x -> alpha` by piecewise-linear inversion of the
/// table, clamped to `[alpha_min, alpha_max]` outside its range.
pub fn distribution_at(table: &DistributionTable, x: f64) -> DistributionEstimate {
    let e = &table.entries;
    let Some((&(a_first, x_first), &(a_last, x_last))) = e.first().zip(e.last()) else {
        return DistributionEstimate {
            alpha: f64::NAN,
            saturated: None,
        };
    };
    if x < x_first {
        return DistributionEstimate {
            alpha: a_first,
            saturated: Some(Saturation::Below),
        };
    }
    if x > x_last {
        return DistributionEstimate {
            alpha: a_last,
            saturated: Some(Saturation::Above),
        };
    }
    // last entry with x_k <= x
    let k = e.partition_point(|&(_, xk)| xk <= x) - 1;
    let (a0, x0) = e[k];
    let alpha = if x0 == x || k + 1 == e.len() {
        a0
    } else {
        let (a1, x1) = e[k + 1];
        a0 + (a1 - a0) * (x - x0) / (x1 - x0)
    };
    DistributionEstimate {
        alpha,
        saturated: None,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExpectedValue {
    pub t: f64,
    pub value: f64,
    pub degenerate: bool,
}

/// Mean of the inverse distribution over the sampled alpha range:
/// trapezoid integral of `x(alpha, t)` over `[alpha_min, alpha_max]`,
/// divided by the range width. Nothing is extrapolated beyond the grid.
pub fn expected_value(fan: &AlphaFan, t: f64) -> Result<ExpectedValue, AnalysisError> {
    if fan.paths.len() < 2 {
        return Err(AnalysisError::InsufficientGrid);
    }
    let grid = &fan.grid;
    let m = grid.len();
    if (0..m).any(|i| (grid[i] + grid[m - 1 - i] - 1.0).abs() > 1e-12) {
        return Err(AnalysisError::NotSymmetric);
    }
    let table = inverse_distribution(fan, t)?;
    let (alphas, xs): (Vec<f64>, Vec<f64>) = table.entries.iter().copied().unzip();
    let width = alphas[m - 1] - alphas[0];
    Ok(ExpectedValue {
        t: table.t,
        value: trapezoid(&alphas, &xs) / width,
        degenerate: table.degenerate,
    })
}
