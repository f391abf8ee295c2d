//! Fixed-step RK4 integration of alpha-path and pathwise ODEs, plus the
//! integral-form residual check.

use serde::Serialize;
use thiserror::Error;

use crate::expr::{Env, ExprError};
use crate::oracle::SamplePath;
use crate::quadrature;
use crate::ude::{phi_inv, FirstOrderSystem, Forcing, TimeGrid, UdeError, UdeSpec};

/// Any state component above this magnitude aborts the solve.
pub const BLOW_UP_THRESHOLD: f64 = 1e12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolveError {
    #[error(transparent)]
    Ude(#[from] UdeError),
    #[error("non-finite stage evaluation at t = {t}: {source}")]
    NonFinite { t: f64, source: ExprError },
    #[error("solution blew up after t = {last_good_t}: {detail}")]
    BlowUp { last_good_t: f64, detail: String },
    #[error("sample path breakpoint {breakpoint} is not on a solver node")]
    Alignment { breakpoint: f64 },
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("alpha-path for alpha = {alpha} failed: {source}")]
pub struct FanError {
    pub alpha: f64,
    pub source: SolveError,
}

/// One classical fourth-order Runge-Kutta step.
pub fn rk4_step(
    system: &FirstOrderSystem<'_>,
    t: f64,
    y: &[f64],
    h: f64,
) -> Result<Vec<f64>, SolveError> {
    let n = y.len();
    let eval = |t: f64, y: &[f64], out: &mut [f64]| {
        system
            .rhs(t, y, out)
            .map_err(|source| SolveError::NonFinite { t, source })
    };
    let mut k1 = vec![0.0; n];
    let mut k2 = vec![0.0; n];
    let mut k3 = vec![0.0; n];
    let mut k4 = vec![0.0; n];
    let mut tmp = vec![0.0; n];

    eval(t, y, &mut k1)?;
    for i in 0..n {
        tmp[i] = y[i] + 0.5 * h * k1[i];
    }
    eval(t + 0.5 * h, &tmp, &mut k2)?;
    for i in 0..n {
        tmp[i] = y[i] + 0.5 * h * k2[i];
    }
    eval(t + 0.5 * h, &tmp, &mut k3)?;
    for i in 0..n {
        tmp[i] = y[i] + h * k3[i];
    }
    eval(t + h, &tmp, &mut k4)?;

    Ok((0..n)
        .map(|i| y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
        .collect())
}

/// Where `g <= 0` was observed along a trajectory (nodes with `t > 0`).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegularityWarning {
    pub first_t: f64,
    pub count: usize,
    pub min_g: f64,
    pub min_t: f64,
}

/// States `(x, x', ..., x^(n-1))` on a uniform time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    grid: TimeGrid,
    dim: usize,
    states: Vec<f64>,
    pub regularity: Option<RegularityWarning>,
}

impl Trajectory {
    pub fn grid(&self) -> TimeGrid {
        self.grid
    }

    pub fn dimension(&self) -> usize {
        self.dim
    }

    pub fn node_count(&self) -> usize {
        self.grid.node_count()
    }

    pub fn times(&self) -> Vec<f64> {
        self.grid.times()
    }

    pub fn time(&self, j: usize) -> f64 {
        self.grid.time(j)
    }

    pub fn state(&self, j: usize) -> &[f64] {
        &self.states[j * self.dim..(j + 1) * self.dim]
    }

    /// `x0` at node `j`.
    pub fn position(&self, j: usize) -> f64 {
        self.states[j * self.dim]
    }

    pub fn component(&self, k: usize) -> impl Iterator<Item = f64> + '_ {
        self.states.iter().skip(k).step_by(self.dim).copied()
    }

    pub fn states(&self) -> impl Iterator<Item = &[f64]> + '_ {
        self.states.chunks_exact(self.dim)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlphaPath {
    pub alpha: f64,
    pub trajectory: Trajectory,
}

/// Alpha-paths over an alpha grid, all sharing the spec's time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct AlphaFan {
    pub spec: UdeSpec,
    pub grid: Vec<f64>,
    pub paths: Vec<AlphaPath>,
}

impl AlphaFan {
    pub fn time_grid(&self) -> TimeGrid {
        self.spec.grid()
    }

    /// `(alpha, x0)` pairs at node `j`.
    pub fn positions_at(&self, j: usize) -> Vec<(f64, f64)> {
        self.paths
            .iter()
            .map(|p| (p.alpha, p.trajectory.position(j)))
            .collect()
    }
}

fn integrate<F>(spec: &UdeSpec, mut forcing_at: F) -> Result<Trajectory, SolveError>
where
    F: FnMut(usize) -> Forcing,
{
    let grid = spec.grid();
    let dim = spec.order();
    let h = grid.step();
    let mut states = Vec::with_capacity(grid.node_count() * dim);
    states.extend_from_slice(spec.initial());
    let mut y = spec.initial().to_vec();
    let mut regularity: Option<RegularityWarning> = None;

    for j in 0..grid.intervals {
        let t = grid.time(j);
        let system = FirstOrderSystem::new(spec, forcing_at(j));
        let next = rk4_step(&system, t, &y, h).map_err(|e| SolveError::BlowUp {
            last_good_t: t,
            detail: e.to_string(),
        })?;
        if let Some(v) = next.iter().find(|v| !v.is_finite() || v.abs() > BLOW_UP_THRESHOLD) {
            return Err(SolveError::BlowUp {
                last_good_t: t,
                detail: format!("state component reached {v:e}"),
            });
        }
        let t_next = grid.time(j + 1);
        let g = spec
            .diffusion()
            .eval(&Env::new(t_next, &next))
            .map_err(|source| SolveError::BlowUp {
                last_good_t: t,
                detail: source.to_string(),
            })?;
        if g <= 0.0 {
            let w = regularity.get_or_insert(RegularityWarning {
                first_t: t_next,
                count: 0,
                min_g: g,
                min_t: t_next,
            });
            w.count += 1;
            if g < w.min_g {
                w.min_g = g;
                w.min_t = t_next;
            }
        }
        states.extend_from_slice(&next);
        y = next;
    }
    Ok(Trajectory {
        grid,
        dim,
        states,
        regularity,
    })
}

/// Solves the alpha-path ODE `x^(n) = f + |g| * phi_inv(alpha)` on the spec's grid.
pub fn solve_alpha_path(spec: &UdeSpec, alpha: f64) -> Result<AlphaPath, SolveError> {
    let phi = phi_inv(alpha)?;
    let trajectory = integrate(spec, |_| Forcing::AlphaPath { phi_inv: phi })?;
    Ok(AlphaPath { alpha, trajectory })
}

/// Solves one alpha-path per grid value. The first failing alpha (in grid
/// order) is reported.
pub fn solve_fan(spec: &UdeSpec, grid: &[f64]) -> Result<AlphaFan, FanError> {
    let paths = grid
        .iter()
        .map(|&alpha| solve_alpha_path(spec, alpha).map_err(|source| FanError { alpha, source }))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(AlphaFan {
        spec: spec.clone(),
        grid: grid.to_vec(),
        paths,
    })
}

/// Solves the pathwise ODE `x^(n) = f + g * C'(t)` for a piecewise-linear
/// sample path whose breakpoints sit on solver nodes.
pub fn solve_sample_path(spec: &UdeSpec, path: &SamplePath) -> Result<Trajectory, SolveError> {
    let grid = spec.grid();
    let node_of = |b: f64| -> Result<usize, SolveError> {
        grid.snap(b)
            .filter(|&j| (grid.time(j) - b).abs() <= 1e-9 * grid.step())
            .ok_or(SolveError::Alignment { breakpoint: b })
    };
    let bps = path.breakpoints();
    let nodes = bps.iter().map(|&b| node_of(b)).collect::<Result<Vec<_>, _>>()?;
    if nodes.first() != Some(&0) {
        return Err(SolveError::Alignment { breakpoint: bps[0] });
    }
    if nodes.last() != Some(&grid.intervals) {
        return Err(SolveError::Alignment {
            breakpoint: *bps.last().unwrap(),
        });
    }
    // segment index for every step [t_j, t_{j+1}]
    let mut step_slope = Vec::with_capacity(grid.intervals);
    for (seg, w) in nodes.windows(2).enumerate() {
        for _ in w[0]..w[1] {
            step_slope.push(path.slopes()[seg]);
        }
    }
    integrate(spec, |j| Forcing::Slope(step_slope[j]))
}

/// Largest deviation from the integral form of the alpha-path ODE,
/// `x(t) = sum_k t^k/k! x_k(0) + 1/(n-1)! int_0^t (t-s)^(n-1) F(s) ds`,
/// where `F = f + |g| * phi_inv(alpha)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResidualReport {
    pub max_residual: f64,
    pub at_t: f64,
    /// Nodes integrated with the single-interval trapezoid fallback.
    pub trapezoid_nodes: usize,
}

pub fn integral_residual(
    path: &AlphaPath,
    spec: &UdeSpec,
    alpha: f64,
) -> Result<ResidualReport, SolveError> {
    let traj = &path.trajectory;
    let n = spec.order();
    let phi = phi_inv(alpha)?;
    let system = FirstOrderSystem::new(spec, Forcing::AlphaPath { phi_inv: phi });
    let h = traj.grid().step();

    let mut forcing = Vec::with_capacity(traj.node_count());
    let mut out = vec![0.0; n];
    for j in 0..traj.node_count() {
        let t = traj.time(j);
        system
            .rhs(t, traj.state(j), &mut out)
            .map_err(|source| SolveError::NonFinite { t, source })?;
        forcing.push(out[n - 1]);
    }

    let factorial = |k: usize| (1..=k).map(|i| i as f64).product::<f64>();
    let kernel_scale = 1.0 / factorial(n - 1);
    let x0 = spec.initial();

    let mut report = ResidualReport {
        max_residual: 0.0,
        at_t: 0.0,
        trapezoid_nodes: 0,
    };
    let mut integrand = Vec::with_capacity(traj.node_count());
    for j in 1..traj.node_count() {
        let t = traj.time(j);
        let taylor: f64 = (0..n).map(|k| t.powi(k as i32) / factorial(k) * x0[k]).sum();
        integrand.clear();
        integrand.extend((0..=j).map(|i| (t - traj.time(i)).powi(n as i32 - 1) * forcing[i]));
        let quad = quadrature::simpson_uniform(&integrand, h);
        if quad.trapezoid_panel {
            report.trapezoid_nodes += 1;
        }
        let residual = (traj.position(j) - (taylor + kernel_scale * quad.value)).abs();
        if residual > report.max_residual {
            report.max_residual = residual;
            report.at_t = t;
        }
    }
    Ok(report)
}
