//! Equation specifications, the inverse standard normal uncertainty
//! distribution, alpha grids and the companion first-order system.

use std::f64::consts::PI;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::expr::{parse_str, Env, Expr, ExprError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum UdeError {
    #[error("alpha = {0} is outside the open interval (0, 1)")]
    Domain(f64),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("invalid equation specification:\n{0}")]
    Invalid(ValidationReport),
}

/// Inverse standard normal uncertainty distribution,
/// `(sqrt(3)/pi) * ln(alpha / (1 - alpha))`.
pub fn phi_inv(alpha: f64) -> Result<f64, UdeError> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(UdeError::Domain(alpha));
    }
    Ok(3f64.sqrt() / PI * (alpha / (1.0 - alpha)).ln())
}

/// Uniform time discretization `t_j = T * j / N`, `j = 0..=N`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TimeGrid {
    pub horizon: f64,
    pub intervals: usize,
}

impl TimeGrid {
    pub fn step(&self) -> f64 {
        self.horizon / self.intervals as f64
    }

    pub fn node_count(&self) -> usize {
        self.intervals + 1
    }

    pub fn time(&self, j: usize) -> f64 {
        if j == self.intervals {
            self.horizon
        } else {
            self.horizon * j as f64 / self.intervals as f64
        }
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.node_count()).map(|j| self.time(j)).collect()
    }

    /// Index of the node nearest to `t`, if it lies within half a step.
    pub fn snap(&self, t: f64) -> Option<usize> {
        if !t.is_finite() {
            return None;
        }
        let j = (t / self.step()).round();
        if j < 0.0 || j > self.intervals as f64 {
            return None;
        }
        let j = j as usize;
        ((self.time(j) - t).abs() <= 0.5 * self.step() * (1.0 + 1e-12)).then_some(j)
    }
}

/// Unvalidated equation fields, as they arrive from a config file.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RawSpec {
    pub order: usize,
    pub f: String,
    pub g: String,
    pub initial: Vec<f64>,
    pub horizon: f64,
    pub step: f64,
}

/// One problem found by [`validate_spec`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationIssue {
    pub field: &'static str,
    pub kind: &'static str,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ValidationReport {
    pub issues: Vec<ValidationIssue>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.issues.is_empty()
    }

    fn push(&mut self, field: &'static str, kind: &'static str, message: String) {
        self.issues.push(ValidationIssue {
            field,
            kind,
            message,
        });
    }

    pub fn has(&self, kind: &str) -> bool {
        self.issues.iter().any(|i| i.kind == kind)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for issue in &self.issues {
            writeln!(f, "  {} ({}): {}", issue.field, issue.kind, issue.message)?;
        }
        Ok(())
    }
}

/// A validated higher-order equation `x^(n) = f + g * dC/dt`.
#[derive(Debug, Clone, PartialEq)]
pub struct UdeSpec {
    order: usize,
    f: Expr,
    g: Expr,
    initial: Vec<f64>,
    grid: TimeGrid,
    raw: RawSpec,
}

fn parse_field(
    report: &mut ValidationReport,
    field: &'static str,
    source: &str,
    order: usize,
) -> Option<Expr> {
    match parse_str(source, order.max(1)) {
        Ok(e) => Some(e),
        Err(err) => {
            let kind = match err {
                ExprError::UnknownVariable { .. } => "unknown variable",
                ExprError::UnknownFunction { .. } => "unknown function",
                _ => "syntax",
            };
            report.push(field, kind, err.to_string());
            None
        }
    }
}

/// Checks every invariant of a spec and reports all failures, not just the first.
pub fn validate_spec(raw: &RawSpec) -> ValidationReport {
    validate_inner(raw).0
}

fn validate_inner(raw: &RawSpec) -> (ValidationReport, Option<(Expr, Expr, TimeGrid)>) {
    let mut report = ValidationReport::default();
    if raw.order == 0 {
        report.push("order", "order", "order must be at least 1".into());
    }
    let f = parse_field(&mut report, "f", &raw.f, raw.order);
    let g = parse_field(&mut report, "g", &raw.g, raw.order);
    if raw.initial.len() != raw.order {
        report.push(
            "initial",
            "initial condition count",
            format!(
                "expected {} initial values, got {}",
                raw.order,
                raw.initial.len()
            ),
        );
    }
    if raw.initial.iter().any(|v| !v.is_finite()) {
        report.push("initial", "non-finite", "initial values must be finite".into());
    }
    let mut grid = None;
    if !(raw.horizon.is_finite() && raw.horizon > 0.0) {
        report.push("horizon", "range", format!("horizon must be > 0, got {}", raw.horizon));
    }
    if !(raw.step.is_finite() && raw.step > 0.0) {
        report.push("step", "range", format!("step must be > 0, got {}", raw.step));
    } else if raw.horizon.is_finite() && raw.horizon > 0.0 {
        let ratio = raw.horizon / raw.step;
        let n = ratio.round();
        if raw.step > raw.horizon {
            report.push("step", "range", "step must not exceed the horizon".into());
        } else if (ratio - n).abs() > 1e-9 * n.max(1.0) {
            report.push(
                "step",
                "node count",
                format!("horizon / step = {ratio} is not an integer"),
            );
        } else {
            grid = Some(TimeGrid {
                horizon: raw.horizon,
                intervals: n as usize,
            });
        }
    }
    let parts = match (report.is_empty(), f, g, grid) {
        (true, Some(f), Some(g), Some(grid)) => Some((f, g, grid)),
        _ => None,
    };
    (report, parts)
}

impl UdeSpec {
    pub fn from_raw(raw: &RawSpec) -> Result<Self, UdeError> {
        let (report, parts) = validate_inner(raw);
        match parts {
            Some((f, g, grid)) => Ok(Self {
                order: raw.order,
                f,
                g,
                initial: raw.initial.clone(),
                grid,
                raw: raw.clone(),
            }),
            None => Err(UdeError::Invalid(report)),
        }
    }

    /// Convenience constructor, mostly for tests and examples.
    pub fn new(
        order: usize,
        f: &str,
        g: &str,
        initial: &[f64],
        horizon: f64,
        step: f64,
    ) -> Result<Self, UdeError> {
        Self::from_raw(&RawSpec {
            order,
            f: f.into(),
            g: g.into(),
            initial: initial.to_vec(),
            horizon,
            step,
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn drift(&self) -> &Expr {
        &self.f
    }

    pub fn diffusion(&self) -> &Expr {
        &self.g
    }

    pub fn initial(&self) -> &[f64] {
        &self.initial
    }

    pub fn grid(&self) -> TimeGrid {
        self.grid
    }

    pub fn horizon(&self) -> f64 {
        self.grid.horizon
    }

    pub fn step(&self) -> f64 {
        self.grid.step()
    }

    /// The fields this spec was built from, verbatim.
    pub fn to_raw(&self) -> RawSpec {
        self.raw.clone()
    }

    /// Same equation on a different step size.
    pub fn with_step(&self, step: f64) -> Result<Self, UdeError> {
        Self::from_raw(&RawSpec {
            step,
            ..self.to_raw()
        })
    }

    /// Same equation with different initial values.
    pub fn with_initial(&self, initial: &[f64]) -> Result<Self, UdeError> {
        Self::from_raw(&RawSpec {
            initial: initial.to_vec(),
            ..self.to_raw()
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, serde::Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AlphaGridSpec {
    pub count: usize,
    pub lo: f64,
    pub symmetric: bool,
}

impl Default for AlphaGridSpec {
    fn default() -> Self {
        Self {
            count: 99,
            lo: 0.01,
            symmetric: true,
        }
    }
}

/// Evenly spaced alphas from `lo` to `1 - lo`. A symmetric grid mirrors its
/// lower half so that `a[i] + a[count-1-i] == 1` holds in floating point.
pub fn alpha_grid(spec: &AlphaGridSpec) -> Result<Vec<f64>, UdeError> {
    if spec.count < 3 || spec.count.is_multiple_of(2) {
        return Err(UdeError::Config(format!(
            "alpha.count must be an odd integer >= 3, got {}",
            spec.count
        )));
    }
    if !(spec.lo > 0.0 && spec.lo < 0.5) {
        return Err(UdeError::Config(format!(
            "alpha.lo must lie in (0, 0.5), got {}",
            spec.lo
        )));
    }
    let m = spec.count - 1;
    let hi = 1.0 - spec.lo;
    let linear = |i: usize| (spec.lo * (m - i) as f64 + hi * i as f64) / m as f64;
    let mut grid: Vec<f64> = (0..spec.count).map(linear).collect();
    grid[0] = spec.lo;
    grid[m] = hi;
    if spec.symmetric {
        grid[m / 2] = 0.5;
        for i in 0..m / 2 {
            grid[m - i] = 1.0 - grid[i];
        }
    }
    Ok(grid)
}

/// The last component of the companion system is `f + w * |g|` (alpha-path)
/// or `f + w * g` (pathwise solve against a sampled slope `w`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Forcing {
    AlphaPath { phi_inv: f64 },
    Slope(f64),
}

/// `y_k' = y_{k+1}` for `k < n-1`, `y_{n-1}' = f(t, y) + forcing(g(t, y))`.
#[derive(Debug, Clone, Copy)]
pub struct FirstOrderSystem<'a> {
    spec: &'a UdeSpec,
    forcing: Forcing,
}

impl<'a> FirstOrderSystem<'a> {
    pub fn new(spec: &'a UdeSpec, forcing: Forcing) -> Self {
        Self { spec, forcing }
    }

    pub fn dimension(&self) -> usize {
        self.spec.order
    }

    pub fn spec(&self) -> &'a UdeSpec {
        self.spec
    }

    pub fn forcing(&self) -> Forcing {
        self.forcing
    }

    pub fn rhs(&self, t: f64, y: &[f64], out: &mut [f64]) -> Result<(), ExprError> {
        let n = self.spec.order;
        out[..n - 1].copy_from_slice(&y[1..n]);
        let env = Env::new(t, y);
        let f = self.spec.f.eval(&env)?;
        let g = self.spec.g.eval(&env)?;
        out[n - 1] = match self.forcing {
            Forcing::AlphaPath { phi_inv } => f + g.abs() * phi_inv,
            Forcing::Slope(slope) => f + g * slope,
        };
        Ok(())
    }
}

/// Companion first-order system of the alpha-path ODE.
pub fn companion_system(spec: &UdeSpec, alpha: f64) -> Result<FirstOrderSystem<'_>, UdeError> {
    Ok(FirstOrderSystem::new(
        spec,
        Forcing::AlphaPath {
            phi_inv: phi_inv(alpha)?,
        },
    ))
}
