//! Subcommand orchestration and artifact export.
//!
//! Every command writes into one run directory. Command-specific artifacts
//! (`fan.csv`, `checks.json`, `dist_t<t>.csv`, `oracle.json`) are never
//! overwritten without `force`. `run.json` is shared: it echoes the config
//! and collects per-command metadata, and may only be extended by a run
//! with an identical config.
//!
//! Exit codes: 0 success, 2 configuration, 3 numeric failure, 4 a check
//! or assertion failed, 5 a precondition refused the run.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::analysis::{expected_value, inverse_distribution, AnalysisError, HypothesisReport};
use crate::config::{ConfigError, Format, RunConfig};
use crate::oracle::{dominance_check, DominanceParams, DominanceReport, OracleError, Side};
use crate::solver::{solve_fan, AlphaFan, FanError, SolveError};
use crate::ude::{alpha_grid, UdeSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitStatus {
    Success = 0,
    Config = 2,
    Numeric = 3,
    CheckFailed = 4,
    Refused = 5,
}

impl ExitStatus {
    pub fn code(self) -> i32 {
        self as i32
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("numeric failure: {0}")]
    Numeric(String),
    #[error("check failed: {0}")]
    Check(String),
    #[error("refused: {0}")]
    Refused(String),
}

impl CliError {
    pub fn status(&self) -> ExitStatus {
        match self {
            CliError::Config(_) => ExitStatus::Config,
            CliError::Numeric(_) => ExitStatus::Numeric,
            CliError::Check(_) => ExitStatus::CheckFailed,
            CliError::Refused(_) => ExitStatus::Refused,
        }
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e.to_string())
    }
}

fn io_error(path: &Path, e: std::io::Error) -> CliError {
    CliError::Config(format!("{}: {e}", path.display()))
}

#[derive(Debug, Clone, PartialEq)]
pub enum Command {
    Solve,
    Check,
    Dist { t: f64 },
    Oracle,
}

#[derive(Debug, Clone)]
pub struct Invocation {
    pub command: Command,
    pub config: PathBuf,
    pub out: Option<PathBuf>,
    pub force: bool,
    pub overrides: Vec<String>,
}

/// What a successful or check-failing command produced.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub status: ExitStatus,
    pub out_dir: PathBuf,
    pub written: Vec<PathBuf>,
    pub summary: String,
}

/// Formats with 17 significant digits; parses back to the same bits.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// `fan.csv`: header `alpha,t,x0,...,x{n-1}`, one block of rows per alpha.
pub fn fan_csv(fan: &AlphaFan) -> String {
    let n = fan.spec.order();
    let mut out = String::from("alpha,t");
    for k in 0..n {
        write!(out, ",x{k}").unwrap();
    }
    out.push('\n');
    for path in &fan.paths {
        let alpha = fmt_f64(path.alpha);
        let tr = &path.trajectory;
        for j in 0..tr.node_count() {
            write!(out, "{alpha},{}", fmt_f64(tr.time(j))).unwrap();
            for v in tr.state(j) {
                write!(out, ",{}", fmt_f64(*v)).unwrap();
            }
            out.push('\n');
        }
    }
    out
}

pub fn dist_csv(entries: &[(f64, f64)]) -> String {
    let mut out = String::from("alpha,x\n");
    for (a, x) in entries {
        writeln!(out, "{},{}", fmt_f64(*a), fmt_f64(*x)).unwrap();
    }
    out
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serialization");
    s.push('\n');
    s
}

struct RunDir {
    path: PathBuf,
    force: bool,
    config_json: Value,
    written: Vec<PathBuf>,
}

impl RunDir {
    fn open(config: &RunConfig, inv: &Invocation) -> Result<Self, CliError> {
        let path = inv
            .out
            .clone()
            .or_else(|| config.output.directory.clone())
            .ok_or_else(|| {
                CliError::Config("no output directory: pass --out or set output.directory".into())
            })?;
        fs::create_dir_all(&path).map_err(|e| io_error(&path, e))?;
        Ok(Self {
            path,
            force: inv.force,
            config_json: serde_json::to_value(config).expect("config serialization"),
            written: Vec::new(),
        })
    }

    /// Fails before anything is written if an artifact would be clobbered.
    fn claim(&self, names: &[&str]) -> Result<(), CliError> {
        if self.force {
            return Ok(());
        }
        for name in names {
            let p = self.path.join(name);
            if p.exists() {
                return Err(CliError::Config(format!(
                    "refusing to overwrite {} (use --force)",
                    p.display()
                )));
            }
        }
        let run = self.path.join("run.json");
        if run.exists() {
            let existing = self.read_run()?;
            if existing.get("config") != Some(&self.config_json) {
                return Err(CliError::Config(format!(
                    "{} belongs to a different configuration (use --force or a new --out)",
                    run.display()
                )));
            }
        }
        Ok(())
    }

    fn read_run(&self) -> Result<Map<String, Value>, CliError> {
        let run = self.path.join("run.json");
        let text = fs::read_to_string(&run).map_err(|e| io_error(&run, e))?;
        match serde_json::from_str(&text) {
            Ok(Value::Object(map)) => Ok(map),
            _ => Err(CliError::Config(format!("{} is not a JSON object", run.display()))),
        }
    }

    fn write(&mut self, name: &str, contents: &str) -> Result<(), CliError> {
        let p = self.path.join(name);
        fs::write(&p, contents).map_err(|e| io_error(&p, e))?;
        self.written.push(p);
        Ok(())
    }

    /// Merges `section` into run.json under `key`.
    fn update_run(&mut self, key: &str, section: Value) -> Result<(), CliError> {
        let existing = if self.path.join("run.json").exists() {
            self.read_run()?
        } else {
            Map::new()
        };
        let mut run = if existing.get("config") == Some(&self.config_json) {
            existing
        } else {
            Map::new()
        };
        run.insert(
            "tool".into(),
            json!({"name": env!("CARGO_PKG_NAME"), "version": env!("CARGO_PKG_VERSION")}),
        );
        run.insert("config".into(), self.config_json.clone());
        run.insert(key.into(), section);
        self.write("run.json", &to_json(&run))
    }

    fn outcome(self, status: ExitStatus, summary: String) -> Outcome {
        Outcome {
            status,
            out_dir: self.path,
            written: self.written,
            summary,
        }
    }
}

fn build_fan(config: &RunConfig) -> Result<AlphaFan, CliError> {
    let spec = UdeSpec::from_raw(&config.raw_spec()).map_err(|e| CliError::Config(e.to_string()))?;
    let grid = alpha_grid(&config.alpha).map_err(|e| CliError::Config(e.to_string()))?;
    solve_fan(&spec, &grid).map_err(|e: FanError| match &e.source {
        SolveError::BlowUp { last_good_t, .. } => CliError::Numeric(format!(
            "alpha = {}: solution blew up, last good t = {last_good_t} ({e})",
            e.alpha
        )),
        _ => CliError::Numeric(e.to_string()),
    })
}

fn solver_metadata(fan: &AlphaFan) -> Value {
    let grid = fan.time_grid();
    let warnings: Vec<Value> = fan
        .paths
        .iter()
        .filter_map(|p| {
            p.trajectory.regularity.as_ref().map(|w| {
                json!({"alpha": p.alpha, "kind": "regularity", "first_t": w.first_t,
                       "count": w.count, "min_g": w.min_g, "min_t": w.min_t})
            })
        })
        .collect();
    json!({
        "method": "rk4",
        "step": grid.step(),
        "intervals": grid.intervals,
        "nodes": grid.node_count(),
        "alpha_count": fan.paths.len(),
        "warnings": warnings,
    })
}

pub fn cmd_solve(config: &RunConfig, inv: &Invocation) -> Result<Outcome, CliError> {
    let mut dir = RunDir::open(config, inv)?;
    dir.claim(&["fan.csv"])?;
    let fan = build_fan(config)?;
    if config.output.wants(Format::Csv) {
        dir.write("fan.csv", &fan_csv(&fan))?;
    }
    dir.update_run("solver", solver_metadata(&fan))?;
    let summary = format!(
        "solved {} alpha-paths on {} nodes",
        fan.paths.len(),
        fan.time_grid().node_count()
    );
    Ok(dir.outcome(ExitStatus::Success, summary))
}

pub fn cmd_check(config: &RunConfig, inv: &Invocation) -> Result<Outcome, CliError> {
    let mut dir = RunDir::open(config, inv)?;
    dir.claim(&["checks.json"])?;
    let fan = build_fan(config)?;
    let report = HypothesisReport::run(&fan, config.check.samples, config.check.eps, config.check.seed);
    if config.output.wants(Format::Json) {
        dir.write("checks.json", &to_json(&report))?;
    }
    dir.update_run("solver", solver_metadata(&fan))?;
    let verdict = |p: bool| if p { "pass" } else { "FAIL" };
    let mut summary = format!(
        "regularity: {}, condition (H): {}, monotone: {}",
        verdict(report.regularity.pass),
        verdict(report.condition_h.pass),
        verdict(report.monotone.pass),
    );
    if let Some(v) = report.condition_h.violations.first() {
        write!(
            summary,
            "\n  condition (H): d{:?}/dx0 = {:.6} at t = {}",
            v.which, v.value, v.t
        )
        .unwrap();
    }
    if let Some(t) = report.regularity.last_violation_t {
        write!(
            summary,
            "\n  regularity: g <= 0 at {} node(s), up to t = {t}",
            report.regularity.violation_count
        )
        .unwrap();
    }
    if let Some(c) = report.monotone.first_crossing {
        write!(
            summary,
            "\n  monotone: alphas {} and {} not ordered at t = {}",
            c.alpha_lo, c.alpha_hi, c.t
        )
        .unwrap();
    }
    let status = if report.pass() {
        ExitStatus::Success
    } else {
        ExitStatus::CheckFailed
    };
    Ok(dir.outcome(status, summary))
}

pub fn cmd_dist(config: &RunConfig, inv: &Invocation, t: f64) -> Result<Outcome, CliError> {
    let horizon = config.horizon;
    if !(t >= 0.0 && t <= horizon) {
        return Err(CliError::Config(format!("t out of range: {t} not in [0, {horizon}]")));
    }
    let mut dir = RunDir::open(config, inv)?;
    let fan = build_fan(config)?;
    let table = match inverse_distribution(&fan, t) {
        Ok(table) => table,
        Err(e @ AnalysisError::Monotonicity { .. }) => return Err(CliError::Check(e.to_string())),
        Err(e) => return Err(CliError::Config(e.to_string())),
    };
    let name = format!("dist_t{}.csv", table.t);
    dir.claim(&[&name])?;
    let expected = expected_value(&fan, table.t);
    if config.output.wants(Format::Csv) {
        dir.write(&name, &dist_csv(&table.entries))?;
    }
    let mut dists = Map::new();
    if dir.path.join("run.json").exists() {
        let run = dir.read_run()?;
        if run.get("config") == Some(&dir.config_json) {
            if let Some(existing) = run.get("dist").and_then(Value::as_object) {
                dists = existing.clone();
            }
        }
    }
    let entry = match &expected {
        Ok(ev) => json!({"t": table.t, "node": table.node, "degenerate": table.degenerate,
                         "expected_value": ev.value}),
        Err(e) => json!({"t": table.t, "node": table.node, "degenerate": table.degenerate,
                         "expected_value": null, "expected_value_error": e.to_string()}),
    };
    dists.insert(table.t.to_string(), entry);
    dir.update_run("dist", Value::Object(dists))?;
    let mut summary = format!("inverse distribution at t = {} ({} alphas)", table.t, table.entries.len());
    if table.degenerate {
        summary.push_str(", degenerate (t = 0)");
    }
    if let Ok(ev) = expected {
        write!(summary, ", expected value {}", ev.value).unwrap();
    }
    Ok(dir.outcome(ExitStatus::Success, summary))
}

#[derive(Debug, Serialize)]
struct OracleFile<'a> {
    delta: f64,
    n_paths: usize,
    segments: usize,
    seed: u64,
    pass: bool,
    reports: &'a [DominanceReport],
}

pub fn cmd_oracle(config: &RunConfig, inv: &Invocation) -> Result<Outcome, CliError> {
    let mut dir = RunDir::open(config, inv)?;
    dir.claim(&["oracle.json"])?;
    let spec = UdeSpec::from_raw(&config.raw_spec()).map_err(|e| CliError::Config(e.to_string()))?;
    let o = &config.oracle;
    let mut reports = Vec::new();
    for &alpha in &o.alphas {
        for side in [Side::Below, Side::Above] {
            let params = DominanceParams {
                alpha,
                delta: o.delta,
                n_paths: o.n_paths,
                segments: o.segments,
                side,
                seed: o.seed,
            };
            let report = dominance_check(&spec, &params).map_err(|e| match e {
                OracleError::Hypothesis { .. } => CliError::Refused(e.to_string()),
                OracleError::InvalidParameter(_) | OracleError::InvalidPath(_) | OracleError::Ude(_) => {
                    CliError::Config(e.to_string())
                }
                OracleError::AlphaPath(_) | OracleError::Path { .. } => CliError::Numeric(e.to_string()),
            })?;
            reports.push(report);
        }
    }
    let pass = reports.iter().all(|r| r.pass);
    let file = OracleFile {
        delta: o.delta,
        n_paths: o.n_paths,
        segments: o.segments,
        seed: o.seed,
        pass,
        reports: &reports,
    };
    if config.output.wants(Format::Json) {
        dir.write("oracle.json", &to_json(&file))?;
    }
    dir.update_run("oracle", json!({"pass": pass, "runs": reports.len()}))?;
    let mut summary = String::new();
    for r in &reports {
        writeln!(
            summary,
            "alpha {} {:?}: {} paths, {} violation(s), min margin {:e}",
            r.alpha, r.side, r.paths_tested, r.violation_count, r.min_margin
        )
        .unwrap();
    }
    let status = if pass {
        ExitStatus::Success
    } else {
        ExitStatus::CheckFailed
    };
    Ok(dir.outcome(status, summary.trim_end().to_string()))
}

/// Loads the config and dispatches. Errors carry their exit status.
pub fn run(inv: &Invocation) -> Result<Outcome, CliError> {
    let config = RunConfig::load(&inv.config, &inv.overrides)?;
    match inv.command {
        Command::Solve => cmd_solve(&config, inv),
        Command::Check => cmd_check(&config, inv),
        Command::Dist { t } => cmd_dist(&config, inv, t),
        Command::Oracle => cmd_oracle(&config, inv),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_format_round_trips() {
        for v in [0.1, 1.0 / 3.0, -2.5e-300, 1.2113921386, f64::MAX, 5e-324] {
            let s = fmt_f64(v);
            assert_eq!(s.parse::<f64>().unwrap().to_bits(), v.to_bits(), "{s}");
        }
        assert_eq!(fmt_f64(0.5), "5.0000000000000000e-1");
    }

    #[test]
    fn fan_csv_layout() {
        let spec = UdeSpec::new(2, "0", "1", &[0.0, 0.0], 1.0, 0.5).unwrap();
        let fan = solve_fan(&spec, &[0.25, 0.75]).unwrap();
        let csv = fan_csv(&fan);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "alpha,t,x0,x1");
        assert_eq!(lines.len(), 1 + 2 * 3);
        assert!(lines[1].starts_with("2.5000000000000000e-1,0.0000000000000000e0,"));
    }

    #[test]
    fn exit_codes() {
        assert_eq!(CliError::Config(String::new()).status().code(), 2);
        assert_eq!(CliError::Numeric(String::new()).status().code(), 3);
        assert_eq!(CliError::Check(String::new()).status().code(), 4);
        assert_eq!(CliError::Refused(String::new()).status().code(), 5);
        assert_eq!(ExitStatus::Success.code(), 0);
    }
}
