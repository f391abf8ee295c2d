//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each,
//! and exits non-zero if any criterion fails.

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use udepath::analysis::{check_condition_h, check_regularity, Coefficient};
use udepath::solver::integral_residual;
use udepath::{
    alpha_grid, check_monotone, distribution_at, dominance_check, expected_value,
    inverse_distribution, phi_inv, solve_alpha_path, solve_fan, AlphaGridSpec, DominanceParams,
    Side, UdeSpec,
};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err<E: std::fmt::Debug>(e: E) -> String {
    format!("{e:?}")
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

fn tanh_spec(order: usize, step: f64) -> UdeSpec {
    let mut initial = vec![0.0; order];
    initial[0] = 0.1;
    UdeSpec::new(order, "x0", "2+tanh(x0)", &initial, 1.0, step).unwrap()
}

fn parabola_spec(order: usize, initial: &[f64], step: f64) -> UdeSpec {
    assert_eq!(initial.len(), order);
    UdeSpec::new(order, "0", "1", initial, 1.0, step).unwrap()
}

fn default_grid() -> Vec<f64> {
    alpha_grid(&AlphaGridSpec::default()).unwrap()
}

fn phi_inverse() -> Outcome {
    ensure(phi_inv(0.5).map_err(err)? == 0.0, || "phi_inv(0.5) != 0".into())?;
    let mut worst: f64 = 0.0;
    for i in 1..1000 {
        let a = i as f64 / 1000.0;
        let s = phi_inv(a).map_err(err)? + phi_inv(1.0 - a).map_err(err)?;
        worst = worst.max(s.abs());
    }
    ensure(worst <= 1e-14, || format!("antisymmetry defect {worst:e}"))?;
    let v = phi_inv(0.9).map_err(err)?;
    ensure((v - 1.21139).abs() <= 1e-5, || format!("phi_inv(0.9) = {v}"))?;
    Ok(format!("antisymmetry {worst:.1e}, phi_inv(0.9) = {v:.6}"))
}

fn closed_form_paths() -> Outcome {
    let mut worst: f64 = 0.0;
    for initial in [vec![0.0, 0.0], vec![1.0, 2.0], vec![0.0, 0.0, 0.0], vec![1.0, -2.0, 3.0]] {
        let n = initial.len();
        let spec = parabola_spec(n, &initial, 1e-3);
        let grid = default_grid();
        let fan = solve_fan(&spec, &grid).map_err(err)?;
        for path in &fan.paths {
            let c = phi_inv(path.alpha).map_err(err)?;
            let tr = &path.trajectory;
            for j in 0..tr.node_count() {
                let t = tr.time(j);
                let exact: f64 = initial
                    .iter()
                    .enumerate()
                    .map(|(k, x)| t.powi(k as i32) / factorial(k) * x)
                    .sum::<f64>()
                    + c * t.powi(n as i32) / factorial(n);
                worst = worst.max((tr.position(j) - exact).abs());
            }
        }
    }
    ensure(worst <= 1e-10, || format!("max deviation {worst:e}"))?;
    Ok(format!("max deviation {worst:.1e} over n=2,3 fans"))
}

fn endpoint(spec: &UdeSpec, alpha: f64) -> Result<Vec<f64>, String> {
    let path = solve_alpha_path(spec, alpha).map_err(err)?;
    let tr = &path.trajectory;
    Ok(tr.state(tr.node_count() - 1).to_vec())
}

fn rk4_order() -> Outcome {
    let steps = [1e-2, 5e-3, 2.5e-3];
    let mut lines = Vec::new();
    for alpha in [0.1, 0.9] {
        let reference = endpoint(&tanh_spec(2, steps[2] / 16.0), alpha)?;
        let errors = steps
            .iter()
            .map(|&h| {
                let e = endpoint(&tanh_spec(2, h), alpha)?;
                Ok(e.iter()
                    .zip(&reference)
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max))
            })
            .collect::<Result<Vec<f64>, String>>()?;
        let ratios = [errors[0] / errors[1], errors[1] / errors[2]];
        ensure(ratios.iter().all(|r| *r >= 13.0), || {
            format!("alpha {alpha}: errors {errors:?}, ratios {ratios:?}")
        })?;
        lines.push(format!("alpha {alpha}: ratios {:.2}, {:.2}", ratios[0], ratios[1]));
    }
    Ok(lines.join("; "))
}

fn residuals() -> Outcome {
    let alpha = 0.9;
    let poly = parabola_spec(2, &[1.0, 2.0], 1e-3);
    let p = integral_residual(&solve_alpha_path(&poly, alpha).map_err(err)?, &poly, alpha).map_err(err)?;
    ensure(p.max_residual <= 1e-10, || format!("polynomial residual {:e}", p.max_residual))?;

    let coarse = tanh_spec(2, 1e-3);
    let fine = tanh_spec(2, 5e-4);
    let rc = integral_residual(&solve_alpha_path(&coarse, alpha).map_err(err)?, &coarse, alpha)
        .map_err(err)?;
    let rf = integral_residual(&solve_alpha_path(&fine, alpha).map_err(err)?, &fine, alpha)
        .map_err(err)?;
    ensure(rc.max_residual <= 1e-6, || format!("tanh residual {:e}", rc.max_residual))?;
    let ratio = rc.max_residual / rf.max_residual;
    ensure(ratio >= 8.0, || {
        format!("tanh residual {:e} -> {:e}, ratio {ratio}", rc.max_residual, rf.max_residual)
    })?;
    Ok(format!(
        "polynomial {:.1e}, tanh {:.1e} -> {:.1e} (ratio {ratio:.2})",
        p.max_residual, rc.max_residual, rf.max_residual
    ))
}

fn monotonicity() -> Outcome {
    let grid = default_grid();
    let specs = [
        ("parabola n=2", parabola_spec(2, &[0.0, 0.0], 1e-3)),
        ("parabola n=3", parabola_spec(3, &[0.0, 0.0, 0.0], 1e-3)),
        ("tanh n=2", tanh_spec(2, 1e-3)),
        ("tanh n=3", tanh_spec(3, 1e-3)),
    ];
    let mut lines = Vec::new();
    for (name, spec) in &specs {
        let fan = solve_fan(spec, &grid).map_err(err)?;
        let r = check_monotone(&fan);
        ensure(r.pass && r.pairs == 98 && !r.insufficient_grid, || format!("{name}: {r:?}"))?;
        let gap = r.min_gap.as_ref().map_or(f64::NAN, |g| g.gap);
        ensure(gap > 0.0, || format!("{name}: min gap {gap}"))?;
        lines.push(format!("{name} min gap {gap:.1e}"));
    }
    Ok(lines.join(", "))
}

fn dominance() -> Outcome {
    let specs = [
        ("parabola", parabola_spec(2, &[0.0, 0.0], 1e-3)),
        ("tanh", tanh_spec(2, 1e-3)),
    ];
    let mut tested = 0;
    let mut min_margin = f64::INFINITY;
    for (name, spec) in &specs {
        for alpha in [0.2, 0.8] {
            for side in [Side::Below, Side::Above] {
                let params = DominanceParams {
                    alpha,
                    delta: 0.05,
                    n_paths: 200,
                    segments: 32,
                    side,
                    seed: 0,
                };
                let r = dominance_check(spec, &params).map_err(err)?;
                ensure(r.pass && r.violation_count == 0 && r.paths_tested == 200, || {
                    format!("{name} alpha {alpha} {side:?}: {} violations, min margin {:e}", r.violation_count, r.min_margin)
                })?;
                tested += r.paths_tested;
                min_margin = min_margin.min(r.min_margin);
            }
        }
    }
    Ok(format!("{tested} paths, 0 violations, min margin {min_margin:.1e}"))
}

fn hypotheses() -> Outcome {
    let grid = default_grid();

    let bad_h = UdeSpec::new(2, "0-x0", "1", &[0.0, 0.0], 1.0, 1e-3).map_err(err)?;
    let fan = solve_fan(&bad_h, &grid).map_err(err)?;
    let h = check_condition_h(&bad_h, &fan, 256, 1e-6, 0);
    let worst = h.min_partial_f.as_ref().map_or(f64::NAN, |s| s.value);
    ensure(!h.pass && (worst + 1.0).abs() <= 1e-6, || {
        format!("f = -x0: pass {}, min df/dx0 {worst}", h.pass)
    })?;
    ensure(h.violations.iter().all(|v| v.which == Coefficient::F), || {
        "f = -x0: violation attributed to g".into()
    })?;

    let bad_g = UdeSpec::new(2, "0", "t-0.5", &[0.0, 0.0], 1.0, 1e-3).map_err(err)?;
    let fan = solve_fan(&bad_g, &grid).map_err(err)?;
    let r = check_regularity(&fan);
    let last = r.last_violation_t.unwrap_or(f64::NAN);
    ensure(!r.pass && last <= 0.5 && r.violations.iter().all(|v| v.t <= 0.5), || {
        format!("g = t-0.5: pass {}, last violation at {last}", r.pass)
    })?;

    for (name, spec) in [("parabola", parabola_spec(2, &[0.0, 0.0], 1e-3)), ("tanh", tanh_spec(2, 1e-3))] {
        let fan = solve_fan(&spec, &grid).map_err(err)?;
        let reg = check_regularity(&fan);
        let ch = check_condition_h(&spec, &fan, 256, 1e-6, 0);
        ensure(reg.pass && ch.pass, || format!("{name}: regularity {}, (H) {}", reg.pass, ch.pass))?;
    }
    Ok(format!(
        "min df/dx0 {worst:.6} on f=-x0; g=t-0.5 violations end at t={last}; blessed specs pass"
    ))
}

fn distribution_round_trip() -> Outcome {
    let grid = default_grid();
    let fan = solve_fan(&tanh_spec(2, 1e-3), &grid).map_err(err)?;
    let table = inverse_distribution(&fan, 1.0).map_err(err)?;
    let last = fan.time_grid().node_count() - 1;
    let mut worst: f64 = 0.0;
    for path in &fan.paths {
        let est = distribution_at(&table, path.trajectory.position(last));
        worst = worst.max((est.alpha - path.alpha).abs());
    }
    ensure(worst <= 1e-12, || format!("round trip defect {worst:e}"))?;

    let fan = solve_fan(&parabola_spec(2, &[1.0, 2.0], 1e-3), &grid).map_err(err)?;
    let mut worst_mean: f64 = 0.0;
    for j in (0..=1000).step_by(50) {
        let t = fan.time_grid().time(j);
        let ev = expected_value(&fan, t).map_err(err)?;
        worst_mean = worst_mean.max((ev.value - (1.0 + 2.0 * t)).abs());
    }
    ensure(worst_mean <= 1e-12, || format!("expected value defect {worst_mean:e}"))?;
    Ok(format!("round trip {worst:.1e}, expected value {worst_mean:.1e}"))
}

fn run_cli(config: &Path, out: &Path, command: &str) -> Result<(), String> {
    let status = Command::new(env!("CARGO_BIN_EXE_udepath"))
        .arg(command)
        .arg("--config")
        .arg(config)
        .arg("--out")
        .arg(out)
        .output()
        .map_err(err)?;
    ensure(status.status.success(), || {
        format!("{command} failed: {}", String::from_utf8_lossy(&status.stderr))
    })
}

fn reproducibility() -> Outcome {
    let config = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs/tanh.toml");
    let dirs = [tempfile::tempdir().map_err(err)?, tempfile::tempdir().map_err(err)?];
    for d in &dirs {
        run_cli(&config, d.path(), "solve")?;
        run_cli(&config, d.path(), "oracle")?;
    }
    for name in ["fan.csv", "oracle.json"] {
        let a = std::fs::read(dirs[0].path().join(name)).map_err(err)?;
        let b = std::fs::read(dirs[1].path().join(name)).map_err(err)?;
        ensure(!a.is_empty() && a == b, || format!("{name} differs between runs"))?;
    }
    Ok("fan.csv and oracle.json byte-identical".into())
}

fn main() {
    let criteria: [(&str, fn() -> Outcome, Duration); 9] = [
        ("1 phi_inv", phi_inverse, Duration::from_millis(1)),
        ("2 closed-form alpha-paths", closed_form_paths, Duration::from_secs(4)),
        ("3 RK4 order", rk4_order, Duration::from_secs(5)),
        ("4 integral residual", residuals, Duration::from_secs(5)),
        ("5 monotone fans", monotonicity, Duration::from_secs(10)),
        ("6 dominance oracle", dominance, Duration::from_secs(60)),
        ("7 hypothesis checkers", hypotheses, Duration::from_secs(5)),
        ("8 distribution round trip", distribution_round_trip, Duration::from_secs(1)),
        ("9 reproducibility", reproducibility, Duration::from_secs(60)),
    ];
    let mut failed = 0;
    for (name, run, budget) in criteria {
        let start = Instant::now();
        let result = run();
        let elapsed = start.elapsed();
        let result = result.and_then(|detail| {
            if elapsed <= budget {
                Ok(detail)
            } else {
                Err(format!("{detail}; took {elapsed:.2?}, budget {budget:?}"))
            }
        });
        match result {
            Ok(detail) => println!("criterion {name}: PASS ({detail}) [{elapsed:.2?}]"),
            Err(detail) => {
                failed += 1;
                println!("criterion {name}: FAIL ({detail}) [{elapsed:.2?}]");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", 9 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
