//! Read the inverse uncertainty distribution off a fan, invert it at a few
//! points and compute the expected value.

use udepath::{
    alpha_grid, distribution_at, expected_value, inverse_distribution, solve_fan, AlphaGridSpec,
    UdeSpec,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let grid = alpha_grid(&AlphaGridSpec::default())?;

    let spec = UdeSpec::new(2, "x0", "2 + tanh(x0)", &[0.1, 0.0], 1.0, 1e-3)?;
    let fan = solve_fan(&spec, &grid)?;
    let table = inverse_distribution(&fan, 1.0)?;
    println!("inverse distribution at t = {} ({} alphas)", table.t, table.entries.len());
    for &(a, x) in table.entries.iter().step_by(14) {
        println!("  alpha {a:.2}  x {x:>10.6}");
    }
    for x in [-1.0, 0.0, 0.2, 1.0, 5.0] {
        let est = distribution_at(&table, x);
        let note = est.saturated.map_or(String::new(), |s| format!(" (clamped, {s:?})"));
        println!("  Phi_t({x}) = {:.6}{note}", est.alpha);
    }
    let ev = expected_value(&fan, 1.0)?;
    println!("  expected value {:.6}", ev.value);

    // x'' = C' with x(0) = 1, x'(0) = 2: the mean is 1 + 2t.
    let spec = UdeSpec::new(2, "0", "1", &[1.0, 2.0], 1.0, 1e-3)?;
    let fan = solve_fan(&spec, &grid)?;
    for t in [0.0, 0.5, 1.0] {
        let ev = expected_value(&fan, t)?;
        println!("parabola: E[x({t})] = {:.15} (1 + 2t = {})", ev.value, 1.0 + 2.0 * t);
    }
    Ok(())
}
