//! Run the regularity, condition (H) and monotonicity checks on a spec that
//! satisfies them and on two that do not.

use udepath::analysis::HypothesisReport;
use udepath::{alpha_grid, solve_fan, AlphaGridSpec, UdeSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let grid = alpha_grid(&AlphaGridSpec {
        count: 21,
        lo: 0.01,
        symmetric: true,
    })?;
    let specs = [
        ("f = x0, g = 2 + tanh(x0)", "x0", "2 + tanh(x0)"),
        ("f = -x0, g = 1", "0 - x0", "1"),
        ("f = 0, g = t - 0.5", "0", "t - 0.5"),
    ];
    for (name, f, g) in specs {
        let spec = UdeSpec::new(2, f, g, &[0.1, 0.0], 1.0, 1e-3)?;
        let fan = solve_fan(&spec, &grid)?;
        let r = HypothesisReport::run(&fan, 256, 1e-6, 0);
        println!("{name}");
        println!(
            "  regularity   {:5}  min g = {:.4} at t = {}",
            r.regularity.pass, r.regularity.min_g, r.regularity.min_t
        );
        if let Some(t) = r.regularity.last_violation_t {
            println!("               g <= 0 at {} nodes, up to t = {t}", r.regularity.violation_count);
        }
        let h = &r.condition_h;
        let min_f = h.min_partial_f.as_ref().map_or(f64::NAN, |s| s.value);
        let min_g = h.min_partial_g.as_ref().map_or(f64::NAN, |s| s.value);
        println!(
            "  condition H  {:5}  min df/dx0 = {min_f:.6}, min dg/dx0 = {min_g:.6} over {} points",
            h.pass,
            h.sampled_points + h.random_points
        );
        let m = &r.monotone;
        match (&m.min_gap, &m.first_crossing) {
            (_, Some(c)) => println!("  monotone     {:5}  alphas {} and {} cross at t = {}", m.pass, c.alpha_lo, c.alpha_hi, c.t),
            (Some(g), None) => println!("  monotone     {:5}  min gap {:.3e} at t = {}", m.pass, g.gap, g.t),
            (None, None) => println!("  monotone     {:5}", m.pass),
        }
    }
    Ok(())
}
