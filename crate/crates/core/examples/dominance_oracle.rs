//! Sample Lipschitz driving paths with slopes below phi_inv(alpha - delta)
//! (or above phi_inv(alpha + delta)) and check that their trajectories stay
//! on the predicted side of the alpha-path.

use udepath::{dominance_check, DominanceParams, Side, UdeSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let spec = UdeSpec::new(2, "x0", "2 + tanh(x0)", &[0.1, 0.0], 1.0, 1e-3)?;
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
            let r = dominance_check(&spec, &params)?;
            println!(
                "alpha {alpha} {side:?}: slope bound {:+.5}, {} paths, {} violations, min margin {:.3e} at t = {}",
                r.slope_bound, r.paths_tested, r.violation_count, r.min_margin, r.min_margin_t
            );
        }
    }

    // The oracle refuses to run when f decreases in x0.
    let bad = UdeSpec::new(2, "0 - x0", "1", &[0.0, 0.0], 1.0, 1e-3)?;
    let params = DominanceParams {
        alpha: 0.5,
        delta: 0.05,
        n_paths: 10,
        segments: 8,
        side: Side::Below,
        seed: 0,
    };
    match dominance_check(&bad, &params) {
        Ok(_) => println!("unexpected: oracle ran on f = -x0"),
        Err(e) => println!("f = -x0: {e}"),
    }
    Ok(())
}
