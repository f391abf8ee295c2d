//! Check a solved alpha-path against the integral form
//! x(t) = sum_k t^k/k! x_k(0) + 1/(n-1)! int_0^t (t-s)^(n-1) F(s) ds.

use udepath::{integral_residual, solve_alpha_path, UdeSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let alpha = 0.9;
    let cases = [
        ("x'' = C'", UdeSpec::new(2, "0", "1", &[1.0, 2.0], 1.0, 1e-3)?),
        ("x'' = x + (2 + tanh x) C'", UdeSpec::new(2, "x0", "2 + tanh(x0)", &[0.1, 0.0], 1.0, 1e-3)?),
        ("x''' = x + (2 + tanh x) C'", UdeSpec::new(3, "x0", "2 + tanh(x0)", &[0.1, 0.0, 0.0], 1.0, 1e-3)?),
    ];
    for (name, spec) in cases {
        println!("{name}");
        for step in [1e-3, 5e-4] {
            let spec = spec.with_step(step)?;
            let path = solve_alpha_path(&spec, alpha)?;
            let r = integral_residual(&path, &spec, alpha)?;
            println!(
                "  h = {step:<7} max residual {:.3e} at t = {:.4}",
                r.max_residual, r.at_t
            );
        }
    }
    Ok(())
}
