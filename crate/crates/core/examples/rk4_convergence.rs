//! Endpoint error of the alpha-path solver against a fine reference as the
//! step is halved. Fourth order means a ratio near 16.

use udepath::{solve_alpha_path, UdeSpec};

fn endpoint(step: f64, alpha: f64) -> Vec<f64> {
    let spec = UdeSpec::new(2, "x0", "2 + tanh(x0)", &[0.1, 0.0], 1.0, step).unwrap();
    let path = solve_alpha_path(&spec, alpha).unwrap();
    let tr = &path.trajectory;
    tr.state(tr.node_count() - 1).to_vec()
}

fn main() {
    let alpha = 0.9;
    let steps = [2e-2, 1e-2, 5e-3, 2.5e-3];
    let reference = endpoint(steps[3] / 16.0, alpha);
    let mut previous: Option<f64> = None;
    println!("{:>10} {:>14} {:>8}", "h", "error", "ratio");
    for h in steps {
        let err = endpoint(h, alpha)
            .iter()
            .zip(&reference)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        let ratio = previous.map_or(String::new(), |p| format!("{:.2}", p / err));
        println!("{h:>10} {err:>14.3e} {ratio:>8}");
        previous = Some(err);
    }
}
