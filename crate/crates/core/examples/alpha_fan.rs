//! Solve the alpha-path fan of x'' = x + (2 + tanh x) dC/dt and print a few
//! quantile curves.

use udepath::{alpha_grid, solve_fan, AlphaGridSpec, UdeSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let spec = UdeSpec::new(2, "x0", "2 + tanh(x0)", &[0.1, 0.0], 1.0, 1e-3)?;
    let grid = alpha_grid(&AlphaGridSpec::default())?;
    let fan = solve_fan(&spec, &grid)?;
    println!(
        "{} alpha-paths, {} nodes each, h = {}",
        fan.paths.len(),
        fan.time_grid().node_count(),
        spec.step()
    );

    let shown = [0.01, 0.1, 0.5, 0.9, 0.99];
    print!("{:>6}", "t");
    for a in shown {
        print!("{:>14}", format!("alpha={a}"));
    }
    println!();
    for j in (0..=1000).step_by(125) {
        print!("{:>6.3}", fan.time_grid().time(j));
        for a in shown {
            let path = fan.paths.iter().find(|p| (p.alpha - a).abs() < 1e-12).unwrap();
            print!("{:>14.6}", path.trajectory.position(j));
        }
        println!();
    }
    Ok(())
}
