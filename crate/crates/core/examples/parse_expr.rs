//! Parse a coefficient, print its canonical form, evaluate it and take a
//! numerical partial derivative.
//!
//! cargo run --example parse_expr -- "2 + tanh(x0) * t^2"

use udepath::expr::{parse_str, Env, Var};

fn main() {
    let source = std::env::args()
        .nth(1)
        .unwrap_or_else(|| "2 + tanh(x0) * t^2".to_string());
    let order = 2;
    let expr = match parse_str(&source, order) {
        Ok(e) => e,
        Err(e) => {
            eprintln!("{source}: {e}");
            std::process::exit(2);
        }
    };
    println!("parsed:    {expr}");
    println!("variables: {:?}", expr.variables());

    let x = [0.3, -1.0];
    let env = Env::new(0.5, &x);
    match expr.eval(&env) {
        Ok(v) => println!("value at t=0.5, x=[0.3, -1]: {v}"),
        Err(e) => println!("cannot evaluate: {e}"),
    }
    match expr.partial_fd(Var::State(0), &env, 1e-6) {
        Ok(d) => println!("d/dx0 (central difference): {d}"),
        Err(e) => println!("cannot differentiate: {e}"),
    }

    for bad in ["x2 + 1", "sin x0", "1 +* 2", "log(x0)"] {
        match parse_str(bad, order) {
            Ok(_) => println!("{bad:>10}: ok"),
            Err(e) => println!("{bad:>10}: {e}"),
        }
    }
}
