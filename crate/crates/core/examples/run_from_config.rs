//! Drive the full pipeline from a config file, as the `udepath` binary does.
//!
//! cargo run --example run_from_config -- configs/tanh.toml /tmp/udepath-run

use std::path::PathBuf;

use udepath::cli::{run, Command, Invocation};

fn main() {
    let mut args = std::env::args().skip(1);
    let config = args
        .next()
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("configs/tanh.toml"));
    let out = args
        .next()
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("udepath-example-run"));

    let commands = [Command::Solve, Command::Check, Command::Dist { t: 0.5 }, Command::Oracle];
    for command in commands {
        let inv = Invocation {
            command: command.clone(),
            config: config.clone(),
            out: Some(out.clone()),
            force: true,
            overrides: vec!["oracle.n_paths=50".into()],
        };
        match run(&inv) {
            Ok(outcome) => {
                println!("{command:?} -> exit {}", outcome.status.code());
                println!("{}", outcome.summary);
            }
            Err(e) => {
                println!("{command:?} -> exit {}: {e}", e.status().code());
            }
        }
    }
    println!("artifacts in {}", out.display());
}
