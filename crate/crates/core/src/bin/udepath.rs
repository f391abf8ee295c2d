use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use udepath::cli::{run, Command, ExitStatus, Invocation};

#[derive(Parser)]
#[command(name = "udepath", version, about = "Alpha-path fans for higher-order uncertain differential equations")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Args)]
struct Common {
    /// Config file (TOML), or a previous run.json to reproduce
    #[arg(long)]
    config: PathBuf,
    /// Run directory (overrides output.directory)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Overwrite existing artifacts
    #[arg(long)]
    force: bool,
    /// Override a config key, e.g. --set alpha.count=9
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Solve the alpha-path fan and write fan.csv
    Solve(Common),
    /// Check regularity, condition (H) and monotonicity; write checks.json
    Check(Common),
    /// Write the inverse distribution table at time t
    Dist {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        t: f64,
    },
    /// Run the dominance oracle on both sides; write oracle.json
    Oracle(Common),
}

fn main() -> ExitCode {
    let (command, common) = match Cli::parse().command {
        Cmd::Solve(c) => (Command::Solve, c),
        Cmd::Check(c) => (Command::Check, c),
        Cmd::Dist { common, t } => (Command::Dist { t }, common),
        Cmd::Oracle(c) => (Command::Oracle, c),
    };
    let inv = Invocation {
        command,
        config: common.config,
        out: common.out,
        force: common.force,
        overrides: common.overrides,
    };
    let status = match run(&inv) {
        Ok(outcome) => {
            println!("{}", outcome.summary);
            for p in &outcome.written {
                println!("wrote {}", p.display());
            }
            if outcome.status != ExitStatus::Success {
                eprintln!("one or more checks failed");
            }
            outcome.status
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.status()
        }
    };
    ExitCode::from(status.code() as u8)
}
