use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use fraclap::cli::{dispatch, load_config, Command, Overrides, EXIT_CONFIG};

#[derive(Parser)]
#[command(
    name = "fraclap",
    version,
    about = "Fractional Laplacian solver, optimal control and s -> 1 diagnostics"
)]
struct Args {
    #[command(subcommand)]
    command: Cmd,
    /// configuration file with `key = value` lines
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// output directory for CSV files
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    n: Option<usize>,
    #[arg(long, global = true)]
    s: Option<f64>,
    #[arg(long, global = true)]
    mu: Option<f64>,
    #[arg(long, global = true)]
    a: Option<f64>,
    #[arg(long, global = true)]
    b: Option<f64>,
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Subcommand, Clone, Copy)]
enum Cmd {
    /// Compare the forward solver with the closed-form solution
    Validate,
    /// Solve the forward problem once and write solution.csv
    Solve,
    /// Solve the optimal-control problem and write control.csv
    Control,
    /// Sweep s toward 1 and write sweep.csv
    Sweep,
    /// Check both Gamma-convergence clauses and write gamma.csv
    Gamma,
}

impl From<Cmd> for Command {
    fn from(c: Cmd) -> Self {
        match c {
            Cmd::Validate => Command::Validate,
            Cmd::Solve => Command::Solve,
            Cmd::Control => Command::Control,
            Cmd::Sweep => Command::Sweep,
            Cmd::Gamma => Command::Gamma,
        }
    }
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_CONFIG as u8 } else { 0 });
        }
    };
    let text = match &args.config {
        Some(path) => match std::fs::read_to_string(path) {
            Ok(t) => t,
            Err(e) => {
                eprintln!("error: cannot read {}: {e}", path.display());
                return ExitCode::from(EXIT_CONFIG as u8);
            }
        },
        None => String::new(),
    };
    let overrides = Overrides {
        out_dir: args.out,
        n: args.n,
        s: args.s,
        mu: args.mu,
        a: args.a,
        b: args.b,
        tol: args.tol,
        workers: args.workers,
        seed: args.seed,
    };
    let cfg = match load_config(&text, &overrides) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_CONFIG as u8);
        }
    };
    let code = dispatch(
        &cfg,
        args.command.into(),
        &mut std::io::stdout(),
        &mut std::io::stderr(),
    );
    ExitCode::from(code as u8)
}
