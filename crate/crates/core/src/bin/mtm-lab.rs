use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use mtm_lab::harness::{load_config, run, Command};
use mtm_lab::Error;

#[derive(Parser)]
#[command(name = "mtm-lab", version, about = "Numerical lab for the massive Thirring model")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Evolve the initial data with the split-step solver
    Simulate(Args),
    /// Direct transform: reflection coefficients and discrete spectrum
    Scatter(Args),
    /// Leading-order long-time fields along a ray
    Predict(Args),
    /// Exact multi-soliton fields
    Soliton(Args),
    /// Fields from scattering data via the Riemann-Hilbert problem
    Reconstruct(Args),
    /// Modified norming constants of each soliton in its cone
    Resolve(Args),
    /// Run the configured scenario and judge it against its tolerances
    Report(Args),
}

#[derive(clap::Args)]
struct Args {
    #[arg(long)]
    config: PathBuf,
    /// Overrides `out_dir` from the config
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, args) = match cli.command {
        Cmd::Simulate(a) => (Command::Simulate, a),
        Cmd::Scatter(a) => (Command::Scatter, a),
        Cmd::Predict(a) => (Command::Predict, a),
        Cmd::Soliton(a) => (Command::Soliton, a),
        Cmd::Reconstruct(a) => (Command::Reconstruct, a),
        Cmd::Resolve(a) => (Command::Resolve, a),
        Cmd::Report(a) => (Command::Report, a),
    };
    let result = load_config(&args.config).and_then(|cfg| {
        let out = args.out.clone().unwrap_or_else(|| PathBuf::from(cfg.out_dir.as_deref().unwrap_or("runs")));
        run(command, &cfg, &out)
    });
    match result {
        Ok(o) => {
            println!("{}", o.dir.display());
            for c in &o.summary.checks {
                println!(
                    "{:<28} {:>12.4e} {} {:.4e}  {}",
                    c.name,
                    c.value,
                    c.relation,
                    c.limit,
                    if c.pass { "pass" } else { "FAIL" }
                );
            }
            if o.summary.pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e @ Error::Config(_)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
