use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use dirlab::{execute, output_root, Subcommand};

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Command {
    /// Structural inequalities of every operator at the configured dimension.
    VerifyCones,
    /// Randomized eigenvalue localization for arrow matrices.
    VerifyArrow,
    /// Builds the subsolution of the configured problem.
    Subsolution,
    /// Solves the configured nondegenerate problem by continuation.
    Solve,
    /// Solves along the ε-schedule of a degenerate problem.
    SolveDegenerate,
    /// Estimate ratios across the grid ladder and the Guan probe.
    ProbeEstimates,
    /// Checks `sup |u¹ − u²| ≤ sup_∂ |φ¹ − φ²|` for two solution files.
    Compare,
}

impl From<Command> for Subcommand {
    fn from(c: Command) -> Self {
        match c {
            Command::VerifyCones => Subcommand::VerifyCones,
            Command::VerifyArrow => Subcommand::VerifyArrow,
            Command::Subsolution => Subcommand::Subsolution,
            Command::Solve => Subcommand::Solve,
            Command::SolveDegenerate => Subcommand::SolveDegenerate,
            Command::ProbeEstimates => Subcommand::ProbeEstimates,
            Command::Compare => Subcommand::Compare,
        }
    }
}

/// Dirichlet problems for complex Hessian equations on flat products.
#[derive(Debug, Parser)]
#[command(version)]
struct Cli {
    #[arg(value_enum)]
    command: Command,
    /// Run configuration.
    config: PathBuf,
    /// Overrides the configured seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory (default `$DIRLAB_OUT/<command>` or
    /// `dirlab-out/<command>`).
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cmd = Subcommand::from(cli.command);
    let text = match std::fs::read_to_string(&cli.config) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("dirlab: cannot read {}: {e}", cli.config.display());
            return ExitCode::from(2);
        }
    };
    let out = output_root(cli.out, cmd);
    let (code, err) = execute(cmd, &text, cli.seed, out.clone());
    if let Some(e) = err {
        eprintln!("dirlab {}: {e}", cmd.name());
    } else {
        println!("{} written to {}", cmd.name(), out.display());
    }
    ExitCode::from(code as u8)
}
