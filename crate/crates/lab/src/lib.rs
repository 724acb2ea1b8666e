//! Configuration, file formats and the command-line driver for
//! `dirlab-core`.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod expr;
pub mod output;
pub mod problem;
pub mod run;

use std::path::PathBuf;
use std::time::Instant;

pub use config::{ConfigError, RunConfig};
pub use run::{RunError, Subcommand};

use output::{sha256_hex, Manifest, OutputDir, Tolerances, Versions, OUT_ENV};

/// Output directory: the explicit choice, else `$DIRLAB_OUT/<subcommand>`,
/// else `dirlab-out/<subcommand>`.
pub fn output_root(explicit: Option<PathBuf>, cmd: Subcommand) -> PathBuf {
    explicit.unwrap_or_else(|| {
        let base = std::env::var_os(OUT_ENV).map_or_else(|| PathBuf::from("dirlab-out"), PathBuf::from);
        base.join(cmd.name())
    })
}

/// Parses `text`, runs `cmd` into `out_dir` and writes `manifest.json`.
/// Returns the process exit code.
pub fn execute(cmd: Subcommand, text: &str, seed: Option<u64>, out_dir: PathBuf) -> (i32, Option<RunError>) {
    let start = Instant::now();
    let mut cfg = match RunConfig::parse(text) {
        Ok(c) => c,
        Err(e) => {
            let e = RunError::Config(e);
            return (e.exit_code(), Some(e));
        }
    };
    if let Some(s) = seed {
        cfg.seed = s;
    }
    let mut out = match OutputDir::create(out_dir) {
        Ok(o) => o,
        Err(e) => {
            let e = RunError::Io(e);
            return (e.exit_code(), Some(e));
        }
    };
    let result = run::run(cmd, &cfg, &mut out);
    let code = result.as_ref().map_or_else(RunError::exit_code, |_| 0);
    let canonical = cfg.serialize();
    let manifest = Manifest {
        subcommand: cmd.name().into(),
        config_sha256: sha256_hex(&canonical),
        config: canonical,
        seed: cfg.seed,
        versions: Versions::current(),
        tolerances: Tolerances { tol_newton: cfg.solver.tol_newton, gmres_tol: cfg.solver.linear.tol, gmres_floor: cfg.solver.linear.floor },
        exit_code: code,
        outputs: out.written().to_vec(),
        wall_ms: start.elapsed().as_secs_f64() * 1e3,
    };
    if let Err(e) = out.json("manifest.json", &manifest) {
        let e = RunError::Io(e);
        return (e.exit_code(), Some(e));
    }
    (code, result.err())
}
