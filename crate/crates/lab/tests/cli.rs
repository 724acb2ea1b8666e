use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use dirlab::RunConfig;
use proptest::prelude::*;

const SMALL_ARROW: &str = "[operator]\nfamily = log_ma\nn = 2\n\n[grid]\np = 1\ntorus_res = 4\ns_res = 4\ntheta_res = 4\n\n[arrow]\nn_min = 2\nn_max = 4\ninstances = 200\n\n[run]\nseed = 7\n";

const SMALL_SOLVE: &str = "[operator]\nfamily = log_ma\nn = 2\n\n[grid]\np = 1\ntorus_res = 8, 4\ns_res = 8\ntheta_res = 8\n\n[psi]\nsolution = 0.03*(cos(2*pi*x1) + cos(2*pi*theta)) + 0.5*s*s\n";

// ψ = 0 equals the boundary value of f for σ₂^{1/2}, so the problem is degenerate
const DEGENERATE_SOLVE: &str = "[operator]\nfamily = sigma_k_root\nn = 2\nk = 2\n\n[grid]\np = 1\ntorus_res = 4\ns_res = 4\ntheta_res = 4\n\n[psi]\nexpr = 0\n";

fn dirlab(cmd: &str, config: &str, dir: &Path, extra: &[&str]) -> Output {
    let cfg = dir.join("run.cfg");
    fs::write(&cfg, config).unwrap();
    Command::new(env!("CARGO_BIN_EXE_dirlab"))
        .arg(cmd)
        .arg(&cfg)
        .args(extra)
        .env_remove("DIRLAB_OUT")
        .current_dir(dir)
        .output()
        .unwrap()
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn missing_operator_section_exits_with_config_code() {
    let dir = tempfile::tempdir().unwrap();
    let out = dirlab("solve", "[grid]\np = 1\ntorus_res = 4\ns_res = 4\ntheta_res = 4\n", dir.path(), &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("operator"));
}

#[test]
fn empty_and_unreadable_configs_exit_with_config_code() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(dirlab("verify-cones", "", dir.path(), &[]).status.code(), Some(2));
    let missing = Command::new(env!("CARGO_BIN_EXE_dirlab")).args(["solve", "/nonexistent/run.cfg"]).output().unwrap();
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn verify_arrow_writes_csvs_and_manifest_with_seed_override() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("arrow-out");
    let out = dirlab("verify-arrow", SMALL_ARROW, dir.path(), &["--seed", "5", "--out", out_dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let arrow = fs::read_to_string(out_dir.join("arrow.csv")).unwrap();
    assert!(arrow.lines().count() > 1);
    let violations = fs::read_to_string(out_dir.join("violations.csv")).unwrap();
    assert_eq!(violations.lines().count(), 1, "only the header expected:\n{violations}");
    let manifest = json(&out_dir.join("manifest.json"));
    assert_eq!(manifest["seed"], 5);
    assert_eq!(manifest["exit_code"], 0);
    assert_eq!(manifest["subcommand"], "verify-arrow");
    assert_eq!(manifest["config_sha256"].as_str().unwrap().len(), 64);
}

#[test]
fn default_output_directory_follows_environment() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, SMALL_ARROW).unwrap();
    let root = dir.path().join("env-root");
    let status = Command::new(env!("CARGO_BIN_EXE_dirlab"))
        .arg("verify-arrow")
        .arg(&cfg)
        .env("DIRLAB_OUT", &root)
        .output()
        .unwrap()
        .status;
    assert!(status.success());
    assert!(root.join("verify-arrow").join("manifest.json").exists());

    let local = dirlab("verify-arrow", SMALL_ARROW, dir.path(), &[]);
    assert!(local.status.success());
    assert!(dir.path().join("dirlab-out").join("verify-arrow").join("arrow.csv").exists());
}

#[test]
fn manufactured_solve_reaches_tolerance() {
    let dir = tempfile::tempdir().unwrap();
    let out = dirlab("solve", SMALL_SOLVE, dir.path(), &["--out", "solve"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report = json(&dir.path().join("solve").join("report.json"));
    assert!(report["residual_sup"].as_f64().unwrap() < 1e-9, "{report}");
    assert!(report["error_vs_prescribed"].as_f64().unwrap() < 1e-8, "{report}");
    assert_eq!(report["t_path"].as_array().unwrap().last().unwrap().as_f64(), Some(1.0));
    let solution = fs::read_to_string(dir.path().join("solve").join("solution.csv")).unwrap();
    assert_eq!(solution.lines().count(), 1 + 8 * 4 * 8 * 8);
}

#[test]
fn degenerate_right_hand_side_is_a_solver_failure() {
    let dir = tempfile::tempdir().unwrap();
    let out = dirlab("solve", DEGENERATE_SOLVE, dir.path(), &["--out", "solve"]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
    let manifest = json(&dir.path().join("solve").join("manifest.json"));
    assert_eq!(manifest["exit_code"], 3);
}

fn operator_block() -> impl Strategy<Value = String> {
    (2usize..5).prop_flat_map(|n| {
        prop_oneof![
            Just(format!("family = log_ma\nn = {n}")),
            (1..=n).prop_map(move |k| format!("family = sigma_k_root\nn = {n}\nk = {k}")),
            (2..=n).prop_flat_map(move |k| (0..k).prop_map(move |l| format!("family = hessian_quotient\nn = {n}\nk = {k}\nl = {l}"))),
        ]
        .prop_map(move |op| (n, op))
    })
    .prop_map(|(n, op)| format!("[operator]\n{op}\n\n[grid]\np = {}\ntorus_res = 4\ns_res = 5\ntheta_res = 6\n", n - 1))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn serialized_configs_parse_back_identically(
        base in operator_block(),
        seed in any::<u64>(),
        tol in 1e-14f64..1e-6,
        samples in 1usize..100_000,
        eps in proptest::collection::vec(1e-8f64..1.0, 1..5),
    ) {
        let mut eps = eps;
        eps.sort_by(|a, b| b.partial_cmp(a).unwrap());
        eps.dedup();
        let list: Vec<String> = eps.iter().map(|e| format!("{e:?}")).collect();
        let text = format!("{base}\n[solver]\ntol_newton = {tol:?}\neps_schedule = {}\n\n[cones]\nsamples = {samples}\n\n[run]\nseed = {seed}\n", list.join(", "));
        let cfg = RunConfig::parse(&text).unwrap();
        prop_assert_eq!(cfg.seed, seed);
        prop_assert_eq!(cfg.solver.tol_newton, tol);
        prop_assert_eq!(&cfg.eps_schedule, &eps);
        let again = RunConfig::parse(&cfg.serialize()).unwrap();
        prop_assert_eq!(&again, &cfg);
        prop_assert_eq!(again.serialize(), cfg.serialize());
    }
}
