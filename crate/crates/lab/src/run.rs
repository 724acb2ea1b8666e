//! Subcommand implementations. Each writes its artifacts into an
//! [`OutputDir`]; failures after the problem is set up still leave a report.

use std::io;
use std::path::Path;
use std::time::Instant;

use dirlab_core::arrowspec::{run_localization_batch, LocalizationBatch};
use dirlab_core::dirichlet::{construct_subsolution, continuity_solve, solve_degenerate, SolveReport};
use dirlab_core::harness::{guan_inequality_probe, EstimateProbe, ProbeRow};
use dirlab_core::prodgrid::{ProductGrid, ScalarField};
use dirlab_core::symcone::{verify_growth_criteria, EigenVector, Family, OperatorSpec};
use serde::Serialize;
use thiserror::Error;

use crate::config::{coordinate_names, ConfigError, RunConfig};
use crate::output::{Cell, OutputDir};
use crate::problem::{build_problem, prescribed_solution, rung_grid};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Subcommand {
    VerifyCones,
    VerifyArrow,
    Subsolution,
    Solve,
    SolveDegenerate,
    ProbeEstimates,
    Compare,
}

impl Subcommand {
    pub fn name(self) -> &'static str {
        match self {
            Subcommand::VerifyCones => "verify-cones",
            Subcommand::VerifyArrow => "verify-arrow",
            Subcommand::Subsolution => "subsolution",
            Subcommand::Solve => "solve",
            Subcommand::SolveDegenerate => "solve-degenerate",
            Subcommand::ProbeEstimates => "probe-estimates",
            Subcommand::Compare => "compare",
        }
    }
}

#[derive(Debug, Error)]
pub enum RunError {
    #[error("config: {0}")]
    Config(#[from] ConfigError),
    #[error("solver: {0}")]
    Solver(#[from] dirlab_core::Error),
    /// A property check ran to completion and found violations.
    #[error("check failed: {0}")]
    Check(String),
    #[error("io: {0}")]
    Io(#[from] io::Error),
}

impl From<csv::Error> for RunError {
    fn from(e: csv::Error) -> Self {
        RunError::Io(e.into())
    }
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => 2,
            RunError::Solver(_) | RunError::Check(_) => 3,
            RunError::Io(_) => 1,
        }
    }
}

pub fn run(cmd: Subcommand, cfg: &RunConfig, out: &mut OutputDir) -> Result<(), RunError> {
    match cmd {
        Subcommand::VerifyCones => verify_cones(cfg, out),
        Subcommand::VerifyArrow => verify_arrow(cfg, out),
        Subcommand::Subsolution => subsolution(cfg, out),
        Subcommand::Solve => solve(cfg, out),
        Subcommand::SolveDegenerate => solve_eps(cfg, out),
        Subcommand::ProbeEstimates => probe(cfg, out),
        Subcommand::Compare => compare(cfg, out),
    }
}

fn elapsed_ms(t: Instant) -> f64 {
    t.elapsed().as_secs_f64() * 1e3
}

/// Every operator of the configured dimension: `log`, each `σ_k^{1/k}` and
/// each quotient `(σ_k/σ_l)^{1/(k−l)}` with `1 ≤ l < k`.
fn operator_suite(n: usize) -> Result<Vec<OperatorSpec>, dirlab_core::Error> {
    let mut ops = vec![OperatorSpec::log_ma(n)?];
    for k in 1..=n {
        ops.push(OperatorSpec::sigma_k_root(k, n)?);
    }
    for k in 2..=n {
        for l in 1..k {
            ops.push(OperatorSpec::hessian_quotient(k, l, n)?);
        }
    }
    Ok(ops)
}

fn family_cells(op: &OperatorSpec) -> [Cell; 3] {
    let (name, k, l) = match op.family {
        Family::LogMa => ("log_ma", op.n, 0),
        Family::SigmaKRoot { k } => ("sigma_k_root", k, 0),
        Family::HessianQuotient { k, l } => ("hessian_quotient", k, l),
    };
    [name.into(), k.into(), l.into()]
}

fn verify_cones(cfg: &RunConfig, out: &mut OutputDir) -> Result<(), RunError> {
    let mut rows = Vec::new();
    let mut failed = Vec::new();
    for (i, op) in operator_suite(cfg.operator.n)?.iter().enumerate() {
        let r = verify_growth_criteria(op, cfg.cone_samples, cfg.seed.wrapping_add(i as u64))?;
        if !r.passed() {
            failed.push(op.family.to_string());
        }
        let mut row: Vec<Cell> = family_cells(op).into();
        row.extend([
            op.n.into(),
            r.samples.into(),
            r.min_grad_component.into(),
            r.min_pairing.into(),
            r.min_increment.into(),
            r.min_euler.into(),
            r.strict_failures.into(),
            r.min_sumfi.into(),
            r.min_concavity.into(),
            r.max_grad_fd_rel_err.into(),
            r.max_symmetry_dev.into(),
            r.passed().into(),
        ]);
        rows.push(row);
    }
    out.csv(
        "cones.csv",
        &[
            "family",
            "k",
            "l",
            "n",
            "samples",
            "min_grad_component",
            "min_pairing",
            "min_increment",
            "min_euler",
            "strict_failures",
            "min_sumfi",
            "min_concavity",
            "max_grad_fd_rel_err",
            "max_symmetry_dev",
            "passed",
        ],
        rows,
    )?;
    if failed.is_empty() {
        Ok(())
    } else {
        Err(RunError::Check(format!("growth criteria violated for {}", failed.join(", "))))
    }
}

fn verify_arrow(cfg: &RunConfig, out: &mut OutputDir) -> Result<(), RunError> {
    let a = &cfg.arrow;
    let mut rows = Vec::new();
    let mut violating = Vec::new();
    let mut total = 0;
    for n in a.n_min..=a.n_max {
        let batch = LocalizationBatch {
            n,
            instances: a.instances,
            epsilons: a.epsilons.clone(),
            corner_factors: a.corner_factors.clone(),
            d_range: a.d_range,
            a_radius: a.a_radius,
            which: a.threshold,
            seed: cfg.seed.wrapping_add(n as u64),
        };
        let s = run_localization_batch(&batch, |r| {
            if r.violation {
                violating.push(vec![
                    r.n.into(),
                    r.instance.into(),
                    r.epsilon.into(),
                    r.corner_factor.into(),
                    r.corner.into(),
                    r.alpha_slack.into(),
                    r.top_slack.into(),
                    r.oracle_residual.into(),
                ]);
            }
        })?;
        total += s.violations;
        rows.push(vec![
            n.into(),
            s.evaluations.into(),
            s.violations.into(),
            s.top_below_corner.into(),
            s.min_alpha_slack.into(),
            s.min_top_slack.into(),
            s.max_oracle_residual.into(),
            s.max_trace_residual.into(),
            s.max_char_poly_residual.into(),
        ]);
    }
    out.csv(
        "arrow.csv",
        &[
            "n",
            "evaluations",
            "violations",
            "top_below_corner",
            "min_alpha_slack",
            "min_top_slack",
            "max_oracle_residual",
            "max_trace_residual",
            "max_char_poly_residual",
        ],
        rows,
    )?;
    out.csv(
        "violations.csv",
        &["n", "instance", "epsilon", "corner_factor", "corner", "alpha_slack", "top_slack", "oracle_residual"],
        violating,
    )?;
    if total == 0 {
        Ok(())
    } else {
        Err(RunError::Check(format!("{total} localization violations")))
    }
}

/// `node, boundary, <coordinates>, u`
fn write_field(out: &mut OutputDir, name: &str, grid: &ProductGrid, u: &ScalarField) -> Result<(), RunError> {
    let names = coordinate_names(grid.p());
    let mut header = vec!["node", "boundary"];
    header.extend(names.iter().map(String::as_str));
    header.push("u");
    let mut c = vec![0.0; grid.real_dims()];
    let rows = (0..grid.len()).map(|node| {
        grid.coords(node, &mut c);
        let mut row: Vec<Cell> = vec![node.into(), grid.is_boundary(node).into()];
        row.extend(c.iter().map(|&x| Cell::Float(x)));
        row.push(u[node].into());
        row
    });
    Ok(out.csv(name, &header, rows)?)
}

#[derive(Serialize)]
struct SubsolutionJson {
    t_star: f64,
    margin: f64,
    h_normal_max: f64,
    wall_ms: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

fn subsolution(cfg: &RunConfig, out: &mut OutputDir) -> Result<(), RunError> {
    let prob = build_problem(cfg, &cfg.grid)?;
    let start = Instant::now();
    match construct_subsolution(&prob, cfg.solver.margin_target, &cfg.solver) {
        Ok(sub) => {
            let json = SubsolutionJson { t_star: sub.t_star, margin: sub.margin, h_normal_max: sub.h_normal_max, wall_ms: elapsed_ms(start), error: None };
            out.json("subsolution.json", &json)?;
            write_field(out, "subsolution.csv", &prob.grid, &sub.u_sub)
        }
        Err(e) => {
            let json = SubsolutionJson { t_star: f64::NAN, margin: f64::NAN, h_normal_max: f64::NAN, wall_ms: elapsed_ms(start), error: Some(e.to_string()) };
            out.json("subsolution.json", &json)?;
            Err(e.into())
        }
    }
}

/// JSON form of a solve; `error` is set when the solve failed.
#[derive(Clone, Debug, Default, Serialize)]
pub struct ReportJson {
    pub residual_sup: Option<f64>,
    pub newton_iters: Vec<usize>,
    pub t_path: Vec<f64>,
    pub admissibility_margin: Option<f64>,
    pub wall_ms: f64,
    pub linear_iterations: usize,
    pub max_linear_residual: Option<f64>,
    /// `sup |u − u*|` when the config prescribes the solution.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error_vs_prescribed: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl ReportJson {
    fn from_report(r: &SolveReport, wall_ms: f64) -> Self {
        Self {
            residual_sup: Some(r.residual_sup),
            newton_iters: r.newton_iters.clone(),
            t_path: r.t_path.clone(),
            admissibility_margin: Some(r.admissibility_margin),
            wall_ms,
            linear_iterations: r.linear_iterations,
            max_linear_residual: Some(r.max_linear_residual),
            ..Default::default()
        }
    }

    fn failed(e: &dirlab_core::Error, wall_ms: f64) -> Self {
        Self { wall_ms, error: Some(e.to_string()), ..Default::default() }
    }
}

fn solve(cfg: &RunConfig, out: &mut OutputDir) -> Result<(), RunError> {
    let prob = build_problem(cfg, &cfg.grid)?;
    let start = Instant::now();
    let result = construct_subsolution(&prob, cfg.solver.margin_target, &cfg.solver).and_then(|sub| continuity_solve(&prob, &sub, &cfg.solver));
    match result {
        Ok(r) => {
            let mut json = ReportJson::from_report(&r, elapsed_ms(start));
            json.error_vs_prescribed = prescribed_solution(cfg, &prob.grid).map(|u| u.sup_distance(&r.u));
            out.json("report.json", &json)?;
            write_field(out, "solution.csv", &prob.grid, &r.u)
        }
        Err(e) => {
            out.json("report.json", &ReportJson::failed(&e, elapsed_ms(start)))?;
            Err(e.into())
        }
    }
}

fn solve_eps(cfg: &RunConfig, out: &mut OutputDir) -> Result<(), RunError> {
    let prob = build_problem(cfg, &cfg.grid)?;
    let start = Instant::now();
    match solve_degenerate(&prob, &cfg.eps_schedule, &cfg.solver, |_, _| {}) {
        Ok((r, table)) => {
            out.csv(
                "cauchy.csv",
                &["eps", "sup_diff_to_prev", "admissibility_margin", "residual_sup", "newton_iters"],
                table.rows.iter().map(|row| {
                    vec![row.eps.into(), row.sup_diff_to_prev.into(), row.admissibility_margin.into(), row.residual_sup.into(), row.newton_iters.into()]
                }),
            )?;
            out.json("report.json", &ReportJson::from_report(&r, elapsed_ms(start)))?;
            write_field(out, "solution.csv", &prob.grid, &r.u)
        }
        Err(e) => {
            out.json("report.json", &ReportJson::failed(&e, elapsed_ms(start)))?;
            Err(e.into())
        }
    }
}

#[derive(Serialize)]
struct VerdictJson {
    family: String,
    ladder: Vec<usize>,
    boundary_bounded: bool,
    global_bounded: bool,
    bounded: bool,
    guan_positive: bool,
    wall_ms: f64,
}

fn probe(cfg: &RunConfig, out: &mut OutputDir) -> Result<(), RunError> {
    let start = Instant::now();
    let family = cfg.operator.family.to_string();
    let mut probe = EstimateProbe::new(family.clone());
    let mut failure = None;
    for &res in &cfg.probe.ladder {
        let prob = build_problem(cfg, &rung_grid(cfg, res))?;
        let rows: Result<Vec<ProbeRow>, dirlab_core::Error> = if prob.is_nondegenerate() {
            construct_subsolution(&prob, cfg.solver.margin_target, &cfg.solver)
                .and_then(|sub| continuity_solve(&prob, &sub, &cfg.solver))
                .and_then(|r| Ok(vec![ProbeRow::measure(res, &r.u, &prob)?]))
        } else {
            let mut measured = Vec::new();
            let mut first_err = None;
            solve_degenerate(&prob, &cfg.eps_schedule, &cfg.solver, |_, u| match ProbeRow::measure(res, u, &prob) {
                Ok(row) => measured.push(row),
                Err(e) => {
                    first_err.get_or_insert(e);
                }
            })
            .and_then(|_| first_err.map_or(Ok(measured), Err))
        };
        match rows {
            Ok(rows) => rows.into_iter().try_for_each(|r| probe.push(r))?,
            Err(e) => {
                failure = Some(e);
                break;
            }
        }
    }
    out.csv(
        "probe.csv",
        &["resolution", "ratio_boundary", "ratio_global", "margin_min"],
        probe.rows().iter().map(|r| vec![r.resolution.into(), r.ratio_boundary.into(), r.ratio_global.into(), r.margin_min.into()]),
    )?;

    let mu = EigenVector::new(vec![1.0; cfg.operator.n])?;
    let mut guan_rows = Vec::new();
    let mut guan_positive = true;
    for (i, &beta) in cfg.probe.betas.iter().enumerate() {
        let g = guan_inequality_probe(&cfg.operator, &mu, beta, cfg.probe.guan_samples, cfg.seed.wrapping_add(i as u64))?;
        guan_positive &= g.positive();
        guan_rows.push(vec![beta.into(), g.samples.into(), g.accepted.into(), g.eps_hat.into()]);
    }
    out.csv("guan.csv", &["beta", "samples", "accepted", "eps_hat"], guan_rows)?;

    if let Some(e) = failure {
        return Err(e.into());
    }
    let verdict = probe.verdict()?;
    let json = VerdictJson {
        family,
        ladder: probe.ladder(),
        boundary_bounded: verdict.boundary_bounded,
        global_bounded: verdict.global_bounded,
        bounded: verdict.bounded(),
        guan_positive,
        wall_ms: elapsed_ms(start),
    };
    out.json("verdict.json", &json)?;
    if json.bounded && guan_positive {
        Ok(())
    } else {
        Err(RunError::Check("estimate ratios grew under refinement or the Guan probe was not positive".into()))
    }
}

/// A field written by [`write_field`].
struct SolutionFile {
    coords: Vec<Vec<f64>>,
    boundary: Vec<bool>,
    u: Vec<f64>,
}

fn read_field(path: &Path) -> Result<SolutionFile, RunError> {
    let bad = |m: String| RunError::Config(ConfigError::Invalid(format!("{}: {m}", path.display())));
    let mut rdr = csv::Reader::from_path(path).map_err(|e| bad(e.to_string()))?;
    let width = rdr.headers().map_err(|e| bad(e.to_string()))?.len();
    if width < 4 {
        return Err(bad("not a solution file".into()));
    }
    let mut file = SolutionFile { coords: Vec::new(), boundary: Vec::new(), u: Vec::new() };
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| bad(e.to_string()))?;
        let num = |j: usize| -> Result<f64, RunError> { rec[j].parse().map_err(|_| bad(format!("row {}: bad number `{}`", i + 2, &rec[j]))) };
        file.boundary.push(&rec[1] == "1");
        file.coords.push((2..width - 1).map(num).collect::<Result<_, _>>()?);
        file.u.push(num(width - 1)?);
    }
    Ok(file)
}

#[derive(Serialize)]
struct CompareJson {
    sup_diff: f64,
    sup_boundary_diff: f64,
    /// `sup_M |u¹ − u²| − sup_∂M |φ¹ − φ²|`
    excess: f64,
    tol: f64,
    holds: bool,
}

fn compare(cfg: &RunConfig, out: &mut OutputDir) -> Result<(), RunError> {
    let c = cfg.compare.as_ref().ok_or_else(|| ConfigError::Invalid("compare needs a [compare] section".into()))?;
    let (a, b) = (read_field(Path::new(&c.first))?, read_field(Path::new(&c.second))?);
    if a.coords != b.coords || a.boundary != b.boundary {
        return Err(ConfigError::Invalid("the two solution files are on different grids".into()).into());
    }
    let sup_diff = a.u.iter().zip(&b.u).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
    let sup_boundary_diff = a.u.iter().zip(&b.u).zip(&a.boundary).filter(|(_, &bd)| bd).fold(0.0f64, |m, ((x, y), _)| m.max((x - y).abs()));
    let excess = sup_diff - sup_boundary_diff;
    let json = CompareJson { sup_diff, sup_boundary_diff, excess, tol: c.tol, holds: excess <= c.tol };
    out.json("compare.json", &json)?;
    if json.holds {
        Ok(())
    } else {
        Err(RunError::Check(format!("sup difference exceeds the boundary difference by {excess:e}")))
    }
}
