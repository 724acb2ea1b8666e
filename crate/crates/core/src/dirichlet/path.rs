use alloc::boxed::Box;
use alloc::vec;
use alloc::vec::Vec;

use super::newton::Context;
use super::{construct_subsolution, BoundaryData, DirichletProblem, SolveReport, SolverOptions, SubsolutionResult};
use crate::error::{Error, Result};
use crate::prodgrid::ScalarField;

fn recoverable(e: &Error) -> bool {
    matches!(e, Error::NonAdmissibleStep { .. } | Error::NoConvergence { .. } | Error::LinearSolve { .. })
}

/// Follows `F(𝔤[uᵗ]) = (1−t) F(𝔤[u_0]) + t ψ` from `t = 0` to `t = 1`.
fn follow_path(prob: &DirichletProblem, start: &ScalarField, opts: &SolverOptions) -> Result<SolveReport> {
    if !prob.is_nondegenerate() {
        return Err(Error::Precondition(alloc::format!(
            "inf ψ = {} does not exceed sup over ∂Γ of f = {}",
            prob.inf_psi(),
            prob.op.sup_boundary_f()
        )));
    }
    let ctx = Context::new(prob)?;
    let mut w = ctx.decompose(start);
    let psi = prob.psi.values();
    let start_eval = ctx
        .evaluate(&w, psi, false)
        .ok_or_else(|| Error::Precondition("path start is not admissible".into()))?;
    let f0 = start_eval.values;
    let mut report = SolveReport {
        u: ScalarField::new(Vec::new()),
        newton_iters: vec![0],
        t_path: vec![0.0],
        residual_sup: 0.0,
        admissibility_margin: start_eval.margin,
        linear_iterations: 0,
        max_linear_residual: 0.0,
    };
    let mut t = 0.0;
    // last accepted point before `t`, for the secant predictor
    let mut previous: Option<(f64, Vec<f64>)> = None;
    let mut dt = opts.dt_initial;
    let mut target = vec![0.0; w.len()];
    while t < 1.0 {
        let t_try = (t + dt).min(1.0);
        for &node in &ctx.interior {
            target[node] = (1.0 - t_try) * f0[node] + t_try * psi[node];
        }
        let mut w_try = w.clone();
        if let Some((t_prev, w_prev)) = &previous {
            let r = (t_try - t) / (t - t_prev);
            let predicted: Vec<f64> = w.iter().zip(w_prev).map(|(a, b)| a + r * (a - b)).collect();
            if ctx.evaluate(&predicted, &target, false).is_some() {
                w_try = predicted;
            }
        }
        match ctx.newton(&mut w_try, &target, opts) {
            Ok(stats) => {
                previous = Some((t, core::mem::replace(&mut w, w_try)));
                t = t_try;
                report.t_path.push(t);
                report.newton_iters.push(stats.iterations);
                report.residual_sup = stats.residual_sup;
                report.admissibility_margin = stats.margin;
                report.linear_iterations += stats.linear_iterations;
                report.max_linear_residual = report.max_linear_residual.max(stats.max_linear_residual);
                dt *= opts.dt_growth;
            }
            Err(e) if recoverable(&e) => {
                dt *= 0.5;
                if dt < opts.dt_min {
                    return Err(Error::ContinuationStuck { last_t: t });
                }
            }
            Err(e) => return Err(e),
        }
    }
    report.u = ctx.compose(&w);
    Ok(report)
}

/// Continuity method started from a subsolution.
pub fn continuity_solve(prob: &DirichletProblem, sub: &SubsolutionResult, opts: &SolverOptions) -> Result<SolveReport> {
    follow_path(prob, &sub.u_sub, opts)
}

/// One row of the ε-ladder of a degenerate solve.
#[derive(Clone, Debug, PartialEq)]
pub struct CauchyRow {
    pub eps: f64,
    /// `sup |u_ε − u_{ε_prev}|`; `None` for the first entry.
    pub sup_diff_to_prev: Option<f64>,
    pub admissibility_margin: f64,
    pub residual_sup: f64,
    pub newton_iters: usize,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct CauchyTable {
    pub rows: Vec<CauchyRow>,
}

impl CauchyTable {
    /// Successive differences shrink strictly.
    pub fn differences_decrease(&self) -> bool {
        let d: Vec<f64> = self.rows.iter().filter_map(|r| r.sup_diff_to_prev).collect();
        d.windows(2).all(|w| w[1] < w[0])
    }

    /// Margins decrease strictly and stay positive.
    pub fn margins_decrease_to_zero(&self) -> bool {
        self.rows.iter().all(|r| r.admissibility_margin > 0.0)
            && self.rows.windows(2).all(|w| w[1].admissibility_margin < w[0].admissibility_margin)
    }
}

/// Solves `F(𝔤[u_ε]) = ψ + ε` along a descending schedule, each solve
/// warm-started by a continuation path anchored at the previous solution.
/// `on_solution` sees every `(ε, u_ε)`.
pub fn solve_degenerate(
    prob: &DirichletProblem,
    eps_schedule: &[f64],
    opts: &SolverOptions,
    mut on_solution: impl FnMut(f64, &ScalarField),
) -> Result<(SolveReport, CauchyTable)> {
    if !prob.op.sup_boundary_f().is_finite() {
        return Err(Error::Precondition("degenerate solves need a finite boundary value of f".into()));
    }
    if eps_schedule.is_empty() || eps_schedule.iter().any(|e| !(*e > 0.0)) || eps_schedule.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::Domain("ε schedule must be positive and strictly decreasing".into()));
    }
    let mut table = CauchyTable::default();
    let mut last: Option<SolveReport> = None;
    for &eps in eps_schedule {
        let wrap = |e: Error| Error::AtEpsilon { eps, source: Box::new(e) };
        let lifted = prob.lifted(eps);
        let report = match &last {
            None => {
                let sub = construct_subsolution(&lifted, opts.margin_target, opts).map_err(wrap)?;
                continuity_solve(&lifted, &sub, opts).map_err(wrap)?
            }
            Some(prev) => follow_path(&lifted, &prev.u, opts).map_err(wrap)?,
        };
        on_solution(eps, &report.u);
        table.rows.push(CauchyRow {
            eps,
            sup_diff_to_prev: last.as_ref().map(|p| p.u.sup_distance(&report.u)),
            admissibility_margin: report.admissibility_margin,
            residual_sup: report.residual_sup,
            newton_iters: report.newton_iters.iter().sum(),
        });
        last = Some(report);
    }
    Ok((last.expect("schedule is non-empty"), table))
}

/// `sup_M |u¹ − u²| − sup_∂M |φ¹ − φ²|`
pub fn comparison_check(u1: &ScalarField, u2: &ScalarField, phi1: &BoundaryData, phi2: &BoundaryData) -> f64 {
    u1.sup_distance(u2) - phi1.sup_distance(phi2)
}
