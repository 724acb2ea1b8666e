//! Turning a [`RunConfig`] into a discrete problem.

use dirlab_core::dirichlet::{operator_values, BoundaryData, DirichletProblem};
use dirlab_core::prodgrid::{build_grid, GridConfig, HermitianField, Metric, ProductGrid, ScalarField};

use crate::config::{coordinate_names, ConfigError, PsiSource, RunConfig};
use crate::expr::Expr;

/// The configured problem on `grid` (the `[grid]` block or a ladder rung).
pub fn build_problem(cfg: &RunConfig, grid: &GridConfig) -> Result<DirichletProblem, ConfigError> {
    let invalid = |m: String| ConfigError::Invalid(m);
    let n = cfg.operator.n;
    let grid = build_grid(grid).map_err(|e| invalid(e.to_string()))?;
    let names = coordinate_names(grid.p());
    let compile = |e: &Expr| e.compile(&names).map_err(invalid);
    let chi = HermitianField::constant(grid.len(), &cfg.chi.to_matrix(n).map_err(invalid)?);
    let omega = Metric::new(cfg.omega.to_matrix(n).map_err(invalid)?).map_err(|e| invalid(e.to_string()))?;
    let psi_expr = compile(&cfg.psi.expr)?;
    let given = ScalarField::from_fn(&grid, |c| psi_expr.eval(c));
    if !given.is_finite() {
        return Err(invalid(format!("[psi] `{}` is not finite on the grid", cfg.psi.expr)));
    }
    let psi = match cfg.psi.source {
        PsiSource::Expr => given.clone(),
        PsiSource::Solution => operator_values(&cfg.operator, &grid, &chi, &omega, &given)
            .map_err(|e| invalid(format!("[psi] prescribed solution: {e}")))?,
    };
    let s_axis = grid.s_axis();
    let phi = match (&cfg.phi, cfg.psi.source) {
        (Some(phi), _) => {
            let (lower, upper) = (compile(&phi.lower)?, compile(&phi.upper)?);
            BoundaryData::from_fn(&grid, |c| if c[s_axis] < 0.5 { lower.eval(c) } else { upper.eval(c) })
        }
        (None, PsiSource::Solution) => BoundaryData::from_field(&grid, &given),
        (None, PsiSource::Expr) => BoundaryData::constant(&grid, 0.0, 0.0),
    };
    let phi = BoundaryData::new(phi.lower().to_vec(), phi.upper().to_vec()).map_err(|e| invalid(format!("[phi]: {e}")))?;
    DirichletProblem::new(cfg.operator, grid, chi, omega, psi, phi).map_err(|e| invalid(e.to_string()))
}

/// The prescribed solution of a `[psi] solution = …` config on `grid`.
pub fn prescribed_solution(cfg: &RunConfig, grid: &ProductGrid) -> Option<ScalarField> {
    (cfg.psi.source == PsiSource::Solution).then(|| {
        let f = cfg.psi.expr.compile(&coordinate_names(grid.p())).expect("validated at parse time");
        ScalarField::from_fn(grid, |c| f.eval(c))
    })
}

/// `[grid]` with the axes in `refine_axes` set to `res`.
pub fn rung_grid(cfg: &RunConfig, res: usize) -> GridConfig {
    let names = coordinate_names(cfg.grid.p);
    let mut torus: Vec<usize> = match cfg.grid.torus_res.len() {
        1 => vec![cfg.grid.torus_res[0]; 2 * cfg.grid.p],
        _ => cfg.grid.torus_res.clone(),
    };
    let refined = |axis: usize| cfg.probe.refine_axes.iter().any(|a| *a == names[axis]);
    for (axis, r) in torus.iter_mut().enumerate() {
        if refined(axis) {
            *r = res;
        }
    }
    let dims = names.len();
    GridConfig {
        p: cfg.grid.p,
        torus_res: torus,
        s_res: if refined(dims - 2) { res } else { cfg.grid.s_res },
        theta_res: if refined(dims - 1) { res } else { cfg.grid.theta_res },
    }
}
