use alloc::vec;
use alloc::vec::Vec;

use super::pointwise::{mixed_pairs, real_coefficients, Pointwise};
use super::{linear, DirichletProblem, SolveReport, SolverOptions};
use crate::error::{Error, Result};
use crate::linalg::{Coefficients, HermMatrix};
use crate::prodgrid::{complex_entry, HermitianField, ScalarField};

/// Precomputed pieces shared by every evaluation of one problem.
pub(crate) struct Context<'a> {
    pub prob: &'a DirichletProblem,
    /// `χ + ∂∂̄φ_ext`
    base: HermitianField,
    pub phi_ext: ScalarField,
    pairs: Vec<(usize, usize)>,
    pub interior: Vec<usize>,
}

/// Residual, margin and (optionally) linearization at one iterate.
pub(crate) struct Evaluation {
    /// `f(λ(𝔤)) − target` on interior nodes, zero on the boundary.
    pub residual: Vec<f64>,
    pub values: Vec<f64>,
    pub margin: f64,
    pub coeffs: Option<Coefficients>,
}

impl Evaluation {
    pub fn sup(&self) -> f64 {
        self.residual.iter().fold(0.0, |m, r| m.max(r.abs()))
    }

    pub fn merit(&self) -> f64 {
        0.5 * self.residual.iter().map(|r| r * r).sum::<f64>()
    }
}

pub(crate) struct NewtonStats {
    pub iterations: usize,
    pub residual_sup: f64,
    pub margin: f64,
    pub linear_iterations: usize,
    pub max_linear_residual: f64,
}

impl<'a> Context<'a> {
    pub fn new(prob: &'a DirichletProblem) -> Result<Self> {
        let base = prob.chi.add(&prob.phi.extension_hessian(&prob.grid))?;
        let interior = (0..prob.grid.len()).filter(|&v| !prob.grid.is_boundary(v)).collect();
        Ok(Self { prob, base, phi_ext: prob.phi.extension(&prob.grid), pairs: mixed_pairs(prob.grid.n()), interior })
    }

    /// `u = φ_ext + w`
    pub fn compose(&self, w: &[f64]) -> ScalarField {
        ScalarField::new(self.phi_ext.values().iter().zip(w).map(|(a, b)| a + b).collect())
    }

    pub fn decompose(&self, u: &ScalarField) -> Vec<f64> {
        let mut w: Vec<f64> = u.values().iter().zip(self.phi_ext.values()).map(|(a, b)| a - b).collect();
        for v in self.prob.grid.boundary_nodes() {
            w[v] = 0.0;
        }
        w
    }

    /// `𝔤[φ_ext + w]` at `node`.
    pub fn metric_at(&self, w: &[f64], node: usize, d2: &mut [f64]) -> HermMatrix {
        let mut g = HermMatrix::zeros(self.prob.grid.n());
        self.metric_into(w, node, d2, &mut g);
        g
    }

    pub fn metric_into(&self, w: &[f64], node: usize, d2: &mut [f64], g: &mut HermMatrix) {
        let grid = &self.prob.grid;
        let n = grid.n();
        grid.real_second_derivatives(w, node, d2);
        for j in 0..n {
            for k in j..n {
                g.set_hermitian(j, k, self.base.get(node, j, k) + complex_entry(d2, n, j, k));
            }
        }
    }

    /// `None` when some interior node leaves the cone.
    pub fn evaluate(&self, w: &[f64], target: &[f64], with_coeffs: bool) -> Option<Evaluation> {
        let grid = &self.prob.grid;
        let mut point = Pointwise::new(&self.prob.op, self.prob.omega.inv_sqrt());
        let n = grid.n();
        let mut d2 = vec![0.0; 4 * n * n];
        let mut g = HermMatrix::zeros(n);
        let mut residual = vec![0.0; grid.len()];
        let mut values = vec![f64::NAN; grid.len()];
        let mut margin = f64::INFINITY;
        let mut coeffs = with_coeffs.then(|| Coefficients::zeros(grid.lattice().clone(), self.pairs.clone()));
        for &node in &self.interior {
            self.metric_into(w, node, &mut d2, &mut g);
            let (value, m) = match coeffs.as_mut() {
                Some(c) => {
                    let vm = point.evaluate(&g)?;
                    real_coefficients(&point.phi, &self.pairs, c.node_mut(node));
                    vm
                }
                None => point.value(&g)?,
            };
            values[node] = value;
            residual[node] = value - target[node];
            margin = margin.min(m);
        }
        Some(Evaluation { residual, values, margin, coeffs })
    }

    /// Damped Newton on `f(λ(𝔤[φ_ext + w])) = target`, updating `w`.
    pub fn newton(&self, w: &mut Vec<f64>, target: &[f64], opts: &SolverOptions) -> Result<NewtonStats> {
        let mut eval = self
            .evaluate(w, target, true)
            .ok_or_else(|| Error::Precondition("initial iterate is not admissible".into()))?;
        let mut stats = NewtonStats { iterations: 0, residual_sup: eval.sup(), margin: eval.margin, linear_iterations: 0, max_linear_residual: 0.0 };
        let mut delta = vec![0.0; w.len()];
        let mut trial = vec![0.0; w.len()];
        loop {
            stats.residual_sup = eval.sup();
            stats.margin = eval.margin;
            if stats.residual_sup < opts.tol_newton {
                return Ok(stats);
            }
            if stats.iterations >= opts.max_newton {
                return Err(Error::NoConvergence { iterations: stats.iterations, residual: stats.residual_sup });
            }
            stats.iterations += 1;
            let rhs: Vec<f64> = eval.residual.iter().map(|r| -r).collect();
            delta.iter_mut().for_each(|d| *d = 0.0);
            let coeffs = eval.coeffs.as_ref().expect("coefficients were requested");
            let lin = linear::solve(coeffs, &rhs, &mut delta, &opts.linear)?;
            stats.linear_iterations += lin.iterations;
            stats.max_linear_residual = stats.max_linear_residual.max(lin.relative_residual);

            let merit0 = eval.merit();
            let mut step = 1.0;
            eval = loop {
                for ((t, w), d) in trial.iter_mut().zip(w.iter()).zip(&delta) {
                    *t = w + step * d;
                }
                if let Some(e) = self.evaluate(&trial, target, true) {
                    if e.merit() <= (1.0 - 2.0 * opts.armijo * step) * merit0 {
                        break e;
                    }
                }
                step *= 0.5;
                if step < opts.min_step {
                    return Err(Error::NonAdmissibleStep { iteration: stats.iterations });
                }
            };
            core::mem::swap(w, &mut trial);
        }
    }
}

/// Newton's method for the problem's own `ψ` from `u_init`; boundary values
/// of `u_init` are replaced by the Dirichlet data.
pub fn newton_solve(prob: &DirichletProblem, u_init: &ScalarField, opts: &SolverOptions) -> Result<SolveReport> {
    if u_init.len() != prob.grid.len() {
        return Err(Error::DimensionMismatch { expected: prob.grid.len(), got: u_init.len() });
    }
    let ctx = Context::new(prob)?;
    let mut w = ctx.decompose(u_init);
    let stats = ctx.newton(&mut w, prob.psi.values(), opts)?;
    Ok(SolveReport {
        u: ctx.compose(&w),
        newton_iters: vec![stats.iterations],
        t_path: vec![1.0],
        residual_sup: stats.residual_sup,
        admissibility_margin: stats.margin,
        linear_iterations: stats.linear_iterations,
        max_linear_residual: stats.max_linear_residual,
    })
}

/// `f(λ(𝔤[u])) − ψ` on interior nodes (zero on the boundary), with `u`'s
/// boundary values replaced by the Dirichlet data.
pub fn residual_field(prob: &DirichletProblem, u: &ScalarField) -> Result<ScalarField> {
    let ctx = Context::new(prob)?;
    let w = ctx.decompose(u);
    let e = ctx.evaluate(&w, prob.psi.values(), false).ok_or(Error::OutsideCone)?;
    Ok(ScalarField::new(e.residual))
}

/// `𝔤[u] = χ + ∂∂̄u` at every node of `M̄`, with `u`'s boundary values
/// replaced by the Dirichlet data.
pub fn metric_field(prob: &DirichletProblem, u: &ScalarField) -> Result<HermitianField> {
    if u.len() != prob.grid.len() {
        return Err(Error::DimensionMismatch { expected: prob.grid.len(), got: u.len() });
    }
    let ctx = Context::new(prob)?;
    let w = ctx.decompose(u);
    let n = prob.grid.n();
    let mut out = HermitianField::zeros(n, prob.grid.len());
    let mut d2 = vec![0.0; 4 * n * n];
    let mut g = HermMatrix::zeros(n);
    for node in 0..prob.grid.len() {
        ctx.metric_into(&w, node, &mut d2, &mut g);
        out.set_matrix(node, &g);
    }
    Ok(out)
}

/// Relative mismatch between the assembled Jacobian applied to `v` and the
/// centered difference `(r(u + hv) − r(u − hv)) / 2h`, over interior nodes.
pub fn jacobian_fd_check(prob: &DirichletProblem, u: &ScalarField, v: &ScalarField, step: f64) -> Result<f64> {
    let ctx = Context::new(prob)?;
    let w = ctx.decompose(u);
    let mut dir = v.values().to_vec();
    for b in prob.grid.boundary_nodes() {
        dir[b] = 0.0;
    }
    let psi = prob.psi.values();
    let e = ctx.evaluate(&w, psi, true).ok_or(Error::OutsideCone)?;
    let matrix = e.coeffs.expect("coefficients were requested").assemble();
    let mut jv = vec![0.0; w.len()];
    matrix.matvec(&dir, &mut jv);
    let shifted = |sign: f64| -> Result<Vec<f64>> {
        let ws: Vec<f64> = w.iter().zip(&dir).map(|(a, d)| a + sign * step * d).collect();
        Ok(ctx.evaluate(&ws, psi, false).ok_or(Error::OutsideCone)?.residual)
    };
    let (up, down) = (shifted(1.0)?, shifted(-1.0)?);
    let (mut num, mut den) = (0.0f64, 0.0f64);
    for &node in &ctx.interior {
        let fd = (up[node] - down[node]) / (2.0 * step);
        num = num.max((fd - jv[node]).abs());
        den = den.max(jv[node].abs());
    }
    Ok(if den == 0.0 { num } else { num / den })
}

