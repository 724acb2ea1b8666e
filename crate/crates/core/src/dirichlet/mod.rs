//! Dirichlet problems `f(λ(χ + i∂∂̄u)) = ψ` in `X × S`, `u = φ` on
//! `X × ∂S`.
//!
//! The unknown is carried as `u = φ_ext + w` where `φ_ext` interpolates the
//! two boundary slices linearly in `s` and `w` vanishes on the boundary.
//! The Hessian of `φ_ext` is formed from the boundary data directly, so
//! solutions whose `s`-curvature is tiny (degenerate problems) are not
//! swamped by cancellation in second differences of `u`.

mod boundary;
mod linear;
mod newton;
mod path;
mod poisson;
mod pointwise;
mod subsolution;

pub use boundary::BoundaryData;
pub use newton::{jacobian_fd_check, metric_field, newton_solve, residual_field};
pub use path::{comparison_check, continuity_solve, solve_degenerate, CauchyRow, CauchyTable};
pub use poisson::{solve_poisson_s, solve_supersolution, CylinderField};
pub use subsolution::{construct_subsolution, SubsolutionResult, T_SUB_MAX};

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{GmresOptions, HermMatrix};
use crate::prodgrid::{complex_hessian, HermitianField, Metric, ProductGrid, ScalarField};
use crate::symcone::OperatorSpec;

#[derive(Clone, Debug, PartialEq)]
pub struct DirichletProblem {
    pub op: OperatorSpec,
    pub grid: ProductGrid,
    pub chi: HermitianField,
    pub omega: Metric,
    pub psi: ScalarField,
    pub phi: BoundaryData,
}

impl DirichletProblem {
    pub fn new(
        op: OperatorSpec,
        grid: ProductGrid,
        chi: HermitianField,
        omega: Metric,
        psi: ScalarField,
        phi: BoundaryData,
    ) -> Result<Self> {
        let n = grid.n();
        if op.n != n {
            return Err(Error::DimensionMismatch { expected: n, got: op.n });
        }
        if chi.n() != n || omega.n() != n {
            return Err(Error::DimensionMismatch { expected: n, got: if chi.n() != n { chi.n() } else { omega.n() } });
        }
        if chi.len() != grid.len() || psi.len() != grid.len() {
            return Err(Error::DimensionMismatch { expected: grid.len(), got: if chi.len() != grid.len() { chi.len() } else { psi.len() } });
        }
        if phi.lines() != grid.line_count() {
            return Err(Error::DimensionMismatch { expected: grid.line_count(), got: phi.lines() });
        }
        if !psi.is_finite() {
            return Err(Error::Domain("ψ must be finite".into()));
        }
        Ok(Self { op, grid, chi, omega, psi, phi })
    }

    /// Same problem with right-hand side `ψ + ε`.
    pub fn lifted(&self, eps: f64) -> Self {
        let psi = ScalarField::new(self.psi.values().iter().map(|v| v + eps).collect());
        Self { psi, ..self.clone() }
    }

    pub fn with_psi(&self, psi: ScalarField) -> Result<Self> {
        Self::new(self.op, self.grid.clone(), self.chi.clone(), self.omega.clone(), psi, self.phi.clone())
    }

    pub fn with_boundary(&self, phi: BoundaryData) -> Result<Self> {
        Self::new(self.op, self.grid.clone(), self.chi.clone(), self.omega.clone(), self.psi.clone(), phi)
    }

    /// `inf ψ` over the nodes where the equation is posed.
    pub fn inf_psi(&self) -> f64 {
        (0..self.grid.len()).filter(|&v| !self.grid.is_boundary(v)).map(|v| self.psi[v]).fold(f64::INFINITY, f64::min)
    }

    /// `inf ψ > sup_{∂Γ} f`
    pub fn is_nondegenerate(&self) -> bool {
        self.inf_psi() > self.op.sup_boundary_f()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverOptions {
    /// Newton stops once `sup |r| <` this.
    pub tol_newton: f64,
    pub max_newton: usize,
    /// Armijo constant on the merit `½‖r‖²`.
    pub armijo: f64,
    /// Smallest damping factor tried by the line search.
    pub min_step: f64,
    pub linear: GmresOptions,
    pub dt_initial: f64,
    pub dt_growth: f64,
    pub dt_min: f64,
    /// Required `min (f(λ(𝔤[u̲])) − ψ)` of the constructed subsolution.
    pub margin_target: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tol_newton: 1e-9,
            max_newton: 200,
            armijo: 1e-4,
            min_step: 1.0 / (1u64 << 30) as f64,
            linear: GmresOptions::default(),
            dt_initial: 0.25,
            dt_growth: 1.5,
            dt_min: 1e-4,
            margin_target: 0.1,
        }
    }
}

/// Outcome of a Newton or continuation solve.
#[derive(Clone, Debug, PartialEq)]
pub struct SolveReport {
    pub u: ScalarField,
    /// Newton iterations of every accepted path step (one entry for a plain
    /// Newton solve).
    pub newton_iters: Vec<usize>,
    /// Accepted continuation parameters, starting at 0.
    pub t_path: Vec<f64>,
    pub residual_sup: f64,
    /// `min` over interior nodes of the cone margin of `λ(𝔤[u])`.
    pub admissibility_margin: f64,
    pub linear_iterations: usize,
    /// Largest relative residual accepted from the linear solver.
    pub max_linear_residual: f64,
}

/// Per-node `f(λ(𝔤[u]))` for a given `u`; fails if `u` is not admissible at
/// some node (boundary nodes included).
pub fn operator_values(op: &OperatorSpec, grid: &ProductGrid, chi: &HermitianField, omega: &Metric, u: &ScalarField) -> Result<ScalarField> {
    let g = complex_hessian(u, grid)?.add(chi)?;
    values_of(op, omega, |node| g.matrix(node), grid.len())
}

/// `f(λ(χ + H(x)))` for a Hessian given in closed form.
pub fn psi_from_hessian(
    op: &OperatorSpec,
    grid: &ProductGrid,
    chi: &HermitianField,
    omega: &Metric,
    mut hessian: impl FnMut(&[f64]) -> HermMatrix,
) -> Result<ScalarField> {
    let mut coords = vec![0.0; grid.real_dims()];
    let mats: Vec<HermMatrix> = (0..grid.len())
        .map(|node| {
            grid.coords(node, &mut coords);
            let mut g = hessian(&coords);
            let c = chi.matrix(node);
            for j in 0..g.dim() {
                for k in j..g.dim() {
                    g.set_hermitian(j, k, g.get(j, k) + c.get(j, k));
                }
            }
            g
        })
        .collect();
    values_of(op, omega, |node| mats[node].clone(), grid.len())
}

fn values_of(op: &OperatorSpec, omega: &Metric, mut g: impl FnMut(usize) -> HermMatrix, len: usize) -> Result<ScalarField> {
    let mut point = pointwise::Pointwise::new(op, omega.inv_sqrt());
    let mut out = Vec::with_capacity(len);
    for node in 0..len {
        let (v, _) = point
            .value(&g(node))
            .ok_or_else(|| Error::Precondition(alloc::format!("not admissible at node {node}")))?;
        out.push(v);
    }
    Ok(ScalarField::new(out))
}

#[cfg(test)]
mod tests;
