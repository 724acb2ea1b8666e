use alloc::vec;
use alloc::vec::Vec;

use super::newton::Context;
use super::pointwise::{mixed_pairs, real_coefficients};
use super::{linear, DirichletProblem, SolverOptions};
use crate::error::{Error, Result};
use crate::linalg::{Axis, Coefficients, Lattice};
use crate::prodgrid::{ProductGrid, ScalarField};

/// A field on the cylinder `S = [0,1] × S¹`, `s` index major.
#[derive(Clone, Debug, PartialEq)]
pub struct CylinderField {
    pub s_res: usize,
    pub theta_res: usize,
    pub values: Vec<f64>,
}

impl CylinderField {
    pub fn at(&self, i_s: usize, i_theta: usize) -> f64 {
        self.values[i_s * self.theta_res + i_theta]
    }

    /// Pull-back along the projection `X × S → S`.
    pub fn lift(&self, grid: &ProductGrid) -> Result<ScalarField> {
        let theta = grid.theta_axis();
        let theta_res = grid.lattice().axes()[theta].res();
        if grid.s_res() != self.s_res || theta_res != self.theta_res {
            return Err(Error::DimensionMismatch { expected: self.s_res * self.theta_res, got: grid.s_res() * theta_res });
        }
        Ok(ScalarField::new(
            (0..grid.len()).map(|v| self.at(grid.s_index(v), grid.lattice().index_along(v, theta))).collect(),
        ))
    }
}

fn cylinder(s_res: usize, theta_res: usize) -> Result<Lattice> {
    Lattice::new(vec![Axis::Dirichlet { res: s_res, length: 1.0 }, Axis::Periodic { res: theta_res, period: 1.0 }])
}

/// Solves `¼(h_ss + h_θθ) = rhs` on the cylinder with `h = 0` at `s ∈ {0, 1}`.
pub fn solve_poisson_s(s_res: usize, theta_res: usize, rhs: f64, opts: &SolverOptions) -> Result<CylinderField> {
    if !rhs.is_finite() {
        return Err(Error::Domain("right-hand side must be finite".into()));
    }
    let lattice = cylinder(s_res, theta_res)?;
    let mut coeffs = Coefficients::zeros(lattice.clone(), Vec::new());
    for node in 0..lattice.len() {
        coeffs.node_mut(node).copy_from_slice(&[0.25, 0.25]);
    }
    let b: Vec<f64> = (0..lattice.len()).map(|v| if lattice.is_boundary(v) { 0.0 } else { rhs }).collect();
    let mut h = vec![0.0; lattice.len()];
    linear::solve(&coeffs, &b, &mut h, &opts.linear)?;
    Ok(CylinderField { s_res, theta_res, values: h })
}

/// Solves `Δǔ + tr_ω χ = 0` with `ǔ = φ` on the boundary.
pub fn solve_supersolution(prob: &DirichletProblem, opts: &SolverOptions) -> Result<ScalarField> {
    let ctx = Context::new(prob)?;
    let grid = &prob.grid;
    let pairs = mixed_pairs(grid.n());
    let mut coeffs = Coefficients::zeros(grid.lattice().clone(), pairs.clone());
    let mut row = vec![0.0; coeffs.components()];
    real_coefficients(prob.omega.inverse(), &pairs, &mut row);
    for node in 0..grid.len() {
        coeffs.node_mut(node).copy_from_slice(&row);
    }
    let zero = vec![0.0; grid.len()];
    let mut d2 = vec![0.0; 4 * grid.n() * grid.n()];
    // tr_ω(χ + ∂∂̄φ_ext) = tr_ω χ + Δφ_ext
    let mut b = vec![0.0; grid.len()];
    for &node in &ctx.interior {
        b[node] = -prob.omega.trace_of(&ctx.metric_at(&zero, node, &mut d2));
    }
    let mut w = vec![0.0; grid.len()];
    linear::solve(&coeffs, &b, &mut w, &opts.linear)?;
    Ok(ctx.compose(&w))
}
