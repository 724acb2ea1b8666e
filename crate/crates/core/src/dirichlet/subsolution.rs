use alloc::vec;
use alloc::vec::Vec;

use super::newton::Context;
use super::pointwise::Pointwise;
use super::{solve_poisson_s, DirichletProblem, SolverOptions};
use crate::error::{Error, Result};
use crate::linalg::HermMatrix;
use crate::prodgrid::{boundary_normal_derivative, complex_hessian, HermitianField, ScalarField};

/// Upper end of the doubling search on `t`.
pub const T_SUB_MAX: f64 = 1_073_741_824.0; // 2^30
/// Relative width at which the bisection on `t` stops.
const T_REL_TOL: f64 = 1e-3;

#[derive(Clone, Debug, PartialEq)]
pub struct SubsolutionResult {
    /// `u̲ = φ_ext + t h`
    pub u_sub: ScalarField,
    pub t_star: f64,
    /// `min_M̄ (f(λ(𝔤[u̲])) − ψ)`
    pub margin: f64,
    /// The lifted solution of `Δ_S h = 1`, `h = 0` on `∂S`.
    pub h: ScalarField,
    /// `max ∂h/∂ν` over the boundary; negative.
    pub h_normal_max: f64,
}

struct Pencil<'a> {
    ctx: Context<'a>,
    /// `𝔤[φ_ext]` per node
    base: HermitianField,
    hess_h: HermitianField,
}

impl Pencil<'_> {
    /// Smallest `f(λ(𝔤[φ_ext + t h])) − ψ − target` over all nodes and the
    /// node attaining it (`−∞` where the cone is left).
    fn worst(&self, t: f64, target: f64) -> (usize, f64) {
        let prob = self.ctx.prob;
        let n = prob.grid.n();
        let mut point = Pointwise::new(&prob.op, prob.omega.inv_sqrt());
        let mut g = HermMatrix::zeros(n);
        let mut worst = (0, f64::INFINITY);
        for node in 0..prob.grid.len() {
            for j in 0..n {
                for k in j..n {
                    g.set_hermitian(j, k, self.base.get(node, j, k) + self.hess_h.get(node, j, k) * t);
                }
            }
            let slack = match point.value(&g) {
                Some((v, _)) => v - prob.psi[node] - target,
                None => f64::NEG_INFINITY,
            };
            if slack < worst.1 {
                worst = (node, slack);
            }
        }
        worst
    }
}

/// `u̲ = φ_ext + t h` with the smallest `t ≥ 0` (to relative `1e-3`) such
/// that `f(λ(𝔤[u̲])) ≥ ψ + margin_target` at every node.
pub fn construct_subsolution(prob: &DirichletProblem, margin_target: f64, opts: &SolverOptions) -> Result<SubsolutionResult> {
    if !(margin_target > 0.0) {
        return Err(Error::Domain("margin target must be positive".into()));
    }
    let grid = &prob.grid;
    let theta_res = grid.lattice().axes()[grid.theta_axis()].res();
    let h = solve_poisson_s(grid.s_res(), theta_res, 1.0, opts)?.lift(grid)?;
    let ctx = Context::new(prob)?;
    let zero = vec![0.0; grid.len()];
    let mut base = HermitianField::zeros(grid.n(), grid.len());
    let mut d2 = vec![0.0; 4 * grid.n() * grid.n()];
    for node in 0..grid.len() {
        base.set_matrix(node, &ctx.metric_at(&zero, node, &mut d2));
    }
    let pencil = Pencil { ctx, base, hess_h: complex_hessian(&h, grid)? };
    let h_normal_max = boundary_normal_derivative(&h, grid)?.values.iter().copied().fold(f64::NEG_INFINITY, f64::max);

    let t_star = if pencil.worst(0.0, margin_target).1 >= 0.0 {
        0.0
    } else {
        let mut lo = 0.0;
        let mut hi = 1.0;
        loop {
            let (node, slack) = pencil.worst(hi, margin_target);
            if slack >= 0.0 {
                break;
            }
            if hi >= T_SUB_MAX {
                return Err(Error::NoSubsolution { node, slack, t_max: hi });
            }
            lo = hi;
            hi *= 2.0;
        }
        while hi - lo > T_REL_TOL * hi {
            let mid = 0.5 * (lo + hi);
            if pencil.worst(mid, margin_target).1 >= 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        hi
    };
    let margin = pencil.worst(t_star, 0.0).1;
    let w: Vec<f64> = h.values().iter().map(|v| t_star * v).collect();
    Ok(SubsolutionResult { u_sub: pencil.ctx.compose(&w), t_star, margin, h, h_normal_max })
}
