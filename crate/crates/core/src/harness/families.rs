//! Problem families run across the grid ladder, all with `n = 2` and
//! constant `ω = I`.

use alloc::vec;
use core::f64::consts::TAU;

use crate::dirichlet::{operator_values, psi_from_hessian, BoundaryData, DirichletProblem};
use crate::error::{Error, Result};
use crate::linalg::HermMatrix;
use crate::prodgrid::{build_grid, complex_entry, GridConfig, HermitianField, Metric, ProductGrid, ScalarField};
use crate::symcone::OperatorSpec;

/// Nodes along `y_1`; no family depends on it.
const Y_RES: usize = 4;

/// Amplitude step of the manufactured family.
pub const AMPLITUDE_STEP: f64 = 0.01;

/// Grid of one ladder rung: `res` nodes along `x_1`, `s` and `θ`.
pub fn ladder_grid(res: usize) -> Result<ProductGrid> {
    build_grid(&GridConfig { p: 1, torus_res: vec![res, Y_RES], s_res: res, theta_res: res })
}

/// Where the manufactured right-hand side comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PsiMode {
    /// The discrete operator applied to the exact solution, which the solver
    /// then recovers to rounding.
    SameGrid,
    /// The continuous operator, which leaves a truncation error.
    Analytic,
}

/// A problem with known solution.
#[derive(Clone, Debug, PartialEq)]
pub struct Manufactured {
    pub problem: DirichletProblem,
    pub exact: ScalarField,
    pub amplitude: f64,
}

/// Member `m ≥ 1` of the family
/// `u* = a(cos 2πx₁ + cos 2πθ + ½ sin 2πx₁ sin 2πθ) + ½s²`, `a = 0.01m`,
/// with `χ = I`.
pub fn manufactured(op: OperatorSpec, res: usize, member: usize, mode: PsiMode) -> Result<Manufactured> {
    if op.n != 2 {
        return Err(Error::DimensionMismatch { expected: 2, got: op.n });
    }
    if member == 0 {
        return Err(Error::Domain("family members are numbered from 1".into()));
    }
    let a = AMPLITUDE_STEP * member as f64;
    let grid = ladder_grid(res)?;
    let exact = ScalarField::from_fn(&grid, |c| {
        let (x, t) = (TAU * c[0], TAU * c[3]);
        a * (libm::cos(x) + libm::cos(t) + 0.5 * libm::sin(x) * libm::sin(t)) + 0.5 * c[2] * c[2]
    });
    let chi = HermitianField::constant(grid.len(), &HermMatrix::identity(2));
    let omega = Metric::identity(2);
    let psi = match mode {
        PsiMode::SameGrid => operator_values(&op, &grid, &chi, &omega, &exact)?,
        PsiMode::Analytic => psi_from_hessian(&op, &grid, &chi, &omega, |c| exact_hessian(a, c))?,
    };
    let phi = BoundaryData::from_field(&grid, &exact);
    Ok(Manufactured { problem: DirichletProblem::new(op, grid, chi, omega, psi, phi)?, exact, amplitude: a })
}

/// `∂∂̄u*` from the closed-form real second derivatives.
fn exact_hessian(a: f64, c: &[f64]) -> HermMatrix {
    let (x, t) = (TAU * c[0], TAU * c[3]);
    let k = TAU * TAU * a;
    let cross = 0.5 * libm::sin(x) * libm::sin(t);
    // real Hessian in the order x₁, y₁, s, θ
    let mut d2 = [0.0; 16];
    d2[0] = -k * (libm::cos(x) + cross);
    d2[15] = -k * (libm::cos(t) + cross);
    d2[3] = 0.5 * k * libm::cos(x) * libm::cos(t);
    d2[12] = d2[3];
    d2[10] = 1.0;
    let mut h = HermMatrix::zeros(2);
    for j in 0..2 {
        for l in j..2 {
            h.set_hermitian(j, l, complex_entry(&d2, 2, j, l));
        }
    }
    h
}

/// `σ₂^{1/2}` with `χ = diag(1, 0)`, `ψ = 0` and boundary values `0` and
/// `c`: the trivial geodesic from `0` to `c`.
pub fn geodesic_problem(res: usize, c: f64) -> Result<DirichletProblem> {
    let grid = ladder_grid(res)?;
    let chi = HermitianField::constant(grid.len(), &HermMatrix::from_real_diagonal(&[1.0, 0.0]));
    let psi = ScalarField::constant(&grid, 0.0);
    let phi = BoundaryData::constant(&grid, 0.0, c);
    DirichletProblem::new(OperatorSpec::sigma_k_root(2, 2)?, grid, chi, Metric::identity(2), psi, phi)
}

/// Solution of the geodesic problem lifted by `ε`:
/// `u = c·s + 2ε²(s² − s)`, exact on the grid.
pub fn geodesic_exact(grid: &ProductGrid, c: f64, eps: f64) -> ScalarField {
    ScalarField::from_fn(grid, |x| c * x[2] + 2.0 * eps * eps * (x[2] * x[2] - x[2]))
}

