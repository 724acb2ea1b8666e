//! Scale-free diagnostics of the a-priori estimates on computed solutions.
//!
//! Each ratio divides a second-derivative quantity by the gradient bound it
//! is estimated against, so a ratio that stays bounded under refinement is
//! the numerical face of a constant independent of the grid.

mod families;
mod guan;

pub use families::{geodesic_exact, geodesic_problem, ladder_grid, manufactured, Manufactured, PsiMode, AMPLITUDE_STEP};
pub use guan::{guan_inequality_probe, guan_slack, GuanProbe, GUAN_SPREAD};

use alloc::string::String;
use alloc::vec::Vec;

use crate::dirichlet::{metric_field, DirichletProblem};
use crate::error::{Error, Result};
use crate::prodgrid::{complex_hessian, eigenvalues_rel, laplacian_and_gradient, Metric, ProductGrid, ScalarField};

/// Largest ratio growth from the middle to the finest grid still read as a
/// plateau.
pub const PLATEAU_FACTOR: f64 = 1.1;
/// Ratios below this are treated as zero when comparing rungs.
pub const RATIO_FLOOR: f64 = 1e-9;

/// The node one layer inside the boundary on the same `s`-line, or `node`
/// itself for interior nodes.
fn interior_limit(grid: &ProductGrid, node: usize) -> usize {
    let top = grid.s_res() - 1;
    match grid.s_index(node) {
        0 => grid.node_on_line(grid.line_of(node), 1),
        i if i == top => grid.node_on_line(grid.line_of(node), top - 1),
        _ => node,
    }
}

fn sup(values: impl Iterator<Item = f64>) -> f64 {
    values.fold(f64::NEG_INFINITY, f64::max)
}

/// `sup_{∂M} Δu / (1 + sup_M |∇u|²)`; `Δu` on the boundary is read at the
/// first interior layer.
pub fn boundary_estimate_ratio(u: &ScalarField, grid: &ProductGrid, omega: &Metric) -> Result<f64> {
    let (lap, grad) = laplacian_and_gradient(u, grid, omega)?;
    let top = sup(grid.boundary_nodes().into_iter().map(|v| lap[interior_limit(grid, v)]));
    let g2 = sup(grad.values().iter().map(|g| g * g));
    Ok(top / (1.0 + g2))
}

/// `sup_M |∂∂̄u| / (1 + sup_M |∇u|² + sup_{∂M} |∂∂̄u|)` with `|·|` the
/// spectral norm relative to `ω`, boundary values read at the first
/// interior layer.
pub fn global_second_ratio(u: &ScalarField, grid: &ProductGrid, omega: &Metric) -> Result<f64> {
    let (_, grad) = laplacian_and_gradient(u, grid, omega)?;
    let eig = eigenvalues_rel(&complex_hessian(u, grid)?, omega)?;
    let norm = |node: usize| eig.node(interior_limit(grid, node)).iter().fold(0.0f64, |m, l| m.max(l.abs()));
    let global = sup((0..grid.len()).map(norm));
    let boundary = sup(grid.boundary_nodes().into_iter().map(norm));
    let g2 = sup(grad.values().iter().map(|g| g * g));
    Ok(global / (1.0 + g2 + boundary))
}

/// Per-node `min_j σ_j(λ)/binom(n, j)` (`min_i λ_i` for the positive cone)
/// of `λ(𝔤[u])` over `M̄`; negative where `λ` leaves the cone.
pub fn admissibility_margin_field(u: &ScalarField, prob: &DirichletProblem) -> Result<ScalarField> {
    let eig = eigenvalues_rel(&metric_field(prob, u)?, &prob.omega)?;
    Ok(ScalarField::new(eig.iter().map(|l| prob.op.cone.normalized_margin(l)).collect()))
}

/// Diagnostics of one solution on one rung of a grid ladder.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProbeRow {
    pub resolution: usize,
    pub ratio_boundary: f64,
    pub ratio_global: f64,
    pub margin_min: f64,
}

impl ProbeRow {
    pub fn measure(resolution: usize, u: &ScalarField, prob: &DirichletProblem) -> Result<Self> {
        let ratio_boundary = boundary_estimate_ratio(u, &prob.grid, &prob.omega)?;
        let ratio_global = global_second_ratio(u, &prob.grid, &prob.omega)?;
        let margin = admissibility_margin_field(u, prob)?;
        let margin_min = margin.values().iter().copied().fold(f64::INFINITY, f64::min);
        Ok(Self { resolution, ratio_boundary, ratio_global, margin_min })
    }
}

/// Whether each ratio levels off across the ladder.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub boundary_bounded: bool,
    pub global_bounded: bool,
}

impl Verdict {
    pub fn bounded(&self) -> bool {
        self.boundary_bounded && self.global_bounded
    }
}

/// Ratios of one problem family across a ladder of resolutions. Several
/// members may share a rung; the family is judged on its largest ratios.
#[derive(Clone, Debug, PartialEq)]
pub struct EstimateProbe {
    pub family: String,
    rows: Vec<ProbeRow>,
}

impl EstimateProbe {
    pub fn new(family: impl Into<String>) -> Self {
        Self { family: family.into(), rows: Vec::new() }
    }

    /// Adds a row; resolutions must not decrease and ratios must be finite.
    pub fn push(&mut self, row: ProbeRow) -> Result<()> {
        if !(row.ratio_boundary.is_finite() && row.ratio_global.is_finite()) {
            return Err(Error::Numerical(alloc::format!("non-finite ratio at resolution {}", row.resolution)));
        }
        if self.rows.last().is_some_and(|last| row.resolution < last.resolution) {
            return Err(Error::Domain("ladder resolutions must increase".into()));
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn rows(&self) -> &[ProbeRow] {
        &self.rows
    }

    /// Distinct resolutions in increasing order.
    pub fn ladder(&self) -> Vec<usize> {
        let mut out: Vec<usize> = self.rows.iter().map(|r| r.resolution).collect();
        out.dedup();
        out
    }

    /// Per-rung maxima `(resolution, ratio_boundary, ratio_global)`.
    pub fn rung_maxima(&self) -> Vec<(usize, f64, f64)> {
        self.ladder()
            .into_iter()
            .map(|res| {
                let rows = self.rows.iter().filter(|r| r.resolution == res);
                let (b, g) = rows.fold((f64::NEG_INFINITY, f64::NEG_INFINITY), |(b, g), r| {
                    (b.max(r.ratio_boundary), g.max(r.ratio_global))
                });
                (res, b, g)
            })
            .collect()
    }

    /// Finest-rung ratio at most [`PLATEAU_FACTOR`] times the middle-rung
    /// ratio (up to [`RATIO_FLOOR`]). Needs at least three rungs.
    pub fn verdict(&self) -> Result<Verdict> {
        let maxima = self.rung_maxima();
        if maxima.len() < 3 {
            return Err(Error::Precondition("a plateau verdict needs at least three resolutions".into()));
        }
        let (finest, middle) = (maxima[maxima.len() - 1], maxima[(maxima.len() - 1) / 2]);
        let level = |fine: f64, mid: f64| fine <= PLATEAU_FACTOR * mid.max(0.0) + RATIO_FLOOR;
        Ok(Verdict { boundary_bounded: level(finest.1, middle.1), global_bounded: level(finest.2, middle.2) })
    }
}

#[cfg(test)]
mod tests;
