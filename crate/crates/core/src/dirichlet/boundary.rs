use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::prodgrid::{complex_entry, HermitianField, ProductGrid, ScalarField};

/// Dirichlet data on the two boundary slices `s = 0` and `s = 1`, indexed
/// by `s`-line.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryData {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl BoundaryData {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.len() != upper.len() {
            return Err(Error::DimensionMismatch { expected: lower.len(), got: upper.len() });
        }
        if !lower.iter().chain(&upper).all(|v| v.is_finite()) {
            return Err(Error::Domain("boundary data must be finite".into()));
        }
        Ok(Self { lower, upper })
    }

    pub fn constant(grid: &ProductGrid, lower: f64, upper: f64) -> Self {
        Self { lower: vec![lower; grid.line_count()], upper: vec![upper; grid.line_count()] }
    }

    /// Evaluates `f` at the boundary nodes (coordinates `x_1, y_1, …, s, θ`).
    pub fn from_fn(grid: &ProductGrid, mut f: impl FnMut(&[f64]) -> f64) -> Self {
        let mut c = vec![0.0; grid.real_dims()];
        let top = grid.s_res() - 1;
        let mut at = |line: usize, i: usize| {
            grid.coords(grid.node_on_line(line, i), &mut c);
            f(&c)
        };
        let lines = grid.line_count();
        let lower = (0..lines).map(|l| at(l, 0)).collect();
        let upper = (0..lines).map(|l| at(l, top)).collect();
        Self { lower, upper }
    }

    /// Restriction of a field to the boundary.
    pub fn from_field(grid: &ProductGrid, u: &ScalarField) -> Self {
        let top = grid.s_res() - 1;
        let lines = grid.line_count();
        Self {
            lower: (0..lines).map(|l| u[grid.node_on_line(l, 0)]).collect(),
            upper: (0..lines).map(|l| u[grid.node_on_line(l, top)]).collect(),
        }
    }

    pub fn lines(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn shifted(&self, delta: f64) -> Self {
        Self { lower: self.lower.iter().map(|v| v + delta).collect(), upper: self.upper.iter().map(|v| v + delta).collect() }
    }

    /// `sup |self − other|` over both slices.
    pub fn sup_distance(&self, other: &BoundaryData) -> f64 {
        self.lower
            .iter()
            .zip(&other.lower)
            .chain(self.upper.iter().zip(&other.upper))
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    /// `(1 − s) φ_0 + s φ_1` along every `s`-line.
    pub fn extension(&self, grid: &ProductGrid) -> ScalarField {
        ScalarField::new(
            (0..grid.len())
                .map(|node| {
                    let line = grid.line_of(node);
                    let s = grid.s(node);
                    (1.0 - s) * self.lower[line] + s * self.upper[line]
                })
                .collect(),
        )
    }

    /// Discrete `∂∂̄` of [`Self::extension`], assembled from the slices: the
    /// pure `s` derivative vanishes, mixed `s` derivatives are differences of
    /// the slices and the rest interpolates the slice Hessians.
    pub fn extension_hessian(&self, grid: &ProductGrid) -> HermitianField {
        let lower = ScalarField::new((0..grid.len()).map(|v| self.lower[grid.line_of(v)]).collect());
        let upper = ScalarField::new((0..grid.len()).map(|v| self.upper[grid.line_of(v)]).collect());
        let jump: Vec<f64> = upper.values().iter().zip(lower.values()).map(|(b, a)| b - a).collect();
        let n = grid.n();
        let dims = 2 * n;
        let s_axis = grid.s_axis();
        let mut out = HermitianField::zeros(n, grid.len());
        let (mut da, mut db, mut d2) = (vec![0.0; dims * dims], vec![0.0; dims * dims], vec![0.0; dims * dims]);
        for node in 0..grid.len() {
            let s = grid.s(node);
            grid.real_second_derivatives(lower.values(), node, &mut da);
            grid.real_second_derivatives(upper.values(), node, &mut db);
            for a in 0..dims {
                for b in 0..dims {
                    d2[a * dims + b] = if a == s_axis && b == s_axis {
                        0.0
                    } else if a == s_axis {
                        grid.first_derivative(&jump, node, b)
                    } else if b == s_axis {
                        grid.first_derivative(&jump, node, a)
                    } else {
                        (1.0 - s) * da[a * dims + b] + s * db[a * dims + b]
                    };
                }
            }
            for j in 0..n {
                for k in j..n {
                    out.set(node, j, k, complex_entry(&d2, n, j, k));
                }
            }
        }
        out
    }
}
