use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use super::ProductGrid;
use crate::error::{Error, Result};
use crate::linalg::HermMatrix;

/// One real value per grid node.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarField(Vec<f64>);

impl ScalarField {
    pub fn new(values: Vec<f64>) -> Self {
        Self(values)
    }

    pub fn constant(grid: &ProductGrid, value: f64) -> Self {
        Self(vec![value; grid.len()])
    }

    /// Samples `f` at the real coordinates `x_1, y_1, …, s, θ` of every node.
    pub fn from_fn(grid: &ProductGrid, mut f: impl FnMut(&[f64]) -> f64) -> Self {
        let mut coords = vec![0.0; grid.real_dims()];
        Self(
            (0..grid.len())
                .map(|node| {
                    grid.coords(node, &mut coords);
                    f(&coords)
                })
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.0
    }

    pub fn into_values(self) -> Vec<f64> {
        self.0
    }

    pub fn sup_norm(&self) -> f64 {
        self.0.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `sup |self − other|`
    pub fn sup_distance(&self, other: &ScalarField) -> f64 {
        self.0.iter().zip(&other.0).fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }
}

impl core::ops::Index<usize> for ScalarField {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

/// Values attached to the boundary nodes listed in `nodes`.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryValues {
    pub nodes: Vec<usize>,
    pub values: Vec<f64>,
}

/// Per-node Hermitian `n × n` matrices; only entries `j ≤ k` are stored.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianField {
    n: usize,
    len: usize,
    data: Vec<Complex64>,
}

impl HermitianField {
    pub fn zeros(n: usize, len: usize) -> Self {
        Self { n, len, data: vec![Complex64::new(0.0, 0.0); len * Self::packed(n)] }
    }

    pub fn constant(len: usize, m: &HermMatrix) -> Self {
        let n = m.dim();
        let mut f = Self::zeros(n, len);
        for node in 0..len {
            f.set_matrix(node, m);
        }
        f
    }

    fn packed(n: usize) -> usize {
        n * (n + 1) / 2
    }

    #[inline]
    fn slot(&self, node: usize, j: usize, k: usize) -> usize {
        debug_assert!(j <= k && k < self.n);
        node * Self::packed(self.n) + j * self.n - j * (j + 1) / 2 + k
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, node: usize, j: usize, k: usize) -> Complex64 {
        if j <= k {
            self.data[self.slot(node, j, k)]
        } else {
            self.data[self.slot(node, k, j)].conj()
        }
    }

    /// Sets entry `(j, k)` and thereby its conjugate; diagonal entries keep
    /// only their real part.
    pub fn set(&mut self, node: usize, j: usize, k: usize, v: Complex64) {
        let (j, k, v) = if j <= k { (j, k, v) } else { (k, j, v.conj()) };
        let v = if j == k { Complex64::new(v.re, 0.0) } else { v };
        let s = self.slot(node, j, k);
        self.data[s] = v;
    }

    pub fn matrix(&self, node: usize) -> HermMatrix {
        let mut m = HermMatrix::zeros(self.n);
        for j in 0..self.n {
            for k in j..self.n {
                m.set_hermitian(j, k, self.get(node, j, k));
            }
        }
        m
    }

    pub fn set_matrix(&mut self, node: usize, m: &HermMatrix) {
        for j in 0..self.n {
            for k in j..self.n {
                self.set(node, j, k, m.get(j, k));
            }
        }
    }

    /// Entrywise sum.
    pub fn add(&self, other: &HermitianField) -> Result<HermitianField> {
        if self.n != other.n || self.len != other.len {
            return Err(Error::DimensionMismatch { expected: self.len, got: other.len });
        }
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        Ok(Self { n: self.n, len: self.len, data })
    }
}

/// Eigenvalues per node, ascending, stored contiguously.
#[derive(Clone, Debug, PartialEq)]
pub struct EigenField {
    n: usize,
    values: Vec<f64>,
}

impl EigenField {
    pub fn new(n: usize, values: Vec<f64>) -> Self {
        assert_eq!(values.len() % n, 0);
        Self { n, values }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.values.len() / self.n
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn node(&self, node: usize) -> &[f64] {
        &self.values[node * self.n..(node + 1) * self.n]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks_exact(self.n)
    }
}

/// Constant positive definite Hermitian metric `ω` with the factors needed
/// for relative eigenvalues and traces.
#[derive(Clone, Debug, PartialEq)]
pub struct Metric {
    omega: HermMatrix,
    inv_sqrt: HermMatrix,
    inverse: HermMatrix,
}

impl Metric {
    pub fn new(omega: HermMatrix) -> Result<Self> {
        let inv_sqrt = omega.inv_sqrt()?;
        let inverse = omega.inv_pd()?;
        Ok(Self { omega, inv_sqrt, inverse })
    }

    pub fn identity(n: usize) -> Self {
        let id = HermMatrix::identity(n);
        Self { omega: id.clone(), inv_sqrt: id.clone(), inverse: id }
    }

    pub fn n(&self) -> usize {
        self.omega.dim()
    }

    pub fn omega(&self) -> &HermMatrix {
        &self.omega
    }

    /// `ω^{-1/2}`
    pub fn inv_sqrt(&self) -> &HermMatrix {
        &self.inv_sqrt
    }

    /// `ω^{-1}`, entries `ω^{jk̄}` with the row index first.
    pub fn inverse(&self) -> &HermMatrix {
        &self.inverse
    }

    /// `tr_ω g = tr(ω^{-1} g)`
    pub fn trace_of(&self, g: &HermMatrix) -> f64 {
        let n = self.n();
        let mut t = 0.0;
        for j in 0..n {
            for k in 0..n {
                t += (self.inverse.get(j, k) * g.get(k, j)).re;
            }
        }
        t
    }
}
