//! Discretization of `X × S` where `X` is a flat complex torus of dimension
//! `p` and `S = [0,1] × S¹` is a flat cylinder.
//!
//! Real coordinates are ordered `x_1, y_1, …, x_p, y_p, s, θ`; the complex
//! coordinates are `z_j = x_j + i y_j` and `z_n = s + iθ` with `n = p + 1`.
//! Every direction has period 1 except `s`, whose two end layers are the
//! Dirichlet boundary.

mod field;

pub use field::{BoundaryValues, EigenField, HermitianField, Metric, ScalarField};

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{Axis, Lattice};

/// Smallest accepted resolution along any axis.
pub const MIN_RES: usize = 4;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GridConfig {
    /// Complex dimension of the torus factor.
    pub p: usize,
    /// Nodes per real torus direction: either `2p` entries or a single one
    /// used for every direction.
    pub torus_res: Vec<usize>,
    pub s_res: usize,
    pub theta_res: usize,
}

impl GridConfig {
    pub fn uniform(p: usize, res: usize) -> Self {
        Self { p, torus_res: vec![res], s_res: res, theta_res: res }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProductGrid {
    p: usize,
    lattice: Lattice,
}

pub fn build_grid(cfg: &GridConfig) -> Result<ProductGrid> {
    if cfg.p == 0 {
        return Err(Error::InvalidGrid("p must be at least 1".into()));
    }
    let torus: Vec<usize> = match cfg.torus_res.len() {
        1 => vec![cfg.torus_res[0]; 2 * cfg.p],
        len if len == 2 * cfg.p => cfg.torus_res.clone(),
        len => return Err(Error::InvalidGrid(alloc::format!("torus_res needs 1 or {} entries, got {len}", 2 * cfg.p))),
    };
    let all = torus.iter().chain([&cfg.s_res, &cfg.theta_res]);
    if let Some(bad) = all.clone().find(|&&r| r < MIN_RES) {
        return Err(Error::InvalidGrid(alloc::format!("resolution {bad} below {MIN_RES}")));
    }
    let mut axes: Vec<Axis> = torus.iter().map(|&res| Axis::Periodic { res, period: 1.0 }).collect();
    axes.push(Axis::Dirichlet { res: cfg.s_res, length: 1.0 });
    axes.push(Axis::Periodic { res: cfg.theta_res, period: 1.0 });
    Ok(ProductGrid { p: cfg.p, lattice: Lattice::new(axes)? })
}

impl ProductGrid {
    pub fn p(&self) -> usize {
        self.p
    }

    /// Complex dimension of `X × S`.
    pub fn n(&self) -> usize {
        self.p + 1
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn len(&self) -> usize {
        self.lattice.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lattice.is_empty()
    }

    /// Number of real axes, `2n`.
    pub fn real_dims(&self) -> usize {
        self.lattice.dims()
    }

    pub fn s_axis(&self) -> usize {
        2 * self.p
    }

    pub fn theta_axis(&self) -> usize {
        2 * self.p + 1
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        self.lattice.axes()[axis].spacing()
    }

    pub fn s_res(&self) -> usize {
        self.lattice.axes()[self.s_axis()].res()
    }

    pub fn s(&self, node: usize) -> f64 {
        self.lattice.coord(node, self.s_axis())
    }

    pub fn is_boundary(&self, node: usize) -> bool {
        let i = self.lattice.index_along(node, self.s_axis());
        i == 0 || i + 1 == self.s_res()
    }

    pub fn boundary_nodes(&self) -> Vec<usize> {
        (0..self.len()).filter(|&v| self.is_boundary(v)).collect()
    }

    /// Number of `s`-lines, i.e. nodes of one `s` layer.
    pub fn line_count(&self) -> usize {
        self.len() / self.s_res()
    }

    /// Index of the `s`-line through `node`.
    pub fn line_of(&self, node: usize) -> usize {
        let stride = self.lattice.stride(self.s_axis());
        (node / (stride * self.s_res())) * stride + node % stride
    }

    /// Node at `s`-index `i` on `line`.
    pub fn node_on_line(&self, line: usize, i: usize) -> usize {
        let stride = self.lattice.stride(self.s_axis());
        (line / stride) * stride * self.s_res() + i * stride + line % stride
    }

    pub fn s_index(&self, node: usize) -> usize {
        self.lattice.index_along(node, self.s_axis())
    }

    /// Writes the real coordinates of `node` into `out` (length `2n`).
    pub fn coords(&self, node: usize, out: &mut [f64]) {
        for (d, c) in out.iter_mut().enumerate() {
            *c = self.lattice.coord(node, d);
        }
    }

    /// `min(s, 1 − s)`
    pub fn distance_to_boundary(&self, node: usize) -> f64 {
        let s = self.s(node);
        s.min(1.0 - s)
    }

    /// Offsets and weights of the first difference along `axis`: central,
    /// or one-sided second order on the `s` end layers.
    fn first_weights(&self, node: usize, axis: usize) -> &'static [(isize, f64)] {
        const CENTRAL: [(isize, f64); 2] = [(1, 0.5), (-1, -0.5)];
        const LOW: [(isize, f64); 3] = [(0, -1.5), (1, 2.0), (2, -0.5)];
        const HIGH: [(isize, f64); 3] = [(0, 1.5), (-1, -2.0), (-2, 0.5)];
        match self.end_layer(node, axis) {
            Some(false) => &LOW,
            Some(true) => &HIGH,
            None => &CENTRAL,
        }
    }

    fn second_weights(&self, node: usize, axis: usize) -> &'static [(isize, f64)] {
        const CENTRAL: [(isize, f64); 3] = [(1, 1.0), (0, -2.0), (-1, 1.0)];
        const LOW: [(isize, f64); 4] = [(0, 2.0), (1, -5.0), (2, 4.0), (3, -1.0)];
        const HIGH: [(isize, f64); 4] = [(0, 2.0), (-1, -5.0), (-2, 4.0), (-3, -1.0)];
        match self.end_layer(node, axis) {
            Some(false) => &LOW,
            Some(true) => &HIGH,
            None => &CENTRAL,
        }
    }

    /// `Some(false)` on `s = 0`, `Some(true)` on `s = 1` (only for the `s`
    /// axis), otherwise `None`.
    fn end_layer(&self, node: usize, axis: usize) -> Option<bool> {
        if axis != self.s_axis() {
            return None;
        }
        let i = self.lattice.index_along(node, axis);
        if i == 0 {
            Some(false)
        } else if i + 1 == self.s_res() {
            Some(true)
        } else {
            None
        }
    }

    fn at(&self, node: usize, axis: usize, steps: isize) -> usize {
        // the stencils above never leave the lattice
        self.lattice.offset(node, axis, steps).unwrap()
    }

    /// First derivative of `u` along a real axis.
    pub fn first_derivative(&self, u: &[f64], node: usize, axis: usize) -> f64 {
        let h = self.spacing(axis);
        self.first_weights(node, axis).iter().map(|&(o, w)| w * u[self.at(node, axis, o)]).sum::<f64>() / h
    }

    /// Real second derivatives `∂_a∂_b u` at `node`, row-major `2n × 2n`.
    pub fn real_second_derivatives(&self, u: &[f64], node: usize, out: &mut [f64]) {
        let dims = self.real_dims();
        for a in 0..dims {
            let ha = self.spacing(a);
            out[a * dims + a] =
                self.second_weights(node, a).iter().map(|&(o, w)| w * u[self.at(node, a, o)]).sum::<f64>() / (ha * ha);
            for b in a + 1..dims {
                let hb = self.spacing(b);
                let mut acc = 0.0;
                for &(oa, wa) in self.first_weights(node, a) {
                    let na = self.at(node, a, oa);
                    for &(ob, wb) in self.first_weights(node, b) {
                        acc += wa * wb * u[self.at(na, b, ob)];
                    }
                }
                let v = acc / (ha * hb);
                out[a * dims + b] = v;
                out[b * dims + a] = v;
            }
        }
    }
}

/// `u_{jk̄} = ¼[(∂_{x_j x_k} + ∂_{y_j y_k}) + i(∂_{x_j y_k} − ∂_{y_j x_k})]`
/// from the real second derivatives (row-major `2n × 2n`).
#[inline]
pub fn complex_entry(d2: &[f64], n: usize, j: usize, k: usize) -> Complex64 {
    let dims = 2 * n;
    let (xj, yj, xk, yk) = (2 * j, 2 * j + 1, 2 * k, 2 * k + 1);
    Complex64::new(
        0.25 * (d2[xj * dims + xk] + d2[yj * dims + yk]),
        0.25 * (d2[xj * dims + yk] - d2[yj * dims + xk]),
    )
}

/// Discrete `∂∂̄u`. End layers in `s` use one-sided second-order differences.
pub fn complex_hessian(u: &ScalarField, grid: &ProductGrid) -> Result<HermitianField> {
    check_len(u, grid)?;
    let n = grid.n();
    let mut out = HermitianField::zeros(n, grid.len());
    let mut d2 = vec![0.0; 4 * n * n];
    for node in 0..grid.len() {
        grid.real_second_derivatives(u.values(), node, &mut d2);
        for j in 0..n {
            for k in j..n {
                out.set(node, j, k, complex_entry(&d2, n, j, k));
            }
        }
    }
    Ok(out)
}

/// Eigenvalues of `g` relative to the constant metric, node by node.
pub fn eigenvalues_rel(g: &HermitianField, omega: &Metric) -> Result<EigenField> {
    if g.n() != omega.n() {
        return Err(Error::DimensionMismatch { expected: omega.n(), got: g.n() });
    }
    let n = g.n();
    let mut values = Vec::with_capacity(n * g.len());
    for node in 0..g.len() {
        let m = g.matrix(node).congruence(omega.inv_sqrt());
        values.extend(m.eigh()?.values);
    }
    Ok(EigenField::new(n, values))
}

/// `Δu = tr_ω ∂∂̄u` and `|∇u| = (2 ω^{jk̄} u_j ū_k)^{1/2}` with
/// `u_j = ½(∂_{x_j} − i∂_{y_j})u`.
pub fn laplacian_and_gradient(u: &ScalarField, grid: &ProductGrid, omega: &Metric) -> Result<(ScalarField, ScalarField)> {
    check_len(u, grid)?;
    let n = grid.n();
    if omega.n() != n {
        return Err(Error::DimensionMismatch { expected: n, got: omega.n() });
    }
    let inv = omega.inverse();
    let mut lap = Vec::with_capacity(grid.len());
    let mut grad = Vec::with_capacity(grid.len());
    let mut d2 = vec![0.0; 4 * n * n];
    let mut dz = vec![Complex64::new(0.0, 0.0); n];
    for node in 0..grid.len() {
        grid.real_second_derivatives(u.values(), node, &mut d2);
        let mut l = 0.0;
        for j in 0..n {
            for k in 0..n {
                l += (inv.get(k, j) * complex_entry(&d2, n, j, k)).re;
            }
        }
        lap.push(l);
        for (j, z) in dz.iter_mut().enumerate() {
            let dx = grid.first_derivative(u.values(), node, 2 * j);
            let dy = grid.first_derivative(u.values(), node, 2 * j + 1);
            *z = Complex64::new(0.5 * dx, -0.5 * dy);
        }
        let mut g2 = 0.0;
        for j in 0..n {
            for k in 0..n {
                g2 += (dz[k].conj() * inv.get(k, j) * dz[j]).re;
            }
        }
        grad.push(libm::sqrt((2.0 * g2).max(0.0)));
    }
    Ok((ScalarField::new(lap), ScalarField::new(grad)))
}

/// Inner normal derivative on the boundary: `+∂_s u` at `s = 0`, `−∂_s u`
/// at `s = 1`, one-sided second order.
pub fn boundary_normal_derivative(u: &ScalarField, grid: &ProductGrid) -> Result<BoundaryValues> {
    check_len(u, grid)?;
    let nodes = grid.boundary_nodes();
    let values = nodes
        .iter()
        .map(|&v| {
            let ds = grid.first_derivative(u.values(), v, grid.s_axis());
            if grid.s(v) < 0.5 { ds } else { -ds }
        })
        .collect();
    Ok(BoundaryValues { nodes, values })
}

fn check_len(u: &ScalarField, grid: &ProductGrid) -> Result<()> {
    if u.len() != grid.len() {
        return Err(Error::DimensionMismatch { expected: grid.len(), got: u.len() });
    }
    Ok(())
}

#[cfg(test)]
mod tests;
