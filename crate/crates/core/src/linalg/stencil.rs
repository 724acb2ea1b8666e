use alloc::vec;
use alloc::vec::Vec;

use super::csr::{Csr, CsrBuilder};
use super::lattice::Lattice;

/// Per-node coefficients of a second-order operator without lower-order terms
///
/// `L v = Σ_a c_aa ∂_a² v + Σ_{(a,b) ∈ pairs} c_ab ∂_a∂_b v`
///
/// discretized with central differences. Each mixed pair appears once, so
/// `c_ab` is the full coefficient of `∂_a∂_b` (twice the symmetric matrix
/// entry).
#[derive(Clone, Debug)]
pub struct Coefficients {
    lattice: Lattice,
    pairs: Vec<(usize, usize)>,
    data: Vec<f64>,
}

impl Coefficients {
    pub fn zeros(lattice: Lattice, pairs: Vec<(usize, usize)>) -> Self {
        let d = lattice.dims();
        assert!(pairs.iter().all(|&(a, b)| a < b && b < d), "pairs must be (a, b) with a < b");
        let data = vec![0.0; lattice.len() * (d + pairs.len())];
        Self { lattice, pairs, data }
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    /// Number of stored components per node: the diagonal ones, then one per pair.
    pub fn components(&self) -> usize {
        self.lattice.dims() + self.pairs.len()
    }

    pub fn node(&self, node: usize) -> &[f64] {
        let c = self.components();
        &self.data[node * c..(node + 1) * c]
    }

    pub fn node_mut(&mut self, node: usize) -> &mut [f64] {
        let c = self.components();
        &mut self.data[node * c..(node + 1) * c]
    }

    pub fn component(&self, comp: usize) -> Vec<f64> {
        let c = self.components();
        self.data.iter().skip(comp).step_by(c).copied().collect()
    }

    pub fn set_component(&mut self, comp: usize, values: &[f64]) {
        let c = self.components();
        for (slot, v) in self.data.iter_mut().skip(comp).step_by(c).zip(values) {
            *slot = *v;
        }
    }

    /// Assembles the discrete operator. Rows of Dirichlet nodes become identity rows.
    pub fn assemble(&self) -> Csr {
        let lat = &self.lattice;
        let d = lat.dims();
        let h: Vec<f64> = lat.axes().iter().map(|a| a.spacing()).collect();
        let nnz_row = 1 + 2 * d + 4 * self.pairs.len();
        let mut builder = CsrBuilder::new(lat.len(), lat.len() * nnz_row);
        let mut row: Vec<(usize, f64)> = Vec::with_capacity(nnz_row);
        for node in 0..lat.len() {
            row.clear();
            if lat.is_boundary(node) {
                row.push((node, 1.0));
                builder.push_row(row.iter().copied());
                continue;
            }
            let c = self.node(node);
            let mut center = 0.0;
            for a in 0..d {
                let w = c[a] / (h[a] * h[a]);
                center -= 2.0 * w;
                // interior nodes always have both neighbours
                row.push((lat.neighbor(node, a, 1).unwrap(), w));
                row.push((lat.neighbor(node, a, -1).unwrap(), w));
            }
            row.push((node, center));
            for (m, &(a, b)) in self.pairs.iter().enumerate() {
                let w = c[d + m] / (4.0 * h[a] * h[b]);
                if w == 0.0 {
                    continue;
                }
                for (sa, sb, sign) in [(1, 1, 1.0), (1, -1, -1.0), (-1, 1, -1.0), (-1, -1, 1.0)] {
                    let na = lat.neighbor(node, a, sa).unwrap();
                    let nab = lat.neighbor(na, b, sb).unwrap();
                    row.push((nab, sign * w));
                }
            }
            builder.push_row(row.iter().copied());
        }
        builder.finish()
    }
}
