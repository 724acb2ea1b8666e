use alloc::vec;
use alloc::vec::Vec;

use super::csr::Csr;
use super::dense::DenseLu;
use super::lattice::{Axis, Lattice};
use super::stencil::Coefficients;
use crate::error::Result;

/// Levels at or below this many nodes are solved directly.
pub const DIRECT_MAX: usize = 1000;
/// Smoothing sweeps before and after each coarse correction.
pub const SMOOTHING_SWEEPS: usize = 2;
const COARSEST_SWEEPS: usize = 30;

/// Linear interpolation along one axis.
#[derive(Clone, Debug)]
struct AxisTransfer {
    fine: usize,
    coarse: usize,
    /// For each fine index, two `(coarse index, weight)` contributions.
    stencil: Vec<[(usize, f64); 2]>,
    col_sum: Vec<f64>,
}

impl AxisTransfer {
    fn identity(res: usize) -> Self {
        Self {
            fine: res,
            coarse: res,
            stencil: (0..res).map(|i| [(i, 1.0), (i, 0.0)]).collect(),
            col_sum: vec![1.0; res],
        }
    }

    fn between(fine: &Axis, coarse: &Axis) -> Self {
        let (nf, nc) = (fine.res(), coarse.res());
        if nf == nc {
            return Self::identity(nf);
        }
        let stencil: Vec<[(usize, f64); 2]> = match fine {
            Axis::Periodic { .. } => (0..nf)
                .map(|i| if i % 2 == 0 { [(i / 2, 1.0), (i / 2, 0.0)] } else { [(i / 2, 0.5), ((i / 2 + 1) % nc, 0.5)] })
                .collect(),
            Axis::Dirichlet { .. } => (0..nf)
                .map(|i| {
                    let t = i as f64 * (nc - 1) as f64 / (nf - 1) as f64;
                    let j = (libm::floor(t) as usize).min(nc - 2);
                    let w = t - j as f64;
                    [(j, 1.0 - w), (j + 1, w)]
                })
                .collect(),
        };
        let mut col_sum = vec![0.0; nc];
        for s in &stencil {
            for &(j, w) in s {
                col_sum[j] += w;
            }
        }
        Self { fine: nf, coarse: nc, stencil, col_sum }
    }
}

fn coarsen_axis(axis: &Axis) -> Axis {
    match *axis {
        Axis::Periodic { res, period } if res >= 8 && res % 2 == 0 => Axis::Periodic { res: res / 2, period },
        Axis::Dirichlet { res, length } if res >= 5 => Axis::Dirichlet { res: res.div_ceil(2), length },
        other => other,
    }
}

/// Tensor-product interpolation between two lattices.
#[derive(Clone, Debug)]
struct Transfer {
    axes: Vec<AxisTransfer>,
}

impl Transfer {
    /// Applies the 1-D operator along `d` to `input` of the given `shape`,
    /// interpolating (`up`) or applying the normalized transpose.
    fn apply_axis(&self, d: usize, shape: &mut [usize], input: &[f64], output: &mut Vec<f64>, up: bool) {
        let t = &self.axes[d];
        let outer: usize = shape[..d].iter().product();
        let inner: usize = shape[d + 1..].iter().product();
        let (n_in, n_out) = if up { (t.coarse, t.fine) } else { (t.fine, t.coarse) };
        debug_assert_eq!(shape[d], n_in);
        output.clear();
        output.resize(outer * n_out * inner, 0.0);
        for o in 0..outer {
            let src = &input[o * n_in * inner..(o + 1) * n_in * inner];
            let dst = &mut output[o * n_out * inner..(o + 1) * n_out * inner];
            for (i, s) in t.stencil.iter().enumerate() {
                for &(j, w) in s {
                    if w == 0.0 {
                        continue;
                    }
                    let (from, to) = if up { (j, i) } else { (i, j) };
                    let (src_row, dst_row) = (&src[from * inner..(from + 1) * inner], &mut dst[to * inner..(to + 1) * inner]);
                    for (y, x) in dst_row.iter_mut().zip(src_row) {
                        *y += w * x;
                    }
                }
            }
            if !up {
                for (j, cs) in t.col_sum.iter().enumerate() {
                    for y in &mut dst[j * inner..(j + 1) * inner] {
                        *y /= cs;
                    }
                }
            }
        }
        shape[d] = n_out;
    }

    fn run(&self, input: &[f64], mut shape: Vec<usize>, up: bool, scratch: &mut Vec<f64>, out: &mut Vec<f64>) {
        out.clear();
        out.extend_from_slice(input);
        for d in 0..self.axes.len() {
            self.apply_axis(d, &mut shape, out, scratch, up);
            core::mem::swap(out, scratch);
        }
    }

    fn fine_shape(&self) -> Vec<usize> {
        self.axes.iter().map(|a| a.fine).collect()
    }

    fn coarse_shape(&self) -> Vec<usize> {
        self.axes.iter().map(|a| a.coarse).collect()
    }

    fn restrict(&self, fine: &[f64], scratch: &mut Vec<f64>, out: &mut Vec<f64>) {
        self.run(fine, self.fine_shape(), false, scratch, out);
    }

    fn prolong(&self, coarse: &[f64], scratch: &mut Vec<f64>, out: &mut Vec<f64>) {
        self.run(coarse, self.coarse_shape(), true, scratch, out);
    }
}

struct Level {
    smoother: Csr,
    boundary: Vec<bool>,
}

/// Per-level vectors used by [`Multigrid::apply`].
pub struct MultigridWork {
    rhs: Vec<Vec<f64>>,
    sol: Vec<Vec<f64>>,
    res: Vec<Vec<f64>>,
    scratch: Vec<f64>,
    buffer: Vec<f64>,
}

enum Coarsest {
    Direct(DenseLu),
    Smoothing,
}

/// Geometric multigrid V-cycle for operators built by [`Coefficients`].
///
/// Coarse operators are rediscretized from averaged coefficients.
pub struct Multigrid {
    fine: Csr,
    levels: Vec<Level>,
    transfers: Vec<Transfer>,
    coarsest: Coarsest,
}

impl Multigrid {
    /// Builds the hierarchy; the finest operator is `coeffs.assemble()`.
    pub fn new(coeffs: &Coefficients) -> Result<Self> {
        let mut levels = Vec::new();
        let mut transfers = Vec::new();
        let mut current = coeffs.clone();
        let fine = coeffs.assemble();
        let mut matrix = fine.clone();
        loop {
            let lat = current.lattice().clone();
            let n = lat.len();
            levels.push(Level { smoother: matrix.clone(), boundary: lat.boundary_mask() });
            if n <= DIRECT_MAX {
                break;
            }
            let coarse_axes: Vec<Axis> = lat.axes().iter().map(coarsen_axis).collect();
            if coarse_axes == lat.axes() {
                break;
            }
            let transfer = Transfer {
                axes: lat.axes().iter().zip(&coarse_axes).map(|(f, c)| AxisTransfer::between(f, c)).collect(),
            };
            let coarse_lat = Lattice::new(coarse_axes)?;
            let mut coarse = Coefficients::zeros(coarse_lat, current.pairs().to_vec());
            let (mut scratch, mut out) = (Vec::new(), Vec::new());
            for comp in 0..current.components() {
                transfer.restrict(&current.component(comp), &mut scratch, &mut out);
                coarse.set_component(comp, &out);
            }
            transfers.push(transfer);
            matrix = coarse.assemble();
            current = coarse;
        }
        let coarsest = if matrix.dim() <= DIRECT_MAX {
            Coarsest::Direct(DenseLu::factor(matrix.dim(), matrix.to_dense())?)
        } else {
            Coarsest::Smoothing
        };
        Ok(Self { fine, levels, transfers, coarsest })
    }

    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    pub fn fine_matrix(&self) -> &Csr {
        &self.fine
    }

    pub fn workspace(&self) -> MultigridWork {
        let sizes: Vec<usize> = self.levels.iter().map(|l| l.boundary.len()).collect();
        let alloc = || sizes.iter().map(|&n| vec![0.0; n]).collect::<Vec<_>>();
        MultigridWork { rhs: alloc(), sol: alloc(), res: alloc(), scratch: Vec::new(), buffer: Vec::new() }
    }

    /// `x ≈ A⁻¹ b` by one V-cycle from a zero initial guess.
    pub fn apply(&self, work: &mut MultigridWork, b: &[f64], x: &mut [f64]) {
        work.rhs[0].copy_from_slice(b);
        self.cycle(work, 0);
        x.copy_from_slice(&work.sol[0]);
    }

    fn cycle(&self, w: &mut MultigridWork, l: usize) {
        let lev = &self.levels[l];
        w.sol[l].iter_mut().for_each(|v| *v = 0.0);
        if l + 1 == self.levels.len() {
            match &self.coarsest {
                Coarsest::Direct(lu) => lu.solve(&w.rhs[l], &mut w.sol[l]),
                Coarsest::Smoothing => {
                    for _ in 0..COARSEST_SWEEPS {
                        lev.smoother.symmetric_gauss_seidel(&w.rhs[l], &mut w.sol[l]);
                    }
                }
            }
            return;
        }
        for _ in 0..SMOOTHING_SWEEPS {
            lev.smoother.symmetric_gauss_seidel(&w.rhs[l], &mut w.sol[l]);
        }
        lev.smoother.residual(&w.rhs[l], &w.sol[l], &mut w.res[l]);
        self.transfers[l].restrict(&w.res[l], &mut w.scratch, &mut w.buffer);
        for ((r, v), &bnd) in w.rhs[l + 1].iter_mut().zip(&w.buffer).zip(&self.levels[l + 1].boundary) {
            *r = if bnd { 0.0 } else { *v };
        }
        self.cycle(w, l + 1);
        self.transfers[l].prolong(&w.sol[l + 1], &mut w.scratch, &mut w.buffer);
        for ((x, c), &bnd) in w.sol[l].iter_mut().zip(&w.buffer).zip(&lev.boundary) {
            if !bnd {
                *x += c;
            }
        }
        for _ in 0..SMOOTHING_SWEEPS {
            lev.smoother.symmetric_gauss_seidel(&w.rhs[l], &mut w.sol[l]);
        }
    }
}
