use alloc::vec;
use alloc::vec::Vec;

/// Square sparse matrix in compressed-row form with sorted column indices.
#[derive(Clone, Debug)]
pub struct Csr {
    n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<u32>,
    vals: Vec<f64>,
    diag: Vec<usize>,
    /// `1 / a_ii`, zero where the diagonal vanishes.
    inv_diag: Vec<f64>,
}

/// Row-by-row builder; each pushed row may contain duplicate columns, which
/// are summed.
pub struct CsrBuilder {
    n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<u32>,
    vals: Vec<f64>,
    scratch: Vec<(u32, f64)>,
}

impl CsrBuilder {
    pub fn new(n: usize, nnz_hint: usize) -> Self {
        let mut row_ptr = Vec::with_capacity(n + 1);
        row_ptr.push(0);
        Self { n, row_ptr, cols: Vec::with_capacity(nnz_hint), vals: Vec::with_capacity(nnz_hint), scratch: Vec::new() }
    }

    pub fn push_row(&mut self, entries: impl IntoIterator<Item = (usize, f64)>) {
        self.scratch.clear();
        self.scratch.extend(entries.into_iter().map(|(c, v)| (c as u32, v)));
        self.scratch.sort_unstable_by_key(|e| e.0);
        let mut last: Option<u32> = None;
        for &(c, v) in &self.scratch {
            if last == Some(c) {
                *self.vals.last_mut().unwrap() += v;
            } else {
                self.cols.push(c);
                self.vals.push(v);
                last = Some(c);
            }
        }
        self.row_ptr.push(self.cols.len());
    }

    pub fn finish(self) -> Csr {
        assert_eq!(self.row_ptr.len(), self.n + 1, "every row must be pushed");
        let mut diag = vec![usize::MAX; self.n];
        for (i, d) in diag.iter_mut().enumerate() {
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                if self.cols[k] as usize == i {
                    *d = k;
                }
            }
        }
        let inv_diag = diag
            .iter()
            .map(|&k| if k == usize::MAX || self.vals[k] == 0.0 { 0.0 } else { 1.0 / self.vals[k] })
            .collect();
        Csr { n: self.n, row_ptr: self.row_ptr, cols: self.cols, vals: self.vals, diag, inv_diag }
    }
}

impl Csr {
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        (self.row_ptr[i]..self.row_ptr[i + 1]).map(move |k| (self.cols[k] as usize, self.vals[k]))
    }

    pub fn diagonal(&self, i: usize) -> f64 {
        let k = self.diag[i];
        if k == usize::MAX { 0.0 } else { self.vals[k] }
    }

    #[inline]
    fn row_dot(&self, i: usize, x: &[f64]) -> f64 {
        let range = self.row_ptr[i]..self.row_ptr[i + 1];
        let (cols, vals) = (&self.cols[range.clone()], &self.vals[range]);
        // independent partial sums keep the floating-point adds pipelined
        let mut acc = [0.0; 4];
        let (c4, v4) = (cols.chunks_exact(4), vals.chunks_exact(4));
        let (c_tail, v_tail) = (c4.remainder(), v4.remainder());
        for (c, v) in c4.zip(v4) {
            for k in 0..4 {
                acc[k] += v[k] * x[c[k] as usize];
            }
        }
        for (&c, v) in c_tail.iter().zip(v_tail) {
            acc[0] += v * x[c as usize];
        }
        (acc[0] + acc[1]) + (acc[2] + acc[3])
    }

    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        for (i, yi) in y.iter_mut().enumerate() {
            *yi = self.row_dot(i, x);
        }
    }

    /// `r = b − A x`
    pub fn residual(&self, b: &[f64], x: &[f64], r: &mut [f64]) {
        for (i, (ri, bi)) in r.iter_mut().zip(b).enumerate() {
            *ri = bi - self.row_dot(i, x);
        }
    }

    #[inline]
    fn relax_row(&self, i: usize, b: &[f64], x: &mut [f64]) {
        let inv = self.inv_diag[i];
        if inv != 0.0 {
            x[i] += (b[i] - self.row_dot(i, x)) * inv;
        }
    }

    /// One symmetric Gauss-Seidel sweep (forward then backward).
    pub fn symmetric_gauss_seidel(&self, b: &[f64], x: &mut [f64]) {
        for i in 0..self.n {
            self.relax_row(i, b, x);
        }
        for i in (0..self.n).rev() {
            self.relax_row(i, b, x);
        }
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let mut d = vec![0.0; self.n * self.n];
        for i in 0..self.n {
            for (c, v) in self.row(i) {
                d[i * self.n + c] += v;
            }
        }
        d
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn duplicates_are_summed_and_diagonal_found() {
        let mut b = CsrBuilder::new(2, 4);
        b.push_row([(1, 1.0), (0, 2.0), (1, 0.5)]);
        b.push_row([(1, 3.0)]);
        let a = b.finish();
        assert_eq!(a.nnz(), 3);
        assert_eq!(a.diagonal(0), 2.0);
        let mut y = [0.0; 2];
        a.matvec(&[1.0, 2.0], &mut y);
        assert_eq!(y, [5.0, 6.0]);
    }
}

