use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 100;

/// Dense `n × n` complex matrix in row-major order. Hermitian symmetry is
/// maintained by the constructors and operations used in this crate.
#[derive(Clone, Debug, PartialEq)]
pub struct HermMatrix {
    n: usize,
    data: Vec<Complex64>,
}

/// Eigenvalues in ascending order with the matching unit eigenvectors stored
/// as the columns of `vectors`.
#[derive(Clone, Debug)]
pub struct Eigh {
    pub values: Vec<f64>,
    pub vectors: HermMatrix,
}

impl HermMatrix {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![Complex64::new(0.0, 0.0); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_real_diagonal(d: &[f64]) -> Self {
        let mut m = Self::zeros(d.len());
        for (i, &x) in d.iter().enumerate() {
            m.set(i, i, Complex64::new(x, 0.0));
        }
        m
    }

    /// Builds a matrix from row-major entries; fails unless the entries are
    /// Hermitian to within `1e-14` relative.
    pub fn from_rows(n: usize, entries: Vec<Complex64>) -> Result<Self> {
        if entries.len() != n * n {
            return Err(Error::DimensionMismatch { expected: n * n, got: entries.len() });
        }
        let m = Self { n, data: entries };
        let scale = m.frobenius().max(1.0);
        for i in 0..n {
            for j in i..n {
                if (m.get(i, j) - m.get(j, i).conj()).norm() > 1e-14 * scale {
                    return Err(Error::Domain(alloc::format!("entry ({i},{j}) breaks Hermitian symmetry")));
                }
            }
        }
        Ok(m)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.n + j] = v;
    }

    /// Sets `(i, j)` and its mirror `(j, i)` to keep the matrix Hermitian.
    pub fn set_hermitian(&mut self, i: usize, j: usize, v: Complex64) {
        if i == j {
            self.set(i, i, Complex64::new(v.re, 0.0));
        } else {
            self.set(i, j, v);
            self.set(j, i, v.conj());
        }
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn frobenius(&self) -> f64 {
        libm::sqrt(self.data.iter().map(|z| z.norm_sqr()).sum())
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i).re).sum()
    }

    pub fn matmul(&self, other: &HermMatrix) -> HermMatrix {
        let n = self.n;
        let mut out = HermMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * other.get(k, j);
                }
            }
        }
        out
    }

    /// `A v` for a vector `v`.
    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        (0..self.n).map(|i| (0..self.n).map(|j| self.get(i, j) * v[j]).sum()).collect()
    }

    /// `S A S` for Hermitian `S`, symmetrized to remove rounding asymmetry.
    pub fn congruence(&self, s: &HermMatrix) -> HermMatrix {
        let mut out = s.matmul(self).matmul(s);
        out.symmetrize();
        out
    }

    /// [`HermMatrix::congruence`] into preallocated matrices of the same size.
    pub fn congruence_into(&self, s: &HermMatrix, tmp: &mut HermMatrix, out: &mut HermMatrix) {
        s.matmul_into(self, tmp);
        tmp.matmul_into(s, out);
        out.symmetrize();
    }

    fn matmul_into(&self, other: &HermMatrix, out: &mut HermMatrix) {
        let n = self.n;
        for i in 0..n {
            for j in 0..n {
                out.data[i * n + j] = (0..n).map(|k| self.get(i, k) * other.get(k, j)).sum();
            }
        }
    }

    pub fn symmetrize(&mut self) {
        let n = self.n;
        for i in 0..n {
            let d = self.get(i, i);
            self.set(i, i, Complex64::new(d.re, 0.0));
            for j in i + 1..n {
                let avg = 0.5 * (self.get(i, j) + self.get(j, i).conj());
                self.set(i, j, avg);
                self.set(j, i, avg.conj());
            }
        }
    }

    /// `U diag(w) U*`.
    pub fn from_spectral(vectors: &HermMatrix, weights: &[f64]) -> HermMatrix {
        let n = vectors.n;
        let mut out = HermMatrix::zeros(n);
        for i in 0..n {
            for j in i..n {
                let mut acc = Complex64::new(0.0, 0.0);
                for (k, &w) in weights.iter().enumerate() {
                    acc += vectors.get(i, k) * vectors.get(j, k).conj() * w;
                }
                out.set_hermitian(i, j, acc);
            }
        }
        out
    }

    /// Eigen-decomposition by cyclic complex Jacobi rotations.
    pub fn eigh(&self) -> Result<Eigh> {
        let n = self.n;
        let mut a = self.clone();
        a.symmetrize();
        let mut v = HermMatrix::identity(n);
        let scale = a.frobenius();
        if scale == 0.0 || n == 1 {
            return Ok(sorted(a, v));
        }
        let target = (4.0 * f64::EPSILON * scale) * (4.0 * f64::EPSILON * scale);

        for _ in 0..MAX_SWEEPS {
            let off: f64 = (0..n)
                .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
                .map(|(i, j)| a.get(i, j).norm_sqr())
                .sum();
            if off <= target {
                return Ok(sorted(a, v));
            }
            for p in 0..n {
                for q in p + 1..n {
                    rotate(&mut a, &mut v, p, q);
                }
            }
        }
        Err(Error::Numerical(alloc::format!("Jacobi eigensolver did not converge in {MAX_SWEEPS} sweeps")))
    }

    /// Eigenvalues of `self` relative to a positive definite `omega`, i.e. of
    /// `ω^{-1/2} A ω^{-1/2}`.
    pub fn eigenvalues_relative(&self, omega_inv_sqrt: &HermMatrix) -> Result<Vec<f64>> {
        Ok(self.congruence(omega_inv_sqrt).eigh()?.values)
    }

    /// `A^{-1/2}` for positive definite `A`.
    pub fn inv_sqrt(&self) -> Result<HermMatrix> {
        let e = self.eigh()?;
        if e.values[0] <= 0.0 {
            return Err(Error::Geometry(alloc::format!(
                "matrix is not positive definite (smallest eigenvalue {:e})",
                e.values[0]
            )));
        }
        let w: Vec<f64> = e.values.iter().map(|&x| 1.0 / libm::sqrt(x)).collect();
        Ok(HermMatrix::from_spectral(&e.vectors, &w))
    }

    /// `A^{-1}` for positive definite `A`.
    pub fn inv_pd(&self) -> Result<HermMatrix> {
        let e = self.eigh()?;
        if e.values[0] <= 0.0 {
            return Err(Error::Geometry("matrix is not positive definite".into()));
        }
        let w: Vec<f64> = e.values.iter().map(|&x| 1.0 / x).collect();
        Ok(HermMatrix::from_spectral(&e.vectors, &w))
    }
}

/// One Jacobi rotation annihilating `a[p][q]`: `A ← R* A R`, `V ← V R` with
/// `R = [[c, s·u], [−s·ū, c]]` in the `(p, q)` plane, `u = a_pq/|a_pq|`.
fn rotate(a: &mut HermMatrix, v: &mut HermMatrix, p: usize, q: usize) {
    let n = a.n;
    let apq = a.get(p, q);
    let g = apq.norm();
    if g == 0.0 {
        return;
    }
    let app = a.get(p, p).re;
    let aqq = a.get(q, q).re;
    if g <= f64::EPSILON * 1e-3 * (app.abs() + aqq.abs()) {
        a.set(p, q, Complex64::new(0.0, 0.0));
        a.set(q, p, Complex64::new(0.0, 0.0));
        return;
    }
    let u = apq / g;
    let theta = (aqq - app) / (2.0 * g);
    let t = if theta.is_infinite() {
        0.5 / theta
    } else {
        theta.signum() / (theta.abs() + libm::sqrt(theta * theta + 1.0))
    };
    let c = 1.0 / libm::sqrt(t * t + 1.0);
    let s = t * c;
    let su = u * s;
    let su_bar = su.conj();

    // columns: A R
    for k in 0..n {
        let akp = a.get(k, p);
        let akq = a.get(k, q);
        a.set(k, p, akp * c - akq * su_bar);
        a.set(k, q, akp * su + akq * c);
    }
    // rows: R* (A R)
    for k in 0..n {
        let apk = a.get(p, k);
        let aqk = a.get(q, k);
        a.set(p, k, apk * c - aqk * su);
        a.set(q, k, apk * su_bar + aqk * c);
    }
    a.set(p, q, Complex64::new(0.0, 0.0));
    a.set(q, p, Complex64::new(0.0, 0.0));
    a.set(p, p, Complex64::new(a.get(p, p).re, 0.0));
    a.set(q, q, Complex64::new(a.get(q, q).re, 0.0));

    for k in 0..n {
        let vkp = v.get(k, p);
        let vkq = v.get(k, q);
        v.set(k, p, vkp * c - vkq * su_bar);
        v.set(k, q, vkp * su + vkq * c);
    }
}

fn sorted(a: HermMatrix, v: HermMatrix) -> Eigh {
    let n = a.n;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a.get(i, i).re.total_cmp(&a.get(j, j).re));
    let values = order.iter().map(|&i| a.get(i, i).re).collect();
    let mut vectors = HermMatrix::zeros(n);
    for (col, &src) in order.iter().enumerate() {
        for row in 0..n {
            vectors.set(row, col, v.get(row, src));
        }
    }
    Eigh { values, vectors }
}
