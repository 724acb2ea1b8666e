use alloc::vec::Vec;

use crate::error::{Error, Result};

/// LU factorization with partial pivoting of a dense row-major matrix.
#[derive(Clone, Debug)]
pub struct DenseLu {
    n: usize,
    lu: Vec<f64>,
    perm: Vec<usize>,
}

impl DenseLu {
    pub fn factor(n: usize, mut a: Vec<f64>) -> Result<Self> {
        assert_eq!(a.len(), n * n);
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let (p, pivot) = (k..n)
                .map(|i| (i, a[i * n + k].abs()))
                .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if pivot == 0.0 {
                return Err(Error::Numerical("singular matrix in dense LU".into()));
            }
            if p != k {
                for j in 0..n {
                    a.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
            }
            let akk = a[k * n + k];
            for i in k + 1..n {
                let f = a[i * n + k] / akk;
                a[i * n + k] = f;
                if f != 0.0 {
                    for j in k + 1..n {
                        a[i * n + j] -= f * a[k * n + j];
                    }
                }
            }
        }
        Ok(Self { n, lu: a, perm })
    }

    pub fn solve(&self, b: &[f64], x: &mut [f64]) {
        let n = self.n;
        for i in 0..n {
            let lower: f64 = self.lu[i * n..i * n + i].iter().zip(&x[..i]).map(|(l, v)| l * v).sum();
            x[i] = b[self.perm[i]] - lower;
        }
        for i in (0..n).rev() {
            let upper: f64 = self.lu[i * n + i + 1..(i + 1) * n].iter().zip(&x[i + 1..]).map(|(u, v)| u * v).sum();
            x[i] = (x[i] - upper) / self.lu[i * n + i];
        }
    }
}
