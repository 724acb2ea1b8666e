use alloc::vec;
use alloc::vec::Vec;

use super::csr::Csr;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GmresOptions {
    /// Target `‖b − A x‖₂ / ‖b‖₂`.
    pub tol: f64,
    /// Restarts are accepted below this level once the iteration stagnates
    /// in floating point.
    pub floor: f64,
    pub restart: usize,
    pub max_iters: usize,
}

impl Default for GmresOptions {
    fn default() -> Self {
        Self { tol: 1e-12, floor: 1e-9, restart: 40, max_iters: 800 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GmresStats {
    pub iterations: usize,
    pub relative_residual: f64,
    pub reached_tol: bool,
}

fn norm(v: &[f64]) -> f64 {
    libm::sqrt(v.iter().map(|x| x * x).sum())
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Restarted GMRES with right preconditioning `A M⁻¹ y = b, x = M⁻¹ y`,
/// starting from the contents of `x`.
pub fn gmres(
    a: &Csr,
    b: &[f64],
    x: &mut [f64],
    precond: &mut impl FnMut(&[f64], &mut [f64]),
    opts: &GmresOptions,
) -> Result<GmresStats> {
    let n = a.dim();
    let b_norm = norm(b);
    if b_norm == 0.0 {
        x.iter_mut().for_each(|v| *v = 0.0);
        return Ok(GmresStats { iterations: 0, relative_residual: 0.0, reached_tol: true });
    }
    let m = opts.restart.max(1);
    let mut basis: Vec<Vec<f64>> = (0..=m).map(|_| vec![0.0; n]).collect();
    // preconditioned directions M⁻¹ v_k, kept so the update needs no extra solve
    let mut directions: Vec<Vec<f64>> = (0..m).map(|_| vec![0.0; n]).collect();
    let mut h = vec![0.0; (m + 1) * m];
    let (mut cs, mut sn, mut g) = (vec![0.0; m], vec![0.0; m], vec![0.0; m + 1]);
    let mut y = vec![0.0; m];
    let mut w = vec![0.0; n];
    let mut r = vec![0.0; n];
    let mut candidate = vec![0.0; n];
    let mut iterations = 0;
    let mut best = f64::INFINITY;
    let mut stalls = 0;

    a.residual(b, x, &mut r);
    let mut rel = norm(&r) / b_norm;
    loop {
        if rel < opts.tol {
            return Ok(GmresStats { iterations, relative_residual: rel, reached_tol: true });
        }
        if rel < 0.5 * best {
            best = rel;
            stalls = 0;
        } else {
            stalls += 1;
        }
        if iterations >= opts.max_iters || stalls >= 2 {
            return if rel < opts.floor {
                Ok(GmresStats { iterations, relative_residual: rel, reached_tol: false })
            } else {
                Err(Error::LinearSolve { iterations, relative_residual: rel })
            };
        }

        let beta = norm(&r);
        for (v, ri) in basis[0].iter_mut().zip(&r) {
            *v = ri / beta;
        }
        g.iter_mut().for_each(|v| *v = 0.0);
        g[0] = beta;
        let mut k = 0;
        let mut accepted = false;
        while k < m && iterations < opts.max_iters {
            precond(&basis[k], &mut directions[k]);
            a.matvec(&directions[k], &mut w);
            for j in 0..=k {
                let hjk = dot(&w, &basis[j]);
                h[j * m + k] = hjk;
                for (wi, vi) in w.iter_mut().zip(&basis[j]) {
                    *wi -= hjk * vi;
                }
            }
            let wn = norm(&w);
            h[(k + 1) * m + k] = wn;
            if wn > 0.0 {
                for (v, wi) in basis[k + 1].iter_mut().zip(&w) {
                    *v = wi / wn;
                }
            }
            for j in 0..k {
                let (a0, a1) = (h[j * m + k], h[(j + 1) * m + k]);
                h[j * m + k] = cs[j] * a0 + sn[j] * a1;
                h[(j + 1) * m + k] = -sn[j] * a0 + cs[j] * a1;
            }
            let (a0, a1) = (h[k * m + k], h[(k + 1) * m + k]);
            let rho = libm::hypot(a0, a1);
            if rho == 0.0 {
                return Err(Error::LinearSolve { iterations, relative_residual: rel });
            }
            cs[k] = a0 / rho;
            sn[k] = a1 / rho;
            h[k * m + k] = rho;
            h[(k + 1) * m + k] = 0.0;
            g[k + 1] = -sn[k] * g[k];
            g[k] *= cs[k];
            iterations += 1;
            k += 1;
            // a plateau of the estimate near the target is rounding in the
            // basis; restarting from the true residual is cheaper than
            // pushing through it
            let plateau = k >= 3 && g[k].abs() / b_norm < 100.0 * opts.tol && g[k].abs() > 0.9 * g[k - 3].abs();
            if g[k].abs() / b_norm < opts.tol || wn == 0.0 || plateau {
                // the recurrence can run ahead of the true residual
                update(&h, &g, m, k, &directions, &mut y, x, &mut candidate);
                a.residual(b, &candidate, &mut r);
                let true_rel = norm(&r) / b_norm;
                // either way the Krylov space is spent: a restart from the
                // true residual recovers the gap in one or two steps
                x.copy_from_slice(&candidate);
                rel = true_rel;
                accepted = true;
                break;
            }
        }
        if !accepted {
            update(&h, &g, m, k, &directions, &mut y, x, &mut candidate);
            x.copy_from_slice(&candidate);
            a.residual(b, x, &mut r);
            rel = norm(&r) / b_norm;
        }
    }
}

/// `out = x + Z y` with `y` solving the leading `k × k` triangle `H y = g`.
#[allow(clippy::too_many_arguments)]
fn update(h: &[f64], g: &[f64], m: usize, k: usize, directions: &[Vec<f64>], y: &mut [f64], x: &[f64], out: &mut [f64]) {
    for i in (0..k).rev() {
        let mut acc = g[i];
        for j in i + 1..k {
            acc -= h[i * m + j] * y[j];
        }
        y[i] = acc / h[i * m + i];
    }
    out.copy_from_slice(x);
    for (yj, zj) in y[..k].iter().zip(directions) {
        for (o, z) in out.iter_mut().zip(zj) {
            *o += yj * z;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::csr::CsrBuilder;

    #[test]
    fn solves_small_nonsymmetric_system() {
        let n = 50;
        let mut bld = CsrBuilder::new(n, 3 * n);
        for i in 0..n {
            let mut row = vec![(i, 4.0)];
            if i > 0 {
                row.push((i - 1, -1.5));
            }
            if i + 1 < n {
                row.push((i + 1, -0.5));
            }
            bld.push_row(row);
        }
        let a = bld.finish();
        let b: Vec<f64> = (0..n).map(|i| (i as f64).sin()).collect();
        let mut x = vec![0.0; n];
        let stats = gmres(&a, &b, &mut x, &mut |r, z| z.copy_from_slice(r), &GmresOptions { restart: 10, ..Default::default() }).unwrap();
        assert!(stats.reached_tol, "{stats:?}");
    }
}
