use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::linalg::HermMatrix;
use crate::symcone::OperatorSpec;

/// Evaluates `f(λ(ω^{-1/2} g ω^{-1/2}))` node by node, reusing its buffers.
pub(crate) struct Pointwise<'a> {
    op: &'a OperatorSpec,
    /// `ω^{-1/2}`, `None` for the identity metric.
    inv_sqrt: Option<&'a HermMatrix>,
    rel: HermMatrix,
    tmp: HermMatrix,
    lambda: Vec<f64>,
    grad: Vec<f64>,
    /// `F^{jk̄}` of the last [`Pointwise::evaluate`] as
    /// `Φ = W U diag(f_i) U* W`.
    pub phi: HermMatrix,
}

impl<'a> Pointwise<'a> {
    pub fn new(op: &'a OperatorSpec, inv_sqrt: &'a HermMatrix) -> Self {
        let n = inv_sqrt.dim();
        let identity = *inv_sqrt == HermMatrix::identity(n);
        Self {
            op,
            inv_sqrt: (!identity).then_some(inv_sqrt),
            rel: HermMatrix::zeros(n),
            tmp: HermMatrix::zeros(n),
            lambda: vec![0.0; n],
            grad: vec![0.0; n],
            phi: HermMatrix::zeros(n),
        }
    }

    fn relative(&mut self, g: &HermMatrix) {
        match self.inv_sqrt {
            Some(w) => g.congruence_into(w, &mut self.tmp, &mut self.rel),
            None => self.rel.clone_from(g),
        }
    }

    /// Value and cone margin; `None` outside the cone.
    pub fn value(&mut self, g: &HermMatrix) -> Option<(f64, f64)> {
        self.relative(g);
        if self.rel.dim() == 2 {
            let (lo, hi, _) = eigen2(&self.rel);
            self.lambda[0] = lo;
            self.lambda[1] = hi;
        } else {
            self.lambda = self.rel.eigh().ok()?.values;
        }
        if !self.op.cone.contains_unchecked(&self.lambda) {
            return None;
        }
        let v = self.op.eval_unchecked(&self.lambda);
        v.is_finite().then(|| (v, self.op.cone.margin(&self.lambda)))
    }

    /// Value and margin, leaving the linearization in [`Pointwise::phi`].
    pub fn evaluate(&mut self, g: &HermMatrix) -> Option<(f64, f64)> {
        self.relative(g);
        let projector = if self.rel.dim() == 2 {
            let (lo, hi, p) = eigen2(&self.rel);
            self.lambda[0] = lo;
            self.lambda[1] = hi;
            Some(p)
        } else {
            None
        };
        let eig = match projector {
            Some(_) => None,
            None => {
                let e = self.rel.eigh().ok()?;
                self.lambda.copy_from_slice(&e.values);
                Some(e)
            }
        };
        if !self.op.cone.contains_unchecked(&self.lambda) {
            return None;
        }
        let value = self.op.value_and_grad_into(&self.lambda, &mut self.grad);
        if !value.is_finite() {
            return None;
        }
        let margin = self.op.cone.margin(&self.lambda);
        match (projector, eig) {
            // U diag(f) U* = f_lo I + (f_hi − f_lo) P_hi
            (Some(p), _) => {
                let (f_lo, jump) = (self.grad[0], self.grad[1] - self.grad[0]);
                self.tmp.set_hermitian(0, 0, Complex64::new(f_lo + jump * p[0], 0.0));
                self.tmp.set_hermitian(0, 1, Complex64::new(jump * p[1], jump * p[2]));
                self.tmp.set_hermitian(1, 1, Complex64::new(f_lo + jump * p[3], 0.0));
            }
            (None, Some(e)) => self.tmp = HermMatrix::from_spectral(&e.vectors, &self.grad),
            (None, None) => unreachable!("one eigen path always runs"),
        }
        match self.inv_sqrt {
            Some(w) => self.tmp.congruence_into(w, &mut self.rel, &mut self.phi),
            None => self.phi.clone_from(&self.tmp),
        }
        Some((value, margin))
    }
}

/// Eigenvalues `lo ≤ hi` of a 2×2 Hermitian matrix and the projector onto
/// the `hi` eigenspace as `[P₀₀, Re P₀₁, Im P₀₁, P₁₁]`.
fn eigen2(m: &HermMatrix) -> (f64, f64, [f64; 4]) {
    let (a, c, b) = (m.get(0, 0).re, m.get(1, 1).re, m.get(0, 1));
    let mean = 0.5 * (a + c);
    let half = 0.5 * (a - c);
    let b2 = b.norm_sqr();
    let r = libm::hypot(half, b.norm());
    if r == 0.0 {
        return (mean, mean, [0.5, 0.0, 0.0, 0.5]);
    }
    let (hi, lo) = if mean >= 0.0 {
        let hi = mean + r;
        (hi, (a * c - b2) / hi)
    } else {
        let lo = mean - r;
        ((a * c - b2) / lo, lo)
    };
    // (M − lo I) / (hi − lo) without cancelling r against |half|
    let (p00, p11) = if half >= 0.0 { (half + r, b2 / (half + r)) } else { (b2 / (r - half), r - half) };
    let inv = 0.5 / r;
    (lo, hi, [p00 * inv, b.re * inv, b.im * inv, p11 * inv])
}

/// Real second-order coefficients of `v ↦ Re Σ_{jk} Φ_{kj} (∂∂̄v)_{jk}`.
///
/// Writes the `2n` diagonal coefficients followed by one coefficient per
/// entry of [`mixed_pairs`], matching the layout of
/// [`crate::linalg::Coefficients`].
pub(crate) fn real_coefficients(phi: &HermMatrix, pairs: &[(usize, usize)], out: &mut [f64]) {
    let dims = 2 * phi.dim();
    // entry (a, b) of the real symmetric form; axis 2j is x_j, 2j+1 is y_j
    let entry = |a: usize, b: usize| {
        let p: Complex64 = phi.get(b / 2, a / 2) * 0.25;
        match (a % 2, b % 2) {
            (0, 0) | (1, 1) => p.re,
            (0, _) => -p.im,
            _ => p.im,
        }
    };
    for (a, o) in out[..dims].iter_mut().enumerate() {
        *o = entry(a, a);
    }
    for (i, &(a, b)) in pairs.iter().enumerate() {
        out[dims + i] = entry(a, b) + entry(b, a);
    }
}

/// All axis pairs `a < b` except `(x_j, y_j)`, whose coefficient vanishes
/// identically.
pub(crate) fn mixed_pairs(n: usize) -> Vec<(usize, usize)> {
    let dims = 2 * n;
    (0..dims)
        .flat_map(|a| (a + 1..dims).map(move |b| (a, b)))
        .filter(|&(a, b)| !(a % 2 == 0 && b == a + 1))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prodgrid::complex_entry;

    #[test]
    fn closed_form_2x2_matches_jacobi() {
        let cases = [
            [2.0, 0.0, 0.0, 2.0],
            [1.0, 0.3, -0.4, 5.0],
            [-3.0, 1e-9, 2e-9, -3.0],
            [4.0, 2.0, 0.0, 1.0],
            [1e-6, 1e-3, 0.0, 1.0],
        ];
        for [a, re, im, c] in cases {
            let m = HermMatrix::from_rows(2, vec![Complex64::new(a, 0.0), Complex64::new(re, im), Complex64::new(re, -im), Complex64::new(c, 0.0)])
                .unwrap();
            let (lo, hi, p) = eigen2(&m);
            let e = m.eigh().unwrap();
            let scale = m.frobenius();
            assert!((lo - e.values[0]).abs() < 1e-15 * scale && (hi - e.values[1]).abs() < 1e-15 * scale);
            if hi > lo {
                let v = e.vectors.get(0, 1);
                let w = e.vectors.get(1, 1);
                assert!((p[0] - v.norm_sqr()).abs() < 1e-12 && (p[3] - w.norm_sqr()).abs() < 1e-12);
                let off = v * w.conj();
                assert!((p[1] - off.re).abs() < 1e-12 && (p[2] - off.im).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn coefficients_reproduce_the_complex_contraction() {
        let n = 2;
        let phi = HermMatrix::from_rows(
            n,
            vec![Complex64::new(1.3, 0.0), Complex64::new(0.2, -0.7), Complex64::new(0.2, 0.7), Complex64::new(0.4, 0.0)],
        )
        .unwrap();
        // an arbitrary symmetric real "second derivative" matrix
        let d2 = [
            1.0, 0.3, -0.2, 0.5, //
            0.3, -2.0, 0.7, 0.1, //
            -0.2, 0.7, 0.9, -0.4, //
            0.5, 0.1, -0.4, 1.7,
        ];
        let mut direct = 0.0;
        for j in 0..n {
            for k in 0..n {
                direct += (phi.get(k, j) * complex_entry(&d2, n, j, k)).re;
            }
        }
        let pairs = mixed_pairs(n);
        assert_eq!(pairs, vec![(0, 2), (0, 3), (1, 2), (1, 3)]);
        let mut c = vec![0.0; 4 + pairs.len()];
        real_coefficients(&phi, &pairs, &mut c);
        let mut via = (0..4).map(|a| c[a] * d2[a * 4 + a]).sum::<f64>();
        for (i, &(a, b)) in pairs.iter().enumerate() {
            via += c[4 + i] * d2[a * 4 + b];
        }
        assert!((direct - via).abs() < 1e-14, "{direct} {via}");
    }
}
