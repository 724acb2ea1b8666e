//! Eigenvalue localization for Hermitian arrow matrices
//!
//! ```text
//! ⎛ d_1           a_1     ⎞
//! ⎜      ⋱        ⋮       ⎟
//! ⎜         d_m   a_m     ⎟
//! ⎝ ā_1 ⋯  ā_m    corner  ⎠
//! ```
//!
//! with `m = n − 1`. When the corner dominates `Σ|a_i|²/ε` the first `n − 1`
//! eigenvalues sit within `ε` of the diagonal and the top one within
//! `(n−1)ε` above the corner. All checks compare against a dense eigensolver
//! that never looks at the arrow structure.

mod batch;

pub use batch::{random_arrow, random_duplicate_arrow, run_localization_batch, BatchRecord, BatchSummary, LocalizationBatch};

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::HermMatrix;

/// Accepted oracle residual `‖Av − λv‖ / ‖A‖_F` per eigenpair.
pub const ORACLE_RESIDUAL_TOL: f64 = 1e-10;
/// Rounding allowance on `λ_n ≥ corner`, in units of `ε_mach·‖A‖_F`.
pub const TOP_ROUNDING_ULPS: f64 = 64.0;

#[derive(Clone, Debug, PartialEq)]
pub struct ArrowMatrix {
    d: Vec<f64>,
    a: Vec<Complex64>,
    corner: f64,
}

impl ArrowMatrix {
    pub fn new(d: Vec<f64>, a: Vec<Complex64>, corner: f64) -> Result<Self> {
        if d.is_empty() {
            return Err(Error::Domain("arrow matrix needs n ≥ 2".into()));
        }
        if d.len() != a.len() {
            return Err(Error::DimensionMismatch { expected: d.len(), got: a.len() });
        }
        let finite = d.iter().all(|x| x.is_finite())
            && a.iter().all(|z| z.re.is_finite() && z.im.is_finite())
            && corner.is_finite();
        if !finite {
            return Err(Error::Domain("arrow matrix entries must be finite".into()));
        }
        Ok(Self { d, a, corner })
    }

    /// Shorthand with real border entries.
    pub fn real(d: &[f64], a: &[f64], corner: f64) -> Result<Self> {
        Self::new(d.to_vec(), a.iter().map(|&x| Complex64::new(x, 0.0)).collect(), corner)
    }

    /// Matrix size `n`.
    pub fn n(&self) -> usize {
        self.d.len() + 1
    }

    pub fn d(&self) -> &[f64] {
        &self.d
    }

    pub fn a(&self) -> &[Complex64] {
        &self.a
    }

    pub fn corner(&self) -> f64 {
        self.corner
    }

    pub fn with_corner(&self, corner: f64) -> Self {
        Self { corner, ..self.clone() }
    }

    pub fn trace(&self) -> f64 {
        self.d.iter().sum::<f64>() + self.corner
    }

    pub fn border_norm_sqr(&self) -> f64 {
        self.a.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn to_dense(&self) -> HermMatrix {
        let n = self.n();
        let mut m = HermMatrix::zeros(n);
        for (i, (&d, &a)) in self.d.iter().zip(&self.a).enumerate() {
            m.set(i, i, Complex64::new(d, 0.0));
            m.set_hermitian(i, n - 1, a);
        }
        m.set(n - 1, n - 1, Complex64::new(self.corner, 0.0));
        m
    }
}

/// Spectrum with the worst relative eigen-residual.
#[derive(Clone, Debug, PartialEq)]
pub struct OracleSpectrum {
    pub values: Vec<f64>,
    /// `max_i ‖A v_i − λ_i v_i‖ / ‖A‖_F`
    pub max_residual: f64,
    pub frobenius: f64,
}

/// Ascending eigenvalues of the dense matrix.
pub fn eigen_oracle(m: &ArrowMatrix) -> Result<Vec<f64>> {
    Ok(eigen_oracle_checked(m)?.values)
}

/// [`eigen_oracle`] plus residual bookkeeping; errors when some eigenpair
/// misses [`ORACLE_RESIDUAL_TOL`].
pub fn eigen_oracle_checked(m: &ArrowMatrix) -> Result<OracleSpectrum> {
    let dense = m.to_dense();
    let eig = dense.eigh()?;
    let n = dense.dim();
    let frobenius = dense.frobenius();
    let mut max_residual: f64 = 0.0;
    let mut col = vec![Complex64::new(0.0, 0.0); n];
    for (k, &lambda) in eig.values.iter().enumerate() {
        for (i, c) in col.iter_mut().enumerate() {
            *c = eig.vectors.get(i, k);
        }
        let av = dense.apply(&col);
        let r: f64 = av.iter().zip(&col).map(|(x, v)| (x - v * lambda).norm_sqr()).sum();
        max_residual = max_residual.max(libm::sqrt(r));
    }
    if frobenius > 0.0 {
        max_residual /= frobenius;
    }
    if max_residual >= ORACLE_RESIDUAL_TOL {
        return Err(Error::Numerical(alloc::format!("eigen residual {max_residual:e} above tolerance")));
    }
    Ok(OracleSpectrum { values: eig.values, max_residual, frobenius })
}

/// Which lower bound on the corner is in force.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Threshold {
    /// `(2n−3)/ε Σ|a|² + (n−1)Σ|d| + (n−2)ε/(2n−3)`, any diagonal.
    Main,
    /// `1/ε Σ|a|² + Σ(d_i + (n−2)|d_i|) + (n−2)ε`; each eigenvalue is near
    /// *some* diagonal entry.
    Ordered,
    /// `1/ε Σ|a|² + (n−1)Σ|d| + (n−2)ε`, for distinct `d` and
    /// `ε ≤ ½ min|d_i − d_j|`.
    Distinct,
}

fn check_eps(epsilon: f64) -> Result<()> {
    if epsilon > 0.0 && epsilon.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(alloc::format!("epsilon must be positive, got {epsilon}")))
    }
}

pub fn threshold_main(epsilon: f64, m: &ArrowMatrix) -> Result<f64> {
    check_eps(epsilon)?;
    let n = m.n() as f64;
    let abs_d: f64 = m.d.iter().map(|x| x.abs()).sum();
    Ok((2.0 * n - 3.0) / epsilon * m.border_norm_sqr() + (n - 1.0) * abs_d + (n - 2.0) * epsilon / (2.0 * n - 3.0))
}

pub fn threshold_ordered(epsilon: f64, m: &ArrowMatrix) -> Result<f64> {
    check_eps(epsilon)?;
    let n = m.n() as f64;
    let diag: f64 = m.d.iter().map(|&x| x + (n - 2.0) * x.abs()).sum();
    Ok(m.border_norm_sqr() / epsilon + diag + (n - 2.0) * epsilon)
}

pub fn threshold_distinct(epsilon: f64, m: &ArrowMatrix) -> Result<f64> {
    check_eps(epsilon)?;
    let n = m.n() as f64;
    let abs_d: f64 = m.d.iter().map(|x| x.abs()).sum();
    Ok(m.border_norm_sqr() / epsilon + (n - 1.0) * abs_d + (n - 2.0) * epsilon)
}

pub fn threshold(which: Threshold, epsilon: f64, m: &ArrowMatrix) -> Result<f64> {
    match which {
        Threshold::Main => threshold_main(epsilon, m),
        Threshold::Ordered => threshold_ordered(epsilon, m),
        Threshold::Distinct => threshold_distinct(epsilon, m),
    }
}

/// Half the smallest gap between diagonal entries (`∞` for `n = 2`).
pub fn distinct_radius(m: &ArrowMatrix) -> f64 {
    let mut d = m.d.clone();
    d.sort_by(f64::total_cmp);
    d.windows(2).map(|w| 0.5 * (w[1] - w[0])).fold(f64::INFINITY, f64::min)
}

#[derive(Clone, Debug, PartialEq)]
pub struct LocalizationReport {
    pub which: Threshold,
    pub epsilon: f64,
    pub threshold: f64,
    pub corner_meets_threshold: bool,
    /// False only for [`Threshold::Distinct`] outside its ε-range.
    pub applicable: bool,
    /// Every conclusion inequality holds (evaluated whether or not the
    /// corner meets the threshold).
    pub satisfied: bool,
    /// Oracle eigenvalues, ascending.
    pub eigenvalues: Vec<f64>,
    /// `|λ_α − d_α|` after matching; for [`Threshold::Ordered`] the distance
    /// to the nearest diagonal entry.
    pub alpha_deviations: Vec<f64>,
    /// `λ_n − corner`
    pub top_gap: f64,
    /// Strict upper bound the conclusion puts on `top_gap`.
    pub top_gap_bound: f64,
    pub oracle_residual: f64,
}

impl LocalizationReport {
    /// Whether the bound's hypotheses hold, so `satisfied` is a claim.
    pub fn hypotheses_hold(&self) -> bool {
        self.corner_meets_threshold && self.applicable
    }

    /// Hypotheses hold but the conclusion failed.
    pub fn is_violation(&self) -> bool {
        self.hypotheses_hold() && !self.satisfied
    }
}

/// Compares the oracle spectrum with the conclusion of the selected localization bound.
///
/// Eigenvalues and diagonal entries are matched in sorted order, which is
/// the assignment minimizing the largest deviation for real numbers.
pub fn check_localization(m: &ArrowMatrix, epsilon: f64, which: Threshold) -> Result<LocalizationReport> {
    let thr = threshold(which, epsilon, m)?;
    let spectrum = eigen_oracle_checked(m)?;
    let n = m.n();
    let lambda = &spectrum.values;
    let top_gap = lambda[n - 1] - m.corner;
    let allowance = TOP_ROUNDING_ULPS * f64::EPSILON * spectrum.frobenius;

    let (alpha_deviations, top_gap_bound) = match which {
        Threshold::Main | Threshold::Distinct => {
            let mut d = m.d.clone();
            d.sort_by(f64::total_cmp);
            let dev = lambda[..n - 1].iter().zip(&d).map(|(l, d)| (l - d).abs()).collect();
            (dev, (n - 1) as f64 * epsilon)
        }
        Threshold::Ordered => {
            let mut dev = Vec::with_capacity(n - 1);
            let mut shift = 0.0;
            for (alpha, l) in lambda[..n - 1].iter().enumerate() {
                let (i, di) = m
                    .d
                    .iter()
                    .enumerate()
                    .min_by(|x, y| (x.1 - l).abs().total_cmp(&(y.1 - l).abs()))
                    .map(|(i, v)| (i, (v - l).abs()))
                    .unwrap();
                dev.push(di);
                shift += m.d[alpha] - m.d[i];
            }
            (dev, (n - 1) as f64 * epsilon + shift.abs())
        }
    };
    let satisfied = alpha_deviations.iter().all(|&x| x < epsilon) && top_gap >= -allowance && top_gap < top_gap_bound;
    let applicable = which != Threshold::Distinct || epsilon <= distinct_radius(m);
    Ok(LocalizationReport {
        which,
        epsilon,
        threshold: thr,
        corner_meets_threshold: m.corner >= thr,
        applicable,
        satisfied,
        eigenvalues: spectrum.values,
        alpha_deviations,
        top_gap,
        top_gap_bound,
        oracle_residual: spectrum.max_residual,
    })
}

/// `(λ−corner)∏(λ−d_i) − Σ|a_i|²∏_{j≠i}(λ−d_j)`, evaluated in product form.
pub fn char_poly_residual(m: &ArrowMatrix, lambda: f64) -> f64 {
    let diffs: Vec<f64> = m.d.iter().map(|d| lambda - d).collect();
    let full: f64 = diffs.iter().product();
    let border: f64 = m
        .a
        .iter()
        .enumerate()
        .map(|(i, z)| z.norm_sqr() * diffs.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, x)| x).product::<f64>())
        .sum();
    (lambda - m.corner) * full - border
}

/// Monomial coefficients `c_0..c_n` of the characteristic polynomial.
pub fn char_poly_coefficients(m: &ArrowMatrix) -> Vec<f64> {
    // polynomial products as coefficient vectors, lowest degree first
    fn times_linear(p: &[f64], root: f64) -> Vec<f64> {
        let mut out = vec![0.0; p.len() + 1];
        for (k, c) in p.iter().enumerate() {
            out[k + 1] += c;
            out[k] -= root * c;
        }
        out
    }
    let mut full = vec![1.0];
    for &d in &m.d {
        full = times_linear(&full, d);
    }
    let mut coeffs = times_linear(&full, m.corner);
    for (i, z) in m.a.iter().enumerate() {
        let mut part = vec![1.0];
        for (j, &d) in m.d.iter().enumerate() {
            if j != i {
                part = times_linear(&part, d);
            }
        }
        for (c, p) in coeffs.iter_mut().zip(&part) {
            *c -= z.norm_sqr() * p;
        }
    }
    coeffs
}

/// `Σ_k |c_k| |λ|^k`, the magnitude against which [`char_poly_residual`]
/// is judged.
pub fn char_poly_scale(m: &ArrowMatrix, lambda: f64) -> f64 {
    scale_from_coefficients(&char_poly_coefficients(m), lambda)
}

fn scale_from_coefficients(coeffs: &[f64], lambda: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, c| acc * lambda.abs() + c.abs())
}

/// `|Σλ − (Σd + corner)|` for the oracle spectrum.
pub fn trace_identity_check(m: &ArrowMatrix) -> Result<f64> {
    let values = eigen_oracle(m)?;
    Ok((values.iter().sum::<f64>() - m.trace()).abs())
}

/// Removes index `i0` from an arrow matrix with `d[i0] = d[j0]`, folding its
/// border entry into `a[j0]`. The spectrum loses exactly one copy of `d[i0]`.
pub fn deflate_duplicate(m: &ArrowMatrix, i0: usize, j0: usize) -> Result<ArrowMatrix> {
    let len = m.d.len();
    if i0 >= len || j0 >= len || i0 == j0 {
        return Err(Error::Precondition(alloc::format!("need distinct indices below {len}, got ({i0}, {j0})")));
    }
    if m.d[i0] != m.d[j0] {
        return Err(Error::Precondition(alloc::format!("d[{i0}] = {} differs from d[{j0}] = {}", m.d[i0], m.d[j0])));
    }
    if len == 1 {
        return Err(Error::Precondition("deflation needs n ≥ 3".into()));
    }
    let merged = libm::sqrt(m.a[j0].norm_sqr() + m.a[i0].norm_sqr());
    let mut d = Vec::with_capacity(len - 1);
    let mut a = Vec::with_capacity(len - 1);
    for i in (0..len).filter(|&i| i != i0) {
        d.push(m.d[i]);
        a.push(if i == j0 { Complex64::new(merged, 0.0) } else { m.a[i] });
    }
    ArrowMatrix::new(d, a, m.corner)
}

/// Closed-form spectrum for `n = 2`.
pub fn two_by_two_eigenvalues(m: &ArrowMatrix) -> Result<[f64; 2]> {
    if m.n() != 2 {
        return Err(Error::DimensionMismatch { expected: 1, got: m.d.len() });
    }
    let (c, d) = (m.corner, m.d[0]);
    let root = libm::sqrt((c - d) * (c - d) + 4.0 * m.a[0].norm_sqr());
    Ok([(c + d - root) / 2.0, (c + d + root) / 2.0])
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn oracle_examples() {
        assert_eq!(eigen_oracle(&ArrowMatrix::real(&[1.0], &[0.0], 5.0).unwrap()).unwrap(), vec![1.0, 5.0]);
        let pauli = eigen_oracle(&ArrowMatrix::real(&[0.0], &[1.0], 0.0).unwrap()).unwrap();
        assert_relative_eq!(pauli[0], -1.0, epsilon = 1e-15);
        assert_relative_eq!(pauli[1], 1.0, epsilon = 1e-15);
    }

    #[test]
    fn thresholds_by_substitution() {
        let m = ArrowMatrix::real(&[1.0], &[2.0], 0.0).unwrap();
        assert_eq!(threshold_main(0.5, &m).unwrap(), 9.0);
        assert_eq!(threshold_ordered(0.5, &m).unwrap(), 9.0);
        let m = ArrowMatrix::real(&[0.0, 0.0], &[1.0, 1.0], 0.0).unwrap();
        assert_relative_eq!(threshold_main(1.0, &m).unwrap(), 19.0 / 3.0, epsilon = 1e-15);
        assert_eq!(threshold_ordered(1.0, &m).unwrap(), 3.0);
        let zero = ArrowMatrix::real(&[0.0, 0.0], &[0.0, 0.0], 0.0).unwrap();
        assert_relative_eq!(threshold_main(1.0, &zero).unwrap(), 1.0 / 3.0, epsilon = 1e-15);
        let m = ArrowMatrix::real(&[-1.0, 1.0], &[0.0, 0.0], 0.0).unwrap();
        assert_eq!(threshold_ordered(1.0, &m).unwrap(), 3.0);
        let m = ArrowMatrix::real(&[0.0, 1.0], &[1.0, 1.0], 0.0).unwrap();
        assert_eq!(threshold_distinct(0.25, &m).unwrap(), 10.25);
        let m = ArrowMatrix::real(&[1.0], &[1.0], 0.0).unwrap();
        assert_eq!(threshold_distinct(0.5, &m).unwrap(), 3.0);
        let m = ArrowMatrix::real(&[2.0, -1.0, 0.5], &[0.0; 3], 0.0).unwrap();
        assert_relative_eq!(threshold_distinct(0.1, &m).unwrap(), 3.0 * 3.5 + 2.0 * 0.1, epsilon = 1e-14);
        assert!(threshold_main(0.0, &m).is_err());
    }

    #[test]
    fn localization_two_by_two() {
        let m = ArrowMatrix::real(&[1.0], &[2.0], 9.0).unwrap();
        let r = check_localization(&m, 0.5, Threshold::Main).unwrap();
        let s5 = libm::sqrt(5.0);
        assert_relative_eq!(r.eigenvalues[0], 5.0 - 2.0 * s5, epsilon = 1e-14);
        assert_relative_eq!(r.eigenvalues[1], 5.0 + 2.0 * s5, epsilon = 1e-14);
        assert_relative_eq!(r.alpha_deviations[0], 2.0 * s5 - 4.0, epsilon = 1e-14);
        assert!(r.corner_meets_threshold && r.satisfied);
    }

    #[test]
    fn diagonal_localization_is_exact() {
        let m = ArrowMatrix::real(&[0.5, -1.0, 2.0], &[0.0; 3], 0.0).unwrap();
        let m = m.with_corner(threshold_main(0.3, &m).unwrap());
        let r = check_localization(&m, 0.3, Threshold::Main).unwrap();
        assert!(r.alpha_deviations.iter().all(|&x| x == 0.0));
        assert_eq!(r.top_gap, 0.0);
        assert!(r.satisfied);
    }

    #[test]
    fn char_poly_examples() {
        let m = ArrowMatrix::real(&[0.0], &[1.0], 0.0).unwrap();
        assert_eq!(char_poly_residual(&m, 1.0), 0.0);
        let m = ArrowMatrix::real(&[1.0, 2.0], &[1.0, 1.0], 10.0).unwrap();
        assert_eq!(char_poly_residual(&m, 0.0), -17.0);
        // coefficients agree with the product form away from the roots
        let c = char_poly_coefficients(&m);
        let horner = c.iter().rev().fold(0.0, |acc, c| acc * 0.7 + c);
        assert_relative_eq!(horner, char_poly_residual(&m, 0.7), epsilon = 1e-12);
        for l in eigen_oracle(&m).unwrap() {
            assert!(char_poly_residual(&m, l).abs() < 1e-10 * char_poly_scale(&m, l));
        }
    }

    #[test]
    fn cubic_example_roots_match_oracle() {
        // (λ−10)(λ−1)(λ−2) − (λ−2) − (λ−1), bracketed and bisected
        let p = |l: f64| (l - 10.0) * (l - 1.0) * (l - 2.0) - (l - 2.0) - (l - 1.0);
        let bisect = |mut lo: f64, mut hi: f64| {
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if (p(lo) < 0.0) == (p(mid) < 0.0) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            0.5 * (lo + hi)
        };
        let roots = [bisect(0.0, 1.5), bisect(1.5, 2.5), bisect(9.0, 11.0)];
        let m = ArrowMatrix::real(&[1.0, 2.0], &[1.0, 1.0], 10.0).unwrap();
        for (o, r) in eigen_oracle(&m).unwrap().iter().zip(roots) {
            assert_relative_eq!(*o, r, epsilon = 1e-12);
        }
        assert!(trace_identity_check(&m).unwrap() < 1e-13);
    }

    #[test]
    fn deflation_examples() {
        let m = ArrowMatrix::real(&[1.0, 1.0], &[1.0, 1.0], 5.0).unwrap();
        let small = deflate_duplicate(&m, 0, 1).unwrap();
        assert_eq!(small.d(), &[1.0]);
        assert_relative_eq!(small.a()[0].re, libm::sqrt(2.0), epsilon = 1e-15);
        let mut merged = eigen_oracle(&small).unwrap();
        merged.push(1.0);
        merged.sort_by(f64::total_cmp);
        for (x, y) in merged.iter().zip(eigen_oracle(&m).unwrap()) {
            assert!((x - y).abs() < 1e-12);
        }
        let flat = deflate_duplicate(&ArrowMatrix::real(&[1.0, 1.0], &[0.0, 0.0], 5.0).unwrap(), 1, 0).unwrap();
        assert_eq!(eigen_oracle(&flat).unwrap(), vec![1.0, 5.0]);
        assert!(matches!(
            deflate_duplicate(&ArrowMatrix::real(&[1.0, 2.0], &[1.0, 1.0], 5.0).unwrap(), 0, 1),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn closed_form_matches_oracle() {
        let m = ArrowMatrix::new(vec![0.3], vec![Complex64::new(0.4, -1.2)], -2.0).unwrap();
        let closed = two_by_two_eigenvalues(&m).unwrap();
        let oracle = eigen_oracle(&m).unwrap();
        for (c, o) in closed.iter().zip(&oracle) {
            assert_relative_eq!(c, o, max_relative = 1e-12);
        }
    }
}
