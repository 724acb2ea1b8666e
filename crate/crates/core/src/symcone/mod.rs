//! Symmetric concave operators `f` on open symmetric convex cones `Γ ⊂ ℝⁿ`.
//!
//! Three families are supported: the complex Monge-Ampère operator in log
//! form, roots of elementary symmetric polynomials and Hessian quotients.
//! Each family carries its cone (the positive orthant or a Gårding cone),
//! closed-form values and gradients, and the boundary value `sup_{∂Γ} f`.

mod criteria;
mod level;
mod sampling;

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::Index;

use crate::error::{Error, Result};

pub use criteria::{concavity_midpoint_check, verify_growth_criteria, CriteriaReport};
pub use level::{diagonal_level_point, gamma_infinity_contains, GammaInfinity, LevelSetPoint, T_MAX};
pub use sampling::ConeSampler;

/// Absolute slack allowed for analytic inequalities evaluated in double precision.
pub const TOL_CHECK: f64 = 1e-12;
/// Residual bound for diagonal level points.
pub const TOL_ROOT: f64 = 1e-12;

/// A point `λ ∈ ℝⁿ`, `n ≥ 2`, with finite entries.
#[derive(Clone, Debug, PartialEq)]
pub struct EigenVector(Vec<f64>);

impl EigenVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::Domain(alloc::format!(
                "eigenvalue vectors need n >= 2, got {}",
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("non-finite eigenvalue".into()));
        }
        Ok(Self(values))
    }

    pub fn diagonal(n: usize, t: f64) -> Result<Self> {
        Self::new(vec![t; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl Index<usize> for EigenVector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

/// `σ_k(λ)` with `σ_0 = 1`.
pub fn elementary_symmetric(lambda: &[f64], k: usize) -> Result<f64> {
    if k > lambda.len() {
        return Err(Error::Domain(alloc::format!(
            "sigma_{k} undefined for n = {}",
            lambda.len()
        )));
    }
    Ok(elementary_all(lambda, k)[k])
}

/// `[σ_0(λ), …, σ_k(λ)]`, built by the usual one-pass recurrence.
pub(crate) fn elementary_all(lambda: &[f64], k: usize) -> Vec<f64> {
    let mut e = vec![0.0; k + 1];
    e[0] = 1.0;
    for (seen, &x) in lambda.iter().enumerate() {
        for j in (1..=k.min(seen + 1)).rev() {
            e[j] += x * e[j - 1];
        }
    }
    e
}

/// `σ_j(λ | i)`: elementary symmetric polynomials of `λ` with entry `i` removed.
fn elementary_without(lambda: &[f64], skip: usize, k: usize) -> Vec<f64> {
    let mut e = vec![0.0; k + 1];
    e[0] = 1.0;
    let mut seen = 0;
    for (i, &x) in lambda.iter().enumerate() {
        if i == skip {
            continue;
        }
        for j in (1..=k.min(seen + 1)).rev() {
            e[j] += x * e[j - 1];
        }
        seen += 1;
    }
    e
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConeKind {
    /// `Γ_k = {σ_1 > 0, …, σ_k > 0}`.
    Garding(usize),
    /// `Γ_n`, the positive orthant.
    Positive,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ConeSpec {
    pub kind: ConeKind,
    pub n: usize,
}

impl ConeSpec {
    pub fn garding(k: usize, n: usize) -> Result<Self> {
        if n < 2 || k == 0 || k > n {
            return Err(Error::Domain(alloc::format!("Gamma_{k} needs 1 <= k <= n, n >= 2 (n = {n})")));
        }
        Ok(Self { kind: ConeKind::Garding(k), n })
    }

    pub fn positive(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::Domain("positive cone needs n >= 2".into()));
        }
        Ok(Self { kind: ConeKind::Positive, n })
    }

    /// Number of leading `σ_j` whose positivity characterizes membership.
    pub fn order(&self) -> usize {
        match self.kind {
            ConeKind::Garding(k) => k,
            ConeKind::Positive => self.n,
        }
    }

    pub fn contains(&self, lambda: &[f64]) -> Result<bool> {
        if lambda.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: lambda.len() });
        }
        Ok(self.contains_unchecked(lambda))
    }

    pub(crate) fn contains_unchecked(&self, lambda: &[f64]) -> bool {
        match self.kind {
            ConeKind::Positive => lambda.iter().all(|&x| x > 0.0),
            ConeKind::Garding(k) => elementary_all(lambda, k)[1..].iter().all(|&s| s > 0.0),
        }
    }

    /// `min_j σ_j(λ)` over the characterizing range for Gårding cones and
    /// `min_i λ_i` for the positive cone. Positive exactly on the cone.
    pub fn margin(&self, lambda: &[f64]) -> f64 {
        match self.kind {
            ConeKind::Positive => lambda.iter().copied().fold(f64::INFINITY, f64::min),
            ConeKind::Garding(k) => elementary_all(lambda, k)[1..].iter().copied().fold(f64::INFINITY, f64::min),
        }
    }

    /// Like [`ConeSpec::margin`] with `σ_j` normalized by `binom(n, j)`, so
    /// that the margin of `1⃗` is 1.
    pub fn normalized_margin(&self, lambda: &[f64]) -> f64 {
        match self.kind {
            ConeKind::Positive => self.margin(lambda),
            ConeKind::Garding(k) => {
                let e = elementary_all(lambda, k);
                (1..=k).map(|j| e[j] / binomial(self.n, j)).fold(f64::INFINITY, f64::min)
            }
        }
    }
}

pub(crate) fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// `λ ∈ Γ` with strict inequalities.
pub fn cone_contains(cone: &ConeSpec, lambda: &EigenVector) -> Result<bool> {
    cone.contains(lambda.as_slice())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    /// `f = Σ log λ_i` on `Γ_n`.
    LogMa,
    /// `f = σ_k^{1/k}` on `Γ_k`.
    SigmaKRoot { k: usize },
    /// `f = (σ_k / σ_l)^{1/(k-l)}` on `Γ_k`, `0 <= l < k`.
    HessianQuotient { k: usize, l: usize },
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::LogMa => write!(f, "log_ma"),
            Family::SigmaKRoot { k } => write!(f, "sigma_{k}_root"),
            Family::HessianQuotient { k, l } => write!(f, "hessian_quotient_{k}_{l}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OperatorSpec {
    pub family: Family,
    pub n: usize,
    pub cone: ConeSpec,
}

impl OperatorSpec {
    pub fn new(family: Family, n: usize) -> Result<Self> {
        let cone = match family {
            Family::LogMa => ConeSpec::positive(n)?,
            Family::SigmaKRoot { k } => ConeSpec::garding(k, n)?,
            Family::HessianQuotient { k, l } => {
                if l >= k {
                    return Err(Error::Domain(alloc::format!("Hessian quotient needs l < k (k = {k}, l = {l})")));
                }
                ConeSpec::garding(k, n)?
            }
        };
        Ok(Self { family, n, cone })
    }

    pub fn log_ma(n: usize) -> Result<Self> {
        Self::new(Family::LogMa, n)
    }

    pub fn sigma_k_root(k: usize, n: usize) -> Result<Self> {
        Self::new(Family::SigmaKRoot { k }, n)
    }

    pub fn hessian_quotient(k: usize, l: usize, n: usize) -> Result<Self> {
        Self::new(Family::HessianQuotient { k, l }, n)
    }

    /// `sup_{∂Γ} f`: `-∞` for the log form, `0` for the root families.
    pub fn sup_boundary_f(&self) -> f64 {
        match self.family {
            Family::LogMa => f64::NEG_INFINITY,
            Family::SigmaKRoot { .. } | Family::HessianQuotient { .. } => 0.0,
        }
    }

    /// `sup_Γ f`. All three families are unbounded above along `t·1⃗`.
    pub fn sup_f(&self) -> f64 {
        f64::INFINITY
    }

    /// Whether `lim_{t→∞} f(λ_1, …, λ_{n-1}, λ_n + t) = sup_Γ f` for every `λ ∈ Γ`.
    ///
    /// For Hessian quotients with `l >= 1` the limit is `σ_{k-1}(λ')/σ_{l-1}(λ')`,
    /// which is finite, so the condition fails.
    pub fn unbounded_in_one_direction(&self) -> bool {
        match self.family {
            Family::LogMa | Family::SigmaKRoot { .. } => true,
            Family::HessianQuotient { l, .. } => l == 0,
        }
    }

    /// Whether `lim_{t→∞} f(tλ) > -∞` for every `λ ∈ Γ`.
    pub fn bounded_below_along_rays(&self) -> bool {
        true
    }

    fn check(&self, lambda: &[f64]) -> Result<()> {
        if !self.cone.contains(lambda)? {
            return Err(Error::OutsideCone);
        }
        Ok(())
    }

    pub fn eval(&self, lambda: &[f64]) -> Result<f64> {
        self.check(lambda)?;
        Ok(self.eval_unchecked(lambda))
    }

    pub fn grad(&self, lambda: &[f64]) -> Result<Vec<f64>> {
        self.check(lambda)?;
        let mut g = vec![0.0; self.n];
        self.value_and_grad_into(lambda, &mut g);
        Ok(g)
    }

    /// Value at a point already known to lie in `Γ`.
    pub(crate) fn eval_unchecked(&self, lambda: &[f64]) -> f64 {
        match self.family {
            Family::LogMa => lambda.iter().map(|&x| libm::log(x)).sum(),
            Family::SigmaKRoot { k } => {
                let s = elementary_all(lambda, k)[k];
                root(s, k as f64)
            }
            Family::HessianQuotient { k, l } => {
                let e = elementary_all(lambda, k);
                root(e[k] / e[l], (k - l) as f64)
            }
        }
    }

    /// Writes `Df(λ)` into `grad` and returns `f(λ)`; `λ` must lie in `Γ`.
    pub(crate) fn value_and_grad_into(&self, lambda: &[f64], grad: &mut [f64]) -> f64 {
        match self.family {
            Family::LogMa => {
                for (g, &x) in grad.iter_mut().zip(lambda) {
                    *g = 1.0 / x;
                }
                lambda.iter().map(|&x| libm::log(x)).sum()
            }
            Family::SigmaKRoot { k } => {
                let s = elementary_all(lambda, k)[k];
                let value = root(s, k as f64);
                // ∂σ_k/∂λ_i = σ_{k-1}(λ|i)
                let scale = value / (k as f64 * s);
                for (i, g) in grad.iter_mut().enumerate() {
                    *g = scale * elementary_without(lambda, i, k - 1)[k - 1];
                }
                value
            }
            Family::HessianQuotient { k, l } => {
                let e = elementary_all(lambda, k);
                let value = root(e[k] / e[l], (k - l) as f64);
                let inv = 1.0 / (k - l) as f64;
                for (i, g) in grad.iter_mut().enumerate() {
                    let without = elementary_without(lambda, i, k - 1);
                    let dk = without[k - 1] / e[k];
                    let dl = if l == 0 { 0.0 } else { without[l - 1] / e[l] };
                    *g = value * inv * (dk - dl);
                }
                value
            }
        }
    }
}

fn root(x: f64, k: f64) -> f64 {
    if k == 1.0 {
        x
    } else if k == 2.0 {
        libm::sqrt(x)
    } else {
        libm::pow(x, 1.0 / k)
    }
}

pub fn f_eval(op: &OperatorSpec, lambda: &EigenVector) -> Result<f64> {
    op.eval(lambda.as_slice())
}

pub fn f_grad(op: &OperatorSpec, lambda: &EigenVector) -> Result<Vec<f64>> {
    op.grad(lambda.as_slice())
}

/// `ν_λ = Df(λ)/|Df(λ)|`, the unit normal to the level set through `λ`.
pub fn normal_vector(op: &OperatorSpec, lambda: &EigenVector) -> Result<Vec<f64>> {
    let mut g = op.grad(lambda.as_slice())?;
    let norm = libm::sqrt(g.iter().map(|x| x * x).sum::<f64>());
    for x in &mut g {
        *x /= norm;
    }
    Ok(g)
}
