use alloc::vec;
use alloc::vec::Vec;

use super::{OperatorSpec, TOL_ROOT};
use crate::error::{Error, Result};

/// Upper end of the doubling search in [`gamma_infinity_contains`].
pub const T_MAX: f64 = 1_099_511_627_776.0; // 2^40

/// A point `c_σ·1⃗` on the level set `{f = σ}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LevelSetPoint {
    pub sigma: f64,
    pub c_sigma: f64,
}

/// Finds `c_σ > 0` with `f(c_σ·1⃗) = σ`.
///
/// `t ↦ f(t·1⃗)` is strictly increasing, so a bracket is grown geometrically
/// around `t = 1` and then closed with safeguarded Newton steps.
pub fn diagonal_level_point(op: &OperatorSpec, sigma: f64) -> Result<LevelSetPoint> {
    if !sigma.is_finite() || sigma <= op.sup_boundary_f() || sigma >= op.sup_f() {
        return Err(Error::LevelOutOfRange { sigma });
    }
    let n = op.n;
    let mut grad = vec![0.0; n];
    let diag = |t: f64, grad: &mut Vec<f64>| -> (f64, f64) {
        let value = op.value_and_grad_into(&vec![t; n], grad);
        (value - sigma, grad.iter().sum())
    };

    let (mut lo, mut hi) = (1.0, 1.0);
    let mut steps = 0;
    while diag(lo, &mut grad).0 > 0.0 {
        lo *= 0.5;
        steps += 1;
        if steps > 2100 || lo == 0.0 {
            return Err(Error::LevelOutOfRange { sigma });
        }
    }
    while diag(hi, &mut grad).0 < 0.0 {
        hi *= 2.0;
        steps += 1;
        if steps > 2100 || !hi.is_finite() {
            return Err(Error::LevelOutOfRange { sigma });
        }
    }

    let mut t = 0.5 * (lo + hi);
    for _ in 0..500 {
        let (r, slope) = diag(t, &mut grad);
        if r.abs() < TOL_ROOT {
            return Ok(LevelSetPoint { sigma, c_sigma: t });
        }
        if r < 0.0 {
            lo = t;
        } else {
            hi = t;
        }
        let newton = t - r / slope;
        t = if newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
        if hi - lo <= f64::EPSILON * hi {
            break;
        }
    }
    let (r, _) = diag(t, &mut grad);
    if r.abs() < TOL_ROOT {
        Ok(LevelSetPoint { sigma, c_sigma: t })
    } else {
        Err(Error::Numerical(alloc::format!("level point residual {r:e} above tolerance")))
    }
}

/// Outcome of the doubling search for `λ' ∈ Γ_∞`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GammaInfinity {
    pub contains: bool,
    /// Smallest power of two `T` with `(λ', T) ∈ Γ`, when one was found.
    pub witness: Option<f64>,
    /// Search bound; a negative answer only means nothing was found below it.
    pub t_max: f64,
}

/// Whether `(λ', T) ∈ Γ` for some `T = 2^j ≤ 2^40`.
///
/// `Γ + Γ_n ⊆ Γ` makes membership monotone in `T`, so doubling is enough.
pub fn gamma_infinity_contains(op: &OperatorSpec, lambda_prime: &[f64]) -> Result<GammaInfinity> {
    if lambda_prime.len() + 1 != op.n {
        return Err(Error::DimensionMismatch { expected: op.n - 1, got: lambda_prime.len() });
    }
    let mut point = lambda_prime.to_vec();
    point.push(1.0);
    let mut t = 1.0;
    while t <= T_MAX {
        point[op.n - 1] = t;
        if op.cone.contains_unchecked(&point) {
            return Ok(GammaInfinity { contains: true, witness: Some(t), t_max: T_MAX });
        }
        t *= 2.0;
    }
    Ok(GammaInfinity { contains: false, witness: None, t_max: T_MAX })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn level_points() {
        let lm2 = OperatorSpec::log_ma(2).unwrap();
        assert_relative_eq!(diagonal_level_point(&lm2, 0.0).unwrap().c_sigma, 1.0, epsilon = 1e-12);
        let det_root = OperatorSpec::sigma_k_root(3, 3).unwrap();
        assert_relative_eq!(diagonal_level_point(&det_root, 2.0).unwrap().c_sigma, 2.0, epsilon = 1e-12);
        // (σ_2/σ_1)(t1⃗) = t·3/3 = t
        let q = OperatorSpec::hessian_quotient(2, 1, 3).unwrap();
        let p = diagonal_level_point(&q, 1.0).unwrap();
        assert!((q.eval(&[p.c_sigma; 3]).unwrap() - 1.0).abs() < 1e-12);
        assert_relative_eq!(p.c_sigma, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn level_points_increase_with_sigma() {
        let s2 = OperatorSpec::sigma_k_root(2, 4).unwrap();
        let mut prev = 0.0;
        for sigma in [0.01, 0.5, 1.0, 7.0, 300.0] {
            let p = diagonal_level_point(&s2, sigma).unwrap();
            assert!((s2.eval(&[p.c_sigma; 4]).unwrap() - sigma).abs() < TOL_ROOT);
            assert!(p.c_sigma > prev);
            prev = p.c_sigma;
        }
    }

    #[test]
    fn unattainable_levels() {
        let s2 = OperatorSpec::sigma_k_root(2, 3).unwrap();
        assert_eq!(diagonal_level_point(&s2, 0.0), Err(Error::LevelOutOfRange { sigma: 0.0 }));
        assert!(diagonal_level_point(&s2, -1.0).is_err());
        assert!(diagonal_level_point(&s2, f64::INFINITY).is_err());
    }

    #[test]
    fn projection_membership() {
        let pos = OperatorSpec::log_ma(4).unwrap();
        assert!(gamma_infinity_contains(&pos, &[1.0, 1.0, 1.0]).unwrap().contains);
        let miss = gamma_infinity_contains(&pos, &[-1.0, 1.0, 1.0]).unwrap();
        assert!(!miss.contains);
        assert_eq!(miss.t_max, T_MAX);
        let g23 = OperatorSpec::sigma_k_root(2, 3).unwrap();
        let hit = gamma_infinity_contains(&g23, &[-0.1, 1.0]).unwrap();
        assert!(hit.contains);
        assert!(g23.cone.contains(&[-0.1, 1.0, 10.0]).unwrap());
        assert!(hit.witness.unwrap() <= 10.0);
    }
}
