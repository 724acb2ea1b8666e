use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;

use super::{ConeSampler, OperatorSpec, TOL_CHECK};
use crate::error::{Error, Result};

/// Radii used for the `Σ f_i(λ) > (f(R1⃗) − f(λ))/R` check.
pub const SUMFI_RADII: [f64; 3] = [1.0, 10.0, 100.0];
/// Step of the centered finite differences used against `f_grad`.
pub const FD_STEP: f64 = 1e-5;
/// Points enter the finite-difference check only when every coordinate
/// perturbation of this size keeps them in the cone.
pub const FD_INTERIOR_RADIUS: f64 = 1e-2;

/// Minimum observed slacks of the structural inequalities over sampled pairs.
///
/// Every `min_*` slack is "left side minus right side", so a non-negative
/// value means the inequality held on every sample.
#[derive(Clone, Debug, PartialEq)]
pub struct CriteriaReport {
    pub samples: usize,
    /// `min f_i(λ)`; must be positive.
    pub min_grad_component: f64,
    /// `Σ f_i(λ) μ_i ≥ 0`
    pub min_pairing: f64,
    /// `f(λ+μ) − f(λ) ≥ 0`
    pub min_increment: f64,
    /// `Σ f_i(λ) λ_i ≥ 0`
    pub min_euler: f64,
    /// Samples where the strict pairing or strict increment failed (`≤ 0`).
    pub strict_failures: usize,
    /// `Σ f_i(λ) − (f(R1⃗) − f(λ))/R` over the radii in [`SUMFI_RADII`].
    pub min_sumfi: f64,
    pub min_concavity: f64,
    pub max_grad_fd_rel_err: f64,
    pub max_symmetry_dev: f64,
}

impl CriteriaReport {
    pub fn passed(&self) -> bool {
        self.min_grad_component > 0.0
            && self.min_pairing >= -TOL_CHECK
            && self.min_increment >= -TOL_CHECK
            && self.min_euler >= -TOL_CHECK
            && self.strict_failures == 0
            && self.min_sumfi > 0.0
            && self.min_concavity >= -TOL_CHECK
            && self.max_grad_fd_rel_err < 1e-6
            && self.max_symmetry_dev <= 1e-12
    }
}

/// Samples `samples` pairs `(λ, μ)` from the cone and records the worst slack
/// of each structural inequality.
pub fn verify_growth_criteria(op: &OperatorSpec, samples: usize, seed: u64) -> Result<CriteriaReport> {
    if samples == 0 {
        return Err(Error::Domain("at least one sample is required".into()));
    }
    let n = op.n;
    let mut sampler = ConeSampler::new(op.cone, seed);
    let mut report = CriteriaReport {
        samples,
        min_grad_component: f64::INFINITY,
        min_pairing: f64::INFINITY,
        min_increment: f64::INFINITY,
        min_euler: f64::INFINITY,
        strict_failures: 0,
        min_sumfi: f64::INFINITY,
        min_concavity: f64::INFINITY,
        max_grad_fd_rel_err: 0.0,
        max_symmetry_dev: 0.0,
    };
    let mut grad = vec![0.0; n];
    let mut sum = vec![0.0; n];
    let mut perm: Vec<usize> = (0..n).collect();
    let mut permuted = vec![0.0; n];
    let mut permuted_grad = vec![0.0; n];

    for _ in 0..samples {
        let lambda = sampler.sample()?;
        let mu = sampler.sample()?;
        let f_lambda = op.value_and_grad_into(&lambda, &mut grad);

        report.min_grad_component = grad.iter().copied().fold(report.min_grad_component, f64::min);

        let pairing: f64 = grad.iter().zip(&mu).map(|(g, m)| g * m).sum();
        report.min_pairing = report.min_pairing.min(pairing);

        for i in 0..n {
            sum[i] = lambda[i] + mu[i];
        }
        let increment = op.eval_unchecked(&sum) - f_lambda;
        report.min_increment = report.min_increment.min(increment);
        if pairing <= 0.0 || increment <= 0.0 {
            report.strict_failures += 1;
        }

        let euler: f64 = grad.iter().zip(&lambda).map(|(g, l)| g * l).sum();
        report.min_euler = report.min_euler.min(euler);

        let grad_sum: f64 = grad.iter().sum();
        for &r in &SUMFI_RADII {
            let f_diag = op.eval_unchecked(&vec![r; n]);
            report.min_sumfi = report.min_sumfi.min(grad_sum - (f_diag - f_lambda) / r);
        }

        report.min_concavity = report.min_concavity.min(concavity_slack(op, &lambda, &mu));

        if let Some(err) = gradient_fd_error(op, &lambda, &grad) {
            report.max_grad_fd_rel_err = report.max_grad_fd_rel_err.max(err);
        }

        perm.shuffle(sampler.rng());
        for (dst, &src) in perm.iter().enumerate() {
            permuted[dst] = lambda[src];
        }
        let f_perm = op.value_and_grad_into(&permuted, &mut permuted_grad);
        let mut dev = (f_perm - f_lambda).abs() / (1.0 + f_lambda.abs());
        for (dst, &src) in perm.iter().enumerate() {
            dev = dev.max((permuted_grad[dst] - grad[src]).abs() / (1.0 + grad[src].abs()));
        }
        report.max_symmetry_dev = report.max_symmetry_dev.max(dev);
    }
    Ok(report)
}

/// Worst of the midpoint and tangent-plane concavity slacks at `(λ, μ)`:
/// `min( f((λ+μ)/2) − (f(λ)+f(μ))/2 , Σ f_i(λ)(μ_i−λ_i) − (f(μ)−f(λ)) )`.
pub fn concavity_midpoint_check(op: &OperatorSpec, lambda: &[f64], mu: &[f64]) -> Result<f64> {
    if !op.cone.contains(lambda)? || !op.cone.contains(mu)? {
        return Err(Error::OutsideCone);
    }
    Ok(concavity_slack(op, lambda, mu))
}

fn concavity_slack(op: &OperatorSpec, lambda: &[f64], mu: &[f64]) -> f64 {
    let mut grad = vec![0.0; op.n];
    let f_lambda = op.value_and_grad_into(lambda, &mut grad);
    let f_mu = op.eval_unchecked(mu);
    let mid: Vec<f64> = lambda.iter().zip(mu).map(|(a, b)| 0.5 * (a + b)).collect();
    let midpoint = op.eval_unchecked(&mid) - 0.5 * (f_lambda + f_mu);
    let tangent: f64 = grad.iter().zip(mu.iter().zip(lambda)).map(|(g, (m, l))| g * (m - l)).sum::<f64>()
        - (f_mu - f_lambda);
    midpoint.min(tangent)
}

/// Relative error of `grad` against centered differences of `f`, or `None`
/// when `λ` is too close to `∂Γ` (see [`FD_INTERIOR_RADIUS`]).
fn gradient_fd_error(op: &OperatorSpec, lambda: &[f64], grad: &[f64]) -> Option<f64> {
    let mut probe = lambda.to_vec();
    for i in 0..lambda.len() {
        probe[i] = lambda[i] - FD_INTERIOR_RADIUS;
        if !op.cone.contains_unchecked(&probe) {
            return None;
        }
        probe[i] = lambda[i];
    }
    let mut worst: f64 = 0.0;
    for i in 0..lambda.len() {
        probe[i] = lambda[i] + FD_STEP;
        let up = op.eval_unchecked(&probe);
        probe[i] = lambda[i] - FD_STEP;
        let down = op.eval_unchecked(&probe);
        probe[i] = lambda[i];
        let fd = (up - down) / (2.0 * FD_STEP);
        worst = worst.max((fd - grad[i]).abs() / grad[i].abs());
    }
    Some(worst)
}
