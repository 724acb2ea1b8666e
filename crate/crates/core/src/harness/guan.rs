use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::symcone::{normal_vector, ConeSampler, EigenVector, OperatorSpec};

/// Radial spread of the probe's cone sampler. Wide enough that normals far
/// from the diagonal direction are drawn often.
pub const GUAN_SPREAD: f64 = 4.0;

/// Result of a sampled check of the normal-separation inequality.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GuanProbe {
    /// Smallest slack ratio over accepted samples; `None` when no sample met
    /// the separation condition (inconclusive).
    pub eps_hat: Option<f64>,
    /// Samples with `|ν_μ − ν_λ| ≥ β`.
    pub accepted: usize,
    pub samples: usize,
}

impl GuanProbe {
    pub fn positive(&self) -> bool {
        self.eps_hat.is_some_and(|e| e > 0.0)
    }
}

/// `[Σ f_i(λ)(μ_i − λ_i) − f(μ) + f(λ)] / (1 + Σ f_i(λ))` for one pair, or
/// `None` when the unit normals at `λ` and `μ` are closer than `beta`.
pub fn guan_slack(op: &OperatorSpec, mu: &[f64], lambda: &[f64], beta: f64) -> Result<Option<f64>> {
    let nu_mu = normal(op, mu)?;
    let grad = op.grad(lambda)?;
    let f_lambda = op.eval(lambda)?;
    let norm = libm::sqrt(grad.iter().map(|g| g * g).sum::<f64>());
    let separation = libm::sqrt(nu_mu.iter().zip(&grad).map(|(a, g)| (a - g / norm) * (a - g / norm)).sum::<f64>());
    if separation < beta {
        return Ok(None);
    }
    let pairing: f64 = grad.iter().zip(mu.iter().zip(lambda)).map(|(g, (m, l))| g * (m - l)).sum();
    let trace: f64 = grad.iter().sum();
    Ok(Some((pairing - op.eval(mu)? + f_lambda) / (1.0 + trace)))
}

fn normal(op: &OperatorSpec, x: &[f64]) -> Result<Vec<f64>> {
    normal_vector(op, &EigenVector::new(x.to_vec())?)
}

/// Samples `λ ∈ Γ` and returns the smallest slack ratio over draws whose
/// normal is at least `beta` away from the normal at `mu`.
pub fn guan_inequality_probe(op: &OperatorSpec, mu: &EigenVector, beta: f64, samples: usize, seed: u64) -> Result<GuanProbe> {
    if mu.len() != op.n {
        return Err(Error::DimensionMismatch { expected: op.n, got: mu.len() });
    }
    if !(beta > 0.0) {
        return Err(Error::Domain("β must be positive".into()));
    }
    if !op.cone.contains(mu.as_slice())? {
        return Err(Error::OutsideCone);
    }
    let mut sampler = ConeSampler::with_spread(op.cone, GUAN_SPREAD, seed);
    let mut probe = GuanProbe { eps_hat: None, accepted: 0, samples };
    for _ in 0..samples {
        let lambda = sampler.sample()?;
        if let Some(slack) = guan_slack(op, mu.as_slice(), &lambda, beta)? {
            probe.accepted += 1;
            probe.eps_hat = Some(probe.eps_hat.map_or(slack, |e| e.min(slack)));
        }
    }
    Ok(probe)
}
