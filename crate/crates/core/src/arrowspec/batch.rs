use alloc::vec::Vec;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{
    char_poly_coefficients, char_poly_residual, check_localization, scale_from_coefficients, threshold, ArrowMatrix,
    Threshold,
};
use crate::error::{Error, Result};

/// A randomized localization experiment at one matrix size.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalizationBatch {
    pub n: usize,
    pub instances: usize,
    pub epsilons: Vec<f64>,
    /// The corner is set to `factor × threshold` for each factor.
    pub corner_factors: Vec<f64>,
    /// Diagonal entries are uniform in `[−d_range, d_range]`.
    pub d_range: f64,
    /// Border entries are uniform in the complex disc of this radius.
    pub a_radius: f64,
    pub which: Threshold,
    pub seed: u64,
}

impl LocalizationBatch {
    pub fn new(n: usize, instances: usize, seed: u64) -> Self {
        Self {
            n,
            instances,
            epsilons: alloc::vec![0.1, 0.5, 1.0, 3.0],
            corner_factors: alloc::vec![1.0, 10.0],
            d_range: 3.0,
            a_radius: 3.0,
            which: Threshold::Main,
            seed,
        }
    }
}

/// Worst slacks of one `(instance, ε, corner)` evaluation.
#[derive(Clone, Debug, PartialEq)]
pub struct BatchRecord {
    pub instance: usize,
    pub n: usize,
    pub epsilon: f64,
    pub corner_factor: f64,
    pub corner: f64,
    /// `ε − max_α |λ_α − d_α|`
    pub alpha_slack: f64,
    /// `λ_n − corner`
    pub top_gap: f64,
    /// `bound − (λ_n − corner)`
    pub top_slack: f64,
    pub violation: bool,
    pub oracle_residual: f64,
    /// `|Σλ − tr A| / (1 + |tr A|)`
    pub trace_residual: f64,
    /// `max_λ |p(λ)| / Σ|c_k||λ|^k`
    pub char_poly_residual: f64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct BatchSummary {
    pub evaluations: usize,
    pub violations: usize,
    /// Evaluations with `λ_n` below the corner beyond rounding.
    pub top_below_corner: usize,
    pub min_alpha_slack: f64,
    pub min_top_slack: f64,
    pub max_oracle_residual: f64,
    pub max_trace_residual: f64,
    pub max_char_poly_residual: f64,
}

/// Uniform sample from the disc of radius `r`.
fn disc(rng: &mut ChaCha8Rng, r: f64) -> Complex64 {
    let rho = r * libm::sqrt(rng.random::<f64>());
    let phi = core::f64::consts::TAU * rng.random::<f64>();
    Complex64::new(rho * libm::cos(phi), rho * libm::sin(phi))
}

pub fn random_arrow(rng: &mut ChaCha8Rng, n: usize, d_range: f64, a_radius: f64, corner: f64) -> Result<ArrowMatrix> {
    let d = (0..n - 1).map(|_| rng.random_range(-d_range..=d_range)).collect();
    let a = (0..n - 1).map(|_| disc(rng, a_radius)).collect();
    ArrowMatrix::new(d, a, corner)
}

/// Random arrow matrix of size `n ≥ 3` with `d[i0] = d[j0]`; returns the
/// matrix and the pair.
pub fn random_duplicate_arrow(rng: &mut ChaCha8Rng, n: usize) -> Result<(ArrowMatrix, usize, usize)> {
    if n < 3 {
        return Err(Error::Domain("duplicate diagonal needs n ≥ 3".into()));
    }
    let corner = rng.random_range(-10.0..=10.0);
    let m = random_arrow(rng, n, 3.0, 3.0, corner)?;
    let i0 = rng.random_range(0..n - 1);
    let mut j0 = rng.random_range(0..n - 2);
    if j0 >= i0 {
        j0 += 1;
    }
    let mut d = m.d().to_vec();
    d[i0] = d[j0];
    Ok((ArrowMatrix::new(d, m.a().to_vec(), m.corner())?, i0, j0))
}

/// Runs the batch, handing every record to `on_record`.
pub fn run_localization_batch(cfg: &LocalizationBatch, mut on_record: impl FnMut(&BatchRecord)) -> Result<BatchSummary> {
    if cfg.n < 2 {
        return Err(Error::Domain("arrow matrices need n ≥ 2".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut summary = BatchSummary { min_alpha_slack: f64::INFINITY, min_top_slack: f64::INFINITY, ..Default::default() };
    for instance in 0..cfg.instances {
        let base = random_arrow(&mut rng, cfg.n, cfg.d_range, cfg.a_radius, 0.0)?;
        for &epsilon in &cfg.epsilons {
            let thr = threshold(cfg.which, epsilon, &base)?;
            for &factor in &cfg.corner_factors {
                let m = base.with_corner(factor * thr);
                let report = check_localization(&m, epsilon, cfg.which)?;
                let coeffs = char_poly_coefficients(&m);
                let char_poly = report
                    .eigenvalues
                    .iter()
                    .map(|&l| char_poly_residual(&m, l).abs() / scale_from_coefficients(&coeffs, l))
                    .fold(0.0, f64::max);
                let tr = m.trace();
                let trace_residual = (report.eigenvalues.iter().sum::<f64>() - tr).abs() / (1.0 + tr.abs());
                let max_dev = report.alpha_deviations.iter().copied().fold(0.0, f64::max);
                let record = BatchRecord {
                    instance,
                    n: cfg.n,
                    epsilon,
                    corner_factor: factor,
                    corner: m.corner(),
                    alpha_slack: epsilon - max_dev,
                    top_gap: report.top_gap,
                    top_slack: report.top_gap_bound - report.top_gap,
                    violation: report.is_violation(),
                    oracle_residual: report.oracle_residual,
                    trace_residual,
                    char_poly_residual: char_poly,
                };
                summary.evaluations += 1;
                summary.violations += record.violation as usize;
                let allowance = super::TOP_ROUNDING_ULPS * f64::EPSILON * m.to_dense().frobenius();
                summary.top_below_corner += (record.top_gap < -allowance) as usize;
                summary.min_alpha_slack = summary.min_alpha_slack.min(record.alpha_slack);
                summary.min_top_slack = summary.min_top_slack.min(record.top_slack);
                summary.max_oracle_residual = summary.max_oracle_residual.max(record.oracle_residual);
                summary.max_trace_residual = summary.max_trace_residual.max(trace_residual);
                summary.max_char_poly_residual = summary.max_char_poly_residual.max(char_poly);
                on_record(&record);
            }
        }
    }
    Ok(summary)
}
