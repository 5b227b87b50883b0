//! Monte Carlo layer: moments of `W_n`, distance to the normal law, Stein
//! bound terms, rate fits and degree-law comparisons.
//!
//! Every estimator draws replication `r` from its own seeded stream, so
//! results are identical for any number of worker threads.

mod degree;
mod moments;
pub mod normal;
mod rate;
mod stein;

use thiserror::Error;

use crate::size_bias::SizeBiasError;

pub use degree::{degree_dist_compare, poisson_pmf, DegreeReport, LIMIT_KMAX};
pub use moments::{simulate_isolated, simulate_moments, simulate_moments_with, McReport};
pub use rate::{
    clt_run, default_reps_for, noise_floor, rate_fit, theoretical_exponent, CltPoint, CltReport, Exponent, RateFit, Regime,
    DEFAULT_N_LIST, DEFAULT_REPS,
};
pub use stein::{stein_bound_terms, stein_bound_terms_with, SteinBoundReport};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StatsError {
    #[error("need at least {min} samples, got {got}")]
    TooFewSamples { got: usize, min: usize },
    #[error("sample {index} is not finite")]
    NonFinite { index: usize },
    #[error("d_w = {d_w} at n = {n} is not positive")]
    NonPositive { n: usize, d_w: f64 },
    #[error("rate fit needs at least 3 distinct n, got {0}")]
    TooFewPoints(usize),
    #[error("{0}")]
    Precondition(String),
    #[error(transparent)]
    SizeBias(#[from] SizeBiasError),
}

/// Smallest sample accepted by [`empirical_wasserstein_to_normal`].
pub const MIN_WASSERSTEIN_SAMPLES: usize = 100;

/// `(1/m) sum_i |x_(i) - Phi^{-1}((i - 0.5)/m)|` for standardised samples.
pub fn empirical_wasserstein_to_normal(samples: &[f64]) -> Result<f64, StatsError> {
    let terms = wasserstein_terms(samples)?;
    Ok(terms.iter().sum::<f64>() / terms.len() as f64)
}

/// The individual `|x_(i) - q_i|`, in sorted order.
pub(crate) fn wasserstein_terms(samples: &[f64]) -> Result<Vec<f64>, StatsError> {
    let m = samples.len();
    if m < MIN_WASSERSTEIN_SAMPLES {
        return Err(StatsError::TooFewSamples {
            got: m,
            min: MIN_WASSERSTEIN_SAMPLES,
        });
    }
    if let Some(index) = samples.iter().position(|x| !x.is_finite()) {
        return Err(StatsError::NonFinite { index });
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    Ok(sorted
        .iter()
        .enumerate()
        .map(|(i, x)| (x - normal::inverse_cdf((i as f64 + 0.5) / m as f64)).abs())
        .collect())
}

/// Sample mean and unbiased variance.
pub(crate) fn mean_var(xs: &[f64]) -> (f64, f64) {
    let m = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / m;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (m - 1.0);
    (mean, var)
}

/// `(x - mean)/sd` with plug-in moments; a zero sd leaves samples centred.
pub(crate) fn standardize(xs: &[f64]) -> Vec<f64> {
    let (mean, var) = mean_var(xs);
    let sd = var.sqrt();
    let scale = if sd > 0.0 { 1.0 / sd } else { 1.0 };
    xs.iter().map(|x| (x - mean) * scale).collect()
}
