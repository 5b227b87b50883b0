use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{mean_var, StatsError};
use crate::attachment::AttachmentFunction;
use crate::graph::{self, Variant};
use crate::parallel::replicate;
use crate::rng;

/// Monte Carlo moments of `W_n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McReport {
    pub n: usize,
    pub reps: usize,
    pub mean: f64,
    pub variance: f64,
    pub w_histogram: BTreeMap<u32, u64>,
    /// Half-width of the 95% normal-approximation interval for the mean.
    pub mean_ci_halfwidth: f64,
    pub seed: u64,
}

impl McReport {
    pub fn from_samples(n: usize, seed: u64, ws: &[u32]) -> Self {
        let xs: Vec<f64> = ws.iter().map(|&w| w as f64).collect();
        let (mean, variance) = mean_var(&xs);
        let mut w_histogram = BTreeMap::new();
        for &w in ws {
            *w_histogram.entry(w).or_insert(0) += 1;
        }
        McReport {
            n,
            reps: ws.len(),
            mean,
            variance,
            w_histogram,
            mean_ci_halfwidth: 1.959_963_984_540_054 * (variance / ws.len() as f64).sqrt(),
            seed,
        }
    }

    /// Standard error of the mean.
    pub fn mean_se(&self) -> f64 {
        (self.variance / self.reps as f64).sqrt()
    }
}

/// `W_n` of `reps` independent graphs; replication `r` uses
/// `replication(seed, r, STREAM_GRAPH)`.
pub fn simulate_isolated(f: &AttachmentFunction, n: usize, reps: usize, seed: u64, variant: Variant) -> Vec<u32> {
    replicate(reps, |r| {
        let mut rng = rng::replication(seed, r, rng::STREAM_GRAPH);
        graph::generate_with_rng(f, n, variant, &mut rng).isolated_count() as u32
    })
}

/// Moments of `W_n` from the grouped generator.
pub fn simulate_moments(f: &AttachmentFunction, n: usize, reps: usize, seed: u64) -> Result<McReport, StatsError> {
    simulate_moments_with(f, n, reps, seed, Variant::Grouped)
}

pub fn simulate_moments_with(
    f: &AttachmentFunction,
    n: usize,
    reps: usize,
    seed: u64,
    variant: Variant,
) -> Result<McReport, StatsError> {
    if reps < 2 {
        return Err(StatsError::Precondition(format!("reps must be at least 2, got {reps}")));
    }
    if n == 0 {
        return Err(StatsError::Precondition("n must be at least 1".into()));
    }
    let ws = simulate_isolated(f, n, reps, seed, variant);
    Ok(McReport::from_samples(n, seed, &ws))
}
