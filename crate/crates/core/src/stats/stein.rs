use serde::{Deserialize, Serialize};

use super::{mean_var, standardize, wasserstein_terms, StatsError, MIN_WASSERSTEIN_SAMPLES};
use crate::attachment::AttachmentFunction;
use crate::graph::{self, Variant};
use crate::parallel::replicate;
use crate::rng;
use crate::size_bias::{Coupler, ThinningRule};
use crate::stats::moments::simulate_moments;

/// Salt for the seed of the separate moment run.
const MOMENT_SALT: u64 = 0x6d6f_6d65_6e74;

/// Estimated terms of the size-bias Stein bound on `d_W`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SteinBoundReport {
    pub n: usize,
    /// `Var(E[W^s - W | G_n])`, inner-noise corrected and clipped at 0.
    pub var_cond: f64,
    /// `E[(W^s - W)^2]`
    pub second_moment: f64,
    pub mu_hat: f64,
    pub sigma_hat: f64,
    pub bound: f64,
    /// Quantile-coupling `d_W` of the standardised outer-loop `W`s; `None`
    /// below 100 outer replications.
    pub d_w_empirical: Option<f64>,
    pub outer_reps: usize,
    pub inner_reps: usize,
    /// Between-graph variance of the inner means before correction.
    pub var_cond_raw: f64,
    /// Subtracted inner-noise term, mean within-graph variance / inner_reps.
    pub inner_noise: f64,
    pub clipped: bool,
    /// Standard error of `d_w_empirical - bound`.
    pub combined_se: f64,
    pub moment_reps: usize,
    pub rule: ThinningRule,
    pub seed: u64,
}

impl SteinBoundReport {
    /// `(mu/sigma^2) sqrt(2/pi) sqrt(var_cond) + (mu/sigma^3) second_moment`.
    pub fn assemble(mu: f64, sigma: f64, var_cond: f64, second_moment: f64) -> f64 {
        let first = if var_cond == 0.0 {
            0.0
        } else {
            mu / (sigma * sigma) * std::f64::consts::FRAC_2_PI.sqrt() * var_cond.sqrt()
        };
        let second = if second_moment == 0.0 {
            0.0
        } else {
            mu / sigma.powi(3) * second_moment
        };
        first + second
    }

    pub fn recompute(&self) -> f64 {
        Self::assemble(self.mu_hat, self.sigma_hat, self.var_cond, self.second_moment)
    }
}

struct Outer {
    w: f64,
    mean: f64,
    var: f64,
    mean_sq: f64,
}

/// Nested Monte Carlo estimate of the bound terms. Outer replication `o`
/// draws `G_n` from seed `mix(seed, o)`; its inner draws of `(I, thinning)`
/// use `mix(mix(seed, o), j + 1)`.
pub fn stein_bound_terms(
    f: &AttachmentFunction,
    n: usize,
    outer_reps: usize,
    inner_reps: usize,
    seed: u64,
) -> Result<SteinBoundReport, StatsError> {
    stein_bound_terms_with(f, n, outer_reps, inner_reps, seed, ThinningRule::default())
}

pub fn stein_bound_terms_with(
    f: &AttachmentFunction,
    n: usize,
    outer_reps: usize,
    inner_reps: usize,
    seed: u64,
    rule: ThinningRule,
) -> Result<SteinBoundReport, StatsError> {
    if outer_reps < 30 || inner_reps < 10 {
        return Err(StatsError::Precondition(format!(
            "need outer_reps >= 30 and inner_reps >= 10, got {outer_reps} and {inner_reps}"
        )));
    }
    let coupler = Coupler::new(f, n, rule)?;
    let outer: Vec<Result<Outer, StatsError>> = replicate(outer_reps, |o| {
        let outer_seed = rng::mix(seed, o);
        let mut g_rng = rng::stream(outer_seed, rng::STREAM_GRAPH);
        let g = graph::generate_with_rng(f, n, Variant::Grouped, &mut g_rng);
        let mut diffs = Vec::with_capacity(inner_reps);
        for j in 0..inner_reps as u64 {
            let s = coupler.resample(&g, rng::mix(outer_seed, j + 1))?;
            diffs.push(s.diff() as f64);
        }
        let (mean, var) = mean_var(&diffs);
        let mean_sq = diffs.iter().map(|d| d * d).sum::<f64>() / diffs.len() as f64;
        Ok(Outer {
            w: g.isolated_count() as f64,
            mean,
            var,
            mean_sq,
        })
    });
    let outer: Vec<Outer> = outer.into_iter().collect::<Result<_, _>>()?;

    let means: Vec<f64> = outer.iter().map(|o| o.mean).collect();
    let (_, var_cond_raw) = mean_var(&means);
    let inner_noise = outer.iter().map(|o| o.var).sum::<f64>() / outer.len() as f64 / inner_reps as f64;
    let corrected = var_cond_raw - inner_noise;
    let clipped = corrected < 0.0;
    let var_cond = corrected.max(0.0);
    let sq: Vec<f64> = outer.iter().map(|o| o.mean_sq).collect();
    let (second_moment, sq_var) = mean_var(&sq);

    let moment_reps = outer_reps * inner_reps;
    let moments = simulate_moments(f, n, moment_reps, rng::mix(seed, MOMENT_SALT))?;
    let mu_hat = moments.mean;
    let sigma_hat = moments.variance.sqrt();
    let bound = SteinBoundReport::assemble(mu_hat, sigma_hat, var_cond, second_moment);

    let ws: Vec<f64> = outer.iter().map(|o| o.w).collect();
    let (d_w_empirical, se_dw) = if outer_reps >= MIN_WASSERSTEIN_SAMPLES {
        let terms = wasserstein_terms(&standardize(&ws))?;
        let (d, v) = mean_var(&terms);
        (Some(d), (v / terms.len() as f64).sqrt())
    } else {
        (None, 0.0)
    };

    // Delta-method error of the bound, moments treated as known.
    let m = outer.len() as f64;
    let centre = means.iter().sum::<f64>() / m;
    let m4 = means.iter().map(|x| (x - centre).powi(4)).sum::<f64>() / m;
    let se_var = ((m4 - var_cond_raw * var_cond_raw).max(0.0) / m).sqrt();
    let se_sqrt_var = if var_cond > 0.0 {
        se_var / (2.0 * var_cond.sqrt())
    } else {
        se_var.sqrt()
    };
    let se_second = (sq_var / m).sqrt();
    let (a, b) = if sigma_hat > 0.0 {
        (
            mu_hat / (sigma_hat * sigma_hat) * std::f64::consts::FRAC_2_PI.sqrt(),
            mu_hat / sigma_hat.powi(3),
        )
    } else {
        (0.0, 0.0)
    };
    let combined_se = (se_dw.powi(2) + (a * se_sqrt_var).powi(2) + (b * se_second).powi(2)).sqrt();

    Ok(SteinBoundReport {
        n,
        var_cond,
        second_moment,
        mu_hat,
        sigma_hat,
        bound,
        d_w_empirical,
        outer_reps,
        inner_reps,
        var_cond_raw,
        inner_noise,
        clipped,
        combined_se,
        moment_reps,
        rule,
        seed,
    })
}
