use serde::{Deserialize, Serialize};

use super::{empirical_wasserstein_to_normal, mean_var, standardize, StatsError};
use crate::attachment::AttachmentFunction;
use crate::exact::IsolationTable;
use crate::graph::Variant;
use crate::rng;
use crate::stats::moments::simulate_isolated;

use rand_distr::{Distribution, StandardNormal};

/// Default rate-fit grid.
pub const DEFAULT_N_LIST: [usize; 5] = [256, 512, 1024, 2048, 4096];
/// Replications per grid point, equal total work across the grid.
pub const DEFAULT_REPS: [usize; 5] = [20_000, 10_000, 5_000, 2_500, 1_250];

/// Exact means are reported for non-linear rules only up to this `n`, since
/// they cost `O(n^2)`.
const GENERIC_EXACT_MEAN_LIMIT: usize = 5_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regime {
    Sub,
    Critical,
    Super,
}

/// Exponent of the proven `d_W` bound, `n^exponent`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Exponent {
    pub regime: Regime,
    /// Bound for linear rules; `None` for other shapes.
    pub exponent_linear: Option<f64>,
    pub exponent_general: f64,
    /// The critical case carries an extra `log^2 n` factor.
    pub log_squared: bool,
    /// The general bound does not decay.
    pub general_vacuous: bool,
}

impl Exponent {
    /// The exponent that applies to this rule.
    pub fn applicable(&self) -> f64 {
        self.exponent_linear.unwrap_or(self.exponent_general)
    }
}

pub fn theoretical_exponent(f: &AttachmentFunction) -> Exponent {
    let g = f.gamma();
    let regime = if (g - 0.5).abs() <= 1e-12 {
        Regime::Critical
    } else if g < 0.5 {
        Regime::Sub
    } else {
        Regime::Super
    };
    let (lin, gen) = match regime {
        Regime::Sub | Regime::Critical => (-0.5, -0.5),
        Regime::Super => (g - 1.0, 4.0 * g - 2.5),
    };
    Exponent {
        regime,
        exponent_linear: f.is_linear().then_some(lin),
        exponent_general: gen,
        log_squared: regime == Regime::Critical,
        general_vacuous: gen >= 0.0,
    }
}

/// Least-squares fit of `log d_w` against `log n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    pub points: Vec<(usize, f64)>,
    pub slope: f64,
    pub intercept: f64,
    pub theoretical_exponent: f64,
    pub regime: Regime,
}

pub fn rate_fit(points: &[(usize, f64)], f: &AttachmentFunction) -> Result<RateFit, StatsError> {
    if let Some(&(n, d_w)) = points.iter().find(|(_, d)| !d.is_finite() || *d <= 0.0) {
        return Err(StatsError::NonPositive { n, d_w });
    }
    let mut distinct: Vec<usize> = points.iter().map(|p| p.0).collect();
    distinct.sort_unstable();
    distinct.dedup();
    if distinct.len() < 3 {
        return Err(StatsError::TooFewPoints(distinct.len()));
    }
    let xs: Vec<f64> = points.iter().map(|p| (p.0 as f64).ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let m = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / m;
    let my = ys.iter().sum::<f64>() / m;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let slope = sxy / sxx;
    let exp = theoretical_exponent(f);
    Ok(RateFit {
        points: points.to_vec(),
        slope,
        intercept: my - slope * mx,
        theoretical_exponent: exp.applicable(),
        regime: exp.regime,
    })
}

/// One grid point of a CLT run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CltPoint {
    pub n: usize,
    pub reps: usize,
    pub seed: u64,
    /// `d_W` with plug-in mean and sd.
    pub d_w: f64,
    /// `d_W` centred at the exact mean, plug-in sd.
    pub d_w_exact_mean: Option<f64>,
    pub mean: f64,
    pub sd: f64,
    pub exact_mean: Option<f64>,
    /// Mean of the same estimator on `reps` standardised normal draws: the
    /// value `d_w` would show for an exactly normal `W`.
    pub noise_floor: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CltReport {
    pub points: Vec<CltPoint>,
    pub fit: RateFit,
    pub exponent: Exponent,
}

impl CltReport {
    pub const CSV_HEADER: &'static str = "n,d_w,reps,seed";

    pub fn to_csv(&self) -> String {
        let mut out = String::from(Self::CSV_HEADER);
        out.push('\n');
        for p in &self.points {
            out.push_str(&format!("{},{},{},{}\n", p.n, p.d_w, p.reps, p.seed));
        }
        out
    }
}

/// Replications for `n` on the equal-work schedule of the default grid.
pub fn default_reps_for(n: usize) -> usize {
    match DEFAULT_N_LIST.iter().position(|&m| m == n) {
        Some(idx) => DEFAULT_REPS[idx],
        None => (DEFAULT_REPS[0] * DEFAULT_N_LIST[0] / n.max(1)).max(super::MIN_WASSERSTEIN_SAMPLES),
    }
}

/// Replicates behind [`noise_floor`].
const FLOOR_REPS: u64 = 200;

/// Expected quantile-coupling estimate for `m` plug-in standardised samples
/// of an exactly normal variable.
pub fn noise_floor(m: usize, seed: u64) -> Result<f64, StatsError> {
    let vals = crate::parallel::replicate(FLOOR_REPS as usize, |r| {
        let mut rng = rng::replication(seed, r, rng::STREAM_NOISE);
        let xs: Vec<f64> = (0..m).map(|_| StandardNormal.sample(&mut rng)).collect();
        empirical_wasserstein_to_normal(&standardize(&xs))
    });
    let vals: Vec<f64> = vals.into_iter().collect::<Result<_, _>>()?;
    Ok(vals.iter().sum::<f64>() / vals.len() as f64)
}

/// Estimates `d_W` of the standardised `W_n` at every `(n, reps)` of the
/// grid and fits the decay exponent. Point `n` uses seed `mix(seed, n)`.
pub fn clt_run(
    f: &AttachmentFunction,
    grid: &[(usize, usize)],
    seed: u64,
    variant: Variant,
) -> Result<CltReport, StatsError> {
    let mut points = Vec::with_capacity(grid.len());
    for &(n, reps) in grid {
        let point_seed = rng::mix(seed, n as u64);
        let ws = simulate_isolated(f, n, reps, point_seed, variant);
        let xs: Vec<f64> = ws.iter().map(|&w| w as f64).collect();
        let (mean, var) = mean_var(&xs);
        let sd = var.sqrt();
        let d_w = empirical_wasserstein_to_normal(&standardize(&xs))?;
        let exact_mean = (f.is_linear() || n <= GENERIC_EXACT_MEAN_LIMIT)
            .then(|| IsolationTable::new(f, n).mean());
        let d_w_exact_mean = match exact_mean {
            Some(mu) if sd > 0.0 => {
                let ys: Vec<f64> = xs.iter().map(|x| (x - mu) / sd).collect();
                Some(empirical_wasserstein_to_normal(&ys)?)
            }
            _ => None,
        };
        points.push(CltPoint {
            n,
            reps,
            seed: point_seed,
            d_w,
            d_w_exact_mean,
            mean,
            sd,
            exact_mean,
            noise_floor: noise_floor(reps, point_seed)?,
        });
    }
    let pairs: Vec<(usize, f64)> = points.iter().map(|p| (p.n, p.d_w)).collect();
    let fit = rate_fit(&pairs, f)?;
    Ok(CltReport {
        points,
        fit,
        exponent: theoretical_exponent(f),
    })
}
