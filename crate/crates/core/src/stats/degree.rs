use serde::{Deserialize, Serialize};

use super::StatsError;
use crate::attachment::AttachmentFunction;
use crate::exact::limit_indegree_dist;
use crate::graph::{self, Variant};
use crate::parallel::replicate;
use crate::rng;

/// Truncation point of the reference indegree law.
pub const LIMIT_KMAX: usize = 200;

/// Empirical degree laws against their limits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegreeReport {
    pub n: usize,
    pub reps: usize,
    pub seed: u64,
    /// TV distance of the averaged empirical indegree law to `mu(k)`.
    pub tv_indegree: f64,
    /// TV distance of the pooled outdegree law to `Poisson(lambda_hat)`.
    pub outdegree_poisson_tv: f64,
    /// Mean outdegree.
    pub lambda_hat: f64,
    /// `sum_{k <= 200} mu(k)`
    pub reference_mass: f64,
}

/// `P(X = k)` for `X ~ Poisson(lambda)`, `k = 0..len`.
pub fn poisson_pmf(lambda: f64, len: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(len);
    let mut log_p = -lambda;
    for k in 0..len {
        if k > 0 {
            log_p += lambda.ln() - (k as f64).ln();
        }
        out.push(log_p.exp());
    }
    out
}

/// TV distance between an empirical law (counts) and a reference pmf with
/// explicit remaining mass.
fn tv_counts(counts: &[u64], total: u64, reference: &[f64], reference_tail: f64) -> f64 {
    let total = total as f64;
    let mut diff = 0.0;
    let mut emp_tail = 0.0;
    for (k, &c) in counts.iter().enumerate() {
        let p = c as f64 / total;
        match reference.get(k) {
            Some(&q) => diff += (p - q).abs(),
            None => emp_tail += p,
        }
    }
    for &q in reference.iter().skip(counts.len()) {
        diff += q;
    }
    0.5 * (diff + (emp_tail - reference_tail).abs())
}

pub fn degree_dist_compare(f: &AttachmentFunction, n: usize, reps: usize, seed: u64) -> Result<DegreeReport, StatsError> {
    if n < 1000 {
        return Err(StatsError::Precondition(format!("degree comparison needs n >= 1000, got {n}")));
    }
    if reps == 0 {
        return Err(StatsError::Precondition("reps must be positive".into()));
    }
    let per_graph = replicate(reps, |r| {
        let mut rng = rng::replication(seed, r, rng::STREAM_GRAPH);
        let g = graph::generate_with_rng(f, n, Variant::Grouped, &mut rng);
        let mut ind = Vec::new();
        let mut outd = Vec::new();
        for (&i, &o) in g.indegrees().iter().zip(g.outdegrees()) {
            bump(&mut ind, i);
            bump(&mut outd, o);
        }
        (ind, outd)
    });
    let mut ind: Vec<u64> = Vec::new();
    let mut outd: Vec<u64> = Vec::new();
    for (a, b) in &per_graph {
        merge(&mut ind, a);
        merge(&mut outd, b);
    }
    let total = (n * reps) as u64;
    // Every graph has n vertices, so averaging per-graph laws equals pooling.
    let limit = limit_indegree_dist(f, LIMIT_KMAX);
    let tv_indegree = tv_counts(&ind, total, &limit.probs, limit.tail_mass);
    let lambda_hat =
        outd.iter().enumerate().map(|(k, &c)| k as f64 * c as f64).sum::<f64>() / total as f64;
    let len = outd.len().max(1) + 64;
    let pois = poisson_pmf(lambda_hat, len);
    let pois_tail = (1.0 - pois.iter().sum::<f64>()).max(0.0);
    let outdegree_poisson_tv = tv_counts(&outd, total, &pois, pois_tail);
    Ok(DegreeReport {
        n,
        reps,
        seed,
        tv_indegree,
        outdegree_poisson_tv,
        lambda_hat,
        reference_mass: limit.mass(),
    })
}

fn bump(hist: &mut Vec<u64>, k: u32) {
    let k = k as usize;
    if hist.len() <= k {
        hist.resize(k + 1, 0);
    }
    hist[k] += 1;
}

fn merge(acc: &mut Vec<u64>, other: &[u64]) {
    if acc.len() < other.len() {
        acc.resize(other.len(), 0);
    }
    for (a, b) in acc.iter_mut().zip(other) {
        *a += b;
    }
}
