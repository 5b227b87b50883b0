//! Brute-force enumeration of every graph on `n <= 7` vertices.
//!
//! Each configuration's probability is the product over steps `m` and older
//! vertices `k` of `f(deg_{m-1}(k))/(m-1)` or its complement, with indegrees
//! accumulated step by step. This is the ground truth the samplers, the
//! recursions and the coupling are checked against.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{ExactError, ENUMERATION_LIMIT, FORCED_ENUMERATION_LIMIT};
use crate::attachment::AttachmentFunction;
use crate::graph::{Edge, Graph};

/// One enumerated graph.
#[derive(Debug, Clone)]
pub struct Configuration {
    pub n: usize,
    pub edges: Vec<Edge>,
    indegree: Vec<u32>,
    outdegree: Vec<u32>,
}

impl Configuration {
    pub fn indegree(&self, v: u32) -> u32 {
        self.indegree[v as usize - 1]
    }

    pub fn outdegree(&self, v: u32) -> u32 {
        self.outdegree[v as usize - 1]
    }

    pub fn is_isolated(&self, v: u32) -> bool {
        self.indegree(v) == 0 && self.outdegree(v) == 0
    }

    pub fn isolated_count(&self) -> usize {
        (1..=self.n as u32).filter(|&v| self.is_isolated(v)).count()
    }

    pub fn has_edge(&self, src: u32, dst: u32) -> bool {
        self.edges.contains(&Edge::new(src, dst))
    }

    pub fn to_graph(&self) -> Graph {
        Graph::from_edges(self.n, self.edges.clone()).expect("enumerated configurations are valid")
    }
}

/// Calls `visit` with every configuration of positive probability.
///
/// `force` raises the size limit from 6 to 7.
pub fn for_each_configuration<F>(f: &AttachmentFunction, n: usize, force: bool, mut visit: F) -> Result<(), ExactError>
where
    F: FnMut(&Configuration, f64),
{
    let limit = if force {
        FORCED_ENUMERATION_LIMIT
    } else {
        ENUMERATION_LIMIT
    };
    if n > limit {
        return Err(ExactError::TooLarge { n, limit });
    }
    if n == 0 {
        return Err(ExactError::VertexRange { i: 0, n });
    }
    let fv = f.tabulate(n + 1);
    let mut cfg = Configuration {
        n,
        edges: Vec::new(),
        indegree: vec![0; n],
        outdegree: vec![0; n],
    };
    step(&fv, 2, 1.0, &mut cfg, &mut visit);
    Ok(())
}

fn step<F>(fv: &[f64], m: usize, prob: f64, cfg: &mut Configuration, visit: &mut F)
where
    F: FnMut(&Configuration, f64),
{
    if m > cfg.n {
        visit(cfg, prob);
        return;
    }
    let denom = (m - 1) as f64;
    let probs: Vec<f64> = (0..m - 1)
        .map(|k| (fv[cfg.indegree[k] as usize] / denom).min(1.0))
        .collect();
    for mask in 0u32..(1 << (m - 1)) {
        let mut p = prob;
        for (k, &q) in probs.iter().enumerate() {
            p *= if mask & (1 << k) != 0 { q } else { 1.0 - q };
        }
        if p == 0.0 {
            continue;
        }
        let before = cfg.edges.len();
        for k in 0..m - 1 {
            if mask & (1 << k) != 0 {
                cfg.edges.push(Edge::new(m as u32, k as u32 + 1));
                cfg.indegree[k] += 1;
            }
        }
        cfg.outdegree[m - 1] = mask.count_ones();
        step(fv, m + 1, p, cfg, visit);
        for k in 0..m - 1 {
            if mask & (1 << k) != 0 {
                cfg.indegree[k] -= 1;
            }
        }
        cfg.outdegree[m - 1] = 0;
        cfg.edges.truncate(before);
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeMarginal {
    pub src: u32,
    pub dst: u32,
    pub prob: f64,
}

/// Exact law of `W_n` and related moments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExactEnumeration {
    pub n: usize,
    /// `P(W_n = w)` for every `w` of positive probability.
    pub w_dist: BTreeMap<usize, f64>,
    pub mean: f64,
    /// `theta_{i,n}` for `i = 1..=n` (index `i - 1`).
    pub theta: Vec<f64>,
    /// `Cov(X_i, X_j)`, 0-based indices.
    pub pair_cov: Vec<Vec<f64>>,
    /// `P(src -> dst)` for every potential edge.
    pub edge_marginals: Vec<EdgeMarginal>,
}

impl ExactEnumeration {
    pub fn w_prob(&self, w: usize) -> f64 {
        self.w_dist.get(&w).copied().unwrap_or(0.0)
    }

    pub fn variance(&self) -> f64 {
        self.w_dist
            .iter()
            .map(|(&w, &p)| p * (w as f64 - self.mean).powi(2))
            .sum()
    }

    pub fn edge_prob(&self, src: u32, dst: u32) -> f64 {
        self.edge_marginals
            .iter()
            .find(|e| e.src == src && e.dst == dst)
            .map(|e| e.prob)
            .unwrap_or(0.0)
    }

    /// `k * P(W = k) / mu` for `k >= 1`.
    pub fn size_bias_dist(&self) -> BTreeMap<usize, f64> {
        self.w_dist
            .iter()
            .filter(|(&w, _)| w > 0)
            .map(|(&w, &p)| (w, w as f64 * p / self.mean))
            .collect()
    }
}

pub fn enumerate_exact(f: &AttachmentFunction, n: usize, force: bool) -> Result<ExactEnumeration, ExactError> {
    let mut w_raw = vec![0.0; n + 1];
    let mut theta = vec![0.0; n];
    let mut joint = vec![vec![0.0; n]; n];
    let mut edge = vec![vec![0.0; n]; n];
    for_each_configuration(f, n, force, |cfg, p| {
        w_raw[cfg.isolated_count()] += p;
        let iso: Vec<usize> = (1..=n as u32)
            .filter(|&v| cfg.is_isolated(v))
            .map(|v| v as usize - 1)
            .collect();
        for &a in &iso {
            theta[a] += p;
            for &b in &iso {
                joint[a][b] += p;
            }
        }
        for e in &cfg.edges {
            edge[e.src as usize - 1][e.dst as usize - 1] += p;
        }
    })?;
    let pair_cov = (0..n)
        .map(|a| (0..n).map(|b| joint[a][b] - theta[a] * theta[b]).collect())
        .collect();
    let mut edge_marginals = Vec::with_capacity(n * (n - 1) / 2);
    for src in 2..=n {
        for dst in 1..src {
            edge_marginals.push(EdgeMarginal {
                src: src as u32,
                dst: dst as u32,
                prob: edge[src - 1][dst - 1],
            });
        }
    }
    let w_dist: BTreeMap<usize, f64> = w_raw
        .iter()
        .enumerate()
        .filter(|(_, &p)| p > 0.0)
        .map(|(w, &p)| (w, p))
        .collect();
    let mean = w_dist.iter().map(|(&w, &p)| w as f64 * p).sum();
    Ok(ExactEnumeration {
        n,
        w_dist,
        mean,
        theta,
        pair_cov,
        edge_marginals,
    })
}
