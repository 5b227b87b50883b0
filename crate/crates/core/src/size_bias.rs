//! Size-bias coupling for the number of isolated vertices.
//!
//! Pick a vertex `I` with probability `theta_{I,n}/mu_n`, remove every edge
//! incident to it, and thin the remaining edges so that the result has the
//! law of `G_n` conditioned on `I` being isolated. The isolated-vertex count
//! `W^s` of the coupled graph then has the size-bias law of `W_n`, and since
//! edges are only ever removed,
//!
//! ```text
//! W^s - W = D + 1{deg(I) > 0} + R
//! ```
//!
//! where `D` counts neighbours of `I` whose only edge went to `I` and `R`
//! counts every other vertex that lost all its edges in the thinning.
//!
//! Two thinning rules are provided.
//!
//! [`ThinningRule::Exact`] (default) works target by target. The in-edge
//! process of each vertex is an independent Markov chain, and conditioning on
//! `I` being isolated only constrains the chains of vertices `ell < I` to not
//! receive the edge from `I`. For a target that did receive it, the chain is
//! re-run along its realised path: an edge `s -> ell` survives with
//! probability `p'(D', s) / p+(D, s)`, where `p+` is the transition
//! probability of the chain conditioned on receiving the edge from `I`, `p'`
//! the one conditioned on not receiving it, `D` the original indegree and
//! `D'` the thinned one. For nondecreasing `f` these ratios are at most one,
//! and the thinned chain has exactly the conditional law.
//!
//! [`ThinningRule::Averaged`] deletes every edge `k -> ell` with `ell < I`
//! independently with probability `1 - mu~_{k-1}(ell, I) / mu_{k-1}(ell)`.
//! It reproduces the conditional edge marginals for sources younger than `I`
//! but not for older ones, nor the joint law, so its `W^s` is only
//! approximately size-biased.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, Mutex};

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::attachment::{AttachmentFunction, Kind};
use crate::exact::{
    advance, conditional_moments, continuation_table, for_each_configuration, trim, ExactError,
    GrowthPrefix, IsolationTable,
};
use crate::graph::{self, Edge, Graph, Variant};
use crate::rng::{self, SimRng};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SizeBiasError {
    #[error("edge {k}->{ell} is incident to the isolated vertex {i}")]
    AdjacentEdge { k: usize, ell: usize, i: usize },
    #[error("{k}->{ell} is not a potential edge")]
    NotAnEdge { k: usize, ell: usize },
    #[error("vertex {i} is outside 1..={n}")]
    VertexRange { i: usize, n: usize },
    #[error("exact thinning needs a nondecreasing attachment function")]
    NotMonotone,
    #[error("W^s - W = {diff} but D + 1{{d>0}} + R = {parts}")]
    Identity { diff: i64, parts: i64 },
    #[error(transparent)]
    Exact(#[from] ExactError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ThinningRule {
    #[default]
    Exact,
    Averaged,
}

impl FromStr for ThinningRule {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "exact" => Ok(ThinningRule::Exact),
            "averaged" => Ok(ThinningRule::Averaged),
            other => Err(format!("unknown thinning rule '{other}'")),
        }
    }
}

impl fmt::Display for ThinningRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ThinningRule::Exact => "exact",
            ThinningRule::Averaged => "averaged",
        })
    }
}

/// One thinning decision.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Deletion {
    pub edge: Edge,
    pub probability: f64,
    pub deleted: bool,
}

/// `G_n^{(i)}` built from a base graph.
#[derive(Debug, Clone)]
pub struct CoupledGraph<'g> {
    pub base: &'g Graph,
    pub i: u32,
    pub kept_edges: Vec<Edge>,
    pub deletion_log: Vec<Deletion>,
}

impl CoupledGraph<'_> {
    /// Total degree of every vertex in the coupled graph (index `v - 1`).
    pub fn degrees(&self) -> Vec<u32> {
        let mut deg = vec![0u32; self.base.n()];
        for e in &self.kept_edges {
            deg[e.src as usize - 1] += 1;
            deg[e.dst as usize - 1] += 1;
        }
        deg
    }

    pub fn isolated_count(&self) -> usize {
        self.degrees().iter().filter(|&&d| d == 0).count()
    }

    pub fn to_graph(&self) -> Graph {
        Graph::from_edges(self.base.n(), self.kept_edges.clone()).expect("subgraph of a valid graph")
    }
}

/// One draw of `(W, W^s, I, D, 1{d_I > 0}, R)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CouplingSample {
    pub w: u32,
    pub w_s: u32,
    pub i: u32,
    pub d: u32,
    pub deg_pos: u32,
    pub r: u32,
}

impl CouplingSample {
    pub const CSV_HEADER: &'static str = "w,w_s,i,d,deg_pos,r";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{}",
            self.w, self.w_s, self.i, self.d, self.deg_pos, self.r
        )
    }

    /// `W^s - W`
    pub fn diff(&self) -> i64 {
        self.w_s as i64 - self.w as i64
    }
}

/// Inverse-CDF sampler for `P(I = i) = theta_{i,n} / mu_n`.
#[derive(Debug, Clone)]
pub struct IndexSampler {
    weights: Vec<f64>,
    cdf: Vec<f64>,
    table: IsolationTable,
}

impl IndexSampler {
    pub fn new(f: &AttachmentFunction, n: usize) -> Self {
        Self::from_table(IsolationTable::new(f, n))
    }

    pub fn from_table(table: IsolationTable) -> Self {
        let total = table.theta_sum();
        let weights: Vec<f64> = table.theta.iter().map(|t| t / total).collect();
        let mut cdf = Vec::with_capacity(weights.len());
        let mut acc = 0.0;
        for w in &weights {
            acc += w;
            cdf.push(acc);
        }
        IndexSampler {
            weights,
            cdf,
            table,
        }
    }

    /// `P(I = i)` for `i = 1..=n` (index `i - 1`).
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn table(&self) -> &IsolationTable {
        &self.table
    }

    pub fn sample(&self, rng: &mut SimRng) -> u32 {
        let u = rng.random::<f64>() * self.cdf[self.cdf.len() - 1];
        let idx = self.cdf.partition_point(|&c| c <= u);
        idx.min(self.cdf.len() - 1) as u32 + 1
    }
}

/// Draws `I` with `P(I = i) = theta_{i,n}/mu_n`.
pub fn select_index(f: &AttachmentFunction, n: usize, rng: &mut SimRng) -> u32 {
    IndexSampler::new(f, n).sample(rng)
}

/// Deletion probability of the averaged rule,
/// `1 - mu~_{k-1}(ell, i) / mu_{k-1}(ell)` for `ell < i`, zero for `ell > i`.
pub fn deletion_probability(
    f: &AttachmentFunction,
    k: usize,
    ell: usize,
    i: usize,
    n: usize,
) -> Result<f64, SizeBiasError> {
    if k <= ell || ell == 0 || k > n {
        return Err(SizeBiasError::NotAnEdge { k, ell });
    }
    if i == k || i == ell {
        return Err(SizeBiasError::AdjacentEdge { k, ell, i });
    }
    if i == 0 || i > n {
        return Err(SizeBiasError::VertexRange { i, n });
    }
    if ell > i {
        return Ok(0.0);
    }
    let cm = conditional_moments(f, ell, i, n)?;
    Ok((1.0 - cm.mu_tilde_at(k - 1) / cm.mu_at(k - 1)).max(0.0))
}

/// Upper bound `(f(1)/f(0)) i^(gamma-1) ell^(-gamma)` on the averaged-rule
/// deletion probability.
pub fn deletion_bound(f: &AttachmentFunction, ell: usize, i: usize) -> f64 {
    let g = f.gamma();
    f.evaluate(1) / f.evaluate(0) * (i as f64).powf(g - 1.0) * (ell as f64).powf(-g)
}

/// Source of `E[f(D_{i-1}(ell)) | D_t(ell) = m]`.
enum Continuation {
    /// `f(m) prod_{j=t}^{i-2}(1 + gamma/j)`
    Linear {
        gamma: f64,
        eta: f64,
        growth: Arc<GrowthPrefix>,
        i: usize,
    },
    Table {
        ell: usize,
        g: Arc<Vec<Vec<f64>>>,
    },
}

impl Continuation {
    #[inline]
    fn at(&self, m: u32, t: usize) -> f64 {
        match self {
            Continuation::Linear {
                gamma,
                eta,
                growth,
                i,
            } => (gamma * m as f64 + eta) * growth.log_range(t, i - 2).exp(),
            Continuation::Table { ell, g } => {
                let row = &g[t - ell];
                row[(m as usize).min(row.len() - 1)]
            }
        }
    }
}

/// Entry budget of the continuation and ratio caches, in `f64`s.
const CACHE_BUDGET: usize = 1 << 24;

struct Caches {
    continuation: HashMap<(u32, u32), Arc<Vec<Vec<f64>>>>,
    ratios: HashMap<(u32, u32), Arc<Vec<f64>>>,
    used: usize,
}

/// Reusable size-bias construction for a fixed `(f, n)`.
pub struct Coupler {
    f: AttachmentFunction,
    n: usize,
    rule: ThinningRule,
    variant: Variant,
    index: IndexSampler,
    fv: Vec<f64>,
    growth: Option<Arc<GrowthPrefix>>,
    caches: Mutex<Caches>,
}

impl Coupler {
    pub fn new(f: &AttachmentFunction, n: usize, rule: ThinningRule) -> Result<Self, SizeBiasError> {
        if n == 0 {
            return Err(SizeBiasError::VertexRange { i: 0, n });
        }
        if rule == ThinningRule::Exact && !f.is_nondecreasing(n as u64 + 1) {
            return Err(SizeBiasError::NotMonotone);
        }
        let growth = match f.kind() {
            Kind::Linear { gamma, .. } => Some(Arc::new(GrowthPrefix::new(*gamma, n + 1))),
            _ => None,
        };
        Ok(Coupler {
            f: f.clone(),
            n,
            rule,
            variant: Variant::Grouped,
            index: IndexSampler::new(f, n),
            fv: f.tabulate(n + 3),
            growth,
            caches: Mutex::new(Caches {
                continuation: HashMap::new(),
                ratios: HashMap::new(),
                used: 0,
            }),
        })
    }

    pub fn with_variant(mut self, variant: Variant) -> Self {
        self.variant = variant;
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rule(&self) -> ThinningRule {
        self.rule
    }

    pub fn index_sampler(&self) -> &IndexSampler {
        &self.index
    }

    /// `mu_n` from the exact recursion.
    pub fn mean(&self) -> f64 {
        self.index.table().mean()
    }

    /// Builds `G_n^{(i)}` from `g`, drawing thinning decisions from `rng`.
    pub fn build<'g>(&self, g: &'g Graph, i: u32, rng: &mut SimRng) -> CoupledGraph<'g> {
        self.build_with(g, i, |q| rng.random::<f64>() < q)
    }

    /// Same as [`Coupler::build`] with an arbitrary decision source:
    /// `keep(q)` must return whether an edge kept with probability `q`
    /// survives. It is only called for `0 < q < 1`.
    pub fn build_with<'g, K>(&self, g: &'g Graph, i: u32, mut keep: K) -> CoupledGraph<'g>
    where
        K: FnMut(f64) -> bool,
    {
        assert_eq!(g.n(), self.n, "graph size does not match the coupler");
        assert!(i >= 1 && i as usize <= self.n, "vertex out of range");
        let mut decide = |q: f64| -> bool {
            if q >= 1.0 {
                true
            } else if q <= 0.0 {
                false
            } else {
                keep(q)
            }
        };
        if g.degree(i) == 0 {
            return CoupledGraph {
                base: g,
                i,
                kept_edges: g.edges().to_vec(),
                deletion_log: Vec::new(),
            };
        }
        let mut deleted = vec![false; g.edges().len()];
        let mut log = Vec::with_capacity(g.edges().len());
        match self.rule {
            ThinningRule::Averaged => {
                for (idx, e) in g.edges().iter().enumerate() {
                    if e.touches(i) {
                        deleted[idx] = true;
                        log.push(Deletion {
                            edge: *e,
                            probability: 1.0,
                            deleted: true,
                        });
                        continue;
                    }
                    let p = if e.dst > i {
                        0.0
                    } else {
                        self.averaged_ratio(e.dst, i)[e.src as usize - 1 - e.dst as usize]
                    };
                    let del = !decide(1.0 - p);
                    deleted[idx] = del;
                    log.push(Deletion {
                        edge: *e,
                        probability: p,
                        deleted: del,
                    });
                }
            }
            ThinningRule::Exact => {
                // Sources of each target, in edge order (ascending source).
                let mut sources: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
                for e in g.edges() {
                    if e.src == i {
                        sources.entry(e.dst).or_default();
                    }
                }
                for (idx, e) in g.edges().iter().enumerate() {
                    if let Some(list) = sources.get_mut(&e.dst) {
                        list.push(idx);
                    }
                }
                let mut decided = vec![false; g.edges().len()];
                for (&ell, list) in &mut sources {
                    list.sort_by_key(|&idx| g.edges()[idx].src);
                    self.thin_target(g, ell, i, list, &mut deleted, &mut log, &mut decide);
                    for &idx in list.iter() {
                        decided[idx] = true;
                    }
                }
                for (idx, e) in g.edges().iter().enumerate() {
                    if decided[idx] {
                        continue;
                    }
                    let adjacent = e.touches(i);
                    deleted[idx] = adjacent;
                    log.push(Deletion {
                        edge: *e,
                        probability: if adjacent { 1.0 } else { 0.0 },
                        deleted: adjacent,
                    });
                }
            }
        }
        let kept_edges = g
            .edges()
            .iter()
            .zip(&deleted)
            .filter(|(_, &d)| !d)
            .map(|(e, _)| *e)
            .collect();
        CoupledGraph {
            base: g,
            i,
            kept_edges,
            deletion_log: log,
        }
    }

    /// Re-runs the in-edge chain of `ell` (which received `i -> ell`) under
    /// the conditioning `i -/-> ell`.
    #[allow(clippy::too_many_arguments)]
    fn thin_target<K: FnMut(f64) -> bool>(
        &self,
        g: &Graph,
        ell: u32,
        i: u32,
        edge_idx: &[usize],
        deleted: &mut [bool],
        log: &mut Vec<Deletion>,
        decide: &mut K,
    ) {
        let i_us = i as usize;
        let before_i = edge_idx
            .iter()
            .filter(|&&idx| g.edges()[idx].src < i)
            .count() as u32;
        let cont = self.continuation(ell, i, before_i + 2);
        let denom_i = (i_us - 1) as f64;
        let fv = &self.fv;
        let mut kept = 0u32;
        for (orig, &idx) in edge_idx.iter().enumerate() {
            let orig = orig as u32;
            let e = g.edges()[idx];
            let s = e.src as usize;
            let keep_prob = if e.src == i {
                0.0
            } else if e.src < i {
                let p_orig = fv[orig as usize] / (s - 1) as f64;
                let p_kept = fv[kept as usize] / (s - 1) as f64;
                let up = cont.at(orig + 1, s) / cont.at(orig, s - 1);
                let stay_up = 1.0 - cont.at(kept + 1, s) / denom_i;
                let stay_here = 1.0 - cont.at(kept, s - 1) / denom_i;
                let p_plus = p_orig * up;
                let p_minus = p_kept * stay_up / stay_here;
                (p_minus / p_plus).min(1.0)
            } else {
                fv[kept as usize] / fv[orig as usize]
            };
            let survive = e.src != i && {
                if keep_prob >= 1.0 {
                    true
                } else if keep_prob <= 0.0 {
                    false
                } else {
                    decide(keep_prob)
                }
            };
            if survive {
                kept += 1;
            }
            deleted[idx] = !survive;
            log.push(Deletion {
                edge: e,
                probability: if e.src == i { 1.0 } else { 1.0 - keep_prob },
                deleted: !survive,
            });
        }
    }

    fn continuation(&self, ell: u32, i: u32, min_width: u32) -> Continuation {
        if let (Some(growth), Kind::Linear { gamma, eta }) = (&self.growth, self.f.kind()) {
            return Continuation::Linear {
                gamma: *gamma,
                eta: *eta,
                growth: growth.clone(),
                i: i as usize,
            };
        }
        let key = (ell, i);
        if let Some(g) = self.caches.lock().unwrap().continuation.get(&key) {
            if g[g.len() - 1].len() > min_width as usize {
                return Continuation::Table {
                    ell: ell as usize,
                    g: g.clone(),
                };
            }
        }
        let (ell_us, i_us) = (ell as usize, i as usize);
        // Width from the support of the forward law at time i-1.
        let mut row = vec![1.0];
        for t in ell_us + 1..i_us {
            advance(&self.fv, &mut row, t);
            trim(&mut row);
        }
        let width = (row.len().max(min_width as usize) + 1).min(i_us - ell_us + 1);
        let table = Arc::new(continuation_table(&self.fv, ell_us, i_us, width));
        let size = table.len() * width;
        let mut caches = self.caches.lock().unwrap();
        if caches.used + size <= CACHE_BUDGET {
            caches.used += size;
            caches.continuation.insert(key, table.clone());
        }
        Continuation::Table { ell: ell_us, g: table }
    }

    /// `1 - mu~_t(ell, i)/mu_t(ell)` for `t = ell..n`, indexed by `t - ell`.
    fn averaged_ratio(&self, ell: u32, i: u32) -> Arc<Vec<f64>> {
        let key = (ell, i);
        if let Some(r) = self.caches.lock().unwrap().ratios.get(&key) {
            return r.clone();
        }
        let cm = conditional_moments(&self.f, ell as usize, i as usize, self.n)
            .expect("ell < i <= n by construction");
        let ratio: Arc<Vec<f64>> = Arc::new(
            cm.mu_tilde
                .iter()
                .zip(&cm.mu_plain)
                .map(|(t, m)| (1.0 - t / m).max(0.0))
                .collect(),
        );
        let mut caches = self.caches.lock().unwrap();
        if caches.used + ratio.len() <= CACHE_BUDGET {
            caches.used += ratio.len();
            caches.ratios.insert(key, ratio.clone());
        }
        ratio
    }

    /// Draws `I`, builds the coupled graph for a given base graph and
    /// decomposes the difference. `seed` keys the index and thinning streams.
    pub fn resample(&self, g: &Graph, seed: u64) -> Result<CouplingSample, SizeBiasError> {
        let mut index_rng = rng::stream(seed, rng::STREAM_INDEX);
        let mut thin_rng = rng::stream(seed, rng::STREAM_THIN);
        let i = self.index.sample(&mut index_rng);
        let cg = self.build(g, i, &mut thin_rng);
        decompose(g, &cg)
    }

    /// Generates `G_n`, then couples it.
    pub fn sample(&self, seed: u64) -> Result<CouplingSample, SizeBiasError> {
        let mut graph_rng = rng::stream(seed, rng::STREAM_GRAPH);
        let g = graph::generate_with_rng(&self.f, self.n, self.variant, &mut graph_rng);
        self.resample(&g, seed)
    }

    /// Exact joint law of `(W, W^s)` under this coupler, by enumerating
    /// graphs, the index and every thinning outcome. Needs `n <= 6`.
    pub fn exact_law(&self) -> Result<CouplingLaw, SizeBiasError> {
        let mut law = CouplingLaw::default();
        let weights = self.index.weights().to_vec();
        for_each_configuration(&self.f, self.n, false, |cfg, p| {
            let g = cfg.to_graph();
            for (idx, &wi) in weights.iter().enumerate() {
                if wi == 0.0 {
                    continue;
                }
                let i = idx as u32 + 1;
                self.enumerate_thinning(&g, i, p * wi, &mut |cg, q| {
                    let s = decompose(&g, cg).expect("identity holds on every outcome");
                    *law.joint.entry((s.w, s.w_s)).or_insert(0.0) += q;
                });
            }
        })?;
        Ok(law)
    }

    /// Calls `visit` with every thinning outcome of `(g, i)` and its
    /// probability times `weight`.
    pub fn enumerate_thinning<V>(&self, g: &Graph, i: u32, weight: f64, visit: &mut V)
    where
        V: FnMut(&CoupledGraph<'_>, f64),
    {
        let mut stack: Vec<Vec<bool>> = vec![Vec::new()];
        while let Some(prefix) = stack.pop() {
            let mut pos = 0;
            let mut prob = weight;
            let mut open = false;
            let cg = self.build_with(g, i, |q| {
                if pos < prefix.len() {
                    let b = prefix[pos];
                    prob *= if b { q } else { 1.0 - q };
                    pos += 1;
                    b
                } else {
                    open = true;
                    true
                }
            });
            if open {
                let mut yes = prefix.clone();
                yes.push(true);
                let mut no = prefix;
                no.push(false);
                stack.push(yes);
                stack.push(no);
            } else {
                visit(&cg, prob);
            }
        }
    }
}

/// Exact joint law of `(W, W^s)`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CouplingLaw {
    pub joint: BTreeMap<(u32, u32), f64>,
}

impl CouplingLaw {
    /// Marginal law of `W^s`.
    pub fn w_s_dist(&self) -> BTreeMap<u32, f64> {
        let mut out = BTreeMap::new();
        for (&(_, ws), &p) in &self.joint {
            *out.entry(ws).or_insert(0.0) += p;
        }
        out
    }
}

/// Builds `G_n^{(i)}` with a one-off [`Coupler`] using the default rule.
pub fn build_coupled<'g>(
    g: &'g Graph,
    i: u32,
    f: &AttachmentFunction,
    rng: &mut SimRng,
) -> Result<CoupledGraph<'g>, SizeBiasError> {
    if i == 0 || i as usize > g.n() {
        return Err(SizeBiasError::VertexRange {
            i: i as usize,
            n: g.n(),
        });
    }
    Ok(Coupler::new(f, g.n(), ThinningRule::default())?.build(g, i, rng))
}

/// Splits `W^s - W` into `D + 1{d_I > 0} + R` and checks the identity.
pub fn decompose(g: &Graph, cg: &CoupledGraph<'_>) -> Result<CouplingSample, SizeBiasError> {
    let i = cg.i;
    let w = g.isolated_count() as u32;
    let coupled = cg.degrees();
    let w_s = coupled.iter().filter(|&&d| d == 0).count() as u32;
    let mut in_d_set = vec![false; g.n()];
    let mut d = 0;
    for e in g.edges() {
        if e.touches(i) {
            let other = if e.src == i { e.dst } else { e.src };
            if g.degree(other) == 1 {
                in_d_set[other as usize - 1] = true;
                d += 1;
            }
        }
    }
    let deg_pos = u32::from(g.degree(i) > 0);
    let r = (1..=g.n() as u32)
        .filter(|&v| {
            v != i && coupled[v as usize - 1] == 0 && g.degree(v) > 0 && !in_d_set[v as usize - 1]
        })
        .count() as u32;
    let sample = CouplingSample {
        w,
        w_s,
        i,
        d,
        deg_pos,
        r,
    };
    let parts = (d + deg_pos + r) as i64;
    if sample.diff() != parts {
        return Err(SizeBiasError::Identity {
            diff: sample.diff(),
            parts,
        });
    }
    Ok(sample)
}

/// One coupling sample from scratch, deterministic in `seed`.
pub fn coupling_sample(f: &AttachmentFunction, n: usize, seed: u64) -> Result<CouplingSample, SizeBiasError> {
    Coupler::new(f, n, ThinningRule::default())?.sample(seed)
}
