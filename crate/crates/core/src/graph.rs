//! Realisations of the preferential attachment graph.
//!
//! Vertices are labelled `1..=n` by birth time. At step `m` the newcomer links
//! to each older vertex `k` independently with probability
//! `f(deg(k)) / (m - 1)`, where `deg(k)` is the indegree at time `m - 1`. All
//! decisions of one step read the same frozen snapshot of indegrees.

use std::collections::BTreeMap;
use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;

use rand::Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::attachment::AttachmentFunction;
use crate::rng::{self, SimRng};

/// A directed edge from a younger vertex to an older one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Edge {
    pub src: u32,
    pub dst: u32,
}

impl Edge {
    pub fn new(src: u32, dst: u32) -> Self {
        Edge { src, dst }
    }

    pub fn touches(&self, v: u32) -> bool {
        self.src == v || self.dst == v
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("edge {src}->{dst} does not point from a younger to an older vertex")]
    Orientation { src: u32, dst: u32 },
    #[error("edge {src}->{dst} references a vertex outside 1..={n}")]
    OutOfRange { src: u32, dst: u32, n: usize },
    #[error("duplicate edge {src}->{dst}")]
    Duplicate { src: u32, dst: u32 },
    #[error("a graph needs at least one vertex")]
    Empty,
}

/// One realised graph `G_n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<Edge>,
    indegree: Vec<u32>,
    outdegree: Vec<u32>,
}

impl Graph {
    /// Single vertex, no edges.
    pub fn singleton() -> Self {
        Graph {
            n: 1,
            edges: Vec::new(),
            indegree: vec![0],
            outdegree: vec![0],
        }
    }

    /// Builds a graph from an explicit edge list, checking the invariants.
    pub fn from_edges(n: usize, edges: Vec<Edge>) -> Result<Self, GraphError> {
        if n == 0 {
            return Err(GraphError::Empty);
        }
        let mut indegree = vec![0u32; n];
        let mut outdegree = vec![0u32; n];
        let mut seen = std::collections::HashSet::with_capacity(edges.len());
        for e in &edges {
            if e.dst == 0 || e.src as usize > n {
                return Err(GraphError::OutOfRange {
                    src: e.src,
                    dst: e.dst,
                    n,
                });
            }
            if e.src <= e.dst {
                return Err(GraphError::Orientation {
                    src: e.src,
                    dst: e.dst,
                });
            }
            if !seen.insert(*e) {
                return Err(GraphError::Duplicate {
                    src: e.src,
                    dst: e.dst,
                });
            }
            indegree[e.dst as usize - 1] += 1;
            outdegree[e.src as usize - 1] += 1;
        }
        Ok(Graph {
            n,
            edges,
            indegree,
            outdegree,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Edges in insertion order.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Indegree of vertex `v` (1-based).
    pub fn indegree(&self, v: u32) -> u32 {
        self.indegree[v as usize - 1]
    }

    /// Outdegree of vertex `v` (1-based).
    pub fn outdegree(&self, v: u32) -> u32 {
        self.outdegree[v as usize - 1]
    }

    /// Total degree of vertex `v`.
    pub fn degree(&self, v: u32) -> u32 {
        self.indegree(v) + self.outdegree(v)
    }

    pub fn indegrees(&self) -> &[u32] {
        &self.indegree
    }

    pub fn outdegrees(&self) -> &[u32] {
        &self.outdegree
    }

    pub fn is_isolated(&self, v: u32) -> bool {
        self.degree(v) == 0
    }

    /// Number of vertices with neither incoming nor outgoing edges.
    pub fn isolated_count(&self) -> usize {
        self.indegree
            .iter()
            .zip(&self.outdegree)
            .filter(|(&i, &o)| i == 0 && o == 0)
            .count()
    }

    /// Exact indegree and outdegree histograms (degree -> number of vertices).
    pub fn degree_histograms(&self) -> (BTreeMap<u32, u64>, BTreeMap<u32, u64>) {
        let hist = |degs: &[u32]| {
            let mut h = BTreeMap::new();
            for &d in degs {
                *h.entry(d).or_insert(0u64) += 1;
            }
            h
        };
        (hist(&self.indegree), hist(&self.outdegree))
    }

    /// Writes the graph in the requested format.
    pub fn export<W: Write>(&self, format: ExportFormat, mut out: W) -> io::Result<()> {
        match format {
            ExportFormat::EdgeCsv => {
                out.write_all(b"src,dst\n")?;
                for e in &self.edges {
                    writeln!(out, "{},{}", e.src, e.dst)?;
                }
            }
            ExportFormat::Dot => {
                writeln!(out, "digraph G {{")?;
                for v in 1..=self.n {
                    writeln!(out, "  {v};")?;
                }
                for e in &self.edges {
                    writeln!(out, "  {} -> {};", e.src, e.dst)?;
                }
                writeln!(out, "}}")?;
            }
        }
        Ok(())
    }

    pub fn export_bytes(&self, format: ExportFormat) -> Vec<u8> {
        let mut buf = Vec::new();
        self.export(format, &mut buf).expect("writing to a Vec cannot fail");
        buf
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExportFormat {
    EdgeCsv,
    Dot,
}

/// Which sampler to use. Both produce the same law.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    /// One Bernoulli draw per (newcomer, old vertex) pair, `O(n^2)`.
    Naive,
    /// One binomial draw per occupied indegree class per step.
    #[default]
    Grouped,
}

impl FromStr for Variant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "naive" => Ok(Variant::Naive),
            "grouped" => Ok(Variant::Grouped),
            other => Err(format!("unknown generator variant '{other}'")),
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::Naive => "naive",
            Variant::Grouped => "grouped",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenConfig {
    pub n: usize,
    pub seed: u64,
    pub variant: Variant,
}

impl GenConfig {
    pub fn new(n: usize, seed: u64, variant: Variant) -> Self {
        assert!(n >= 1, "a graph needs at least one vertex");
        GenConfig { n, seed, variant }
    }
}

/// `f` tabulated lazily as degrees grow.
pub(crate) struct FCache<'a> {
    f: &'a AttachmentFunction,
    values: Vec<f64>,
}

impl<'a> FCache<'a> {
    pub(crate) fn new(f: &'a AttachmentFunction) -> Self {
        FCache {
            f,
            values: f.tabulate(16),
        }
    }

    #[inline]
    pub(crate) fn get(&mut self, d: u32) -> f64 {
        let d = d as usize;
        while d >= self.values.len() {
            let next = self.values.len() as u64;
            self.values.push(self.f.evaluate(next));
        }
        self.values[d]
    }
}

/// Generates a graph from `cfg`, drawing from the graph stream of `cfg.seed`.
pub fn generate(f: &AttachmentFunction, cfg: &GenConfig) -> Graph {
    let mut rng = rng::stream(cfg.seed, rng::STREAM_GRAPH);
    generate_with_rng(f, cfg.n, cfg.variant, &mut rng)
}

pub fn generate_naive(f: &AttachmentFunction, cfg: &GenConfig) -> Graph {
    generate(f, &GenConfig { variant: Variant::Naive, ..*cfg })
}

pub fn generate_grouped(f: &AttachmentFunction, cfg: &GenConfig) -> Graph {
    generate(f, &GenConfig { variant: Variant::Grouped, ..*cfg })
}

pub fn generate_with_rng(f: &AttachmentFunction, n: usize, variant: Variant, rng: &mut SimRng) -> Graph {
    assert!(n >= 1, "a graph needs at least one vertex");
    match variant {
        Variant::Naive => naive(f, n, rng),
        Variant::Grouped => grouped(f, n, rng),
    }
}

fn naive(f: &AttachmentFunction, n: usize, rng: &mut SimRng) -> Graph {
    let mut fc = FCache::new(f);
    let mut indegree = vec![0u32; n];
    let mut outdegree = vec![0u32; n];
    let mut edges = Vec::new();
    let mut hits: Vec<u32> = Vec::new();
    for m in 2..=n {
        let denom = (m - 1) as f64;
        hits.clear();
        for k in 1..m {
            let p = fc.get(indegree[k - 1]) / denom;
            if rng.random::<f64>() < p {
                hits.push(k as u32);
            }
        }
        for &k in &hits {
            indegree[k as usize - 1] += 1;
            edges.push(Edge::new(m as u32, k));
        }
        outdegree[m - 1] = hits.len() as u32;
    }
    Graph {
        n,
        edges,
        indegree,
        outdegree,
    }
}

fn grouped(f: &AttachmentFunction, n: usize, rng: &mut SimRng) -> Graph {
    let mut fc = FCache::new(f);
    let mut indegree = vec![0u32; n];
    let mut outdegree = vec![0u32; n];
    let mut edges = Vec::new();
    // buckets[d] holds the vertices of indegree d; pos[v-1] is v's slot.
    let mut buckets: Vec<Vec<u32>> = vec![vec![1]];
    let mut pos = vec![0u32; n];
    let mut hits: Vec<(u32, u32)> = Vec::new();

    for m in 2..=n {
        let denom = (m - 1) as f64;
        hits.clear();
        for (d, bucket) in buckets.iter_mut().enumerate() {
            let count = bucket.len();
            if count == 0 {
                continue;
            }
            let p = (fc.get(d as u32) / denom).min(1.0);
            let draws = if p >= 1.0 {
                count
            } else {
                Binomial::new(count as u64, p)
                    .expect("probability in [0,1]")
                    .sample(rng) as usize
            };
            // Partial Fisher-Yates: the first `draws` slots become a uniform
            // subset of the class.
            for j in 0..draws {
                let r = rng.random_range(j..count);
                bucket.swap(j, r);
                pos[bucket[j] as usize - 1] = j as u32;
                pos[bucket[r] as usize - 1] = r as u32;
                hits.push((bucket[j], d as u32));
            }
        }
        for &(v, d) in &hits {
            let bucket = &mut buckets[d as usize];
            let slot = pos[v as usize - 1] as usize;
            bucket.swap_remove(slot);
            if slot < bucket.len() {
                pos[bucket[slot] as usize - 1] = slot as u32;
            }
            let up = d as usize + 1;
            if up == buckets.len() {
                buckets.push(Vec::new());
            }
            pos[v as usize - 1] = buckets[up].len() as u32;
            buckets[up].push(v);
            indegree[v as usize - 1] += 1;
        }
        hits.sort_unstable_by_key(|&(v, _)| v);
        for &(v, _) in &hits {
            edges.push(Edge::new(m as u32, v));
        }
        outdegree[m - 1] = hits.len() as u32;
        pos[m - 1] = buckets[0].len() as u32;
        buckets[0].push(m as u32);
    }
    Graph {
        n,
        edges,
        indegree,
        outdegree,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::DEFAULT_SEED;

    fn lin() -> AttachmentFunction {
        AttachmentFunction::linear(0.5, 0.5).unwrap()
    }

    #[test]
    fn singleton_graph() {
        for variant in [Variant::Naive, Variant::Grouped] {
            let g = generate(&lin(), &GenConfig::new(1, 3, variant));
            assert_eq!(g.n(), 1);
            assert!(g.edges().is_empty());
            assert_eq!(g.isolated_count(), 1);
        }
    }

    #[test]
    fn isolated_count_examples() {
        assert_eq!(Graph::singleton().isolated_count(), 1);
        let g = Graph::from_edges(2, vec![Edge::new(2, 1)]).unwrap();
        assert_eq!(g.isolated_count(), 0);
        let g = Graph::from_edges(5, vec![Edge::new(2, 1), Edge::new(4, 3)]).unwrap();
        assert_eq!(g.isolated_count(), 1);
    }

    #[test]
    fn histograms() {
        let (i, o) = Graph::singleton().degree_histograms();
        assert_eq!(i, BTreeMap::from([(0, 1)]));
        assert_eq!(o, BTreeMap::from([(0, 1)]));
        let g = Graph::from_edges(2, vec![Edge::new(2, 1)]).unwrap();
        let (i, o) = g.degree_histograms();
        assert_eq!(i, BTreeMap::from([(0, 1), (1, 1)]));
        assert_eq!(o, BTreeMap::from([(0, 1), (1, 1)]));
    }

    #[test]
    fn export_formats() {
        let g = Graph::from_edges(2, vec![Edge::new(2, 1)]).unwrap();
        assert_eq!(g.export_bytes(ExportFormat::EdgeCsv), b"src,dst\n2,1\n");
        let dot = String::from_utf8(Graph::singleton().export_bytes(ExportFormat::Dot)).unwrap();
        assert_eq!(dot, "digraph G {\n  1;\n}\n");
        let g = Graph::from_edges(3, vec![Edge::new(3, 1)]).unwrap();
        let csv = String::from_utf8(g.export_bytes(ExportFormat::EdgeCsv)).unwrap();
        let rows: Vec<_> = csv.lines().skip(1).collect();
        assert_eq!(rows, vec!["3,1"]);
    }

    #[test]
    fn from_edges_rejects_bad_edges() {
        assert_eq!(
            Graph::from_edges(3, vec![Edge::new(1, 2)]),
            Err(GraphError::Orientation { src: 1, dst: 2 })
        );
        assert!(matches!(
            Graph::from_edges(3, vec![Edge::new(2, 1), Edge::new(2, 1)]),
            Err(GraphError::Duplicate { .. })
        ));
        assert!(matches!(
            Graph::from_edges(3, vec![Edge::new(4, 1)]),
            Err(GraphError::OutOfRange { .. })
        ));
        assert!(matches!(
            Graph::from_edges(3, vec![Edge::new(2, 2)]),
            Err(GraphError::Orientation { .. })
        ));
    }

    #[test]
    fn generated_graphs_satisfy_invariants() {
        let f = AttachmentFunction::power(0.3, 0.2, 0.4).unwrap();
        for variant in [Variant::Naive, Variant::Grouped] {
            for seed in 0..20 {
                let g = generate(&f, &GenConfig::new(200, seed, variant));
                let rebuilt = Graph::from_edges(g.n(), g.edges().to_vec()).unwrap();
                assert_eq!(rebuilt, g);
                let total_in: u32 = g.indegrees().iter().sum();
                let total_out: u32 = g.outdegrees().iter().sum();
                assert_eq!(total_in as usize, g.edges().len());
                assert_eq!(total_out as usize, g.edges().len());
            }
        }
    }

    #[test]
    fn deterministic_per_variant() {
        for variant in [Variant::Naive, Variant::Grouped] {
            let cfg = GenConfig::new(500, DEFAULT_SEED, variant);
            assert_eq!(generate(&lin(), &cfg), generate(&lin(), &cfg));
        }
    }

    #[test]
    fn n_two_edge_frequency_is_half() {
        for variant in [Variant::Naive, Variant::Grouped] {
            let reps = 40_000;
            let hits = (0..reps)
                .filter(|&s| {
                    let g = generate(&lin(), &GenConfig::new(2, rng::mix(9, s), variant));
                    !g.edges().is_empty()
                })
                .count();
            let p = hits as f64 / reps as f64;
            let se = (0.25f64 / reps as f64).sqrt();
            assert!((p - 0.5).abs() < 4.0 * se, "{variant}: {p}");
        }
    }
}
