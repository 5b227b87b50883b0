//! Isolated vertices in preferential attachment graphs with random outdegree.
//!
//! The model grows a graph one vertex at a time; the newcomer links to every
//! older vertex independently with probability `f(indegree)/(m-1)`. This
//! crate generates such graphs, computes every exactly tractable law of the
//! model, builds the size-bias coupling of the isolated-vertex count `W_n`,
//! and measures how fast the standardised `W_n` approaches a normal law.
//!
//! Modules:
//! - [`attachment`]: attachment functions and their text form.
//! - [`graph`]: naive and grouped-binomial samplers, degree queries, export.
//! - [`exact`]: forward/backward DPs, isolation probabilities, enumeration.
//! - [`size_bias`]: the coupled graph `G_n^{(I)}` and the decomposition of `W^s - W`.
//! - [`stats`]: Monte Carlo moments, Wasserstein distance, Stein bound, rate fits.
//! - [`cli`]: the command-line front end used by the `pa-isolated` binary.

pub mod attachment;
pub mod cli;
pub mod exact;
pub mod graph;
pub mod parallel;
pub mod rng;
pub mod size_bias;
pub mod stats;

pub use attachment::{AttachmentError, AttachmentFunction};
pub use graph::{Edge, ExportFormat, GenConfig, Graph, Variant};
