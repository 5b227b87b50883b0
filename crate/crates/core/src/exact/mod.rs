//! Exact, non-Monte-Carlo quantities of the model.

mod enumerate;
mod isolation;
mod law;
mod limit;

use thiserror::Error;

pub use enumerate::{enumerate_exact, for_each_configuration, Configuration, EdgeMarginal, ExactEnumeration};
pub use isolation::{
    exact_mean_isolated, isolation_prob, outdegree_zero_prob, prob_indegree_zero, IsolationTable,
};
pub use law::{
    conditional_moments, expected_f_degree, expected_f_degree_dp, expected_f_from, f_moment_path,
    indegree_law, ConditionalMoments, IndegreeLawTable,
};
pub use limit::{limit_indegree_dist, LimitLaw};

pub(crate) use law::{advance, continuation_table, trim, GrowthPrefix};

/// Largest `n` enumerated without an explicit override.
pub const ENUMERATION_LIMIT: usize = 6;
/// Largest `n` enumerated with the override.
pub const FORCED_ENUMERATION_LIMIT: usize = 7;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExactError {
    #[error("vertex {i} is outside 1..={n}")]
    VertexRange { i: usize, n: usize },
    #[error("conditioning vertex i={i} must be younger than ell={ell}")]
    ConditioningOrder { ell: usize, i: usize },
    #[error("n={n} exceeds the enumeration limit {limit}")]
    TooLarge { n: usize, limit: usize },
}
