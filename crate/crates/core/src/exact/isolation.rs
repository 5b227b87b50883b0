//! Exact isolation probabilities and the mean number of isolated vertices.
//!
//! A vertex is isolated iff it sent no edge at birth and received none since.
//! The two events are independent, so `theta_{i,n} = P(deg_n(i) = 0) * p_{i,0}`.

use serde::{Deserialize, Serialize};

use super::law::{advance, expect, trim, GrowthPrefix};
use super::ExactError;
use crate::attachment::{AttachmentFunction, Kind};

/// `P(deg_n(i) = 0) = prod_{l=i+1}^{n} (1 - f(0)/(l-1))`, in log space.
pub fn prob_indegree_zero(f: &AttachmentFunction, i: usize, n: usize) -> Result<f64, ExactError> {
    if i == 0 || i > n {
        return Err(ExactError::VertexRange { i, n });
    }
    let f0 = f.eta();
    let log: f64 = (i + 1..=n).map(|l| (-f0 / (l - 1) as f64).ln_1p()).sum();
    Ok(log.exp())
}

/// `p_{j,0} = prod_{r<j} (1 - mu^f_{j-1}(r)/(j-1))`.
pub fn outdegree_zero_prob(f: &AttachmentFunction, j: usize) -> Result<f64, ExactError> {
    if j == 0 {
        return Err(ExactError::VertexRange { i: 0, n: 0 });
    }
    Ok(*IsolationTable::outdegree_zero_all(f, j).last().unwrap())
}

/// `theta_{i,n} = E[X_{i,n}]`.
pub fn isolation_prob(f: &AttachmentFunction, i: usize, n: usize) -> Result<f64, ExactError> {
    Ok(prob_indegree_zero(f, i, n)? * outdegree_zero_prob(f, i)?)
}

/// `mu_n = E[W_n]` from the one-step recursion.
pub fn exact_mean_isolated(f: &AttachmentFunction, n: usize) -> Result<f64, ExactError> {
    if n == 0 {
        return Err(ExactError::VertexRange { i: 0, n });
    }
    Ok(IsolationTable::new(f, n).mean())
}

/// Every isolation-related exact quantity at horizon `n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IsolationTable {
    pub n: usize,
    /// `p_{j,0}` for `j = 1..=n` (index `j - 1`).
    pub outdegree_zero: Vec<f64>,
    /// `P(deg_n(i) = 0)` for `i = 1..=n`.
    pub indegree_zero: Vec<f64>,
    /// `theta_{i,n}` for `i = 1..=n`.
    pub theta: Vec<f64>,
    /// `mu_m` for `m = 1..=n` from the recursion.
    pub means: Vec<f64>,
}

impl IsolationTable {
    pub fn new(f: &AttachmentFunction, n: usize) -> Self {
        assert!(n >= 1);
        let outdegree_zero = Self::outdegree_zero_all(f, n);
        let f0 = f.eta();
        // log P(deg_n(i)=0) = sum_{l=i+1}^{n} ln(1 - f0/(l-1)), accumulated
        // from the youngest vertex backwards.
        let mut indegree_zero = vec![1.0; n];
        let mut acc = 0.0;
        for i in (1..n).rev() {
            acc += (-f0 / i as f64).ln_1p();
            indegree_zero[i - 1] = acc.exp();
        }
        let theta = indegree_zero
            .iter()
            .zip(&outdegree_zero)
            .map(|(a, b)| a * b)
            .collect();
        let mut means = Vec::with_capacity(n);
        means.push(1.0);
        for m in 2..=n {
            let prev = means[m - 2];
            means.push((1.0 - f0 / (m - 1) as f64) * prev + outdegree_zero[m - 1]);
        }
        IsolationTable {
            n,
            outdegree_zero,
            indegree_zero,
            theta,
            means,
        }
    }

    /// `mu_n`
    pub fn mean(&self) -> f64 {
        *self.means.last().unwrap()
    }

    /// `sum_i theta_{i,n}`
    pub fn theta_sum(&self) -> f64 {
        self.theta.iter().sum()
    }

    /// `p_{j,0}` for `j = 1..=n`.
    pub fn outdegree_zero_all(f: &AttachmentFunction, n: usize) -> Vec<f64> {
        match f.kind() {
            Kind::Linear { gamma, eta } => linear_outdegree_zero(*gamma, *eta, n),
            _ => generic_outdegree_zero(f, n),
        }
    }
}

/// All vertex chains advanced together: at time `j - 1` the f-moments of
/// every older vertex give `p_{j,0}`. Cost `O(n^2 * support)`.
fn generic_outdegree_zero(f: &AttachmentFunction, n: usize) -> Vec<f64> {
    let fv = f.tabulate(n + 2);
    let mut out = Vec::with_capacity(n);
    out.push(1.0);
    let mut chains: Vec<Vec<f64>> = Vec::with_capacity(n);
    for j in 2..=n {
        // Vertex j-1 is born at time j-1 with indegree 0; older vertices
        // already sit at time j-1.
        chains.push(vec![1.0]);
        let denom = (j - 1) as f64;
        let log: f64 = chains
            .iter()
            .map(|row| (-expect(&fv, row) / denom).ln_1p())
            .sum();
        out.push(log.exp());
        // Advance everyone to time j.
        for row in chains.iter_mut() {
            advance(&fv, row, j);
            trim(row);
        }
    }
    out
}

/// Linear rules: `mu_{j-1}(r) = eta * exp(L[j-1] - L[r])`.
///
/// The sum `sum_r ln(1 - x_r)` is taken directly for the few oldest vertices
/// where `x_r` is large and through the power series `-sum_k c^k T_k / k`
/// elsewhere, with running sums `T_k = sum_{r=R}^{t} exp(-k L[r])`. Since
/// `c = eta exp(L[t]) / t` decreases in `t`, the switch point `R` only moves
/// towards older vertices, so every vertex enters the running sums once.
fn linear_outdegree_zero(gamma: f64, eta: f64, n: usize) -> Vec<f64> {
    const SWITCH: f64 = 0.25;
    const TERMS: usize = 40;
    let growth = GrowthPrefix::new(gamma, n + 1);
    let mut sums = [0.0f64; TERMS];
    let add = |sums: &mut [f64; TERMS], r: usize| {
        let base = (-growth.at(r)).exp();
        let mut pw = 1.0;
        for s in sums.iter_mut() {
            pw *= base;
            if pw == 0.0 {
                break;
            }
            *s += pw;
        }
    };
    let mut out = Vec::with_capacity(n);
    out.push(1.0);
    // Vertices r in [lo, hi] are in the running sums.
    let mut lo = usize::MAX;
    let mut hi = 0usize;
    for j in 2..=n {
        let t = j - 1;
        let log_c = eta.ln() + growth.at(t) - (t as f64).ln();
        let x = |r: usize| (log_c - growth.at(r)).exp();
        // First vertex whose term is small enough for the series.
        let mut r0 = if lo == usize::MAX { t } else { lo.min(t) };
        while r0 > 1 && x(r0 - 1) <= SWITCH {
            r0 -= 1;
        }
        while r0 <= t && x(r0) > SWITCH {
            r0 += 1;
        }
        if r0 <= t {
            if lo == usize::MAX {
                lo = r0;
                hi = r0 - 1;
            }
            while hi < t {
                hi += 1;
                add(&mut sums, hi);
            }
            while lo > r0 {
                lo -= 1;
                add(&mut sums, lo);
            }
        }
        let mut log = 0.0;
        let direct_end = if lo == usize::MAX { t + 1 } else { lo };
        for r in 1..direct_end {
            log += (-x(r)).ln_1p();
        }
        if lo != usize::MAX {
            let c = log_c.exp();
            let mut ck = 1.0;
            for (k, s) in sums.iter().enumerate() {
                ck *= c;
                let term = ck * s / (k + 1) as f64;
                log -= term;
                if term <= 1e-18 * log.abs() {
                    break;
                }
            }
        }
        out.push(log.exp());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::law::expected_f_degree;

    fn lin() -> AttachmentFunction {
        AttachmentFunction::linear(0.5, 0.5).unwrap()
    }

    #[test]
    fn indegree_zero_examples() {
        assert_eq!(prob_indegree_zero(&lin(), 4, 4).unwrap(), 1.0);
        assert!((prob_indegree_zero(&lin(), 2, 3).unwrap() - 0.75).abs() < 1e-15);
        assert!((prob_indegree_zero(&lin(), 1, 3).unwrap() - 0.375).abs() < 1e-15);
    }

    #[test]
    fn outdegree_zero_examples() {
        assert_eq!(outdegree_zero_prob(&lin(), 1).unwrap(), 1.0);
        assert!((outdegree_zero_prob(&lin(), 2).unwrap() - 0.5).abs() < 1e-15);
        assert!((outdegree_zero_prob(&lin(), 3).unwrap() - 0.46875).abs() < 1e-15);
    }

    #[test]
    fn isolation_examples() {
        assert_eq!(isolation_prob(&lin(), 1, 1).unwrap(), 1.0);
        assert!((isolation_prob(&lin(), 1, 2).unwrap() - 0.5).abs() < 1e-15);
        assert!((isolation_prob(&lin(), 2, 2).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn mean_examples() {
        assert_eq!(exact_mean_isolated(&lin(), 1).unwrap(), 1.0);
        assert!((exact_mean_isolated(&lin(), 2).unwrap() - 1.0).abs() < 1e-15);
        assert!((exact_mean_isolated(&lin(), 3).unwrap() - 1.21875).abs() < 1e-15);
    }

    #[test]
    fn linear_series_matches_direct_products() {
        for (g, e) in [(0.5, 0.5), (0.3, 0.5), (0.9, 0.9), (0.1, 0.2)] {
            let f = AttachmentFunction::linear(g, e).unwrap();
            let fast = linear_outdegree_zero(g, e, 600);
            for j in [1usize, 2, 3, 10, 57, 300, 600] {
                let direct: f64 = (1..j)
                    .map(|r| 1.0 - expected_f_degree(&f, r, j - 1).unwrap() / (j - 1) as f64)
                    .product();
                let rel = (fast[j - 1] - direct).abs() / direct;
                assert!(rel < 1e-12, "g={g} e={e} j={j}: {} vs {direct}", fast[j - 1]);
            }
        }
    }

    #[test]
    fn generic_path_agrees_with_linear_path() {
        // A table reproducing the linear rule on the reachable range.
        let n = 80;
        let values: Vec<f64> = (0..=n).map(|k| 0.3 * k as f64 + 0.5).collect();
        let table = AttachmentFunction::table(values).unwrap();
        let a = generic_outdegree_zero(&table, n);
        let b = linear_outdegree_zero(0.3, 0.5, n);
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-13, "{x} vs {y}");
        }
    }

    #[test]
    fn theta_sums_to_mean() {
        let pow = AttachmentFunction::power(0.3, 0.2, 0.4).unwrap();
        for f in [lin(), pow] {
            for n in 1..=20 {
                let t = IsolationTable::new(&f, n);
                assert!((t.theta_sum() - t.mean()).abs() < 1e-10);
            }
        }
    }
}
