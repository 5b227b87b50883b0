//! Indegree laws and f-moments of a single vertex.
//!
//! The indegree of a fixed vertex is a time-inhomogeneous Markov chain: from
//! state `m` at time `t-1` it moves to `m+1` at time `t` with probability
//! `f(m)/(t-1)`. Different vertices evolve independently, which is what makes
//! every per-vertex quantity here exactly computable.

use serde::{Deserialize, Serialize};

use super::ExactError;
use crate::attachment::{AttachmentFunction, Kind};

/// Trailing mass below this is dropped from truncated chains.
const TAIL_EPS: f64 = 1e-40;

/// `P(deg_t(i) = m)` for `t = i..=n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndegreeLawTable {
    pub vertex: usize,
    pub horizon: usize,
    /// `law[t - vertex][m]`
    pub law: Vec<Vec<f64>>,
}

impl IndegreeLawTable {
    pub fn row(&self, t: usize) -> &[f64] {
        &self.law[t - self.vertex]
    }

    pub fn final_row(&self) -> &[f64] {
        self.law.last().expect("table has at least one row")
    }
}

/// One step of the chain from time `t - 1` to time `t`, in place.
///
/// `row` grows by one entry when the top state gains mass.
pub(crate) fn advance(fv: &[f64], row: &mut Vec<f64>, t: usize) {
    let denom = (t - 1) as f64;
    row.push(0.0);
    for m in (0..row.len() - 1).rev() {
        let p = (fv[m] / denom).min(1.0);
        let moved = row[m] * p;
        row[m + 1] += moved;
        row[m] -= moved;
    }
    let total: f64 = row.iter().sum();
    if total > 0.0 {
        row.iter_mut().for_each(|x| *x /= total);
    }
}

/// Drops negligible trailing states.
pub(crate) fn trim(row: &mut Vec<f64>) {
    while row.len() > 1 && *row.last().unwrap() < TAIL_EPS {
        row.pop();
    }
}

pub(crate) fn expect(fv: &[f64], row: &[f64]) -> f64 {
    row.iter().zip(fv).map(|(p, f)| p * f).sum()
}

fn check_vertex(i: usize, n: usize) -> Result<(), ExactError> {
    if i == 0 || i > n {
        Err(ExactError::VertexRange { i, n })
    } else {
        Ok(())
    }
}

/// Full forward law of the indegree of vertex `i` up to time `n`.
pub fn indegree_law(f: &AttachmentFunction, i: usize, n: usize) -> Result<IndegreeLawTable, ExactError> {
    check_vertex(i, n)?;
    let fv = f.tabulate(n - i + 2);
    let mut law = Vec::with_capacity(n - i + 1);
    let mut row = vec![1.0];
    law.push(row.clone());
    for t in i + 1..=n {
        advance(&fv, &mut row, t);
        law.push(row.clone());
    }
    Ok(IndegreeLawTable {
        vertex: i,
        horizon: n,
        law,
    })
}

/// `log prod_{j=a}^{b} (1 + gamma/j)`, zero for an empty range.
pub(crate) fn log_growth(gamma: f64, a: usize, b: usize) -> f64 {
    (a..=b).map(|j| (gamma / j as f64).ln_1p()).sum()
}

/// Prefix sums `L[t] = sum_{s=1}^{t-1} ln(1 + gamma/s)`, so the mean growth
/// `prod_{j=a}^{b}(1+gamma/j)` is `exp(L[b+1] - L[a])`.
#[derive(Debug, Clone)]
pub(crate) struct GrowthPrefix {
    prefix: Vec<f64>,
}

impl GrowthPrefix {
    pub(crate) fn new(gamma: f64, upto: usize) -> Self {
        let mut prefix = vec![0.0; upto + 2];
        for t in 2..prefix.len() {
            prefix[t] = prefix[t - 1] + (gamma / (t - 1) as f64).ln_1p();
        }
        GrowthPrefix { prefix }
    }

    /// `ln prod_{j=a}^{b}(1 + gamma/j)`; zero when `b < a`.
    #[inline]
    pub(crate) fn log_range(&self, a: usize, b: usize) -> f64 {
        if b < a {
            0.0
        } else {
            self.prefix[b + 1] - self.prefix[a]
        }
    }

    #[inline]
    pub(crate) fn at(&self, t: usize) -> f64 {
        self.prefix[t]
    }
}

/// `mu^f_n(i) = E[f(deg_n(i))]`.
///
/// Linear rules use the closed-form product `f(0) prod_{j=i}^{n-1}(1+gamma/j)`;
/// everything else sums `f` against the forward law.
pub fn expected_f_degree(f: &AttachmentFunction, i: usize, n: usize) -> Result<f64, ExactError> {
    check_vertex(i, n)?;
    if let Kind::Linear { gamma, eta } = f.kind() {
        return Ok(eta * log_growth(*gamma, i, n - 1).exp());
    }
    Ok(*f_moment_path(f, i, n)?.last().unwrap())
}

/// Same as [`expected_f_degree`] but always through the forward chain.
pub fn expected_f_degree_dp(f: &AttachmentFunction, i: usize, n: usize) -> Result<f64, ExactError> {
    Ok(*f_moment_path(f, i, n)?.last().unwrap())
}

/// `mu^f_t(i)` for every `t = i..=n`, from one truncated forward pass.
pub fn f_moment_path(f: &AttachmentFunction, i: usize, n: usize) -> Result<Vec<f64>, ExactError> {
    check_vertex(i, n)?;
    let fv = f.tabulate(n - i + 2);
    let mut out = Vec::with_capacity(n - i + 1);
    let mut row = vec![1.0];
    out.push(fv[0]);
    for t in i + 1..=n {
        advance(&fv, &mut row, t);
        trim(&mut row);
        out.push(expect(&fv, &row));
    }
    Ok(out)
}

/// `E^k[f(deg_n(m))]`: f-moment at time `n` of vertex `m` started from
/// indegree `k` at its birth.
pub fn expected_f_from(f: &AttachmentFunction, k: usize, m: usize, n: usize) -> Result<f64, ExactError> {
    check_vertex(m, n)?;
    let fv = f.tabulate(k + n - m + 2);
    let mut row = vec![0.0; k + 1];
    row[k] = 1.0;
    for t in m + 1..=n {
        advance(&fv, &mut row, t);
    }
    Ok(expect(&fv, &row))
}

/// f-moments of vertex `ell` conditioned on the presence or absence of the
/// edge from a later vertex `i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionalMoments {
    pub ell: usize,
    pub cond_vertex: usize,
    pub horizon: usize,
    /// `E[f(deg_t(ell)) | i -/-> ell]` for `t = ell..=horizon`.
    pub mu_tilde: Vec<f64>,
    /// `E[f(deg_t(ell)) | i -> ell]` for `t = ell..=horizon`.
    pub mu_hat: Vec<f64>,
    /// `E[f(deg_t(ell))]` for `t = ell..=horizon`.
    pub mu_plain: Vec<f64>,
    /// `P(i -> ell)`
    pub p_edge: f64,
}

impl ConditionalMoments {
    pub fn mu_tilde_at(&self, t: usize) -> f64 {
        self.mu_tilde[t - self.ell]
    }

    pub fn mu_hat_at(&self, t: usize) -> f64 {
        self.mu_hat[t - self.ell]
    }

    pub fn mu_at(&self, t: usize) -> f64 {
        self.mu_plain[t - self.ell]
    }
}

/// Backward table `g[t - ell][m] = E[f(deg_{i-1}(ell)) | deg_t(ell) = m]` for
/// `t = ell..=i-1` and `m < width`.
///
/// Given that, `P(i -> ell | deg_t = m) = g / (i - 1)`. States at or above
/// `width` are treated as frozen, which only matters for mass that the
/// forward chain has already discarded.
pub(crate) fn continuation_table(fv: &[f64], ell: usize, i: usize, width: usize) -> Vec<Vec<f64>> {
    let rows = i - ell;
    let mut g = vec![Vec::new(); rows];
    g[rows - 1] = fv[..width].to_vec();
    for t in (ell..i - 1).rev() {
        let next = &g[t + 1 - ell];
        let denom = t as f64;
        let mut cur = Vec::with_capacity(width);
        for m in 0..width {
            let p = (fv[m] / denom).min(1.0);
            let up = if m + 1 < width { next[m + 1] } else { next[m] };
            cur.push(p * up + (1.0 - p) * next[m]);
        }
        g[t - ell] = cur;
    }
    g
}

/// Exact conditional f-moments of vertex `ell` given `i -/-> ell` and given
/// `i -> ell`, for all times `t = ell..=n`.
///
/// Before time `i` this conditions on a future event: the forward law at `t`
/// is reweighted by the probability, from each state, of (not) receiving the
/// edge at step `i`. From `i` on it is a forward pass whose step-`i`
/// transition is forced.
pub fn conditional_moments(
    f: &AttachmentFunction,
    ell: usize,
    i: usize,
    n: usize,
) -> Result<ConditionalMoments, ExactError> {
    if ell >= i {
        return Err(ExactError::ConditioningOrder { ell, i });
    }
    check_vertex(ell, n)?;
    check_vertex(i, n)?;
    let fv = f.tabulate(n - ell + 3);

    // Forward law up to time i - 1.
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(i - ell);
    let mut row = vec![1.0];
    rows.push(row.clone());
    for t in ell + 1..i {
        advance(&fv, &mut row, t);
        trim(&mut row);
        rows.push(row.clone());
    }
    let width = rows.iter().map(Vec::len).max().unwrap() + 1;
    let g = continuation_table(&fv, ell, i, width);
    let denom_i = (i - 1) as f64;

    let mut mu_tilde = Vec::with_capacity(n - ell + 1);
    let mut mu_hat = Vec::with_capacity(n - ell + 1);
    let mut mu_plain = Vec::with_capacity(n - ell + 1);
    for (idx, pi) in rows.iter().enumerate() {
        let gt = &g[idx];
        let (mut num_t, mut den_t, mut num_h, mut den_h, mut plain) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for (m, &p) in pi.iter().enumerate() {
            let edge = gt[m] / denom_i;
            let no_edge = 1.0 - edge;
            num_t += fv[m] * p * no_edge;
            den_t += p * no_edge;
            num_h += fv[m] * p * edge;
            den_h += p * edge;
            plain += fv[m] * p;
        }
        mu_tilde.push(num_t / den_t);
        mu_hat.push(num_h / den_h);
        mu_plain.push(plain);
    }

    // Step i forced, then unconditioned forward steps.
    let last = rows.last().unwrap();
    let mut tilde_row = Vec::with_capacity(last.len() + 1);
    let mut hat_row = vec![0.0; last.len() + 1];
    let mut p_edge = 0.0;
    for (m, &p) in last.iter().enumerate() {
        let q = (fv[m] / denom_i).min(1.0);
        tilde_row.push(p * (1.0 - q));
        hat_row[m + 1] = p * q;
        p_edge += p * q;
    }
    let mut plain_row = last.clone();
    let normalise = |r: &mut Vec<f64>| {
        let s: f64 = r.iter().sum();
        r.iter_mut().for_each(|x| *x /= s);
    };
    normalise(&mut tilde_row);
    normalise(&mut hat_row);
    advance(&fv, &mut plain_row, i);
    for t in i..=n {
        if t > i {
            advance(&fv, &mut tilde_row, t);
            advance(&fv, &mut hat_row, t);
            advance(&fv, &mut plain_row, t);
            trim(&mut tilde_row);
            trim(&mut hat_row);
            trim(&mut plain_row);
        }
        mu_tilde.push(expect(&fv, &tilde_row));
        mu_hat.push(expect(&fv, &hat_row));
        mu_plain.push(expect(&fv, &plain_row));
    }

    Ok(ConditionalMoments {
        ell,
        cond_vertex: i,
        horizon: n,
        mu_tilde,
        mu_hat,
        mu_plain,
        p_edge,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lin() -> AttachmentFunction {
        AttachmentFunction::linear(0.5, 0.5).unwrap()
    }

    #[test]
    fn law_examples() {
        let t = indegree_law(&lin(), 4, 4).unwrap();
        assert_eq!(t.final_row(), &[1.0]);
        let t = indegree_law(&lin(), 1, 2).unwrap();
        assert_eq!(t.final_row(), &[0.5, 0.5]);
        let t = indegree_law(&lin(), 1, 3).unwrap();
        let r = t.final_row();
        assert!((r[0] - 0.375).abs() < 1e-15);
        assert!((r[1] - 0.375).abs() < 1e-15);
        assert!((r[2] - 0.25).abs() < 1e-15);
        assert_eq!(t.row(1), &[1.0]);
    }

    #[test]
    fn law_rows_are_distributions_with_bounded_support() {
        let f = AttachmentFunction::power(0.3, 0.2, 0.4).unwrap();
        let t = indegree_law(&f, 3, 300).unwrap();
        for (k, row) in t.law.iter().enumerate() {
            let s: f64 = row.iter().sum();
            assert!((s - 1.0).abs() < 1e-12);
            assert!(row.len() <= k + 1);
        }
    }

    #[test]
    fn expected_f_degree_examples() {
        assert_eq!(expected_f_degree(&lin(), 5, 5).unwrap(), 0.5);
        let v = expected_f_degree(&lin(), 1, 3).unwrap();
        assert!((v - 0.9375).abs() < 1e-15);
        assert!((expected_f_degree_dp(&lin(), 1, 3).unwrap() - 0.9375).abs() < 1e-15);
        let pow = AttachmentFunction::power(0.3, 0.2, 0.4).unwrap();
        let v = expected_f_degree(&pow, 1, 100).unwrap();
        assert!(v <= 100f64.powf(pow.gamma()) + 1e-9, "{v}");
    }

    #[test]
    fn rejects_bad_vertices() {
        assert_eq!(
            indegree_law(&lin(), 0, 3).unwrap_err(),
            ExactError::VertexRange { i: 0, n: 3 }
        );
        assert!(expected_f_degree(&lin(), 4, 3).is_err());
        assert_eq!(
            conditional_moments(&lin(), 2, 2, 5).unwrap_err(),
            ExactError::ConditioningOrder { ell: 2, i: 2 }
        );
    }

    #[test]
    fn conditional_moment_examples() {
        let cm = conditional_moments(&lin(), 1, 2, 4).unwrap();
        assert_eq!(cm.mu_tilde_at(1), 0.5);
        assert_eq!(cm.mu_hat_at(1), 0.5);
        assert_eq!(cm.mu_at(1), 0.5);
        assert!((cm.mu_tilde_at(2) - 0.5).abs() < 1e-15);
        assert!((cm.mu_hat_at(2) - 1.0).abs() < 1e-15);
        assert!((cm.mu_at(2) - 0.75).abs() < 1e-15);
        assert!((cm.p_edge - 0.5).abs() < 1e-15);
    }

    #[test]
    fn conditional_moments_before_the_conditioning_step() {
        // ell=1, i=3: at t=2 the edge 2->1 is present w.p. 1/2 and changes
        // the chance of 3->1 from 1/4 to 1/2.
        let cm = conditional_moments(&lin(), 1, 3, 3).unwrap();
        // P(D_2 = 1 | 3 -/-> 1) = 0.5*0.5 / (0.5*0.5 + 0.5*0.75) = 0.4
        let want_tilde = 0.6 * 0.5 + 0.4 * 1.0;
        assert!((cm.mu_tilde_at(2) - want_tilde).abs() < 1e-15);
        // P(D_2 = 1 | 3 -> 1) = 0.25 / (0.25 + 0.125) = 2/3
        let want_hat = (1.0 / 3.0) * 0.5 + (2.0 / 3.0) * 1.0;
        assert!((cm.mu_hat_at(2) - want_hat).abs() < 1e-15);
    }

    #[test]
    fn start_from_higher_indegree() {
        let f = lin();
        assert_eq!(expected_f_from(&f, 0, 3, 3).unwrap(), 0.5);
        assert_eq!(expected_f_from(&f, 2, 3, 3).unwrap(), 1.5);
        // Linear rules grow the mean by (1 + gamma/(t-1)) per step.
        let v = expected_f_from(&f, 1, 2, 4).unwrap();
        assert!((v - 1.25 * (1.0 + 0.5 / 3.0)).abs() < 1e-15);
    }
}
