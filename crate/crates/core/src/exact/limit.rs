//! Limiting indegree distribution.

use serde::{Deserialize, Serialize};

use crate::attachment::AttachmentFunction;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitLaw {
    /// `mu(k)` for `k = 0..=kmax`.
    pub probs: Vec<f64>,
    /// Mass beyond `kmax`, `prod_{i=0}^{kmax} f(i)/(f(i)+1)`.
    pub tail_mass: f64,
}

impl LimitLaw {
    pub fn mass(&self) -> f64 {
        self.probs.iter().sum()
    }
}

/// `mu(k) = 1/(1+f(k)) * prod_{i=0}^{k-1} f(i)/(f(i)+1)`.
///
/// With the product starting at `i = 0` the law telescopes: the survival
/// function is `P(D > k) = prod_{i=0}^{k} f(i)/(f(i)+1)`, which is also the
/// reported tail mass.
pub fn limit_indegree_dist(f: &AttachmentFunction, kmax: usize) -> LimitLaw {
    let mut probs = Vec::with_capacity(kmax + 1);
    let mut survival = 1.0;
    for k in 0..=kmax {
        let fk = f.evaluate(k as u64);
        probs.push(survival / (1.0 + fk));
        survival *= fk / (1.0 + fk);
    }
    LimitLaw {
        probs,
        tail_mass: survival,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_terms_for_linear_half() {
        let f = AttachmentFunction::linear(0.5, 0.5).unwrap();
        let law = limit_indegree_dist(&f, 200);
        assert!((law.probs[0] - 2.0 / 3.0).abs() < 1e-15);
        assert!((law.probs[1] - 1.0 / 6.0).abs() < 1e-15);
        // f(i)/(f(i)+1) = (i+1)/(i+3) telescopes to 2/((K+2)(K+3)).
        assert!((law.tail_mass - 2.0 / (202.0 * 203.0)).abs() < 1e-17);
        assert!((law.mass() + law.tail_mass - 1.0).abs() < 1e-13);
        assert!(law.mass() >= 0.999);
    }

    #[test]
    fn constant_rule_is_geometric() {
        let f = AttachmentFunction::constant(0.5).unwrap();
        let law = limit_indegree_dist(&f, 10);
        for (k, p) in law.probs.iter().enumerate() {
            let want = (2.0 / 3.0) * (1.0f64 / 3.0).powi(k as i32);
            assert!((p - want).abs() < 1e-15);
        }
    }
}
