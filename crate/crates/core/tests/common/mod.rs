#![allow(dead_code)]

use std::collections::BTreeMap;

use statrs::distribution::{ChiSquared, ContinuousCDF};

/// Pearson chi-square p-value of observed counts against expected
/// probabilities. Bins with expected count below 5 are pooled.
pub fn chi_square_p(observed: &BTreeMap<u32, u64>, expected: &BTreeMap<u32, f64>) -> f64 {
    let total: u64 = observed.values().sum();
    let total = total as f64;
    let mut keys: Vec<u32> = expected.keys().copied().collect();
    keys.extend(observed.keys().copied());
    keys.sort_unstable();
    keys.dedup();
    let mut bins: Vec<(f64, f64)> = Vec::new();
    let mut pool = (0.0, 0.0);
    for k in keys {
        let e = expected.get(&k).copied().unwrap_or(0.0) * total;
        let o = observed.get(&k).copied().unwrap_or(0) as f64;
        pool.0 += o;
        pool.1 += e;
        if pool.1 >= 5.0 {
            bins.push(pool);
            pool = (0.0, 0.0);
        }
    }
    if pool.1 > 0.0 || pool.0 > 0.0 {
        match bins.last_mut() {
            Some(last) => {
                last.0 += pool.0;
                last.1 += pool.1;
            }
            None => bins.push(pool),
        }
    }
    if bins.len() < 2 {
        return 1.0;
    }
    let stat: f64 = bins
        .iter()
        .map(|(o, e)| if *e > 0.0 { (o - e).powi(2) / e } else if *o > 0.0 { f64::INFINITY } else { 0.0 })
        .sum();
    if !stat.is_finite() {
        return 0.0;
    }
    let dist = ChiSquared::new((bins.len() - 1) as f64).unwrap();
    1.0 - dist.cdf(stat)
}

/// Total variation distance between two laws on the integers.
pub fn tv(a: &BTreeMap<u32, f64>, b: &BTreeMap<u32, f64>) -> f64 {
    let mut keys: Vec<u32> = a.keys().chain(b.keys()).copied().collect();
    keys.sort_unstable();
    keys.dedup();
    0.5 * keys
        .iter()
        .map(|k| (a.get(k).copied().unwrap_or(0.0) - b.get(k).copied().unwrap_or(0.0)).abs())
        .sum::<f64>()
}

pub fn to_u32_keys(m: &BTreeMap<usize, f64>) -> BTreeMap<u32, f64> {
    m.iter().map(|(&k, &v)| (k as u32, v)).collect()
}

pub fn frequencies(counts: &BTreeMap<u32, u64>) -> BTreeMap<u32, f64> {
    let total: u64 = counts.values().sum();
    counts.iter().map(|(&k, &c)| (k, c as f64 / total as f64)).collect()
}
