//! Empirical indegree and outdegree laws against the limiting indegree law
//! and a fitted Poisson law.
//!
//! cargo run --release --example degree_laws -- [f-spec] [reps]

use pa_isolated::rng::DEFAULT_SEED;
use pa_isolated::stats::degree_dist_compare;
use pa_isolated::AttachmentFunction;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let f: AttachmentFunction = args.next().as_deref().unwrap_or("linear:0.5,0.5").parse()?;
    let reps: usize = args.next().map(|s| s.parse()).transpose()?.unwrap_or(20);
    println!("{:>8} {:>12} {:>10} {:>14}", "n", "indegree TV", "lambda", "outdegree TV");
    for n in [1_000, 10_000, 100_000] {
        let r = degree_dist_compare(&f, n, reps, DEFAULT_SEED)?;
        println!(
            "{:>8} {:>12.5} {:>10.4} {:>14.5}",
            n, r.tv_indegree, r.lambda_hat, r.outdegree_poisson_tv
        );
    }
    Ok(())
}
