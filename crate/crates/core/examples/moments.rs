//! Monte Carlo mean and variance of the isolated-vertex count next to the
//! exact mean from the recursion.
//!
//! cargo run --release --example moments -- [f-spec] [reps]

use pa_isolated::exact::exact_mean_isolated;
use pa_isolated::rng::DEFAULT_SEED;
use pa_isolated::stats::simulate_moments;
use pa_isolated::AttachmentFunction;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let f: AttachmentFunction = args.next().as_deref().unwrap_or("linear:0.5,0.5").parse()?;
    let reps: usize = args.next().map(|s| s.parse()).transpose()?.unwrap_or(5000);
    println!("{:>6} {:>10} {:>10} {:>8} {:>10}", "n", "exact mu", "mc mean", "+/-", "var/n");
    for k in 4..=12 {
        let n = 1usize << k;
        let r = simulate_moments(&f, n, reps, DEFAULT_SEED)?;
        println!(
            "{:>6} {:>10.3} {:>10.3} {:>8.3} {:>10.4}",
            n,
            exact_mean_isolated(&f, n)?,
            r.mean,
            r.mean_ci_halfwidth,
            r.variance / n as f64
        );
    }
    Ok(())
}
