//! Wasserstein distance of the standardised isolated-vertex count to the
//! normal law over a grid of sizes, and the fitted decay exponent.
//!
//! cargo run --release --example clt_rate -- [f-spec] [seed]

use pa_isolated::rng::DEFAULT_SEED;
use pa_isolated::stats::{clt_run, DEFAULT_N_LIST, DEFAULT_REPS};
use pa_isolated::{AttachmentFunction, Variant};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let f: AttachmentFunction = args.next().as_deref().unwrap_or("linear:0.3,0.5").parse()?;
    let seed = args.next().map(|s| s.parse()).transpose()?.unwrap_or(DEFAULT_SEED);
    let grid: Vec<(usize, usize)> = DEFAULT_N_LIST.iter().copied().zip(DEFAULT_REPS).collect();
    let report = clt_run(&f, &grid, seed, Variant::Grouped)?;
    println!("{:>6} {:>7} {:>10} {:>10} {:>10}", "n", "reps", "mean", "sd", "d_w");
    for p in &report.points {
        println!("{:>6} {:>7} {:>10.3} {:>10.3} {:>10.5}", p.n, p.reps, p.mean, p.sd, p.d_w);
    }
    println!(
        "slope {:.3} (theory {:.2}, regime {:?})",
        report.fit.slope, report.fit.theoretical_exponent, report.fit.regime
    );
    Ok(())
}
