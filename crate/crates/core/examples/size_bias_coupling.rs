//! Size-bias coupling of the isolated-vertex count: samples of
//! (W, W^s, I, D, 1{d_I > 0}, R) and, for tiny n, the exact law of W^s
//! next to the size-biased law of W.
//!
//! cargo run --release --example size_bias_coupling -- [n] [f-spec] [exact|averaged]

use pa_isolated::exact::enumerate_exact;
use pa_isolated::rng::{mix, DEFAULT_SEED};
use pa_isolated::size_bias::{Coupler, CouplingSample, ThinningRule};
use pa_isolated::AttachmentFunction;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().map(|s| s.parse()).transpose()?.unwrap_or(100);
    let f: AttachmentFunction = args.next().as_deref().unwrap_or("linear:0.5,0.5").parse()?;
    let rule: ThinningRule = args.next().as_deref().unwrap_or("exact").parse()?;

    let coupler = Coupler::new(&f, n, rule)?;
    println!("{f}, n={n}, {rule} thinning, mu_n = {:.4}", coupler.mean());
    println!("{}", CouplingSample::CSV_HEADER);
    let mut diff_sum = 0i64;
    let reps = 2000;
    for r in 0..reps {
        let s = coupler.sample(mix(DEFAULT_SEED, r))?;
        if r < 10 {
            println!("{}", s.csv_row());
        }
        diff_sum += s.diff();
    }
    println!("mean W^s - W over {reps} samples: {:.4}", diff_sum as f64 / reps as f64);

    let small = 4;
    let e = enumerate_exact(&f, small, false)?;
    let law = Coupler::new(&f, small, rule)?.exact_law()?;
    let ws = law.w_s_dist();
    println!("\nexact law at n={small}: k, P(W^s=k), k P(W=k)/mu");
    for (k, target) in e.size_bias_dist() {
        println!("  {k}  {:.6}  {:.6}", ws.get(&(k as u32)).copied().unwrap_or(0.0), target);
    }
    Ok(())
}
