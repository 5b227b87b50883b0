//! Exact laws for small graphs: full enumeration, isolation probabilities,
//! the indegree chain of one vertex and the conditional f-moments.
//!
//! cargo run --release --example exact_oracle -- [f-spec]

use pa_isolated::exact::{
    conditional_moments, enumerate_exact, exact_mean_isolated, expected_f_degree, indegree_law, isolation_prob,
    limit_indegree_dist,
};
use pa_isolated::AttachmentFunction;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let f: AttachmentFunction = std::env::args().nth(1).as_deref().unwrap_or("linear:0.5,0.5").parse()?;
    println!("attachment {f}, gamma {}", f.gamma());

    for n in 1..=6 {
        let e = enumerate_exact(&f, n, false)?;
        let law: Vec<String> = e.w_dist.iter().map(|(w, p)| format!("{w}:{p:.5}")).collect();
        println!("n={n} mean {:.6} var {:.6} law {}", e.mean, e.variance(), law.join(" "));
    }

    let n = 1000;
    println!("\nmu_n/n at n={n}: {:.6}", exact_mean_isolated(&f, n)? / n as f64);
    for i in [1, 10, 100, 500, 1000] {
        println!(
            "  i={i:>4}  P(isolated) {:.6}  E[f(deg)] {:.4}",
            isolation_prob(&f, i, n)?,
            expected_f_degree(&f, i, n)?
        );
    }

    let table = indegree_law(&f, 1, 8)?;
    println!("\nindegree law of vertex 1 at n=8: {:.4?}", table.final_row());

    let cm = conditional_moments(&f, 3, 6, 12)?;
    println!("\nvertex 3 given edge 6->3 present / absent (P = {:.4}):", cm.p_edge);
    for t in [3, 5, 6, 9, 12] {
        println!(
            "  t={t:>2}  mu {:.4}  mu_hat {:.4}  mu_tilde {:.4}",
            cm.mu_at(t),
            cm.mu_hat_at(t),
            cm.mu_tilde_at(t)
        );
    }

    let limit = limit_indegree_dist(&f, 200);
    println!("\nlimit indegree law: {:.5?} ..., tail beyond 200 {:.3e}", &limit.probs[..6], limit.tail_mass);
    Ok(())
}
