//! Grows one graph and writes it as an edge list or a Graphviz file.
//!
//! cargo run --release --example generate_graph -- [n] [f-spec] [csv|dot] [seed]

use std::io::{self, Write};

use pa_isolated::graph::generate;
use pa_isolated::rng::DEFAULT_SEED;
use pa_isolated::{AttachmentFunction, ExportFormat, GenConfig, Variant};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().map(|s| s.parse()).transpose()?.unwrap_or(35);
    let f: AttachmentFunction = args.next().as_deref().unwrap_or("power:0.3,0.2,0.4").parse()?;
    let format = match args.next().as_deref() {
        Some("csv") => ExportFormat::EdgeCsv,
        _ => ExportFormat::Dot,
    };
    let seed = args.next().map(|s| s.parse()).transpose()?.unwrap_or(DEFAULT_SEED);

    let g = generate(&f, &GenConfig::new(n, seed, Variant::Grouped));
    let (indeg, outdeg) = g.degree_histograms();
    eprintln!("{f}: n={} edges={} isolated={}", g.n(), g.edges().len(), g.isolated_count());
    eprintln!("indegree histogram {indeg:?}");
    eprintln!("outdegree histogram {outdeg:?}");

    let stdout = io::stdout();
    let mut out = stdout.lock();
    g.export(format, &mut out)?;
    out.flush()?;
    Ok(())
}
