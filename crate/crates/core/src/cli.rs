//! Command-line front end.
//!
//! Every report is written as `{"config": .., "report": .., "meta": ..}`.
//! `config` is the resolved run configuration and `meta` holds everything
//! that may change between identical runs (wall-clock time, worker count),
//! so two runs with the same flags differ only inside `meta`.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 invalid configuration.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;
use thiserror::Error;

use crate::attachment::AttachmentFunction;
use crate::exact::{self, ExactError};
use crate::graph::{self, ExportFormat, GenConfig, Variant};
use crate::parallel::{replicate, with_threads};
use crate::rng::{self, DEFAULT_SEED};
use crate::size_bias::{Coupler, CouplingSample, SizeBiasError, ThinningRule};
use crate::stats::{self, StatsError};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Io(_) => 1,
        }
    }
}

macro_rules! config_error {
    ($($t:ty),*) => {$(
        impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                CliError::Config(e.to_string())
            }
        }
    )*};
}
config_error!(ExactError, SizeBiasError, StatsError, crate::attachment::AttachmentError);

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Io(e.into())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Dot,
}

#[derive(Debug, Parser)]
#[command(name = "pa-isolated", version, about = "Isolated vertices in preferential attachment graphs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample one graph; print n, edge count and W as JSON.
    Generate(GenerateArgs),
    /// Exact law of W_n by enumerating every graph (n <= 6).
    Enumerate(EnumerateArgs),
    /// Exact indegree law of one vertex and its isolation probabilities.
    Law(LawArgs),
    /// Monte Carlo mean, variance and histogram of W_n.
    Simulate(SimulateArgs),
    /// Stream size-bias coupling samples as CSV.
    Couple(CoupleArgs),
    /// Wasserstein distance to the normal law across sizes, with a rate fit.
    Clt(CltArgs),
    /// Nested Monte Carlo estimate of the Stein bound.
    Bound(BoundArgs),
    /// Empirical degree laws against their limits.
    DegreeDist(DegreeArgs),
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct Common {
    /// Attachment function, e.g. linear:0.5,0.5 or power:0.3,0.2,0.4.
    #[arg(long = "f", value_name = "SPEC")]
    #[serde(rename = "f_spec")]
    pub f: String,
    /// Master seed.
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Output file; standard output when omitted.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Worker threads; all cores when omitted.
    #[arg(long)]
    #[serde(skip)]
    pub threads: Option<usize>,
}

#[derive(Debug, Args, Serialize)]
pub struct GenerateArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
    #[arg(long)]
    pub n: usize,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[arg(long, default_value_t = Variant::Grouped)]
    pub variant: Variant,
}

#[derive(Debug, Args, Serialize)]
pub struct EnumerateArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
    #[arg(long)]
    pub n: usize,
    /// Allow n = 7.
    #[arg(long)]
    pub force: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct LawArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
    #[arg(long)]
    pub n: usize,
    /// Vertex whose indegree chain is tabulated.
    #[arg(long, default_value_t = 1)]
    pub i: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct SimulateArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 10_000)]
    pub reps: usize,
    #[arg(long, default_value_t = Variant::Grouped)]
    pub variant: Variant,
}

#[derive(Debug, Args, Serialize)]
pub struct CoupleArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 1_000)]
    pub reps: usize,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[arg(long, default_value_t = ThinningRule::Exact)]
    pub thinning: ThinningRule,
}

#[derive(Debug, Args, Serialize)]
pub struct CltArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
    /// Comma-separated sizes.
    #[arg(long, value_delimiter = ',', default_values_t = stats::DEFAULT_N_LIST)]
    pub n_list: Vec<usize>,
    /// Replications per size; the equal-work schedule when omitted.
    #[arg(long)]
    pub reps: Option<usize>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[arg(long, default_value_t = Variant::Grouped)]
    pub variant: Variant,
}

#[derive(Debug, Args, Serialize)]
pub struct BoundArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 2_000)]
    pub outer_reps: usize,
    #[arg(long, default_value_t = 50)]
    pub inner_reps: usize,
    #[arg(long, default_value_t = ThinningRule::Exact)]
    pub thinning: ThinningRule,
}

#[derive(Debug, Args, Serialize)]
pub struct DegreeArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 50)]
    pub reps: usize,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Generate(_) => "generate",
            Command::Enumerate(_) => "enumerate",
            Command::Law(_) => "law",
            Command::Simulate(_) => "simulate",
            Command::Couple(_) => "couple",
            Command::Clt(_) => "clt",
            Command::Bound(_) => "bound",
            Command::DegreeDist(_) => "degree-dist",
        }
    }

    fn common(&self) -> &Common {
        match self {
            Command::Generate(a) => &a.common,
            Command::Enumerate(a) => &a.common,
            Command::Law(a) => &a.common,
            Command::Simulate(a) => &a.common,
            Command::Couple(a) => &a.common,
            Command::Clt(a) => &a.common,
            Command::Bound(a) => &a.common,
            Command::DegreeDist(a) => &a.common,
        }
    }

    fn config(&self) -> serde_json::Value {
        let args = match self {
            Command::Generate(a) => serde_json::to_value(a),
            Command::Enumerate(a) => serde_json::to_value(a),
            Command::Law(a) => serde_json::to_value(a),
            Command::Simulate(a) => serde_json::to_value(a),
            Command::Couple(a) => serde_json::to_value(a),
            Command::Clt(a) => serde_json::to_value(a),
            Command::Bound(a) => serde_json::to_value(a),
            Command::DegreeDist(a) => serde_json::to_value(a),
        };
        let mut v = args.expect("arguments serialise");
        v["subcommand"] = json!(self.name());
        v
    }
}

/// Parses `argv` and runs; returns the process exit code.
pub fn main_with_args<I, T>(argv: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(&cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

pub fn run(cmd: &Command) -> Result<(), CliError> {
    let common = cmd.common();
    if common.threads == Some(0) {
        return Err(CliError::Config("--threads must be positive".into()));
    }
    let f: AttachmentFunction = AttachmentFunction::parse_spec(&common.f)?;
    let start = Instant::now();
    with_threads(common.threads, || dispatch(cmd, &f, start))
}

fn check_n(n: usize) -> Result<(), CliError> {
    if n == 0 {
        return Err(CliError::Config("--n must be at least 1".into()));
    }
    Ok(())
}

fn dispatch(cmd: &Command, f: &AttachmentFunction, start: Instant) -> Result<(), CliError> {
    let common = cmd.common();
    let seed = common.seed;
    match cmd {
        Command::Generate(a) => {
            check_n(a.n)?;
            let export = match a.format {
                Format::Csv => ExportFormat::EdgeCsv,
                Format::Dot => ExportFormat::Dot,
                Format::Json => return Err(CliError::Config("generate writes csv or dot".into())),
            };
            let g = graph::generate(f, &GenConfig::new(a.n, seed, a.variant));
            if let Some(path) = &common.output {
                let mut out = BufWriter::new(File::create(path)?);
                g.export(export, &mut out)?;
                out.flush()?;
            }
            let summary = json!({"n": g.n(), "edges": g.edges().len(), "w": g.isolated_count()});
            println!("{summary}");
            Ok(())
        }
        Command::Enumerate(a) => {
            check_n(a.n)?;
            let report = exact::enumerate_exact(f, a.n, a.force)?;
            emit(cmd, &report, start)
        }
        Command::Law(a) => {
            check_n(a.n)?;
            let table = exact::indegree_law(f, a.i, a.n)?;
            let report = json!({
                "law": table,
                "expected_f_degree": exact::expected_f_degree(f, a.i, a.n)?,
                "prob_indegree_zero": exact::prob_indegree_zero(f, a.i, a.n)?,
                "outdegree_zero_prob": exact::outdegree_zero_prob(f, a.i)?,
                "isolation_prob": exact::isolation_prob(f, a.i, a.n)?,
                "exact_mean_isolated": exact::exact_mean_isolated(f, a.n)?,
            });
            emit(cmd, &report, start)
        }
        Command::Simulate(a) => {
            check_n(a.n)?;
            let report = stats::simulate_moments_with(f, a.n, a.reps, seed, a.variant)?;
            emit(cmd, &report, start)
        }
        Command::Couple(a) => {
            check_n(a.n)?;
            let coupler = Coupler::new(f, a.n, a.thinning)?;
            let samples: Vec<Result<CouplingSample, SizeBiasError>> =
                replicate(a.reps, |r| coupler.sample(rng::mix(seed, r)));
            let samples: Vec<CouplingSample> = samples.into_iter().collect::<Result<_, _>>()?;
            match a.format {
                Format::Csv => {
                    let mut text = String::with_capacity(16 * (samples.len() + 1));
                    text.push_str(CouplingSample::CSV_HEADER);
                    text.push('\n');
                    for s in &samples {
                        text.push_str(&s.csv_row());
                        text.push('\n');
                    }
                    write_out(common.output.as_deref(), text.as_bytes())
                }
                Format::Json => emit(cmd, &samples, start),
                Format::Dot => Err(CliError::Config("couple writes csv or json".into())),
            }
        }
        Command::Clt(a) => {
            let grid: Vec<(usize, usize)> = a
                .n_list
                .iter()
                .map(|&n| (n, a.reps.unwrap_or_else(|| stats::default_reps_for(n))))
                .collect();
            if grid.iter().any(|&(n, _)| n == 0) {
                return Err(CliError::Config("every size in --n-list must be positive".into()));
            }
            let report = stats::clt_run(f, &grid, seed, a.variant)?;
            let summary = json!({
                "slope": report.fit.slope,
                "theoretical_exponent": report.fit.theoretical_exponent,
                "regime": report.fit.regime,
            });
            if common.output.is_some() {
                println!("{summary}");
            } else {
                eprintln!("{summary}");
            }
            match a.format {
                Format::Csv => write_out(common.output.as_deref(), report.to_csv().as_bytes()),
                Format::Json => emit(cmd, &report, start),
                Format::Dot => Err(CliError::Config("clt writes json or csv".into())),
            }
        }
        Command::Bound(a) => {
            check_n(a.n)?;
            let report = stats::stein_bound_terms_with(f, a.n, a.outer_reps, a.inner_reps, seed, a.thinning)?;
            emit(cmd, &report, start)
        }
        Command::DegreeDist(a) => {
            let report = stats::degree_dist_compare(f, a.n, a.reps, seed)?;
            emit(cmd, &report, start)
        }
    }
}

/// Writes `{"config", "report", "meta"}` to the output target.
fn emit<T: Serialize>(cmd: &Command, report: &T, start: Instant) -> Result<(), CliError> {
    let doc = json!({
        "config": cmd.config(),
        "report": report,
        "meta": {
            "elapsed_seconds": start.elapsed().as_secs_f64(),
            "threads": rayon::current_num_threads(),
            "version": env!("CARGO_PKG_VERSION"),
        },
    });
    let mut text = serde_json::to_string_pretty(&doc)?;
    text.push('\n');
    write_out(cmd.common().output.as_deref(), text.as_bytes())
}

fn write_out(path: Option<&Path>, bytes: &[u8]) -> Result<(), CliError> {
    match path {
        Some(p) => {
            let mut out = BufWriter::new(File::create(p)?);
            out.write_all(bytes)?;
            out.flush()?;
        }
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            lock.write_all(bytes)?;
            lock.flush()?;
        }
    }
    Ok(())
}
