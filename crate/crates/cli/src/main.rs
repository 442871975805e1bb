//! `zoo-lab`: batch driver for the Poisson zoo laboratory.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use config::{ConfigError, ExperimentConfig};
use output::Output;

/// Environment variable naming the output directory when `--out` is absent.
pub const OUT_ENV: &str = "ZOO_LAB_OUT";

#[derive(Parser, Debug)]
#[command(name = "zoo-lab", version, about = "Monte Carlo laboratory for Poisson zoos of lattice animals")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Key-value config file; flags override its entries.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Graph, e.g. `tree(3)`, `free(cycle(3),cycle(4))`, `lattice(2)`.
    #[arg(long, global = true)]
    graph: Option<String>,
    /// Animal law, e.g. `singleton`, `worm(power(2.5))`, `ball(const(2))`.
    #[arg(long, global = true)]
    law: Option<String>,
    #[arg(long, global = true)]
    lambda: Option<f64>,
    /// Volume cap `R`.
    #[arg(long, global = true)]
    volume_cap: Option<usize>,
    #[arg(long, global = true)]
    radius: Option<u32>,
    #[arg(long, global = true)]
    trials: Option<usize>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory (default: `$ZOO_LAB_OUT`, else `zoo-lab-out`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads; results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// `a:b:n` grid of `n` points.
    #[arg(long, global = true)]
    grid: Option<String>,
    #[arg(long, global = true)]
    max_steps: Option<usize>,
    /// Branching direction, 1 or 2 (default: chosen by a pilot run).
    #[arg(long, global = true)]
    direction: Option<u8>,
    #[arg(long, global = true)]
    growth_a: Option<f64>,
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Comma-separated caps for coupled runs.
    #[arg(long, global = true)]
    caps: Option<String>,
    /// Campbell test function.
    #[arg(long, global = true, value_enum)]
    test: Option<TestFn>,
    /// Growth harness: `b`.
    #[arg(long, global = true)]
    b: Option<f64>,
    /// Growth harness: `C`.
    #[arg(long, global = true)]
    c: Option<f64>,
    /// Growth harness increments: poisson, deterministic, zero or adversarial:q.
    #[arg(long, global = true)]
    model: Option<String>,
    /// Walk horizon for escape estimates.
    #[arg(long, global = true)]
    horizon: Option<usize>,
    /// Animal samples used for volume moments.
    #[arg(long, global = true)]
    moment_trials: Option<usize>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum TestFn {
    Count,
    Volume,
    Volume2,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Command {
    /// Occupied vertices of ball(o, radius). Writes occupied.csv: vertex,multiplicity.
    Sample,
    /// Components of one window. Writes clusters.csv: rank,size.
    Clusters,
    /// Crossing probability along a coupled lambda grid. Writes sweep.csv:
    /// lambda,crossing_prob,ci_lo,ci_hi,trials.
    Sweep,
    /// Bisection for the threshold over the grid ends. Writes evaluations.csv:
    /// lambda,statistic,stderr,trials.
    LambdaC,
    /// Fattening exploration per seed. Writes explore.csv:
    /// trial,n,e,b,c,growth_ok,animals_consumed.
    Explore,
    /// Branching exploration on a free product. Writes branch.csv:
    /// generation,mean_size.
    Branch,
    /// Capacity of ball(o, radius). Writes capacity.json.
    Capacity,
    /// Truncated volume moments. Writes moments.csv:
    /// k,R,estimate,stderr,acceptance.
    Moments,
    /// Occupation and hitting volume at o against their predictions. Writes
    /// size_bias.csv: R,mean_mu,mu_stderr,pred_mu,pred_mu_stderr,mean_sigma,
    /// sigma_stderr,pred_sigma,pred_sigma_stderr,z_mu,z_sigma.
    SizeBias,
    /// Sum of a test function over animals rooted in ball(o, radius). Writes
    /// campbell.json.
    Campbell,
    /// Synthetic growth process. Writes growth.json.
    GrowthHarness,
    /// Clusters linking the inner ball to the sphere. Writes uniqueness.csv:
    /// trial,crossing_clusters.
    Uniqueness,
    /// Tabulated graph constants. Writes constants.json.
    Constants,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Sample => "sample",
            Command::Clusters => "clusters",
            Command::Sweep => "sweep",
            Command::LambdaC => "lambda-c",
            Command::Explore => "explore",
            Command::Branch => "branch",
            Command::Capacity => "capacity",
            Command::Moments => "moments",
            Command::SizeBias => "size-bias",
            Command::Campbell => "campbell",
            Command::GrowthHarness => "growth-harness",
            Command::Uniqueness => "uniqueness",
            Command::Constants => "constants",
        }
    }
}

#[derive(Serialize)]
struct Manifest<'a> {
    command: &'a str,
    config: &'a std::collections::BTreeMap<String, String>,
    seed: u64,
    started: f64,
    finished: f64,
    tool_version: &'a str,
}

pub enum Failure {
    Config(String),
    Resource(String),
    Other(String),
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Config(e.0)
    }
}

impl From<poisson_zoo::Error> for Failure {
    fn from(e: poisson_zoo::Error) -> Self {
        match e {
            poisson_zoo::Error::Resource(_) => Failure::Resource(e.to_string()),
            _ => Failure::Config(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Other(e.to_string())
    }
}

fn now() -> f64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map_or(0.0, |d| d.as_secs_f64())
}

fn merge(cli: &Cli) -> Result<ExperimentConfig, Failure> {
    let mut cfg = match &cli.config {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::default(),
    };
    macro_rules! flag {
        ($($f:ident),*) => {$(
            if let Some(v) = &cli.$f {
                cfg.set(stringify!($f), v);
            }
        )*};
    }
    flag!(graph, law, lambda, volume_cap, radius, trials, seed, threads, grid, max_steps, direction, growth_a, tol, caps, b, c, model, horizon, moment_trials);
    if let Some(p) = &cli.out {
        cfg.set("out", p.display());
    }
    if let Some(t) = cli.test {
        cfg.set("test", format!("{t:?}").to_lowercase());
    }
    Ok(cfg)
}

fn run(cli: Cli) -> Result<(), Failure> {
    let cfg = merge(&cli)?;
    if let Some(n) = cfg.get::<usize>("threads")? {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::Config(format!("threads: {e}")))?;
    }
    let seed = cfg.or("seed", 1u64)?;
    let dir = match cfg.raw("out") {
        Some(p) => PathBuf::from(p),
        None => std::env::var_os(OUT_ENV).map_or_else(|| PathBuf::from("zoo-lab-out"), PathBuf::from),
    };
    let started = now();
    let out = Output::create(&dir)?;
    commands::dispatch(cli.command, &cfg, seed, &out)?;
    out.json(
        "manifest.json",
        &Manifest {
            command: cli.command.name(),
            config: cfg.values(),
            seed,
            started,
            finished: now(),
            tool_version: env!("CARGO_PKG_VERSION"),
        },
    )?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(m)) => {
            eprintln!("zoo-lab: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Resource(m)) => {
            eprintln!("zoo-lab: {m}");
            ExitCode::from(3)
        }
        Err(Failure::Other(m)) => {
            eprintln!("zoo-lab: {m}");
            ExitCode::from(1)
        }
    }
}
