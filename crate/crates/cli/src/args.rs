use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(name = "tvc", version, about = "Time-variant community mobility: traces, analytics and validation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a mobility trace (NS2, CSV and a metadata sidecar).
    Generate(GenerateArgs),
    /// Trace statistics: visiting preference, re-appearance, contacts, degree.
    Stats(StatsArgs),
    /// Closed-form node degree, hitting time and meeting time.
    Theory(TheoryArgs),
    /// Compare the analytics with Monte Carlo simulation.
    Validate(ValidateArgs),
    /// Epidemic routing: trace-driven simulation and the SI model.
    Epidemic(EpidemicArgs),
    /// Greedy geographic forwarding success rates.
    Route(RouteArgs),
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct Common {
    /// Model configuration (JSON).
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Seed for every stochastic step.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory, created if missing.
    #[arg(long, default_value = "out")]
    #[serde(skip)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TraceFormat {
    Ns2,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Wait {
    #[default]
    Geometric,
    Truncated,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct GenerateArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
    /// Trace length in seconds.
    #[arg(long)]
    pub duration: f64,
    /// Sample interval in seconds.
    #[arg(long, default_value_t = 1.0)]
    pub dt: f64,
    /// Write only one trace format (both by default).
    #[arg(long, value_enum)]
    pub format: Option<TraceFormat>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct StatsArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
    /// Analyse an existing `t,node,x,y,on` trace instead of generating one.
    #[arg(long, conflicts_with = "contacts")]
    pub trace: Option<PathBuf>,
    /// Analyse an `a,b,start_s,end_s` contact log (contact curves only).
    #[arg(long)]
    pub contacts: Option<PathBuf>,
    #[arg(long)]
    pub duration: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    pub dt: f64,
    /// Transmission range in meters.
    #[arg(long, default_value_t = 10.0)]
    pub range: f64,
    /// Location grid cell size in meters.
    #[arg(long, default_value_t = 100.0)]
    pub grid: f64,
    /// Largest re-appearance gap in hours.
    #[arg(long, default_value_t = 48.0)]
    pub max_gap_h: f64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct TheoryArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
    #[arg(long, default_value_t = 10.0)]
    pub range: f64,
    /// Add Monte Carlo cross-checks with this many iterations.
    #[arg(long)]
    pub iters: Option<usize>,
    /// In-period wait used for hitting and meeting times.
    #[arg(long, value_enum, default_value_t = Wait::Geometric)]
    pub wait: Wait,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ValidateArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
    #[arg(long, default_value_t = 5000)]
    pub iters: usize,
    #[arg(long, default_value_t = 10.0)]
    pub range: f64,
    /// Degree trace length in seconds (20 schedule cycles by default).
    #[arg(long)]
    pub duration: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    pub dt: f64,
    #[arg(long, default_value_t = 0.15)]
    pub threshold_ht: f64,
    #[arg(long, default_value_t = 0.20)]
    pub threshold_mt: f64,
    #[arg(long, default_value_t = 0.20)]
    pub threshold_deg: f64,
    #[arg(long, value_enum, default_value_t = Wait::Geometric)]
    pub wait: Wait,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct EpidemicArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
    #[arg(long, default_value_t = 10.0)]
    pub range: f64,
    /// Number of trials.
    #[arg(long, default_value_t = 100)]
    pub iters: usize,
    /// Simulated horizon in seconds (one schedule cycle by default).
    #[arg(long)]
    pub duration: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    pub dt: f64,
    /// Source node index; random per trial when absent.
    #[arg(long)]
    pub source: Option<usize>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct RouteArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
    /// Transmission ranges, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "10,20,30,40,50")]
    pub range: Vec<f64>,
    /// Number of snapshots.
    #[arg(long, default_value_t = 500)]
    pub iters: usize,
    /// Time span snapshots are drawn from (5 schedule cycles by default).
    #[arg(long)]
    pub duration: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    pub dt: f64,
    #[arg(long, value_parser = parse_point, default_value = "250,250")]
    pub src: (f64, f64),
    #[arg(long, value_parser = parse_point, default_value = "350,350")]
    pub dst: (f64, f64),
    /// Reference configuration: also report the node count this
    /// configuration needs to match its mean degree at the first range.
    #[arg(long)]
    pub reference: Option<PathBuf>,
}

fn parse_point(s: &str) -> Result<(f64, f64), String> {
    let (x, y) = s.split_once(',').ok_or_else(|| format!("expected x,y, got {s:?}"))?;
    let p = |v: &str| v.trim().parse::<f64>().map_err(|e| format!("{v:?}: {e}"));
    Ok((p(x)?, p(y)?))
}
