//! Command-line flags and the `--config` file.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Parser, Debug)]
#[command(
    name = "bbm92",
    version,
    about = "Double-click security analysis for entanglement-based QKD"
)]
pub struct Cli {
    /// Flat `key = value` file of flag defaults; flags on the command line win.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Privacy-amplification cost: closed form, direct search and the attack bound.
    Tau(TauArgs),
    /// Key fraction: proved, attack upper bound, and the conjectured random-assignment rate.
    Keyrate(KeyrateArgs),
    /// Trace the double-click/error boundary of one photon-number pair.
    Tradeoff(TradeoffArgs),
    /// Run the controlled-NOT attack for one Bob state or sweep the circle.
    Attack(AttackArgs),
    /// Monte Carlo of the protocol for a given source.
    Simulate(SimulateArgs),
    /// Quick check of the main invariants.
    Selftest(SelftestArgs),
}

impl Command {
    pub const NAMES: [&'static str; 6] = [
        "tau", "keyrate", "tradeoff", "attack", "simulate", "selftest",
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Command::Tau(_) => "tau",
            Command::Keyrate(_) => "keyrate",
            Command::Tradeoff(_) => "tradeoff",
            Command::Attack(_) => "attack",
            Command::Simulate(_) => "simulate",
            Command::Selftest(_) => "selftest",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct OutputArgs {
    /// Output file (default stdout); relative paths resolve against $BBM92_OUTPUT_DIR if set.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

/// `start:stop:count` with both endpoints included.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Grid {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl Grid {
    pub fn values(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.start];
        }
        let step = (self.stop - self.start) / (self.count - 1) as f64;
        (0..self.count)
            .map(|i| {
                if i == self.count - 1 {
                    self.stop
                } else {
                    self.start + step * i as f64
                }
            })
            .collect()
    }
}

impl FromStr for Grid {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        let [a, b, n] = parts.as_slice() else {
            return Err(format!("expected start:stop:count, got {s:?}"));
        };
        let start: f64 = a.parse().map_err(|_| format!("bad start {a:?}"))?;
        let stop: f64 = b.parse().map_err(|_| format!("bad stop {b:?}"))?;
        let count: usize = n.parse().map_err(|_| format!("bad count {n:?}"))?;
        if count == 0 {
            return Err("count must be at least 1".into());
        }
        if !start.is_finite() || !stop.is_finite() {
            return Err("grid endpoints must be finite".into());
        }
        Ok(Self { start, stop, count })
    }
}

impl fmt::Display for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.start, self.stop, self.count)
    }
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct PointArgs {
    #[arg(
        long,
        allow_hyphen_values = true,
        conflicts_with = "delta_grid",
        required_unless_present = "delta_grid"
    )]
    pub delta: Option<f64>,
    #[arg(
        long,
        allow_hyphen_values = true,
        conflicts_with = "eps_grid",
        required_unless_present = "eps_grid"
    )]
    pub eps: Option<f64>,
    #[arg(long, value_name = "START:STOP:COUNT")]
    pub delta_grid: Option<Grid>,
    #[arg(long, value_name = "START:STOP:COUNT")]
    pub eps_grid: Option<Grid>,
}

impl PointArgs {
    pub fn is_scalar(&self) -> bool {
        self.delta.is_some() && self.eps.is_some()
    }

    /// Every `(delta, eps)`, delta-major.
    pub fn points(&self) -> Vec<(f64, f64)> {
        let ds = self.delta.map_or_else(
            || self.delta_grid.map(|g| g.values()).unwrap_or_default(),
            |d| vec![d],
        );
        let es = self.eps.map_or_else(
            || self.eps_grid.map(|g| g.values()).unwrap_or_default(),
            |e| vec![e],
        );
        ds.iter()
            .flat_map(|&d| es.iter().map(move |&e| (d, e)))
            .collect()
    }
}

#[derive(Args, Debug, Clone, Serialize)]
#[command(args_override_self = true)]
pub struct TauArgs {
    #[command(flatten)]
    pub point: PointArgs,
    /// Coarse grid points per axis in the direct search.
    #[arg(long, default_value_t = 64)]
    pub resolution: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug, Clone, Serialize)]
#[command(args_override_self = true)]
pub struct KeyrateArgs {
    #[command(flatten)]
    pub point: PointArgs,
    /// Error-correction inefficiency (>= 1).
    #[arg(long, default_value_t = 1.0)]
    pub f: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug, Clone, Serialize)]
#[command(args_override_self = true)]
pub struct TradeoffArgs {
    #[arg(long)]
    pub na: usize,
    #[arg(long)]
    pub nb: usize,
    /// Number of log-spaced slopes in the initial sweep.
    #[arg(long, default_value_t = 200)]
    pub resolution: usize,
    /// Random pure states checked against the region.
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug, Clone, Serialize)]
#[command(args_override_self = true)]
pub struct AttackArgs {
    #[arg(
        long,
        allow_hyphen_values = true,
        required_unless_present = "sweep",
        conflicts_with = "sweep"
    )]
    pub alpha: Option<f64>,
    #[arg(
        long,
        allow_hyphen_values = true,
        required_unless_present = "sweep",
        conflicts_with = "sweep"
    )]
    pub beta: Option<f64>,
    /// Sweep (cos t, sin t) over `--resolution` angles in [0, pi).
    #[arg(long)]
    pub sweep: bool,
    #[arg(long, default_value_t = 360)]
    pub resolution: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug, Clone, Serialize)]
#[command(args_override_self = true)]
pub struct SimulateArgs {
    /// `ideal`, `werner:<v>` or `attack:<alpha>,<beta>,<xi>`.
    #[arg(long, default_value = "ideal")]
    pub source: String,
    #[arg(long, default_value_t = 1_000_000)]
    pub events: u64,
    #[arg(long, default_value_t = 1.0)]
    pub f: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug, Clone, Serialize)]
#[command(args_override_self = true)]
pub struct SelftestArgs {
    #[command(flatten)]
    pub output: OutputArgs,
}

/// Reads `key = value` lines; blank lines and `#` comments are skipped.
pub fn read_config(path: &Path) -> Result<Vec<(String, String)>, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| format!("{}:{}: expected key = value", path.display(), i + 1))?;
        let k = k.trim().trim_start_matches("--").replace('_', "-");
        if k.is_empty() || k == "config" {
            return Err(format!("{}:{}: invalid key {k:?}", path.display(), i + 1));
        }
        out.push((k, v.trim().to_string()));
    }
    Ok(out)
}

fn config_path(args: &[String]) -> Option<PathBuf> {
    let mut it = args.iter();
    while let Some(a) = it.next() {
        if a == "--config" {
            return it.next().map(PathBuf::from);
        }
        if let Some(p) = a.strip_prefix("--config=") {
            return Some(PathBuf::from(p));
        }
    }
    None
}

/// Inserts the config file's entries as flags right after the subcommand so
/// that later, explicit flags override them.
pub fn expand_config(args: Vec<String>) -> Result<Vec<String>, String> {
    let Some(path) = config_path(&args) else {
        return Ok(args);
    };
    let entries = read_config(&path)?;
    let Some(pos) = args
        .iter()
        .skip(1)
        .position(|a| Command::NAMES.contains(&a.as_str()))
    else {
        return Ok(args);
    };
    let pos = pos + 2;
    let mut injected = Vec::new();
    for (k, v) in entries {
        match v.as_str() {
            "true" => injected.push(format!("--{k}")),
            "false" => {}
            _ => injected.push(format!("--{k}={v}")),
        }
    }
    let mut out = args[..pos].to_vec();
    out.extend(injected);
    out.extend_from_slice(&args[pos..]);
    Ok(out)
}
