//! Experiment runner: validated configurations, deterministic CSV output
//! with a provenance header, JSON sidecars, and SVG plots.

mod commands;
mod plot;

pub use plot::{emit_plot, PlotKind, PlotSpec};

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::polysolve::solvable;
use crate::quadrature::MAX_QUADRATURE_D;
use crate::sampling::{CoefficientDistribution, GameSampler, SamplingScheme};

/// Schema version of the JSON sidecar.
pub const SIDECAR_SCHEMA_VERSION: u32 = 1;

/// Environment variable consulted for the default output directory.
pub const OUT_DIR_ENV: &str = "EGT_ROOTS_OUT";

/// Artifact version written into every output file.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    ExpectedCount,
    VarianceScan,
    CltCheck,
    Distribution,
    PmAnalytic,
    Universality,
    SymmetricCompare,
    SampleGame,
}

impl Command {
    pub const ALL: [Command; 8] = [
        Command::ExpectedCount,
        Command::VarianceScan,
        Command::CltCheck,
        Command::Distribution,
        Command::PmAnalytic,
        Command::Universality,
        Command::SymmetricCompare,
        Command::SampleGame,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Command::ExpectedCount => "expected-count",
            Command::VarianceScan => "variance-scan",
            Command::CltCheck => "clt-check",
            Command::Distribution => "distribution",
            Command::PmAnalytic => "pm-analytic",
            Command::Universality => "universality",
            Command::SymmetricCompare => "symmetric-compare",
            Command::SampleGame => "sample-game",
        }
    }

    fn default_ds(&self, n: usize) -> Vec<usize> {
        match self {
            Command::ExpectedCount if n == 2 => vec![2, 3, 4, 5, 8, 10, 16],
            Command::ExpectedCount => vec![2],
            Command::VarianceScan => vec![50, 100, 200],
            Command::CltCheck => vec![200],
            Command::Distribution | Command::PmAnalytic => vec![4],
            Command::Universality => vec![20, 50, 100],
            Command::SymmetricCompare => vec![2, 5, 10, 20, 50, 100, 200],
            Command::SampleGame => vec![3],
        }
    }

    fn default_samples(&self) -> u64 {
        match self {
            Command::SampleGame => 10,
            Command::VarianceScan | Command::CltCheck => 10_000,
            _ => 100_000,
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Command {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Command::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown command {s:?}")))
    }
}

/// Parse a list of group sizes such as `2,3,5` or `20-25,50`.
pub fn parse_d_range(s: &str) -> Result<Vec<usize>> {
    let bad = || Error::Config(format!("cannot parse d range {s:?}"));
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        match part.split_once('-') {
            Some((a, b)) => {
                let a: usize = a.trim().parse().map_err(|_| bad())?;
                let b: usize = b.trim().parse().map_err(|_| bad())?;
                if a > b {
                    return Err(bad());
                }
                out.extend(a..=b);
            }
            None => out.push(part.parse().map_err(|_| bad())?),
        }
    }
    if out.is_empty() {
        return Err(bad());
    }
    Ok(out)
}

/// Everything that determines an experiment's output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub command: Command,
    pub n: usize,
    /// Group sizes; the command's default list when empty.
    pub ds: Vec<usize>,
    /// Coefficient law; universality uses all three when absent.
    pub dist: Option<CoefficientDistribution>,
    /// Sampling scheme; when absent, aggregateA for expected-count,
    /// distribution and sample-game, and scaledKSS for the large-d scans.
    pub scheme: Option<SamplingScheme>,
    pub symmetric: bool,
    /// Samples per ensemble; a command-specific default when absent.
    pub samples: Option<u64>,
    pub seed: u64,
    /// Quadrature tolerance or root-matching tolerance.
    pub tolerance: Option<f64>,
    pub workers: usize,
    pub out: PathBuf,
}

impl ExperimentConfig {
    pub fn new(command: Command) -> Self {
        Self {
            command,
            n: 2,
            ds: vec![],
            dist: None,
            scheme: None,
            symmetric: false,
            samples: None,
            seed: 1,
            tolerance: None,
            workers: 1,
            out: default_out_dir(),
        }
    }

    pub fn d_values(&self) -> Vec<usize> {
        if self.ds.is_empty() {
            self.command.default_ds(self.n)
        } else {
            self.ds.clone()
        }
    }

    pub fn sample_count(&self) -> u64 {
        self.samples.unwrap_or_else(|| self.command.default_samples())
    }

    pub fn scheme_or_default(&self) -> SamplingScheme {
        self.scheme.unwrap_or(match self.command {
            Command::ExpectedCount | Command::Distribution | Command::SampleGame => SamplingScheme::AggregateA,
            _ => SamplingScheme::ScaledKss,
        })
    }

    pub fn dist_or_default(&self) -> CoefficientDistribution {
        self.dist.unwrap_or(CoefficientDistribution::Gaussian)
    }

    /// Check the configuration against the solvable regime and the
    /// command's own requirements before any work is done.
    pub fn validate(&self) -> Result<()> {
        let c = self.command;
        if self.workers == 0 {
            return Err(Error::Config("--workers must be at least 1".into()));
        }
        if self.sample_count() == 0 {
            return Err(Error::Config("--samples must be at least 1".into()));
        }
        if let Some(t) = self.tolerance {
            if !(t > 0.0 && t.is_finite()) {
                return Err(Error::Config(format!("--tolerance must be positive, got {t}")));
            }
        }
        let needs_two = matches!(
            c,
            Command::VarianceScan
                | Command::CltCheck
                | Command::Distribution
                | Command::PmAnalytic
                | Command::Universality
                | Command::SymmetricCompare
        ) || self.symmetric;
        if needs_two && self.n != 2 {
            return Err(Error::Config(format!("{c} needs n = 2, got n = {}", self.n)));
        }
        for d in self.d_values() {
            if self.n < 2 || d < 2 {
                return Err(Error::Config(format!("need n >= 2 and d >= 2, got n = {}, d = {d}", self.n)));
            }
            if !solvable(self.n, d) {
                return Err(Error::Config(format!(
                    "n = {}, d = {d} is outside the solvable regime (n = 2, d = 2, or n = d = 3)",
                    self.n
                )));
            }
            let sampled = !matches!(c, Command::PmAnalytic) && !(self.symmetric && c != Command::SymmetricCompare);
            if sampled {
                GameSampler::new(self.n, d, self.dist_or_default(), self.scheme_or_default()).map_err(|e| {
                    Error::Config(format!("scheme {} at n = {}, d = {d}: {e}", self.scheme_or_default().name(), self.n))
                })?;
            }
            if c == Command::PmAnalytic && d > MAX_QUADRATURE_D {
                return Err(Error::Config(format!("pm-analytic supports d <= {MAX_QUADRATURE_D}, got {d}")));
            }
        }
        if matches!(c, Command::Distribution | Command::PmAnalytic) && self.d_values().len() != 1 {
            return Err(Error::Config(format!("{c} takes a single d")));
        }
        Ok(())
    }

    /// The configuration as echoed into output headers: everything except
    /// the worker count and output directory, with defaults resolved.
    pub fn echo(&self) -> ConfigEcho {
        ConfigEcho {
            command: self.command,
            n: self.n,
            ds: self.d_values(),
            dist: match (self.command, self.dist) {
                (Command::Universality, None) => None,
                (_, d) => Some(d.unwrap_or(CoefficientDistribution::Gaussian)),
            },
            scheme: self.scheme_or_default(),
            symmetric: self.symmetric,
            samples: self.sample_count(),
            seed: self.seed,
            tolerance: self.tolerance,
        }
    }
}

/// Resolved configuration written into output headers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub command: Command,
    pub n: usize,
    pub ds: Vec<usize>,
    pub dist: Option<CoefficientDistribution>,
    pub scheme: SamplingScheme,
    pub symmetric: bool,
    pub samples: u64,
    pub seed: u64,
    pub tolerance: Option<f64>,
}

/// Output directory from [`OUT_DIR_ENV`], or `results`.
pub fn default_out_dir() -> PathBuf {
    std::env::var_os(OUT_DIR_ENV).map(PathBuf::from).unwrap_or_else(|| PathBuf::from("results"))
}

/// A CSV table under construction.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    fn new(header: &[&str]) -> Self {
        Self { header: header.iter().map(|s| s.to_string()).collect(), rows: vec![] }
    }

    fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }
}

/// Paths written by one run.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentOutput {
    pub csv: PathBuf,
    pub json: PathBuf,
}

#[derive(Serialize)]
struct Sidecar<'a> {
    schema_version: u32,
    version: &'a str,
    config: &'a ExperimentConfig,
    resolved: ConfigEcho,
    wall_clock_seconds: f64,
    csv: String,
    results: serde_json::Value,
}

/// Render the CSV bytes: `#` comment lines carrying the artifact version and
/// the resolved configuration, then the header and rows.
pub fn render_csv(cfg: &ExperimentConfig, table: &Table) -> Result<String> {
    let echo = serde_json::to_string(&cfg.echo())?;
    let mut out = format!("# egt-roots {VERSION}\n# config {echo}\n");
    let mut w = csv::WriterBuilder::new().from_writer(vec![]);
    w.write_record(&table.header)?;
    for r in &table.rows {
        w.write_record(r)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    out.push_str(&String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))?);
    Ok(out)
}

/// Run one experiment and write `<out>/<command>.csv` and `<out>/<command>.json`.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    cfg.validate()?;
    let start = Instant::now();
    let (table, results) = commands::run(cfg)?;
    fs::create_dir_all(&cfg.out)?;
    let csv_path = cfg.out.join(format!("{}.csv", cfg.command));
    let json_path = cfg.out.join(format!("{}.json", cfg.command));
    fs::write(&csv_path, render_csv(cfg, &table)?)?;
    let sidecar = Sidecar {
        schema_version: SIDECAR_SCHEMA_VERSION,
        version: VERSION,
        config: cfg,
        resolved: cfg.echo(),
        wall_clock_seconds: start.elapsed().as_secs_f64(),
        csv: file_name(&csv_path),
        results,
    };
    fs::write(&json_path, serde_json::to_string_pretty(&sidecar)?)?;
    Ok(ExperimentOutput { csv: csv_path, json: json_path })
}

fn file_name(p: &Path) -> String {
    p.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
}
