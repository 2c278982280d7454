use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use thermal_qkd::MeasurementModel;

#[derive(Debug, Parser)]
#[command(
    name = "thermal-qkd",
    version,
    about = "Simulate central-broadcast QKD with thermal light and tabulate key rates"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

/// A fully resolved invocation. This is also what run manifests store.
#[derive(Debug, Clone, PartialEq, Subcommand, Serialize, Deserialize)]
#[serde(tag = "name", content = "params", rename_all = "kebab-case")]
pub enum Command {
    /// Run the protocol once and report Shannon and von Neumann summaries.
    Simulate(SimulateArgs),
    /// Sweep Eve's power transmittance.
    SweepEve(SweepEveArgs),
    /// Sweep the source quadrature variance at fixed Eve.
    SweepVariance(SweepVarianceArgs),
    /// Correlation between two parties' streams at relative offsets.
    Offset(OffsetArgs),
    /// Re-run the command recorded in a manifest.
    Replay(ReplayArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Simulate(_) => "simulate",
            Command::SweepEve(_) => "sweep-eve",
            Command::SweepVariance(_) => "sweep-variance",
            Command::Offset(_) => "offset",
            Command::Replay(_) => "replay",
        }
    }

    pub fn output(&self) -> Option<&OutputArgs> {
        match self {
            Command::Simulate(a) => Some(&a.output),
            Command::SweepEve(a) => Some(&a.output),
            Command::SweepVariance(a) => Some(&a.output),
            Command::Offset(a) => Some(&a.output),
            Command::Replay(_) => None,
        }
    }

    pub fn output_mut(&mut self) -> Option<&mut OutputArgs> {
        match self {
            Command::Simulate(a) => Some(&mut a.output),
            Command::SweepEve(a) => Some(&mut a.output),
            Command::SweepVariance(a) => Some(&mut a.output),
            Command::Offset(a) => Some(&mut a.output),
            Command::Replay(_) => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Measurement {
    /// Total photon count at the party's two detectors.
    Photon,
    /// Heterodyne radius from the two detectors' quadratures.
    Heterodyne,
}

impl From<Measurement> for MeasurementModel {
    fn from(m: Measurement) -> Self {
        match m {
            Measurement::Photon => MeasurementModel::PhotonCount,
            Measurement::Heterodyne => MeasurementModel::Heterodyne,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Pair {
    AliceBob,
    AliceEve,
    BobEve,
    /// Alice against herself.
    #[value(name = "self")]
    SelfCheck,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct SamplingArgs {
    /// Mean photon number of the thermal source.
    #[arg(long = "mean-photon", default_value_t = 200.0, value_parser = parse_mean_photon)]
    pub mean_photon: f64,
    /// Number of protocol rounds.
    #[arg(long, default_value_t = 100_000, value_parser = parse_trials)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = Measurement::Photon)]
    pub measurement: Measurement,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct OutputArgs {
    /// Output file. A `<out>.manifest.json` is written next to it. Without
    /// this flag the table goes to stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub sampling: SamplingArgs,
    /// Power transmittance of Eve's splitter.
    #[arg(long = "eve-t2", default_value_t = 0.5, value_parser = parse_unit)]
    pub eve_t2: f64,
    /// Bootstrap resamples for the error columns.
    #[arg(long, default_value_t = 100, value_parser = parse_resamples)]
    pub bootstrap: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct SweepEveArgs {
    #[command(flatten)]
    pub sampling: SamplingArgs,
    /// Grid of Eve's power transmittance, `start:stop:intervals`.
    #[arg(long, default_value = "0:1:20", value_parser = parse_unit_grid)]
    pub sweep: Grid,
    #[arg(long, default_value_t = 100, value_parser = parse_resamples)]
    pub bootstrap: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct SweepVarianceArgs {
    /// Grid of source quadrature variance `V = 2n̄ + 1`, `start:stop:intervals`.
    #[arg(long, default_value = "1:401:40", value_parser = parse_variance_grid)]
    pub sweep: Grid,
    /// Power transmittance of Eve's splitter; must be positive.
    #[arg(long = "eve-t2", default_value_t = 0.5, value_parser = parse_positive_unit)]
    pub eve_t2: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct OffsetArgs {
    #[command(flatten)]
    pub sampling: SamplingArgs,
    #[arg(long = "eve-t2", default_value_t = 0.5, value_parser = parse_unit)]
    pub eve_t2: f64,
    /// Largest offset `|k|` in trials.
    #[arg(long = "max-offset", default_value_t = 10)]
    pub max_offset: usize,
    #[arg(long, value_enum, default_value_t = Pair::AliceBob)]
    pub pair: Pair,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct ReplayArgs {
    /// Manifest written by an earlier run.
    pub manifest: PathBuf,
    /// Where to write the new output; defaults to the recorded path.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Evenly spaced grid `start:stop:intervals`, endpoints included.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub start: f64,
    pub stop: f64,
    pub intervals: usize,
}

impl Grid {
    pub fn points(&self) -> Vec<f64> {
        let n = self.intervals;
        (0..=n)
            .map(|k| {
                if k == n {
                    self.stop
                } else {
                    self.start + (self.stop - self.start) * k as f64 / n as f64
                }
            })
            .collect()
    }
}

impl FromStr for Grid {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        let [start, stop, intervals] = parts[..] else {
            return Err(format!("expected start:stop:intervals, got `{s}`"));
        };
        let start: f64 = start.trim().parse().map_err(|_| format!("bad start `{start}`"))?;
        let stop: f64 = stop.trim().parse().map_err(|_| format!("bad stop `{stop}`"))?;
        let intervals: usize = intervals
            .trim()
            .parse()
            .map_err(|_| format!("bad interval count `{intervals}`"))?;
        if !start.is_finite() || !stop.is_finite() {
            return Err("grid endpoints must be finite".into());
        }
        if intervals == 0 {
            return Err("interval count must be at least 1".into());
        }
        if stop < start {
            return Err("grid stop must not be below start".into());
        }
        Ok(Grid {
            start,
            stop,
            intervals,
        })
    }
}

impl fmt::Display for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.start, self.stop, self.intervals)
    }
}

fn parse_f64(s: &str) -> Result<f64, String> {
    let x: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    if x.is_finite() {
        Ok(x)
    } else {
        Err(format!("`{s}` is not finite"))
    }
}

fn parse_mean_photon(s: &str) -> Result<f64, String> {
    let x = parse_f64(s)?;
    if x < 0.0 {
        return Err("mean photon number must be >= 0".into());
    }
    Ok(x)
}

fn parse_unit(s: &str) -> Result<f64, String> {
    let x = parse_f64(s)?;
    if !(0.0..=1.0).contains(&x) {
        return Err("value must lie in [0, 1]".into());
    }
    Ok(x)
}

fn parse_positive_unit(s: &str) -> Result<f64, String> {
    let x = parse_unit(s)?;
    if x == 0.0 {
        return Err("value must lie in (0, 1]".into());
    }
    Ok(x)
}

fn parse_trials(s: &str) -> Result<usize, String> {
    let n: usize = s.parse().map_err(|_| format!("`{s}` is not a count"))?;
    if n == 0 {
        return Err("at least one trial is required".into());
    }
    Ok(n)
}

fn parse_resamples(s: &str) -> Result<usize, String> {
    let n: usize = s.parse().map_err(|_| format!("`{s}` is not a count"))?;
    if n < 2 {
        return Err("at least two bootstrap resamples are required".into());
    }
    Ok(n)
}

fn parse_unit_grid(s: &str) -> Result<Grid, String> {
    let g: Grid = s.parse()?;
    if g.start < 0.0 || g.stop > 1.0 {
        return Err("transmittance grid must lie within [0, 1]".into());
    }
    Ok(g)
}

fn parse_variance_grid(s: &str) -> Result<Grid, String> {
    let g: Grid = s.parse()?;
    if g.start < 1.0 {
        return Err("variance grid must start at or above 1".into());
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_includes_both_endpoints() {
        let g: Grid = "0:1:10".parse().unwrap();
        let pts = g.points();
        assert_eq!(pts.len(), 11);
        assert_eq!(pts[0], 0.0);
        assert_eq!(pts[10], 1.0);
        assert!((pts[5] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn grid_rejects_malformed_input() {
        for bad in ["0:1", "0:1:0", "1:0:4", "a:1:2", "0:1:2:3", "0:inf:2"] {
            assert!(bad.parse::<Grid>().is_err(), "{bad}");
        }
        assert!(parse_unit_grid("0:1.5:3").is_err());
        assert!(parse_variance_grid("0.5:10:3").is_err());
    }

    #[test]
    fn command_line_parses() {
        let cli = Cli::try_parse_from([
            "thermal-qkd",
            "simulate",
            "--mean-photon",
            "200",
            "--eve-t2",
            "0.5",
            "--trials",
            "100000",
            "--seed",
            "7",
        ])
        .unwrap();
        let Command::Simulate(a) = cli.command else {
            panic!("wrong subcommand");
        };
        assert_eq!(a.sampling.seed, 7);
        assert_eq!(a.sampling.measurement, Measurement::Photon);
        assert_eq!(a.output.format, Format::Csv);
        assert!(Cli::try_parse_from(["thermal-qkd", "simulate", "--trials", "0"]).is_err());
        assert!(Cli::try_parse_from(["thermal-qkd", "simulate", "--eve-t2", "1.2"]).is_err());
    }
}
