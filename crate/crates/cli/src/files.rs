//! On-disk formats written by the CLI and their loaders.

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use std::fs;
use std::path::Path;
use trackpilot_core::perception::Observation;
use trackpilot_core::simulator::{
    EndState, EpisodeStatus, FrameRecord, Metrics, PlanRecord, ScenarioSpec,
};
use trackpilot_core::{Lane, Point2};

pub const TRACE_FILE: &str = "trace.jsonl";
pub const METRICS_FILE: &str = "metrics.json";
pub const XY_FILE: &str = "xy.csv";
pub const SCENARIO_FILE: &str = "scenario.json";
pub const OBSERVATIONS_FILE: &str = "observations.jsonl";
pub const PLANS_FILE: &str = "plans.jsonl";
pub const SWEEP_FILE: &str = "sweep.json";
pub const TRACK_CSV: &str = "track.csv";
pub const TRACK_SUMMARY: &str = "track_summary.json";

/// Raw scenario text, with a distinct message when the file is absent.
pub fn read_scenario_text(path: &Path) -> Result<String> {
    if !path.is_file() {
        bail!("scenario file not found: {}", path.display());
    }
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

pub fn load_scenario(path: &Path) -> Result<ScenarioSpec> {
    let text = read_scenario_text(path)?;
    ScenarioSpec::from_json(&text).with_context(|| format!("in {}", path.display()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsFile {
    pub scenario: String,
    pub seed: u64,
    pub status: EpisodeStatus,
    pub metrics: Metrics,
    pub end: EndState,
}

pub fn load_metrics(path: &Path) -> Result<MetricsFile> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn load_jsonl<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            serde_json::from_str(l).with_context(|| format!("{} line {}", path.display(), i + 1))
        })
        .collect()
}

pub fn write_jsonl<T: Serialize>(path: &Path, items: &[T]) -> Result<()> {
    let mut out = String::new();
    for item in items {
        out.push_str(&serde_json::to_string(item)?);
        out.push('\n');
    }
    fs::write(path, out).with_context(|| format!("writing {}", path.display()))
}

pub fn load_trace(path: &Path) -> Result<Vec<FrameRecord>> {
    load_jsonl(path)
}

pub fn load_observations(path: &Path) -> Result<Vec<Observation>> {
    load_jsonl(path)
}

pub fn load_plans(path: &Path) -> Result<Vec<PlanRecord>> {
    load_jsonl(path)
}

/// `t,x,y` rows of the runner path.
pub fn load_xy(path: &Path) -> Result<Vec<(f64, Point2)>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut lines = text.lines();
    if lines.next() != Some("t,x,y") {
        bail!("{}: expected header t,x,y", path.display());
    }
    lines
        .enumerate()
        .map(|(i, l)| {
            let v = parse_fields::<3>(l).with_context(|| format!("{} row {}", path.display(), i + 1))?;
            Ok((v[0], Point2::new(v[1], v[2])))
        })
        .collect()
}

fn parse_fields<const N: usize>(line: &str) -> Result<[f64; N]> {
    let parts: Vec<&str> = line.split(',').collect();
    if parts.len() != N {
        bail!("expected {N} fields, got {}", parts.len());
    }
    let mut out = [0.0; N];
    for (o, p) in out.iter_mut().zip(parts) {
        *o = p.trim().parse()?;
    }
    Ok(out)
}

/// One row of the track geometry CSV.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrackRow {
    pub lane: Lane,
    pub side: TrackSide,
    pub point: Point2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrackSide {
    Center,
    Left,
    Right,
}

pub fn load_track_csv(path: &Path) -> Result<Vec<TrackRow>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut lines = text.lines();
    if lines.next() != Some("lane,side,x,y") {
        bail!("{}: expected header lane,side,x,y", path.display());
    }
    lines
        .enumerate()
        .map(|(i, l)| {
            let row = || -> Result<TrackRow> {
                let parts: Vec<&str> = l.split(',').collect();
                if parts.len() != 4 {
                    bail!("expected 4 fields, got {}", parts.len());
                }
                let side = match parts[1] {
                    "center" => TrackSide::Center,
                    "left" => TrackSide::Left,
                    "right" => TrackSide::Right,
                    other => bail!("unknown side {other:?}"),
                };
                Ok(TrackRow {
                    lane: parts[0].parse()?,
                    side,
                    point: Point2::new(parts[2].parse()?, parts[3].parse()?),
                })
            };
            row().with_context(|| format!("{} row {}", path.display(), i + 1))
        })
        .collect()
}
