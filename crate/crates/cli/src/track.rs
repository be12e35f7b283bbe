//! `trackpilot track`: export stadium geometry.

use crate::files;
use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use trackpilot_core::{Lane, TrackLayout, TrackModel};

#[derive(Debug, Clone)]
pub struct TrackArgs {
    pub layout: TrackLayout,
    pub points_per_arc: usize,
    pub out: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LaneSummary {
    pub lane: Lane,
    /// Arc length of the fitted centerline spline.
    pub centerline_length_m: f64,
    /// Exact stadium perimeter of the lane centerline.
    pub nominal_length_m: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrackSummary {
    pub straight_length_m: f64,
    pub inner_radius_m: f64,
    pub lane_width_m: f64,
    pub num_lanes: u32,
    pub points_per_arc: usize,
    pub lanes: Vec<LaneSummary>,
}

pub fn summarize(track: &TrackModel, points_per_arc: usize) -> TrackSummary {
    let l = track.layout();
    TrackSummary {
        straight_length_m: l.straight_length,
        inner_radius_m: l.inner_radius,
        lane_width_m: l.lane_width,
        num_lanes: l.num_lanes,
        points_per_arc,
        lanes: track
            .lanes()
            .iter()
            .map(|g| LaneSummary {
                lane: g.lane,
                centerline_length_m: g.centerline.total_length(),
                nominal_length_m: l.lane_length(g.lane),
            })
            .collect(),
    }
}

pub fn load_summary(path: &Path) -> Result<TrackSummary> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

pub fn cmd_track(args: &TrackArgs) -> Result<i32> {
    let l = &args.layout;
    for (name, v) in [
        ("--straight", l.straight_length),
        ("--inner-radius", l.inner_radius),
        ("--lane-width", l.lane_width),
    ] {
        if !(v > 0.0 && v.is_finite()) {
            bail!("{name} must be positive, got {v}");
        }
    }
    if l.num_lanes == 0 || args.points_per_arc == 0 {
        bail!("--lanes and --points-per-arc must be positive");
    }
    let track = TrackModel::generate(*l, args.points_per_arc)?;
    fs::create_dir_all(&args.out).with_context(|| format!("creating {}", args.out.display()))?;
    let csv = args.out.join(files::TRACK_CSV);
    let file = File::create(&csv).with_context(|| format!("writing {}", csv.display()))?;
    track.write_csv(BufWriter::new(file))?;
    let summary = summarize(&track, args.points_per_arc);
    let path = args.out.join(files::TRACK_SUMMARY);
    fs::write(&path, serde_json::to_string_pretty(&summary)?)
        .with_context(|| format!("writing {}", path.display()))?;
    crate::print_json(&summary)?;
    Ok(0)
}
