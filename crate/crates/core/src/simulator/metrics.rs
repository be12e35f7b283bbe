use super::{EpisodeTrace, ScenarioSpec};
use crate::error::{invalid, Result};
use crate::track::Lane;
use serde::{Deserialize, Serialize};

/// Episode summary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    /// Path length actually run.
    pub distance: f64,
    pub elapsed: f64,
    pub average_speed: f64,
    /// Smallest clearance to any obstacle footprint; absent without obstacles.
    pub min_clearance: Option<f64>,
    /// Times the lane under the runner changed (leaving the track counts).
    pub lane_departures: u32,
    /// Samples where the runner was outside the corridor it was being guided in.
    pub boundary_violations: u32,
    pub final_lane: Lane,
    pub frames: u32,
    pub degraded_frames: u32,
}

pub fn compute_metrics(trace: &EpisodeTrace, _spec: &ScenarioSpec) -> Result<Metrics> {
    let Some(first) = trace.frames.first() else {
        return Err(invalid("cannot summarize an empty trace"));
    };
    let end = &trace.end;

    let positions: Vec<(f64, f64)> = trace
        .frames
        .iter()
        .map(|f| (f.x, f.y))
        .chain(std::iter::once((end.x, end.y)))
        .collect();
    let distance: f64 = positions
        .windows(2)
        .map(|w| (w[1].0 - w[0].0).hypot(w[1].1 - w[0].1))
        .sum();
    let elapsed = end.t - first.t;
    let average_speed = if elapsed > 0.0 { distance / elapsed } else { 0.0 };

    let min_clearance = trace
        .frames
        .iter()
        .filter_map(|f| f.min_clearance)
        .chain(end.min_clearance)
        .min_by(f64::total_cmp);

    let lanes: Vec<Option<Lane>> = trace
        .frames
        .iter()
        .map(|f| f.lane)
        .chain(std::iter::once(end.lane))
        .collect();
    let lane_departures = lanes.windows(2).filter(|w| w[0] != w[1]).count() as u32;

    let mut boundary_violations = 0;
    let mut guided_by = first.corridor.clone();
    for (i, lane) in lanes.iter().enumerate() {
        let inside = lane.is_some_and(|l| guided_by.contains(&l));
        if !inside {
            boundary_violations += 1;
        }
        if let Some(f) = trace.frames.get(i) {
            guided_by = f.corridor.clone();
        }
    }

    Ok(Metrics {
        distance,
        elapsed,
        average_speed,
        min_clearance,
        lane_departures,
        boundary_violations,
        final_lane: end.lane.unwrap_or(end.last_lane),
        frames: trace.frames.len() as u32,
        degraded_frames: trace.frames.iter().filter(|f| f.degraded).count() as u32,
    })
}
