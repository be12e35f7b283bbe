//! Fixed inputs shared by the criterion benches.

use trackpilot_core::perception::{observe, Observation, SensorConfig};
use trackpilot_core::simulator::{track_point, PlannerSettings, ScenarioSpec};
use trackpilot_core::{Point2, Pose, TrackLayout, TrackModel};

pub fn default_track() -> TrackModel {
    TrackModel::generate(TrackLayout::default(), 90).expect("default layout is valid")
}

/// One perception frame on the first bend of lane 1 with an obstacle 5 m ahead.
pub fn bend_frame(track: &TrackModel) -> (Observation, PlannerSettings) {
    let layout = track.layout();
    let s = layout.straight_length / 2.0 + 20.0;
    let obstacle = trackpilot_core::perception::Obstacle {
        position: track_point(layout, 1, s + 5.0, 0.2),
        radius: 0.2,
    };
    let pose = Pose {
        position: track.world_point(1, s, 0.0),
        heading: track.heading_at(1, s),
    };
    let obs = observe(track, &[obstacle], pose, 1, &SensorConfig::default(), 7, 0.0);
    (obs, PlannerSettings::default())
}

/// Quarter-lap of lane-1 centerline vertices.
pub fn centerline_points(track: &TrackModel) -> Vec<Point2> {
    let pts = &track.lane(1).expect("lane 1").centerline_points;
    pts[..pts.len() / 4].to_vec()
}

/// The bundled detour scenario, shortened to keep one iteration fast.
pub fn short_detour() -> ScenarioSpec {
    let mut spec = ScenarioSpec::detour_single_obstacle();
    spec.goal_distance = 60.0;
    spec
}
