//! `trackpilot plan-frame`: perceive and plan a single frame.

use crate::files;
use anyhow::{anyhow, bail, Context, Result};
use serde::{Deserialize, Serialize};
use std::fs;
use std::path::Path;
use trackpilot_core::guidance::{emit, DirectionCommand};
use trackpilot_core::perception::{observe, reference_from_observation, CorridorSpan, Observation};
use trackpilot_core::planner::{build_lattice, cost_obs, Lattice};
use trackpilot_core::simulator::{plan_frame, ObstacleFile, ScenarioSpec};
use trackpilot_core::{Lane, Point2, Pose, TrackModel};

/// Runner pose, either relative to a lane or in world coordinates.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PoseFile {
    OnTrack(TrackPose),
    World(WorldPose),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrackPose {
    pub lane: Lane,
    pub s_m: f64,
    #[serde(default)]
    pub offset_m: f64,
    /// Heading relative to the lane direction, positive to the left.
    #[serde(default)]
    pub heading_offset_deg: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WorldPose {
    pub x_m: f64,
    pub y_m: f64,
    pub heading_deg: f64,
}

/// Input for one frame. Obstacles replace the scenario's when given.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrameFile {
    pub pose: PoseFile,
    /// Lane the runner is guided in; defaults to the pose lane or the lane
    /// under the runner.
    #[serde(default)]
    pub lane: Option<Lane>,
    #[serde(default)]
    pub obstacles: Option<Vec<ObstacleFile>>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub previous_command: Option<DirectionCommand>,
    #[serde(default)]
    pub t_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanSummary {
    pub waypoints: Vec<Point2>,
    pub command_yaw: f64,
    pub total_cost: f64,
    pub columns: Vec<usize>,
}

/// Everything `plan-frame` prints.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameReport {
    pub command: DirectionCommand,
    pub token: String,
    pub lane: Lane,
    pub pose: Pose,
    pub span: CorridorSpan,
    pub observation: Observation,
    /// Solved lattice, or the lane lattice with obstacle costs when no plan exists.
    pub lattice: Option<Lattice>,
    pub plan: Option<PlanSummary>,
    pub error: Option<String>,
}

pub fn load_frame(path: &Path) -> Result<FrameFile> {
    if !path.is_file() {
        bail!("frame file not found: {}", path.display());
    }
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing frame {}", path.display()))
}

pub fn plan_single_frame(spec: &ScenarioSpec, frame: &FrameFile) -> Result<FrameReport> {
    let track = TrackModel::generate(spec.layout, spec.points_per_arc)?;
    let pose = match &frame.pose {
        PoseFile::OnTrack(p) => {
            if !track.has_lane(p.lane) {
                bail!("pose.lane: {} is not a lane of this track", p.lane);
            }
            Pose {
                position: track.world_point(p.lane, p.s_m, p.offset_m),
                heading: track.heading_at(p.lane, p.s_m) + p.heading_offset_deg.to_radians(),
            }
        }
        PoseFile::World(p) => Pose {
            position: Point2::new(p.x_m, p.y_m),
            heading: p.heading_deg.to_radians(),
        },
    };
    let lane = match (&frame.lane, &frame.pose) {
        (Some(l), _) => *l,
        (None, PoseFile::OnTrack(p)) => p.lane,
        (None, PoseFile::World(_)) => track
            .lane_at(pose.position)
            .ok_or_else(|| anyhow!("pose is off the track; give \"lane\" explicitly"))?,
    };
    if !track.has_lane(lane) {
        bail!("lane: {lane} is not a lane of this track");
    }
    let obstacles = match &frame.obstacles {
        Some(list) => list
            .iter()
            .enumerate()
            .map(|(i, o)| o.resolve(&spec.layout, &format!("obstacles[{i}]")))
            .collect::<Result<Vec<_>, _>>()?,
        None => spec.obstacles.clone(),
    };
    let seed = frame.seed.unwrap_or(spec.seed);
    let obs = observe(&track, &obstacles, pose, lane, &spec.sensor, seed, frame.t_s);
    let previous = frame.previous_command.unwrap_or(DirectionCommand::Forward);
    let decision = plan_frame(&obs, &spec.planner, previous);

    let (lattice, plan) = match &decision.plan {
        Some(p) => (
            Some(p.lattice.clone()),
            Some(PlanSummary {
                waypoints: p.waypoints.clone(),
                command_yaw: p.command_yaw,
                total_cost: p.total_cost,
                columns: p.columns.clone(),
            }),
        ),
        None => (unsolved_lattice(&obs, spec), None),
    };
    Ok(FrameReport {
        command: decision.command,
        token: emit(decision.command).to_string(),
        lane,
        pose,
        span: decision.span,
        observation: obs,
        lattice,
        plan,
        error: decision.error.map(|e| e.to_string()),
    })
}

/// Lane lattice with obstacle costs, for inspecting a frame that produced no plan.
fn unsolved_lattice(obs: &Observation, spec: &ScenarioSpec) -> Option<Lattice> {
    let corridor = reference_from_observation(obs).ok()?;
    let mut lattice =
        build_lattice(&corridor.reference, &corridor.half_width, &spec.planner.lattice).ok()?;
    for node in lattice.rows.iter_mut().flatten() {
        node.obstacle_cost = cost_obs(node.cartesian, &obs.obstacles, &spec.planner.cost);
    }
    Some(lattice)
}

pub fn cmd_plan_frame(scenario: &Path, frame: &Path) -> Result<i32> {
    let spec = files::load_scenario(scenario)?;
    let frame = load_frame(frame)?;
    let report = plan_single_frame(&spec, &frame)?;
    crate::print_json(&report)?;
    Ok(0)
}
