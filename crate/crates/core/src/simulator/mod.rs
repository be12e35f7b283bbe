//! Closed-loop episodes: perceive, plan, command, move, repeat.

mod metrics;
mod scenario;

pub use metrics::{compute_metrics, Metrics};
pub use scenario::{
    track_point, ObstacleFile, PlannerSettings, ScenarioFile, ScenarioKind, ScenarioSpec,
    TrackObstacle, TurnRates, WorldObstacle, DEFAULT_POINTS_PER_ARC,
};

use crate::error::{Error, Result};
use crate::geometry::{wrap_angle, Point2, Pose};
use crate::guidance::{command_from_yaw, DirectionCommand};
use crate::perception::{observe, reference_from_boundaries, CorridorSpan, Observation};
use crate::planner::{build_lattice, plan, Lattice, PlanResult};
use crate::track::{Lane, TrackModel};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunnerState {
    pub position: Point2,
    pub heading: f64,
    pub speed: f64,
    pub current_lane: Lane,
}

impl RunnerState {
    pub fn pose(&self) -> Pose {
        Pose {
            position: self.position,
            heading: self.heading,
        }
    }
}

/// Heading rate the runner applies while following `command`.
pub fn turn_rate(command: DirectionCommand, rates: &TurnRates) -> f64 {
    match command {
        DirectionCommand::Forward | DirectionCommand::Stop => 0.0,
        DirectionCommand::LeftForward => rates.slight,
        DirectionCommand::RightForward => -rates.slight,
        DirectionCommand::TurnLeft => rates.hard,
        DirectionCommand::TurnRight => -rates.hard,
    }
}

/// Advances the runner by `dt`: turn first, then move along the new heading.
/// `Stop` holds position for the step. The lane is refreshed from `track`
/// and left unchanged while the runner is off the track.
pub fn step_runner(
    state: &RunnerState,
    command: DirectionCommand,
    dt: f64,
    rates: &TurnRates,
    track: &TrackModel,
) -> RunnerState {
    let heading = wrap_angle(state.heading + turn_rate(command, rates) * dt);
    let speed = if command == DirectionCommand::Stop {
        0.0
    } else {
        state.speed
    };
    let position = state.position + Point2::from_polar(speed * dt, heading);
    RunnerState {
        position,
        heading,
        speed: state.speed,
        current_lane: track.lane_at(position).unwrap_or(state.current_lane),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EpisodeStatus {
    Completed,
    Collided,
    Stopped,
    Timeout,
}

/// One planning frame as written to the trace file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameRecord {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub heading: f64,
    /// Lane under the runner; `None` when off the track.
    pub lane: Option<Lane>,
    pub command: DirectionCommand,
    /// Planned yaw, absent when the frame produced no plan.
    pub yaw: Option<f64>,
    /// Clearance to the nearest obstacle footprint; absent without obstacles.
    pub min_clearance: Option<f64>,
    /// Lanes covered by the corridor the command was planned in.
    pub corridor: Vec<Lane>,
    /// True when the frame reused the previous command after a perception or planning failure.
    pub degraded: bool,
}

/// Runner state after the last step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EndState {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub heading: f64,
    pub lane: Option<Lane>,
    pub last_lane: Lane,
    pub min_clearance: Option<f64>,
    /// Distance progressed along the start lane.
    pub progress: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeTrace {
    pub frames: Vec<FrameRecord>,
    pub end: EndState,
    pub status: EpisodeStatus,
}

impl EpisodeTrace {
    /// JSON lines, one frame per line.
    pub fn frames_jsonl(&self) -> String {
        let mut out = String::new();
        for f in &self.frames {
            out.push_str(&serde_json::to_string(f).expect("serializable"));
            out.push('\n');
        }
        out
    }

    pub fn parse_frames_jsonl(text: &str) -> Result<Vec<FrameRecord>> {
        text.lines()
            .filter(|l| !l.trim().is_empty())
            .map(|l| serde_json::from_str(l).map_err(|e| Error::InvalidInput(format!("trace: {e}"))))
            .collect()
    }

    /// `t,x,y` rows for plotting, end state included.
    pub fn xy_csv(&self) -> String {
        let mut out = String::from("t,x,y\n");
        for f in &self.frames {
            out.push_str(&format!("{:.3},{:.6},{:.6}\n", f.t, f.x, f.y));
        }
        out.push_str(&format!("{:.3},{:.6},{:.6}\n", self.end.t, self.end.x, self.end.y));
        out
    }
}

/// What one frame of planning decided.
#[derive(Debug, Clone)]
pub struct FrameDecision {
    pub command: DirectionCommand,
    pub span: CorridorSpan,
    pub plan: Option<PlanResult>,
    /// Failure that forced a fallback, if any.
    pub error: Option<Error>,
}

fn plan_span(obs: &Observation, span: CorridorSpan, settings: &PlannerSettings) -> Result<PlanResult> {
    let (left, right) = obs.boundaries(span);
    let corridor = reference_from_boundaries(left, right)?;
    let lattice = build_lattice(&corridor.reference, &corridor.half_width, &settings.lattice)?;
    plan(Point2::ORIGIN, &lattice, &obs.obstacles, &settings.cost)
}

/// Plans inside the current lane; if some row of that lane is fully blocked,
/// retries in corridors widened by one neighboring lane and keeps the cheaper
/// feasible one. With nothing feasible the command is `Stop`. Any other
/// failure repeats `previous`.
pub fn plan_frame(
    obs: &Observation,
    settings: &PlannerSettings,
    previous: DirectionCommand,
) -> FrameDecision {
    let fallback = |span, error| FrameDecision {
        command: previous,
        span,
        plan: None,
        error: Some(error),
    };
    let from_plan = |span, plan: PlanResult| FrameDecision {
        command: command_from_yaw(plan.command_yaw, &settings.sectors),
        span,
        plan: Some(plan),
        error: None,
    };

    match plan_span(obs, CorridorSpan::Lane, settings) {
        Ok(p) => from_plan(CorridorSpan::Lane, p),
        Err(Error::NoFeasiblePath) => {
            let mut best: Option<(CorridorSpan, PlanResult)> = None;
            for span in [CorridorSpan::WithLeft, CorridorSpan::WithRight] {
                let (left, right) = obs.boundaries(span);
                if left.len() < 2 || right.len() < 2 {
                    continue;
                }
                if let Ok(p) = plan_span(obs, span, settings) {
                    if best.as_ref().is_none_or(|(_, b)| p.total_cost < b.total_cost) {
                        best = Some((span, p));
                    }
                }
            }
            match best {
                Some((span, p)) => from_plan(span, p),
                None => FrameDecision {
                    command: DirectionCommand::Stop,
                    span: CorridorSpan::Lane,
                    plan: None,
                    error: Some(Error::NoFeasiblePath),
                },
            }
        }
        Err(e) => fallback(CorridorSpan::Lane, e),
    }
}

fn span_lanes(span: CorridorSpan, lane: Lane) -> Vec<Lane> {
    match span {
        CorridorSpan::Lane => vec![lane],
        CorridorSpan::WithLeft => vec![lane - 1, lane],
        CorridorSpan::WithRight => vec![lane, lane + 1],
    }
}

/// Plan summary kept for the optional plan dump.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanRecord {
    pub t: f64,
    pub command: DirectionCommand,
    pub span: CorridorSpan,
    pub lattice: Option<Lattice>,
    pub waypoints: Vec<Point2>,
    pub command_yaw: Option<f64>,
    pub total_cost: Option<f64>,
    pub error: Option<String>,
}

impl PlanRecord {
    pub fn new(t: f64, decision: &FrameDecision) -> Self {
        let plan = decision.plan.as_ref();
        Self {
            t,
            command: decision.command,
            span: decision.span,
            lattice: plan.map(|p| p.lattice.clone()),
            waypoints: plan.map(|p| p.waypoints.clone()).unwrap_or_default(),
            command_yaw: plan.map(|p| p.command_yaw),
            total_cost: plan.map(|p| p.total_cost),
            error: decision.error.as_ref().map(|e| e.to_string()),
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct EpisodeOptions {
    pub record_observations: bool,
    pub record_plans: bool,
}

#[derive(Debug, Clone)]
pub struct EpisodeOutput {
    pub trace: EpisodeTrace,
    pub metrics: Metrics,
    pub observations: Vec<Observation>,
    pub plans: Vec<PlanRecord>,
}

fn frame_seed(seed: u64, frame: u64) -> u64 {
    seed ^ frame.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

fn min_clearance(obstacles: &[crate::perception::Obstacle], p: Point2) -> Option<f64> {
    obstacles.iter().map(|o| o.clearance(p)).min_by(f64::total_cmp)
}

/// Initial runner state for `spec` on `track`.
pub fn start_state(spec: &ScenarioSpec, track: &TrackModel) -> RunnerState {
    let position = track.world_point(spec.start_lane, spec.start_s, spec.start_offset);
    RunnerState {
        position,
        heading: track.heading_at(spec.start_lane, spec.start_s),
        speed: spec.speed,
        current_lane: spec.start_lane,
    }
}

pub fn run_episode(spec: &ScenarioSpec) -> Result<(EpisodeTrace, Metrics)> {
    let out = run_episode_with(spec, EpisodeOptions::default())?;
    Ok((out.trace, out.metrics))
}

/// Runs one episode at the planning rate until the goal is reached, the
/// runner hits an obstacle, a stop lasts longer than `stop_timeout`, or the
/// time budget runs out.
pub fn run_episode_with(spec: &ScenarioSpec, options: EpisodeOptions) -> Result<EpisodeOutput> {
    spec.validate()?;
    let track = TrackModel::generate(spec.layout, spec.points_per_arc)?;
    let dt = spec.dt();
    let budget = spec.time_budget_factor * spec.goal_distance / spec.speed.max(1e-9);
    let progress_ref = track.stadium(spec.start_lane);
    let lap = progress_ref.length();

    let mut runner = start_state(spec, &track);
    let mut last_s = progress_ref.locate(runner.position).s;
    let mut progress = 0.0;
    let mut previous = DirectionCommand::Forward;
    let mut previous_corridor = vec![runner.current_lane];
    let mut stopped_for = 0.0;
    let mut frames = Vec::new();
    let mut observations = Vec::new();
    let mut plans = Vec::new();
    let mut frame: u64 = 0;

    let status = loop {
        let t = frame as f64 * dt;
        let clearance = min_clearance(&spec.obstacles, runner.position);
        if clearance.is_some_and(|c| c < 0.0) {
            break EpisodeStatus::Collided;
        }
        if progress >= spec.goal_distance {
            break EpisodeStatus::Completed;
        }
        if stopped_for > spec.stop_timeout {
            break EpisodeStatus::Stopped;
        }
        if t >= budget {
            break EpisodeStatus::Timeout;
        }

        let obs = observe(
            &track,
            &spec.obstacles,
            runner.pose(),
            runner.current_lane,
            &spec.sensor,
            frame_seed(spec.seed, frame),
            t,
        );
        let decision = plan_frame(&obs, &spec.planner, previous);
        let degraded = decision.plan.is_none() && decision.command != DirectionCommand::Stop;
        let corridor = if degraded {
            previous_corridor.clone()
        } else {
            span_lanes(decision.span, runner.current_lane)
        };

        frames.push(FrameRecord {
            t,
            x: runner.position.x,
            y: runner.position.y,
            heading: runner.heading,
            lane: track.lane_at(runner.position),
            command: decision.command,
            yaw: decision.plan.as_ref().map(|p| p.command_yaw),
            min_clearance: clearance,
            corridor: corridor.clone(),
            degraded,
        });
        if options.record_plans {
            plans.push(PlanRecord::new(t, &decision));
        }
        if options.record_observations {
            observations.push(obs);
        }

        runner = step_runner(&runner, decision.command, dt, &spec.turn_rates, &track);
        if decision.command == DirectionCommand::Stop {
            stopped_for += dt;
        } else {
            stopped_for = 0.0;
        }
        let s = progress_ref.locate(runner.position).s;
        let mut ds = s - last_s;
        if ds > lap / 2.0 {
            ds -= lap;
        } else if ds < -lap / 2.0 {
            ds += lap;
        }
        progress += ds;
        last_s = s;
        previous = decision.command;
        previous_corridor = corridor;
        frame += 1;
    };

    let end = EndState {
        t: frame as f64 * dt,
        x: runner.position.x,
        y: runner.position.y,
        heading: runner.heading,
        lane: track.lane_at(runner.position),
        last_lane: runner.current_lane,
        min_clearance: min_clearance(&spec.obstacles, runner.position),
        progress,
    };
    let trace = EpisodeTrace {
        frames,
        end,
        status,
    };
    let metrics = compute_metrics(&trace, spec)?;
    Ok(EpisodeOutput {
        trace,
        metrics,
        observations,
        plans,
    })
}
