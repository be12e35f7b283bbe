use trackpilot_core::guidance::DirectionCommand;
use trackpilot_core::perception::Obstacle;
use trackpilot_core::simulator::{
    run_episode, run_episode_with, step_runner, track_point, EpisodeOptions, EpisodeStatus,
    EpisodeTrace, RunnerState, ScenarioSpec, TurnRates,
};
use trackpilot_core::{Point2, TrackLayout, TrackModel};

fn short(mut spec: ScenarioSpec, goal: f64) -> ScenarioSpec {
    spec.goal_distance = goal;
    spec
}

fn check_invariants(spec: &ScenarioSpec) -> EpisodeTrace {
    let (trace, metrics) = run_episode(spec).unwrap();
    let dt = spec.dt();
    for (i, w) in trace.frames.windows(2).enumerate() {
        assert!(w[1].t > w[0].t);
        assert!((w[1].t - w[0].t - dt).abs() < 1e-9, "frame {i}");
    }
    // One command per frame; every record carries exactly one token.
    assert_eq!(metrics.frames as usize, trace.frames.len());
    let jsonl = trace.frames_jsonl();
    assert_eq!(jsonl.lines().count(), trace.frames.len());
    for (line, f) in jsonl.lines().zip(&trace.frames) {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert_eq!(v["command"].as_str().unwrap(), f.command.token());
    }
    if metrics.elapsed > 0.0 {
        assert!((metrics.average_speed - metrics.distance / metrics.elapsed).abs() < 1e-9);
    }
    let grazed = trace.frames.iter().filter_map(|f| f.min_clearance).any(|c| c < 0.0)
        || trace.end.min_clearance.is_some_and(|c| c < 0.0);
    if grazed {
        assert_eq!(trace.status, EpisodeStatus::Collided);
    }
    trace
}

#[test]
fn step_runner_examples() {
    let track = TrackModel::generate(TrackLayout::default(), 60).unwrap();
    let rates = TurnRates::default();
    let p = track_point(track.layout(), 1, 0.0, 0.0);
    let state = RunnerState { position: p, heading: 0.0, speed: 1.34, current_lane: 1 };

    let fwd = step_runner(&state, DirectionCommand::Forward, 0.1, &rates, &track);
    assert!((fwd.position - (p + Point2::new(0.134, 0.0))).norm() < 1e-12);
    assert_eq!(fwd.heading, 0.0);

    let stop = step_runner(&state, DirectionCommand::Stop, 0.1, &rates, &track);
    assert_eq!(stop.position, p);

    let left = step_runner(&state, DirectionCommand::TurnLeft, 0.1, &rates, &track);
    assert!((left.heading - 45f64.to_radians() * 0.1).abs() < 1e-12);
    assert!((left.heading - 0.0785).abs() < 1e-4);
}

#[test]
fn same_spec_same_trace_bytes() {
    let spec = short(ScenarioSpec::switch_blocked_lane(), 70.0);
    let a = run_episode(&spec).unwrap().0;
    let b = run_episode(&spec).unwrap().0;
    assert_eq!(a.frames_jsonl(), b.frames_jsonl());
    assert_eq!(a.xy_csv(), b.xy_csv());
    let mut other = spec.clone();
    other.seed += 1;
    assert_ne!(run_episode(&other).unwrap().0.frames_jsonl(), a.frames_jsonl());
}

#[test]
fn noise_free_lap_stays_in_lane() {
    let mut spec = ScenarioSpec::safe_lap();
    spec.sensor.lateral_noise_sigma = 0.0;
    let trace = check_invariants(&spec);
    let (_, metrics) = run_episode(&spec).unwrap();
    assert_eq!(trace.status, EpisodeStatus::Completed);
    assert_eq!(metrics.boundary_violations, 0);
    assert_eq!(metrics.lane_departures, 0);
    assert!(trace.frames.iter().all(|f| f.lane == Some(1)));
}

#[test]
fn invisible_obstacle_is_a_collision() {
    let mut spec = short(ScenarioSpec::safe_lap(), 30.0);
    spec.obstacles = vec![Obstacle { position: track_point(&spec.layout, 1, 15.0, 0.0), radius: 0.3 }];
    spec.sensor.obstacle_dropout_prob = 1.0;
    let trace = check_invariants(&spec);
    assert_eq!(trace.status, EpisodeStatus::Collided);
    assert!(trace.end.min_clearance.unwrap() < 0.0);
}

#[test]
fn blocked_single_lane_track_stops() {
    let mut spec = short(ScenarioSpec::switch_blocked_lane(), 80.0);
    spec.layout.num_lanes = 1;
    let trace = check_invariants(&spec);
    assert_eq!(trace.status, EpisodeStatus::Stopped);
    let tail: Vec<_> = trace.frames.iter().rev().take(51).collect();
    assert!(tail.iter().all(|f| f.command == DirectionCommand::Stop));
}

#[test]
fn slow_runner_times_out() {
    let mut spec = short(ScenarioSpec::safe_lap(), 50.0);
    spec.time_budget_factor = 0.5;
    let trace = check_invariants(&spec);
    assert_eq!(trace.status, EpisodeStatus::Timeout);
    assert!(trace.end.t >= 0.5 * 50.0 / spec.speed - 1e-9);
}

#[test]
fn scenario_contracts_hold_across_seeds() {
    for seed in 0..4 {
        let mut detour = ScenarioSpec::detour_single_obstacle();
        detour.seed = seed;
        check_invariants(&detour);
        let (trace, m) = run_episode(&detour).unwrap();
        assert_eq!(trace.status, EpisodeStatus::Completed, "detour seed {seed}");
        assert!(m.min_clearance.unwrap() >= detour.planner.cost.d_safe, "detour seed {seed}");
        assert_eq!(m.final_lane, detour.start_lane);

        let mut switch = ScenarioSpec::switch_blocked_lane();
        switch.seed = seed;
        check_invariants(&switch);
        let (trace, m) = run_episode(&switch).unwrap();
        assert_eq!(trace.status, EpisodeStatus::Completed, "switch seed {seed}");
        assert_ne!(m.final_lane, switch.start_lane);
    }
}

#[test]
fn dumps_cover_every_frame() {
    let spec = short(ScenarioSpec::detour_single_obstacle(), 10.0);
    let out = run_episode_with(&spec, EpisodeOptions { record_observations: true, record_plans: true }).unwrap();
    assert_eq!(out.observations.len(), out.trace.frames.len());
    assert_eq!(out.plans.len(), out.trace.frames.len());
}
