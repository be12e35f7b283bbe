//! Scenario definitions and their JSON file format.
//!
//! Files spell units out in field names (`speed_mps`, `d_safe_m`, ...) and
//! unknown fields are rejected.

use crate::error::{invalid, Result};
use crate::geometry::Point2;
use crate::guidance::SectorConfig;
use crate::perception::{Obstacle, SensorConfig};
use crate::planner::{CostParams, LatticeConfig, YawMode};
use crate::track::{Lane, Stadium, TrackLayout};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioKind {
    /// No obstacle, or none that matters.
    Safe,
    /// Go around an obstacle and return to the lane.
    Detour,
    /// Change lanes to get past a blockage.
    Switch,
}

/// Runner heading rates for the non-straight commands (rad/s).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TurnRates {
    pub slight: f64,
    pub hard: f64,
}

impl Default for TurnRates {
    fn default() -> Self {
        Self {
            slight: 15f64.to_radians(),
            hard: 45f64.to_radians(),
        }
    }
}

/// Planner-side settings used every frame.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PlannerSettings {
    pub lattice: LatticeConfig,
    pub cost: CostParams,
    pub sectors: SectorConfig,
}

impl PlannerSettings {
    pub fn validate(&self) -> Result<()> {
        self.lattice.validate()?;
        self.cost.validate()?;
        self.sectors.validate()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioSpec {
    pub name: String,
    pub kind: ScenarioKind,
    pub layout: TrackLayout,
    pub points_per_arc: usize,
    pub start_lane: Lane,
    /// Start station along the start lane centerline.
    pub start_s: f64,
    /// Start lateral offset from the start lane centerline (left positive).
    pub start_offset: f64,
    pub goal_distance: f64,
    pub speed: f64,
    pub obstacles: Vec<Obstacle>,
    pub sensor: SensorConfig,
    pub planner: PlannerSettings,
    pub turn_rates: TurnRates,
    pub planning_rate: f64,
    pub seed: u64,
    /// Consecutive stop time after which the episode ends as stopped.
    pub stop_timeout: f64,
    /// Episode time budget as a multiple of `goal_distance / speed`.
    pub time_budget_factor: f64,
}

impl ScenarioSpec {
    /// Defaults everywhere: lane 1 from the seam, one lap at 1.34 m/s.
    pub fn safe_lap() -> Self {
        Self {
            name: "safe_400m".into(),
            kind: ScenarioKind::Safe,
            layout: TrackLayout::default(),
            points_per_arc: DEFAULT_POINTS_PER_ARC,
            start_lane: 1,
            start_s: 0.0,
            start_offset: 0.0,
            goal_distance: 400.0,
            speed: 1.34,
            obstacles: Vec::new(),
            sensor: SensorConfig::default(),
            planner: PlannerSettings::default(),
            turn_rates: TurnRates::default(),
            planning_rate: 10.0,
            seed: 0,
            stop_timeout: 5.0,
            time_budget_factor: 3.0,
        }
    }

    /// One small obstacle inside lane 1, 50 m ahead, leaving room to pass
    /// on the right without leaving the lane.
    pub fn detour_single_obstacle() -> Self {
        let mut spec = Self::safe_lap();
        spec.name = "detour_single_obstacle".into();
        spec.kind = ScenarioKind::Detour;
        spec.goal_distance = 80.0;
        spec.obstacles = vec![Obstacle {
            position: track_point(&spec.layout, 1, 50.0, 0.3),
            radius: 0.1,
        }];
        spec
    }

    /// A row of three obstacles across lane 1, 50 m ahead; every lattice
    /// column in that lane is blocked.
    pub fn switch_blocked_lane() -> Self {
        let mut spec = Self::safe_lap();
        spec.name = "switch_blocked_lane".into();
        spec.kind = ScenarioKind::Switch;
        spec.goal_distance = 80.0;
        spec.obstacles = [-0.3, 0.0, 0.3]
            .iter()
            .map(|&d| Obstacle {
                position: track_point(&spec.layout, 1, 50.0, d),
                radius: 0.2,
            })
            .collect();
        spec
    }

    pub fn validate(&self) -> Result<()> {
        self.layout.validate()?;
        if !(1..=self.layout.num_lanes).contains(&self.start_lane) {
            return Err(invalid(format!(
                "start_lane: {} is not a lane of a {}-lane track",
                self.start_lane, self.layout.num_lanes
            )));
        }
        if !(self.goal_distance > 0.0) {
            return Err(invalid("goal_distance_m: must be positive"));
        }
        if !(self.speed >= 0.0 && self.speed.is_finite()) {
            return Err(invalid("speed_mps: must be non-negative"));
        }
        if !(self.planning_rate > 0.0 && self.planning_rate.is_finite()) {
            return Err(invalid("planning_rate_hz: must be positive"));
        }
        if self.points_per_arc == 0 {
            return Err(invalid("track.points_per_arc: must be positive"));
        }
        if let Some(o) = self.obstacles.iter().find(|o| !(o.radius > 0.0)) {
            return Err(invalid(format!("obstacles: radius must be positive, got {}", o.radius)));
        }
        if !(self.stop_timeout > 0.0 && self.time_budget_factor > 0.0) {
            return Err(invalid("stop_timeout_s and time_budget_factor must be positive"));
        }
        self.sensor.validate()?;
        self.planner.validate()
    }

    pub fn dt(&self) -> f64 {
        1.0 / self.planning_rate
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: ScenarioFile =
            serde_json::from_str(text).map_err(|e| invalid(format!("scenario: {e}")))?;
        file.into_spec()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&ScenarioFile::from_spec(self)).expect("serializable")
    }
}

pub const DEFAULT_POINTS_PER_ARC: usize = 90;

// ---- file format ----

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub name: String,
    pub kind: ScenarioKind,
    #[serde(default)]
    pub track: TrackFile,
    #[serde(default = "one")]
    pub start_lane: Lane,
    #[serde(default)]
    pub start_s_m: f64,
    #[serde(default)]
    pub start_offset_m: f64,
    pub goal_distance_m: f64,
    pub speed_mps: f64,
    #[serde(default)]
    pub obstacles: Vec<ObstacleFile>,
    #[serde(default)]
    pub sensor: SensorFile,
    #[serde(default)]
    pub lattice: LatticeFile,
    #[serde(default)]
    pub cost: CostFile,
    #[serde(default)]
    pub sectors: SectorFile,
    #[serde(default)]
    pub turn_rates: TurnRateFile,
    #[serde(default = "ten")]
    pub planning_rate_hz: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "five")]
    pub stop_timeout_s: f64,
    #[serde(default = "three")]
    pub time_budget_factor: f64,
}

fn one() -> Lane {
    1
}
fn three() -> f64 {
    3.0
}
fn five() -> f64 {
    5.0
}
fn ten() -> f64 {
    10.0
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrackFile {
    pub straight_length_m: f64,
    pub inner_radius_m: f64,
    pub lane_width_m: f64,
    pub num_lanes: u32,
    pub points_per_arc: usize,
}

impl Default for TrackFile {
    fn default() -> Self {
        let l = TrackLayout::default();
        Self {
            straight_length_m: l.straight_length,
            inner_radius_m: l.inner_radius,
            lane_width_m: l.lane_width,
            num_lanes: l.num_lanes,
            points_per_arc: DEFAULT_POINTS_PER_ARC,
        }
    }
}

/// Obstacle either in world coordinates or placed relative to a lane.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ObstacleFile {
    World(WorldObstacle),
    OnTrack(TrackObstacle),
}

impl ObstacleFile {
    /// World-frame obstacle on `layout`; `field` names the entry in errors.
    pub fn resolve(&self, layout: &TrackLayout, field: &str) -> Result<Obstacle> {
        match self {
            ObstacleFile::World(w) => Ok(Obstacle::new(w.x_m, w.y_m, w.radius_m)),
            ObstacleFile::OnTrack(t) => {
                if !(1..=layout.num_lanes).contains(&t.lane) {
                    return Err(invalid(format!(
                        "{field}.lane: {} is not a lane of this track",
                        t.lane
                    )));
                }
                Ok(Obstacle {
                    position: track_point(layout, t.lane, t.s_m, t.offset_m),
                    radius: t.radius_m,
                })
            }
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WorldObstacle {
    pub x_m: f64,
    pub y_m: f64,
    pub radius_m: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrackObstacle {
    pub lane: Lane,
    /// Station along that lane's centerline.
    pub s_m: f64,
    /// Lateral offset from that lane's centerline, left positive.
    #[serde(default)]
    pub offset_m: f64,
    pub radius_m: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SensorFile {
    pub horizontal_fov_deg: f64,
    pub max_range_m: f64,
    pub lateral_noise_sigma_m: f64,
    pub obstacle_dropout_prob: f64,
    pub occlusion_enabled: bool,
}

impl Default for SensorFile {
    fn default() -> Self {
        let s = SensorConfig::default();
        Self {
            horizontal_fov_deg: s.horizontal_fov.to_degrees(),
            max_range_m: s.max_range,
            lateral_noise_sigma_m: s.lateral_noise_sigma,
            obstacle_dropout_prob: s.obstacle_dropout_prob,
            occlusion_enabled: s.occlusion_enabled,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LatticeFile {
    pub horizon_m: f64,
    pub row_spacing_m: f64,
    pub lateral_count: usize,
    pub lateral_margin_m: f64,
    pub lookahead_m: f64,
    pub yaw_mode: YawMode,
}

impl Default for LatticeFile {
    fn default() -> Self {
        let l = LatticeConfig::default();
        Self {
            horizon_m: l.horizon,
            row_spacing_m: l.row_spacing,
            lateral_count: l.lateral_count,
            lateral_margin_m: l.lateral_margin,
            lookahead_m: l.lookahead,
            yaw_mode: l.yaw_mode,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CostFile {
    pub k: f64,
    pub d_safe_m: f64,
    pub terminal_weight_per_m: f64,
}

impl Default for CostFile {
    fn default() -> Self {
        let c = CostParams::default();
        Self {
            k: c.k,
            d_safe_m: c.d_safe,
            terminal_weight_per_m: c.terminal_weight,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SectorFile {
    pub forward_half_angle_deg: f64,
    pub slight_turn_limit_deg: f64,
}

impl Default for SectorFile {
    fn default() -> Self {
        let s = SectorConfig::default();
        Self {
            forward_half_angle_deg: s.forward_half_angle.to_degrees(),
            slight_turn_limit_deg: s.slight_turn_limit.to_degrees(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TurnRateFile {
    pub slight_dps: f64,
    pub hard_dps: f64,
}

impl Default for TurnRateFile {
    fn default() -> Self {
        let t = TurnRates::default();
        Self {
            slight_dps: t.slight.to_degrees(),
            hard_dps: t.hard.to_degrees(),
        }
    }
}

impl ScenarioFile {
    pub fn into_spec(self) -> Result<ScenarioSpec> {
        let layout = TrackLayout {
            straight_length: self.track.straight_length_m,
            inner_radius: self.track.inner_radius_m,
            lane_width: self.track.lane_width_m,
            num_lanes: self.track.num_lanes,
        };
        let obstacles = self
            .obstacles
            .iter()
            .enumerate()
            .map(|(i, o)| o.resolve(&layout, &format!("obstacles[{i}]")))
            .collect::<Result<Vec<_>>>()?;
        let spec = ScenarioSpec {
            name: self.name,
            kind: self.kind,
            layout,
            points_per_arc: self.track.points_per_arc,
            start_lane: self.start_lane,
            start_s: self.start_s_m,
            start_offset: self.start_offset_m,
            goal_distance: self.goal_distance_m,
            speed: self.speed_mps,
            obstacles,
            sensor: SensorConfig {
                horizontal_fov: self.sensor.horizontal_fov_deg.to_radians(),
                max_range: self.sensor.max_range_m,
                lateral_noise_sigma: self.sensor.lateral_noise_sigma_m,
                obstacle_dropout_prob: self.sensor.obstacle_dropout_prob,
                occlusion_enabled: self.sensor.occlusion_enabled,
            },
            planner: PlannerSettings {
                lattice: LatticeConfig {
                    horizon: self.lattice.horizon_m,
                    row_spacing: self.lattice.row_spacing_m,
                    lateral_count: self.lattice.lateral_count,
                    lateral_margin: self.lattice.lateral_margin_m,
                    lookahead: self.lattice.lookahead_m,
                    yaw_mode: self.lattice.yaw_mode,
                },
                cost: CostParams {
                    k: self.cost.k,
                    d_safe: self.cost.d_safe_m,
                    terminal_weight: self.cost.terminal_weight_per_m,
                },
                sectors: SectorConfig {
                    forward_half_angle: self.sectors.forward_half_angle_deg.to_radians(),
                    slight_turn_limit: self.sectors.slight_turn_limit_deg.to_radians(),
                },
            },
            turn_rates: TurnRates {
                slight: self.turn_rates.slight_dps.to_radians(),
                hard: self.turn_rates.hard_dps.to_radians(),
            },
            planning_rate: self.planning_rate_hz,
            seed: self.seed,
            stop_timeout: self.stop_timeout_s,
            time_budget_factor: self.time_budget_factor,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// File form of `spec`; obstacles are written in world coordinates.
    pub fn from_spec(spec: &ScenarioSpec) -> Self {
        let l = &spec.planner.lattice;
        Self {
            name: spec.name.clone(),
            kind: spec.kind,
            track: TrackFile {
                straight_length_m: spec.layout.straight_length,
                inner_radius_m: spec.layout.inner_radius,
                lane_width_m: spec.layout.lane_width,
                num_lanes: spec.layout.num_lanes,
                points_per_arc: spec.points_per_arc,
            },
            start_lane: spec.start_lane,
            start_s_m: spec.start_s,
            start_offset_m: spec.start_offset,
            goal_distance_m: spec.goal_distance,
            speed_mps: spec.speed,
            obstacles: spec
                .obstacles
                .iter()
                .map(|o| {
                    ObstacleFile::World(WorldObstacle {
                        x_m: o.position.x,
                        y_m: o.position.y,
                        radius_m: o.radius,
                    })
                })
                .collect(),
            sensor: SensorFile {
                horizontal_fov_deg: spec.sensor.horizontal_fov.to_degrees(),
                max_range_m: spec.sensor.max_range,
                lateral_noise_sigma_m: spec.sensor.lateral_noise_sigma,
                obstacle_dropout_prob: spec.sensor.obstacle_dropout_prob,
                occlusion_enabled: spec.sensor.occlusion_enabled,
            },
            lattice: LatticeFile {
                horizon_m: l.horizon,
                row_spacing_m: l.row_spacing,
                lateral_count: l.lateral_count,
                lateral_margin_m: l.lateral_margin,
                lookahead_m: l.lookahead,
                yaw_mode: l.yaw_mode,
            },
            cost: CostFile {
                k: spec.planner.cost.k,
                d_safe_m: spec.planner.cost.d_safe,
                terminal_weight_per_m: spec.planner.cost.terminal_weight,
            },
            sectors: SectorFile {
                forward_half_angle_deg: spec.planner.sectors.forward_half_angle.to_degrees(),
                slight_turn_limit_deg: spec.planner.sectors.slight_turn_limit.to_degrees(),
            },
            turn_rates: TurnRateFile {
                slight_dps: spec.turn_rates.slight.to_degrees(),
                hard_dps: spec.turn_rates.hard.to_degrees(),
            },
            planning_rate_hz: spec.planning_rate,
            seed: spec.seed,
            stop_timeout_s: spec.stop_timeout,
            time_budget_factor: spec.time_budget_factor,
        }
    }
}

/// World position of a point given relative to a lane of `layout`.
pub fn track_point(layout: &TrackLayout, lane: Lane, s: f64, offset: f64) -> Point2 {
    Stadium::new(layout.straight_length, layout.lane_radius(lane)).offset_point(s, offset)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_file_uses_defaults() {
        let spec = ScenarioSpec::from_json(
            r#"{"name": "x", "kind": "safe", "goal_distance_m": 400, "speed_mps": 1.34}"#,
        )
        .unwrap();
        let mut want = ScenarioSpec::safe_lap();
        want.name = "x".into();
        assert_eq!(spec, want);
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let err = ScenarioSpec::from_json(
            r#"{"name": "x", "kind": "safe", "goal_distance_m": 400, "speed_mps": 1.34, "sped": 2}"#,
        )
        .unwrap_err();
        assert!(err.to_string().contains("sped"), "{err}");
        let err = ScenarioSpec::from_json(
            r#"{"name": "x", "kind": "safe", "goal_distance_m": 400, "speed_mps": 1.34,
                "cost": {"d_safe": 0.5}}"#,
        )
        .unwrap_err();
        assert!(err.to_string().contains("d_safe"), "{err}");
    }

    #[test]
    fn invalid_values_name_the_field() {
        let err = ScenarioSpec::from_json(
            r#"{"name": "x", "kind": "safe", "goal_distance_m": -1, "speed_mps": 1.34}"#,
        )
        .unwrap_err();
        assert!(err.to_string().contains("goal_distance_m"), "{err}");
        let err = ScenarioSpec::from_json(
            r#"{"name": "x", "kind": "detour", "goal_distance_m": 10, "speed_mps": 1.34,
                "obstacles": [{"lane": 9, "s_m": 5, "radius_m": 0.3}]}"#,
        )
        .unwrap_err();
        assert!(err.to_string().contains("obstacles[0].lane"), "{err}");
    }

    #[test]
    fn track_relative_obstacles_resolve() {
        let spec = ScenarioSpec::from_json(
            r#"{"name": "x", "kind": "detour", "goal_distance_m": 100, "speed_mps": 1.34,
                "obstacles": [{"lane": 1, "s_m": 20, "offset_m": 0.3, "radius_m": 0.25},
                              {"x_m": 1, "y_m": 2, "radius_m": 0.5}]}"#,
        )
        .unwrap();
        let p = spec.obstacles[0].position;
        assert!((p - Point2::new(20.0, -36.8 + 0.3)).norm() < 1e-12);
        assert_eq!(spec.obstacles[1], Obstacle::new(1.0, 2.0, 0.5));
    }

    #[test]
    fn json_round_trip() {
        let mut spec = ScenarioSpec::safe_lap();
        spec.obstacles.push(Obstacle::new(3.0, -36.0, 0.25));
        let back = ScenarioSpec::from_json(&spec.to_json()).unwrap();
        assert_eq!(back.obstacles, spec.obstacles);
        assert_eq!(back.planner.lattice, spec.planner.lattice);
        assert!((back.sensor.horizontal_fov - spec.sensor.horizontal_fov).abs() < 1e-12);
    }
}
