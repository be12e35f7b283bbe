//! Synthetic perception: what a track-line and person detector would hand to
//! the planner, computed from ground truth.
//!
//! Everything in an [`Observation`] is in the body frame (x forward, y left).

use crate::curve::{Curve2D, DEFAULT_SAMPLES_PER_SEGMENT};
use crate::error::{Error, Result};
use crate::geometry::{Point2, Pose};
use crate::track::{Lane, TrackModel};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

/// Station spacing along the left boundary when building the midline.
pub const MIDLINE_STATION_SPACING: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SensorConfig {
    /// Full horizontal field of view (radians).
    pub horizontal_fov: f64,
    pub max_range: f64,
    pub lateral_noise_sigma: f64,
    pub obstacle_dropout_prob: f64,
    pub occlusion_enabled: bool,
}

impl Default for SensorConfig {
    fn default() -> Self {
        Self {
            horizontal_fov: 69f64.to_radians(),
            max_range: 10.0,
            lateral_noise_sigma: 0.03,
            obstacle_dropout_prob: 0.0,
            occlusion_enabled: true,
        }
    }
}

impl SensorConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = self.horizontal_fov > 0.0
            && self.horizontal_fov < std::f64::consts::PI
            && self.max_range > 0.0
            && self.lateral_noise_sigma >= 0.0
            && (0.0..=1.0).contains(&self.obstacle_dropout_prob);
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidInput(format!("invalid sensor config {self:?}")))
        }
    }

    /// True when the body-frame point is inside the range and the FOV wedge.
    pub fn sees(&self, body: Point2) -> bool {
        body.x > 0.0
            && body.norm() <= self.max_range
            && body.y.atan2(body.x).abs() <= self.horizontal_fov / 2.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Obstacle {
    pub position: Point2,
    pub radius: f64,
}

impl Obstacle {
    pub fn new(x: f64, y: f64, radius: f64) -> Self {
        Self {
            position: Point2::new(x, y),
            radius,
        }
    }

    /// Distance from `p` to the obstacle footprint (negative inside).
    pub fn clearance(&self, p: Point2) -> f64 {
        p.distance(self.position) - self.radius
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Observation {
    pub timestamp: f64,
    pub left_boundary: Vec<Point2>,
    pub right_boundary: Vec<Point2>,
    /// Far line of the lane to the left, empty when there is none.
    #[serde(default)]
    pub adjacent_left_boundary: Vec<Point2>,
    /// Far line of the lane to the right, empty when there is none.
    #[serde(default)]
    pub adjacent_right_boundary: Vec<Point2>,
    pub obstacles: Vec<Obstacle>,
}

/// Which lanes the planning corridor spans.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CorridorSpan {
    Lane,
    WithLeft,
    WithRight,
}

impl Observation {
    /// Left and right lines bounding `span`, if both neighbors exist.
    pub fn boundaries(&self, span: CorridorSpan) -> (&[Point2], &[Point2]) {
        match span {
            CorridorSpan::Lane => (&self.left_boundary, &self.right_boundary),
            CorridorSpan::WithLeft => (&self.adjacent_left_boundary, &self.right_boundary),
            CorridorSpan::WithRight => (&self.left_boundary, &self.adjacent_right_boundary),
        }
    }
}

/// Simulates one perception frame for a runner at `pose` in `lane`.
pub fn observe(
    track: &TrackModel,
    obstacles: &[Obstacle],
    pose: Pose,
    lane: Lane,
    sensor: &SensorConfig,
    seed: u64,
    timestamp: f64,
) -> Observation {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = Normal::new(0.0, sensor.lateral_noise_sigma.max(0.0)).expect("sigma >= 0");

    let body_obstacles: Vec<Obstacle> = obstacles
        .iter()
        .map(|o| Obstacle {
            position: pose.to_body(o.position),
            radius: o.radius,
        })
        .collect();

    let mut line = |polyline: Option<&[Point2]>| -> Vec<Point2> {
        let Some(polyline) = polyline else {
            return Vec::new();
        };
        visible_run(polyline, pose, sensor)
            .into_iter()
            .filter(|p| !(sensor.occlusion_enabled && occluded(*p, &body_obstacles)))
            .map(|p| {
                if sensor.lateral_noise_sigma > 0.0 {
                    Point2::new(p.x, p.y + noise.sample(&mut rng))
                } else {
                    p
                }
            })
            .filter(|p| sensor.sees(*p))
            .collect()
    };

    let left_boundary = line(track.left_boundary(lane));
    let right_boundary = line(track.right_boundary(lane));
    let adjacent_left_boundary = line(lane.checked_sub(1).and_then(|l| track.left_boundary(l)));
    let adjacent_right_boundary = line(track.right_boundary(lane + 1));

    let mut detections = Vec::new();
    for o in &body_obstacles {
        // draw for every obstacle so the stream does not depend on geometry
        let dropped = rng.gen::<f64>() < sensor.obstacle_dropout_prob;
        if sensor.sees(o.position) && !dropped {
            detections.push(*o);
        }
    }

    Observation {
        timestamp,
        left_boundary,
        right_boundary,
        adjacent_left_boundary,
        adjacent_right_boundary,
        obstacles: detections,
    }
}

/// Longest cyclic run of visible vertices of a closed polyline, in body frame.
fn visible_run(polyline: &[Point2], pose: Pose, sensor: &SensorConfig) -> Vec<Point2> {
    let closed = polyline.len() > 1 && polyline[0] == polyline[polyline.len() - 1];
    let pts = if closed {
        &polyline[..polyline.len() - 1]
    } else {
        polyline
    };
    let body: Vec<Point2> = pts.iter().map(|&p| pose.to_body(p)).collect();
    let visible: Vec<bool> = body.iter().map(|&b| sensor.sees(b)).collect();
    let n = body.len();
    if n == 0 {
        return Vec::new();
    }
    if visible.iter().all(|&v| v) {
        return body;
    }

    let start = if closed {
        visible.iter().position(|&v| !v).expect("some vertex hidden")
    } else {
        0
    };
    let mut best: (usize, usize) = (0, 0);
    let mut run_start = None;
    for step in 0..=n {
        let i = (start + step) % n;
        let vis = step < n && visible[i];
        match (vis, run_start) {
            (true, None) => run_start = Some(step),
            (false, Some(rs)) => {
                if step - rs > best.1 - best.0 {
                    best = (rs, step);
                }
                run_start = None;
            }
            _ => {}
        }
        if !closed && step + 1 == n && vis {
            let rs = run_start.expect("in run");
            if n - rs > best.1 - best.0 {
                best = (rs, n);
            }
            break;
        }
    }
    (best.0..best.1).map(|step| body[(start + step) % n]).collect()
}

fn occluded(p: Point2, obstacles: &[Obstacle]) -> bool {
    let range = p.norm();
    obstacles.iter().any(|o| {
        let c = o.position;
        if c.x <= 0.0 || c.norm() >= range {
            return false;
        }
        let t = (c.dot(p) / p.dot(p)).clamp(0.0, 1.0);
        (p * t).distance(c) < o.radius
    })
}

/// Piecewise-linear corridor half-width as a function of reference arc length.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HalfWidthProfile {
    stations: Vec<(f64, f64)>,
}

impl HalfWidthProfile {
    pub fn new(mut stations: Vec<(f64, f64)>) -> Result<Self> {
        if stations.is_empty() {
            return Err(Error::InvalidInput("empty half-width profile".into()));
        }
        stations.sort_by(|a, b| a.0.total_cmp(&b.0));
        Ok(Self { stations })
    }

    pub fn constant(half_width: f64) -> Self {
        Self {
            stations: vec![(0.0, half_width)],
        }
    }

    pub fn stations(&self) -> &[(f64, f64)] {
        &self.stations
    }

    /// Half-width at `s`, held constant beyond the first and last station.
    pub fn at(&self, s: f64) -> f64 {
        let st = &self.stations;
        let k = st.partition_point(|&(sk, _)| sk <= s);
        if k == 0 {
            return st[0].1;
        }
        if k == st.len() {
            return st[st.len() - 1].1;
        }
        let (s0, w0) = st[k - 1];
        let (s1, w1) = st[k];
        w0 + (w1 - w0) * (s - s0) / (s1 - s0)
    }
}

/// Local planning reference: corridor midline plus its half-width.
#[derive(Debug, Clone)]
pub struct Corridor {
    pub reference: Curve2D,
    pub half_width: HalfWidthProfile,
}

/// Corridor between the current lane's two observed boundaries.
pub fn reference_from_observation(obs: &Observation) -> Result<Corridor> {
    reference_from_boundaries(&obs.left_boundary, &obs.right_boundary)
}

/// Builds the midline of two boundary polylines.
///
/// Stations are taken along `left` every [`MIDLINE_STATION_SPACING`] meters;
/// each is paired with its closest point on `right` (pairs whose partner is an
/// end vertex of `right` are skipped). If the midline starts ahead of the body
/// origin, it is extended back along its initial tangent to the origin's
/// abeam position so that arc length ≈ forward distance from the runner.
pub fn reference_from_boundaries(left: &[Point2], right: &[Point2]) -> Result<Corridor> {
    if left.len() < 2 || right.len() < 2 {
        return Err(Error::InsufficientPerception(format!(
            "need two points on each boundary, got {} left and {} right",
            left.len(),
            right.len()
        )));
    }

    let mut mids: Vec<Point2> = Vec::new();
    let mut halves: Vec<f64> = Vec::new();
    for p in resample(left, MIDLINE_STATION_SPACING) {
        let Some(q) = interior_projection(right, p) else {
            continue;
        };
        let m = p.lerp(q, 0.5);
        if mids.last().is_some_and(|last| last.distance(m) < 0.25 * MIDLINE_STATION_SPACING) {
            continue;
        }
        mids.push(m);
        halves.push(0.5 * p.distance(q));
    }
    if mids.len() < 2 {
        return Err(Error::InsufficientPerception(
            "boundaries do not overlap enough to form a midline".into(),
        ));
    }

    let dir = initial_tangent(&mids);
    let behind = (Point2::ORIGIN - mids[0]).dot(dir);
    if behind < -0.05 {
        mids.insert(0, mids[0] + dir * behind);
        halves.insert(0, halves[0]);
    }

    let reference = Curve2D::build(&mids, DEFAULT_SAMPLES_PER_SEGMENT)?;
    let knots = reference.x_spline().knots();
    let stations = knots
        .iter()
        .zip(&halves)
        .map(|(&t, &w)| (reference.arc_length_at_param(t), w))
        .collect();
    Ok(Corridor {
        reference,
        half_width: HalfWidthProfile::new(stations)?,
    })
}

/// Unit tangent at the first midpoint, taken from the circle through the
/// first three midpoints (the chord direction when there are only two).
fn initial_tangent(mids: &[Point2]) -> Point2 {
    let (a, b) = (mids[0], mids[1]);
    let chord = b - a;
    let curvature = match mids.get(2) {
        Some(&c) => 2.0 * chord.cross(c - a) / (chord.norm() * (c - b).norm() * (c - a).norm()),
        None => 0.0,
    };
    let half_turn = (0.5 * chord.norm() * curvature).clamp(-1.0, 1.0).asin();
    Point2::from_polar(1.0, chord.y.atan2(chord.x) - half_turn)
}

fn resample(polyline: &[Point2], step: f64) -> Vec<Point2> {
    let mut out = vec![polyline[0]];
    let mut carry = 0.0;
    for w in polyline.windows(2) {
        let len = w[0].distance(w[1]);
        let mut at = step - carry;
        while at <= len {
            out.push(w[0].lerp(w[1], at / len));
            at += step;
        }
        carry = len - (at - step);
    }
    let last = polyline[polyline.len() - 1];
    if out.last().is_some_and(|p| p.distance(last) > 1e-9) {
        out.push(last);
    }
    out
}

/// Closest point on `polyline` to `p`, unless that point is one of its ends.
fn interior_projection(polyline: &[Point2], p: Point2) -> Option<Point2> {
    let last = polyline.len() - 2;
    let mut best: Option<(f64, Point2, bool)> = None;
    for (i, w) in polyline.windows(2).enumerate() {
        let seg = w[1] - w[0];
        let len2 = seg.dot(seg);
        if len2 == 0.0 {
            continue;
        }
        let t = ((p - w[0]).dot(seg) / len2).clamp(0.0, 1.0);
        let q = w[0] + seg * t;
        let dist = q.distance(p);
        let at_end = (i == 0 && t == 0.0) || (i == last && t == 1.0);
        if best.is_none_or(|(bd, _, _)| dist < bd) {
            best = Some((dist, q, at_end));
        }
    }
    best.and_then(|(_, q, at_end)| (!at_end).then_some(q))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::track::TrackLayout;
    use std::f64::consts::PI;

    fn noiseless() -> SensorConfig {
        SensorConfig {
            lateral_noise_sigma: 0.0,
            obstacle_dropout_prob: 0.0,
            occlusion_enabled: false,
            ..SensorConfig::default()
        }
    }

    fn track() -> TrackModel {
        TrackModel::generate(TrackLayout::default(), 60).unwrap()
    }

    #[test]
    fn obstacle_dead_ahead() {
        let track = track();
        let pose = Pose::new(-20.0, -36.8, 0.0);
        let obs = [Obstacle::new(-15.0, -36.8, 0.3)];
        let o = observe(&track, &obs, pose, 1, &noiseless(), 1, 0.0);
        assert_eq!(o.obstacles.len(), 1);
        assert!((o.obstacles[0].position - Point2::new(5.0, 0.0)).norm() < 1e-9);
    }

    #[test]
    fn obstacle_behind_or_too_far() {
        let track = track();
        let pose = Pose::new(-20.0, -36.8, 0.0);
        let obs = [Obstacle::new(-25.0, -36.8, 0.3), Obstacle::new(-8.0, -36.8, 0.3)];
        let o = observe(&track, &obs, pose, 1, &noiseless(), 1, 0.0);
        assert!(o.obstacles.is_empty());
    }

    #[test]
    fn boundaries_clip_to_fov_and_range() {
        let track = track();
        let pose = Pose::new(-20.0, -36.8, 0.0);
        let sensor = SensorConfig::default();
        let o = observe(&track, &[], pose, 3, &sensor, 9, 0.0);
        for line in [
            &o.left_boundary,
            &o.right_boundary,
            &o.adjacent_left_boundary,
            &o.adjacent_right_boundary,
        ] {
            assert!(line.len() >= 2);
            assert!(line.iter().all(|p| sensor.sees(*p)));
        }
        let o1 = observe(&track, &[], pose, 1, &sensor, 9, 0.0);
        assert!(o1.adjacent_left_boundary.is_empty());
    }

    #[test]
    fn dropout_one_removes_everything() {
        let track = track();
        let sensor = SensorConfig {
            obstacle_dropout_prob: 1.0,
            ..noiseless()
        };
        let obs = [Obstacle::new(-15.0, -36.8, 0.3)];
        let o = observe(&track, &obs, Pose::new(-20.0, -36.8, 0.0), 1, &sensor, 3, 0.0);
        assert!(o.obstacles.is_empty());
    }

    #[test]
    fn occlusion_hides_points_behind_obstacle() {
        let track = track();
        let pose = Pose::new(-20.0, -36.8, 0.0);
        // a wide obstacle sitting on the left line 3 m ahead
        let obs = [Obstacle::new(-17.0, -36.8 + 0.61, 0.4)];
        let open = observe(&track, &obs, pose, 1, &noiseless(), 1, 0.0);
        let sensor = SensorConfig {
            occlusion_enabled: true,
            ..noiseless()
        };
        let blocked = observe(&track, &obs, pose, 1, &sensor, 1, 0.0);
        assert!(blocked.left_boundary.len() < open.left_boundary.len());
        assert_eq!(blocked.right_boundary.len(), open.right_boundary.len());
    }

    #[test]
    fn straight_symmetric_corridor() {
        let left: Vec<Point2> = (0..20).map(|i| Point2::new(i as f64 * 0.5, 0.61)).collect();
        let right: Vec<Point2> = (0..20).map(|i| Point2::new(i as f64 * 0.5, -0.61)).collect();
        let c = reference_from_boundaries(&left, &right).unwrap();
        for (s, p) in c.reference.sample(0.5) {
            assert!(p.y.abs() < 1e-12);
            assert!((c.half_width.at(s) - 0.61).abs() < 1e-12);
        }
    }

    #[test]
    fn offset_corridor_midline() {
        let left: Vec<Point2> = (1..20).map(|i| Point2::new(i as f64 * 0.5, 1.22)).collect();
        let right: Vec<Point2> = (0..21).map(|i| Point2::new(i as f64 * 0.5, 0.0)).collect();
        let c = reference_from_boundaries(&left, &right).unwrap();
        for (_, p) in c.reference.sample(0.5) {
            assert!((p.y - 0.61).abs() < 1e-12);
        }
        // extended back to the origin's abeam station
        assert!(c.reference.point_at(0.0).unwrap().x.abs() < 1e-9);
    }

    #[test]
    fn concentric_arcs_midline_radius() {
        let arc = |r: f64, n: usize| -> Vec<Point2> {
            (0..n)
                .map(|i| {
                    let phi = -PI / 2.0 + 0.3 * i as f64 / (n - 1) as f64;
                    Point2::new(0.0, 36.8) + Point2::from_polar(r, phi)
                })
                .collect()
        };
        // inner (left) boundary, outer (right) boundary extends a bit further
        let left = arc(36.19, 40);
        let right: Vec<Point2> = (0..46)
            .map(|i| {
                let phi = -PI / 2.0 - 0.02 + 0.34 * i as f64 / 45.0;
                Point2::new(0.0, 36.8) + Point2::from_polar(37.41, phi)
            })
            .collect();
        let c = reference_from_boundaries(&left, &right).unwrap();
        for (s, p) in c.reference.sample(0.5).into_iter().filter(|(s, _)| *s > 0.5) {
            let r = p.distance(Point2::new(0.0, 36.8));
            assert!((r - 36.8).abs() < 0.02, "s {s} r {r}");
        }
    }

    #[test]
    fn too_few_points() {
        let left = vec![Point2::new(1.0, 0.6)];
        let right = vec![Point2::new(1.0, -0.6), Point2::new(2.0, -0.6)];
        assert!(matches!(
            reference_from_boundaries(&left, &right),
            Err(Error::InsufficientPerception(_))
        ));
    }

    #[test]
    fn half_width_interpolation() {
        let p = HalfWidthProfile::new(vec![(2.0, 1.0), (0.0, 0.5)]).unwrap();
        assert_eq!(p.at(-1.0), 0.5);
        assert_eq!(p.at(1.0), 0.75);
        assert_eq!(p.at(5.0), 1.0);
    }
}
