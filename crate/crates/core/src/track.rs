//! Stadium-shaped athletics track geometry.
//!
//! Lanes are numbered from 1 (innermost). Running direction is
//! counter-clockwise, so the inner edge of every lane is on the runner's left
//! and positive lateral offsets point toward the infield. Arc length starts
//! at the seam in the middle of the bottom straight.

use crate::curve::{Curve2D, FrenetPoint, DEFAULT_SAMPLES_PER_SEGMENT};
use crate::error::{invalid, Result};
use crate::geometry::Point2;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::io::Write;

/// Maximum spacing between consecutive boundary polyline vertices.
pub const BOUNDARY_SPACING: f64 = 0.5;

pub type Lane = u32;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrackLayout {
    pub straight_length: f64,
    /// Radius of the lane-1 centerline on the bends.
    pub inner_radius: f64,
    pub lane_width: f64,
    pub num_lanes: u32,
}

impl Default for TrackLayout {
    fn default() -> Self {
        Self {
            straight_length: 84.39,
            inner_radius: 36.80,
            lane_width: 1.22,
            num_lanes: 8,
        }
    }
}

impl TrackLayout {
    pub fn validate(&self) -> Result<()> {
        if !(self.straight_length >= 0.0 && self.straight_length.is_finite()) {
            return Err(invalid("straight_length must be non-negative"));
        }
        if !(self.inner_radius > 0.0 && self.inner_radius.is_finite()) {
            return Err(invalid("inner_radius must be positive"));
        }
        if !(self.lane_width >= 0.9 && self.lane_width.is_finite()) {
            return Err(invalid("lane_width must be at least 0.9 m"));
        }
        if self.num_lanes == 0 {
            return Err(invalid("num_lanes must be at least 1"));
        }
        if self.lane_width / 2.0 >= self.inner_radius {
            return Err(invalid("inner lane edge would cross the bend center"));
        }
        Ok(())
    }

    /// Centerline radius of `lane` on the bends.
    pub fn lane_radius(&self, lane: Lane) -> f64 {
        self.inner_radius + (lane as f64 - 1.0) * self.lane_width
    }

    /// Lateral offset of the centerline of `lane` relative to lane 1.
    pub fn lane_offset(&self, lane: Lane) -> f64 {
        -(lane as f64 - 1.0) * self.lane_width
    }

    pub fn lane_length(&self, lane: Lane) -> f64 {
        Stadium::new(self.straight_length, self.lane_radius(lane)).length()
    }
}

/// Exact stadium curve: two straights of length `2·half_straight` joined by
/// semicircles of `radius`, traversed counter-clockwise from `(0, −radius)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stadium {
    pub half_straight: f64,
    pub radius: f64,
}

impl Stadium {
    pub fn new(straight_length: f64, radius: f64) -> Self {
        Self {
            half_straight: straight_length / 2.0,
            radius,
        }
    }

    pub fn length(&self) -> f64 {
        4.0 * self.half_straight + 2.0 * PI * self.radius
    }

    /// Section break stations: bottom-right half, right bend, top, left bend, bottom-left half.
    fn breaks(&self) -> [f64; 6] {
        let (h, arc) = (self.half_straight, PI * self.radius);
        [0.0, h, h + arc, 3.0 * h + arc, 3.0 * h + 2.0 * arc, self.length()]
    }

    /// Point and heading at station `s` (taken modulo the length).
    pub fn pose_at(&self, s: f64) -> (Point2, f64) {
        let (h, r) = (self.half_straight, self.radius);
        let s = s.rem_euclid(self.length());
        let b = self.breaks();
        if s < b[1] {
            (Point2::new(s, -r), 0.0)
        } else if s < b[2] {
            let phi = -PI / 2.0 + (s - b[1]) / r;
            (Point2::new(h, 0.0) + Point2::from_polar(r, phi), phi + PI / 2.0)
        } else if s < b[3] {
            (Point2::new(h - (s - b[2]), r), PI)
        } else if s < b[4] {
            let phi = PI / 2.0 + (s - b[3]) / r;
            (Point2::new(-h, 0.0) + Point2::from_polar(r, phi), phi + PI / 2.0)
        } else {
            (Point2::new(-h + (s - b[4]), -r), 0.0)
        }
    }

    /// Point at station `s` displaced by `d` toward the infield.
    pub fn offset_point(&self, s: f64, d: f64) -> Point2 {
        let (p, heading) = self.pose_at(s);
        p + Point2::from_polar(1.0, heading).perp() * d
    }

    /// Exact Frenet coordinates of `q`, with `s` in `[0, length)`.
    pub fn locate(&self, q: Point2) -> FrenetPoint {
        let (h, r) = (self.half_straight, self.radius);
        let b = self.breaks();
        let fp = if q.x > h {
            let rel = q - Point2::new(h, 0.0);
            let phi = rel.y.atan2(rel.x);
            FrenetPoint::new(b[1] + (phi + PI / 2.0) * r, r - rel.norm())
        } else if q.x < -h {
            let rel = q - Point2::new(-h, 0.0);
            let mut phi = rel.y.atan2(rel.x);
            if phi < 0.0 {
                phi += 2.0 * PI;
            }
            FrenetPoint::new(b[3] + (phi - PI / 2.0) * r, r - rel.norm())
        } else if q.y < 0.0 {
            FrenetPoint::new(q.x, q.y + r)
        } else {
            FrenetPoint::new(b[2] + (h - q.x), r - q.y)
        };
        FrenetPoint::new(fp.s.rem_euclid(self.length()), fp.d)
    }

    /// Polyline of the curve offset by `d`, vertices at most `max_spacing`
    /// apart (measured on the offset curve), closed: last vertex = first.
    pub fn offset_polyline(&self, d: f64, max_spacing: f64) -> Vec<Point2> {
        let b = self.breaks();
        let mut out = Vec::new();
        for (i, w) in b.windows(2).enumerate() {
            let len = w[1] - w[0];
            if len <= 0.0 {
                continue;
            }
            let offset_len = if i % 2 == 1 {
                len * (self.radius - d) / self.radius
            } else {
                len
            };
            let n = ((offset_len / max_spacing).ceil() as usize).max(1);
            for j in 0..n {
                out.push(self.offset_point(w[0] + len * j as f64 / n as f64, d));
            }
        }
        out.push(out[0]);
        out
    }
}

#[derive(Debug, Clone)]
pub struct LaneGeometry {
    pub lane: Lane,
    pub centerline: Curve2D,
    pub centerline_points: Vec<Point2>,
}

#[derive(Debug, Clone)]
pub struct TrackModel {
    layout: TrackLayout,
    lanes: Vec<LaneGeometry>,
    /// Lane lines from the inner edge of lane 1 outwards; lane `k` is bounded
    /// by lines `k − 1` (left) and `k` (right).
    lines: Vec<Vec<Point2>>,
}

impl TrackModel {
    /// Builds the stadium for `layout`, sampling each bend of each lane
    /// centerline with `points_per_arc` intervals.
    pub fn generate(layout: TrackLayout, points_per_arc: usize) -> Result<Self> {
        layout.validate()?;
        if points_per_arc == 0 {
            return Err(invalid("points_per_arc must be positive"));
        }
        let mut lanes = Vec::with_capacity(layout.num_lanes as usize);
        for lane in 1..=layout.num_lanes {
            let stadium = Stadium::new(layout.straight_length, layout.lane_radius(lane));
            let spacing = PI * stadium.radius / points_per_arc as f64;
            let b = stadium.breaks();
            let mut pts = Vec::new();
            for w in b.windows(2) {
                let len = w[1] - w[0];
                if len <= 0.0 {
                    continue;
                }
                let n = ((len / spacing).round() as usize).max(1);
                for j in 0..n {
                    pts.push(stadium.pose_at(w[0] + len * j as f64 / n as f64).0);
                }
            }
            pts.push(pts[0]);
            let centerline = Curve2D::build(&pts, DEFAULT_SAMPLES_PER_SEGMENT)?;
            lanes.push(LaneGeometry {
                lane,
                centerline,
                centerline_points: pts,
            });
        }
        let lane1 = Stadium::new(layout.straight_length, layout.inner_radius);
        let lines = (0..=layout.num_lanes)
            .map(|j| lane1.offset_polyline(Self::line_offset(&layout, j), BOUNDARY_SPACING))
            .collect();
        Ok(Self {
            layout,
            lanes,
            lines,
        })
    }

    fn line_offset(layout: &TrackLayout, line: u32) -> f64 {
        layout.lane_width / 2.0 - line as f64 * layout.lane_width
    }

    pub fn layout(&self) -> &TrackLayout {
        &self.layout
    }

    pub fn num_lanes(&self) -> u32 {
        self.layout.num_lanes
    }

    pub fn has_lane(&self, lane: Lane) -> bool {
        (1..=self.layout.num_lanes).contains(&lane)
    }

    pub fn lane(&self, lane: Lane) -> Option<&LaneGeometry> {
        lane.checked_sub(1).and_then(|i| self.lanes.get(i as usize))
    }

    pub fn lanes(&self) -> &[LaneGeometry] {
        &self.lanes
    }

    /// Left (inner) boundary polyline of `lane`.
    pub fn left_boundary(&self, lane: Lane) -> Option<&[Point2]> {
        self.has_lane(lane)
            .then(|| self.lines[lane as usize - 1].as_slice())
    }

    /// Right (outer) boundary polyline of `lane`.
    pub fn right_boundary(&self, lane: Lane) -> Option<&[Point2]> {
        self.has_lane(lane).then(|| self.lines[lane as usize].as_slice())
    }

    /// Exact geometry of the lane centerline.
    pub fn stadium(&self, lane: Lane) -> Stadium {
        Stadium::new(self.layout.straight_length, self.layout.lane_radius(lane))
    }

    /// Frenet coordinates of `q` relative to the centerline of `lane`.
    pub fn locate(&self, lane: Lane, q: Point2) -> FrenetPoint {
        let fp = self.stadium(1).locate(q);
        let s = if lane == 1 {
            fp.s
        } else {
            self.stadium(lane).locate(q).s
        };
        FrenetPoint::new(s, fp.d - self.layout.lane_offset(lane))
    }

    /// World position of the Frenet point `(s, d)` relative to `lane`.
    pub fn world_point(&self, lane: Lane, s: f64, d: f64) -> Point2 {
        self.stadium(lane).offset_point(s, d)
    }

    /// Heading of the lane direction at station `s` of `lane`.
    pub fn heading_at(&self, lane: Lane, s: f64) -> f64 {
        crate::geometry::wrap_angle(self.stadium(lane).pose_at(s).1)
    }

    /// Lane containing `q`, ties on a shared line going to the inner lane.
    pub fn lane_at(&self, q: Point2) -> Option<Lane> {
        let d1 = self.stadium(1).locate(q).d;
        let half = self.layout.lane_width / 2.0;
        (1..=self.layout.num_lanes).find(|&k| (d1 - self.layout.lane_offset(k)).abs() <= half)
    }

    /// Writes `lane,side,x,y` rows: centerline vertices and both boundaries of every lane.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "lane,side,x,y")?;
        for lane in &self.lanes {
            let k = lane.lane;
            let sides = [
                ("center", lane.centerline_points.as_slice()),
                ("left", self.left_boundary(k).unwrap_or_default()),
                ("right", self.right_boundary(k).unwrap_or_default()),
            ];
            for (side, pts) in sides {
                for p in pts {
                    writeln!(out, "{k},{side},{:.6},{:.6}", p.x, p.y)?;
                }
            }
        }
        Ok(())
    }
}
