#![allow(dead_code)]

pub mod oracle;

use std::f64::consts::PI;
use trackpilot_core::{Curve2D, Point2, TrackLayout, TrackModel};

pub const CIRCLE_RADIUS: f64 = 36.5;

pub fn straight() -> Curve2D {
    let pts: Vec<Point2> = (0..=20).map(|i| Point2::new(5.0 * i as f64, 0.0)).collect();
    Curve2D::build(&pts, 16).unwrap()
}

pub fn arc_points(radius: f64, from: f64, to: f64, n: usize) -> Vec<Point2> {
    (0..=n)
        .map(|i| {
            let a = from + (to - from) * i as f64 / n as f64;
            Point2::new(radius * a.cos(), radius * a.sin())
        })
        .collect()
}

/// Three quarters of a circle, leaving a gap so projections stay unique.
pub fn circle() -> Curve2D {
    Curve2D::build(&arc_points(CIRCLE_RADIUS, -PI / 2.0, PI, 96), 16).unwrap()
}

/// Lane 1 centerline of the default stadium.
pub fn stadium() -> Curve2D {
    default_track().lane(1).unwrap().centerline.clone()
}

pub fn default_track() -> TrackModel {
    TrackModel::generate(TrackLayout::default(), 90).unwrap()
}
