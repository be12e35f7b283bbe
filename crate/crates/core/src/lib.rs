//! Lattice trajectory planning in Frenet coordinates for guiding runners
//! along athletics tracks, plus a closed-loop simulator to exercise it.
//!
//! Pipeline per frame: [`perception::observe`] →
//! [`perception::reference_from_observation`] → [`planner::build_lattice`] →
//! [`planner::plan`] → [`guidance::command_from_yaw`] → [`guidance::emit`].

pub mod curve;
pub mod error;
pub mod geometry;
pub mod guidance;
pub mod perception;
pub mod planner;
pub mod simulator;
pub mod spline;
pub mod track;

pub use curve::{Curve2D, FrenetPoint};
pub use error::{Error, Result};
pub use geometry::{Point2, Pose};
pub use spline::{Derivative, Spline1D};
pub use track::{Lane, TrackLayout, TrackModel};
