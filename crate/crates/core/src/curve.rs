//! Arc-length parameterized planar curves and the Frenet transform.
//!
//! A [`Curve2D`] interpolates its input points with two natural splines
//! `x(t)`, `y(t)` over cumulative chord length `t`, then tabulates the true
//! arc length `s(t) = ∫ √(x'² + y'²) dt` with composite Simpson quadrature.
//! All public queries take arc length; the spline parameter stays internal.
//!
//! Lateral offsets are positive to the left of the direction of travel.

use crate::error::{invalid, Error, Result};
use crate::geometry::{wrap_angle, Point2};
use crate::spline::{Derivative, Spline1D};
use serde::{Deserialize, Serialize};

/// Subintervals per spline segment used for the arc-length table.
pub const DEFAULT_SAMPLES_PER_SEGMENT: usize = 16;

const PROJECTION_MAX_ITERS: usize = 20;
const PROJECTION_TOL: f64 = 1e-9;
const AMBIGUITY_TOL: f64 = 1e-6;
const END_FAN_TOL: f64 = 1e-9;

/// Curve-relative coordinates: arc length `s` and signed lateral offset `d`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct FrenetPoint {
    pub s: f64,
    pub d: f64,
}

impl FrenetPoint {
    pub const fn new(s: f64, d: f64) -> Self {
        Self { s, d }
    }
}

#[derive(Debug, Clone)]
pub struct Curve2D {
    x: Spline1D,
    y: Spline1D,
    /// `(t, s)` pairs, strictly increasing in both columns.
    arc_table: Vec<(f64, f64)>,
    total_length: f64,
}

impl Curve2D {
    /// Fits a curve through `points` in order.
    pub fn build(points: &[Point2], samples_per_segment: usize) -> Result<Self> {
        if points.len() < 2 {
            return Err(invalid("a curve needs at least two points"));
        }
        if samples_per_segment == 0 {
            return Err(invalid("samples_per_segment must be positive"));
        }
        if points.iter().any(|p| !p.is_finite()) {
            return Err(invalid("curve points must be finite"));
        }

        let mut knots = Vec::with_capacity(points.len());
        let mut acc = 0.0;
        knots.push(0.0);
        for (i, w) in points.windows(2).enumerate() {
            let chord = w[0].distance(w[1]);
            if chord <= 1e-12 {
                return Err(invalid(format!(
                    "points {} and {} coincide",
                    i,
                    i + 1
                )));
            }
            acc += chord;
            knots.push(acc);
        }
        let xs: Vec<f64> = points.iter().map(|p| p.x).collect();
        let ys: Vec<f64> = points.iter().map(|p| p.y).collect();
        let x = Spline1D::fit_natural(&knots, &xs)?;
        let y = Spline1D::fit_natural(&knots, &ys)?;

        let mut curve = Self {
            x,
            y,
            arc_table: Vec::with_capacity((points.len() - 1) * samples_per_segment + 1),
            total_length: 0.0,
        };

        let mut s = 0.0;
        curve.arc_table.push((knots[0], 0.0));
        for w in knots.windows(2) {
            let step = (w[1] - w[0]) / samples_per_segment as f64;
            for j in 0..samples_per_segment {
                let t0 = w[0] + step * j as f64;
                let t1 = if j + 1 == samples_per_segment {
                    w[1]
                } else {
                    t0 + step
                };
                s += curve.simpson(t0, t1);
                curve.arc_table.push((t1, s));
            }
        }
        if curve.arc_table.windows(2).any(|w| w[1].1 <= w[0].1) {
            return Err(invalid("curve has a stationary point; arc length is not monotone"));
        }
        curve.total_length = s;
        Ok(curve)
    }

    pub fn total_length(&self) -> f64 {
        self.total_length
    }

    pub fn arc_table(&self) -> &[(f64, f64)] {
        &self.arc_table
    }

    pub fn x_spline(&self) -> &Spline1D {
        &self.x
    }

    pub fn y_spline(&self) -> &Spline1D {
        &self.y
    }

    fn speed(&self, t: f64) -> f64 {
        self.derivative(t).norm()
    }

    fn position(&self, t: f64) -> Point2 {
        Point2::new(
            self.x.eval_clamped(t, Derivative::Value),
            self.y.eval_clamped(t, Derivative::Value),
        )
    }

    fn derivative(&self, t: f64) -> Point2 {
        Point2::new(
            self.x.eval_clamped(t, Derivative::First),
            self.y.eval_clamped(t, Derivative::First),
        )
    }

    fn second_derivative(&self, t: f64) -> Point2 {
        Point2::new(
            self.x.eval_clamped(t, Derivative::Second),
            self.y.eval_clamped(t, Derivative::Second),
        )
    }

    fn simpson(&self, t0: f64, t1: f64) -> f64 {
        let mid = 0.5 * (t0 + t1);
        (t1 - t0) / 6.0 * (self.speed(t0) + 4.0 * self.speed(mid) + self.speed(t1))
    }

    fn table_index(&self, t: f64) -> usize {
        let idx = self.arc_table.partition_point(|&(tk, _)| tk <= t);
        idx.saturating_sub(1).min(self.arc_table.len() - 2)
    }

    /// Arc length at spline parameter `t` (clamped to the parameter range).
    pub fn arc_length_at_param(&self, t: f64) -> f64 {
        let (lo, hi) = self.x.domain();
        let t = t.clamp(lo, hi);
        let k = self.table_index(t);
        let (tk, sk) = self.arc_table[k];
        if t == tk {
            sk
        } else {
            sk + self.simpson(tk, t)
        }
    }

    /// Spline parameter at arc length `s` (clamped to `[0, total_length]`).
    pub fn param_at(&self, s: f64) -> f64 {
        let s = s.clamp(0.0, self.total_length);
        let k = self
            .arc_table
            .partition_point(|&(_, sk)| sk <= s)
            .saturating_sub(1)
            .min(self.arc_table.len() - 2);
        let (t0, s0) = self.arc_table[k];
        let (t1, s1) = self.arc_table[k + 1];
        let mut t = t0 + (t1 - t0) * (s - s0) / (s1 - s0);
        for _ in 0..8 {
            let err = self.arc_length_at_param(t) - s;
            if err.abs() < 1e-13 * self.total_length.max(1.0) {
                break;
            }
            t = (t - err / self.speed(t)).clamp(t0, t1);
        }
        t
    }

    fn check_station(&self, s: f64) -> Result<()> {
        if (0.0..=self.total_length).contains(&s) {
            Ok(())
        } else {
            Err(Error::OutOfDomain {
                what: "arc length",
                value: s,
                min: 0.0,
                max: self.total_length,
            })
        }
    }

    /// Point on the curve at arc length `s`.
    pub fn point_at(&self, s: f64) -> Result<Point2> {
        self.check_station(s)?;
        Ok(self.position(self.param_at(s)))
    }

    /// Tangent heading `atan2(y', x')` at arc length `s`, in (−π, π].
    pub fn yaw_at(&self, s: f64) -> Result<f64> {
        self.check_station(s)?;
        let d = self.derivative(self.param_at(s));
        Ok(wrap_angle(d.y.atan2(d.x)))
    }

    /// Signed curvature (positive when turning left) at arc length `s`.
    pub fn curvature_at(&self, s: f64) -> Result<f64> {
        self.check_station(s)?;
        let t = self.param_at(s);
        let d1 = self.derivative(t);
        let d2 = self.second_derivative(t);
        Ok(d1.cross(d2) / d1.norm().powi(3))
    }

    fn unit_tangent(&self, t: f64) -> Point2 {
        let d = self.derivative(t);
        d * (1.0 / d.norm())
    }

    pub fn frenet_to_cartesian(&self, p: FrenetPoint) -> Result<Point2> {
        self.check_station(p.s)?;
        let t = self.param_at(p.s);
        Ok(self.position(t) + self.unit_tangent(t).perp() * p.d)
    }

    /// Projects `q` onto the curve.
    ///
    /// Fails with [`Error::OutOfDomain`] when `q` lies beyond the normal fan of
    /// either end, and with [`Error::AmbiguousProjection`] when two separated
    /// stations are equally close.
    pub fn cartesian_to_frenet(&self, q: Point2) -> Result<FrenetPoint> {
        let (t, along) = self.closest_param(q)?;
        if along.abs() > END_FAN_TOL {
            return Err(Error::OutOfDomain {
                what: "projected arc length",
                value: if along < 0.0 {
                    along
                } else {
                    self.total_length + along
                },
                min: 0.0,
                max: self.total_length,
            });
        }
        Ok(self.frenet_at_param(q, t))
    }

    /// Like [`Curve2D::cartesian_to_frenet`] but extends the curve past its
    /// ends along the end tangents, so `s` may fall outside `[0, total_length]`.
    pub fn cartesian_to_frenet_extended(&self, q: Point2) -> Result<FrenetPoint> {
        let (t, along) = self.closest_param(q)?;
        let mut fp = self.frenet_at_param(q, t);
        fp.s += along;
        Ok(fp)
    }

    fn frenet_at_param(&self, q: Point2, t: f64) -> FrenetPoint {
        let tangent = self.unit_tangent(t);
        FrenetPoint::new(
            self.arc_length_at_param(t),
            tangent.cross(q - self.position(t)),
        )
    }

    /// Closest parameter and, when it sits on an end with `q` beyond that
    /// end's normal, the signed along-tangent excess (0 otherwise).
    fn closest_param(&self, q: Point2) -> Result<(f64, f64)> {
        if !q.is_finite() {
            return Err(invalid("query point must be finite"));
        }
        let dist2: Vec<f64> = self
            .arc_table
            .iter()
            .map(|&(t, _)| {
                let r = self.position(t) - q;
                r.dot(r)
            })
            .collect();
        let n = dist2.len();

        let mut candidates: Vec<(f64, f64)> = Vec::new();
        for k in 0..n {
            let left_ok = k == 0 || dist2[k] <= dist2[k - 1];
            let right_ok = k + 1 == n || dist2[k] < dist2[k + 1];
            if left_ok && right_ok {
                let lo = self.arc_table[k.saturating_sub(1)].0;
                let hi = self.arc_table[(k + 1).min(n - 1)].0;
                let t = self.refine(q, self.arc_table[k].0, lo, hi);
                candidates.push((t, self.position(t).distance(q)));
            }
        }
        // A strictly decreasing scan with a plateau at the end never yields a
        // candidate with `<`; fall back to the global minimum.
        if candidates.is_empty() {
            let k = (0..n)
                .min_by(|&a, &b| dist2[a].total_cmp(&dist2[b]))
                .unwrap_or(0);
            let t = self.arc_table[k].0;
            candidates.push((t, self.position(t).distance(q)));
        }

        let (best_t, best_d) = candidates
            .iter()
            .copied()
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("nonempty");
        let resolution = self.param_resolution();
        let ambiguous = candidates.iter().any(|&(t, d)| {
            (t - best_t).abs() > 2.0 * resolution && (d - best_d).abs() <= AMBIGUITY_TOL
        });
        if ambiguous {
            return Err(Error::AmbiguousProjection);
        }

        let (lo, hi) = self.x.domain();
        let along = if best_t <= lo || best_t >= hi {
            let along = self.unit_tangent(best_t).dot(q - self.position(best_t));
            if (best_t <= lo && along < 0.0) || (best_t >= hi && along > 0.0) {
                along
            } else {
                0.0
            }
        } else {
            0.0
        };
        Ok((best_t, along))
    }

    fn param_resolution(&self) -> f64 {
        self.arc_table
            .windows(2)
            .map(|w| w[1].0 - w[0].0)
            .fold(0.0, f64::max)
    }

    /// Safeguarded Newton on `g(t) = (P(t) − q)·P'(t)` inside `[lo, hi]`.
    fn refine(&self, q: Point2, start: f64, lo: f64, hi: f64) -> f64 {
        let g = |t: f64| (self.position(t) - q).dot(self.derivative(t));
        let (mut lo, mut hi) = (lo, hi);
        let (g_lo, g_hi) = (g(lo), g(hi));
        if g_lo >= 0.0 && g_hi >= 0.0 {
            // distance increasing throughout the bracket
            return lo;
        }
        if g_lo <= 0.0 && g_hi <= 0.0 {
            return hi;
        }
        let mut t = start.clamp(lo, hi);
        for _ in 0..PROJECTION_MAX_ITERS {
            let r = self.position(t) - q;
            let d1 = self.derivative(t);
            let gt = r.dot(d1);
            if gt < 0.0 {
                lo = t;
            } else {
                hi = t;
            }
            let slope = d1.dot(d1) + r.dot(self.second_derivative(t));
            let mut next = if slope > 0.0 { t - gt / slope } else { f64::NAN };
            if (next - t).abs() < PROJECTION_TOL {
                return next.clamp(lo, hi);
            }
            if !(next > lo && next < hi) {
                next = 0.5 * (lo + hi);
            }
            t = next;
        }
        t
    }

    /// Points every `step` meters from 0 to the end (end included).
    pub fn sample(&self, step: f64) -> Vec<(f64, Point2)> {
        let count = (self.total_length / step).floor() as usize;
        let mut out: Vec<(f64, Point2)> = (0..=count)
            .map(|i| {
                let s = (i as f64 * step).min(self.total_length);
                (s, self.position(self.param_at(s)))
            })
            .collect();
        if self.total_length - count as f64 * step > 1e-9 {
            let t_end = self.x.domain().1;
            out.push((self.total_length, self.position(t_end)));
        }
        out
    }
}
