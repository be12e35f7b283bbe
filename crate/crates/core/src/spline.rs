//! Natural cubic splines in one variable.

use crate::error::{invalid, Error, Result};
use serde::{Deserialize, Serialize};

/// Which derivative of the piecewise cubic to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Derivative {
    Value,
    First,
    Second,
}

/// Piecewise cubic with per-interval coefficients in the local coordinate
/// `u = t - knots[i]`: `S_i(u) = a + b·u + c·u² + d·u³`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spline1D {
    knots: Vec<f64>,
    segments: Vec<[f64; 4]>,
}

impl Spline1D {
    /// Interpolating cubic spline with zero second derivative at both ends.
    ///
    /// The interior second derivatives come from the usual tridiagonal system
    /// (solved with the Thomas algorithm); every other coefficient of an
    /// interval follows from its two end values and end curvatures.
    pub fn fit_natural(knots: &[f64], values: &[f64]) -> Result<Self> {
        if knots.len() != values.len() {
            return Err(invalid(format!(
                "{} knots but {} values",
                knots.len(),
                values.len()
            )));
        }
        if knots.len() < 2 {
            return Err(invalid("a spline needs at least two knots"));
        }
        if knots.iter().chain(values).any(|v| !v.is_finite()) {
            return Err(invalid("knots and values must be finite"));
        }
        if let Some(i) = knots.windows(2).position(|w| w[1] <= w[0]) {
            return Err(invalid(format!(
                "knots must be strictly increasing (knot {} = {} follows {})",
                i + 1,
                knots[i + 1],
                knots[i]
            )));
        }

        let n = knots.len();
        let h: Vec<f64> = knots.windows(2).map(|w| w[1] - w[0]).collect();
        let mut m = vec![0.0; n];

        if n > 2 {
            let interior = n - 2;
            let mut diag = vec![0.0; interior];
            let mut upper = vec![0.0; interior];
            let mut rhs = vec![0.0; interior];
            for j in 0..interior {
                let i = j + 1;
                diag[j] = 2.0 * (h[i - 1] + h[i]);
                upper[j] = h[i];
                rhs[j] = 6.0
                    * ((values[i + 1] - values[i]) / h[i] - (values[i] - values[i - 1]) / h[i - 1]);
            }
            // forward sweep; the sub-diagonal entry of row j is h[j]
            for j in 1..interior {
                let w = h[j] / diag[j - 1];
                diag[j] -= w * upper[j - 1];
                rhs[j] -= w * rhs[j - 1];
            }
            m[interior] = rhs[interior - 1] / diag[interior - 1];
            for j in (0..interior - 1).rev() {
                m[j + 1] = (rhs[j] - upper[j] * m[j + 2]) / diag[j];
            }
        }

        let segments = (0..n - 1)
            .map(|i| {
                let a = values[i];
                let b = (values[i + 1] - values[i]) / h[i] - h[i] * (2.0 * m[i] + m[i + 1]) / 6.0;
                let c = m[i] / 2.0;
                let d = (m[i + 1] - m[i]) / (6.0 * h[i]);
                [a, b, c, d]
            })
            .collect();

        Ok(Self {
            knots: knots.to_vec(),
            segments,
        })
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn segments(&self) -> &[[f64; 4]] {
        &self.segments
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.knots[0], self.knots[self.knots.len() - 1])
    }

    /// Evaluates the spline or one of its first two derivatives.
    /// Parameters outside the knot range are rejected; there is no extrapolation.
    pub fn eval(&self, t: f64, order: Derivative) -> Result<f64> {
        let (lo, hi) = self.domain();
        if !(lo..=hi).contains(&t) {
            return Err(Error::OutOfDomain {
                what: "spline parameter",
                value: t,
                min: lo,
                max: hi,
            });
        }
        Ok(self.eval_clamped(t, order))
    }

    /// Like [`Spline1D::eval`] but clamps `t` into the knot range.
    pub fn eval_clamped(&self, t: f64, order: Derivative) -> f64 {
        let (lo, hi) = self.domain();
        let t = t.clamp(lo, hi);
        let i = self.segment_index(t);
        let [a, b, c, d] = self.segments[i];
        let u = t - self.knots[i];
        match order {
            Derivative::Value => a + u * (b + u * (c + u * d)),
            Derivative::First => b + u * (2.0 * c + 3.0 * d * u),
            Derivative::Second => 2.0 * c + 6.0 * d * u,
        }
    }

    /// Index of the interval containing `t` (the last interval owns the final knot).
    pub fn segment_index(&self, t: f64) -> usize {
        let idx = self.knots.partition_point(|&k| k <= t);
        idx.saturating_sub(1).min(self.segments.len() - 1)
    }
}
