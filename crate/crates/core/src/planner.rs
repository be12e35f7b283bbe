//! Frenet lattice sampling, edge costs and dynamic-programming path selection.

use crate::curve::{Curve2D, FrenetPoint, DEFAULT_SAMPLES_PER_SEGMENT};
use crate::error::{invalid, Error, Result};
use crate::geometry::Point2;
use crate::perception::{HalfWidthProfile, Obstacle};
use serde::{Deserialize, Serialize};

/// Spacing of the yaw profile along a planned path.
pub const YAW_PROFILE_STEP: f64 = 0.5;

const TIE_EPS: f64 = 1e-12;

/// How the command yaw is read off the fitted path.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum YawMode {
    /// Bearing from the start point to the path point at the lookahead station.
    /// Carries lateral-offset feedback, so closed-loop tracking stays stable
    /// under boundary noise.
    #[default]
    Bearing,
    /// Tangent direction of the path at the lookahead station.
    Tangent,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LatticeConfig {
    /// Forward sampling distance along the reference.
    pub horizon: f64,
    /// Longitudinal spacing between rows.
    pub row_spacing: f64,
    /// Nodes per row; odd so that the midline is always sampled.
    pub lateral_count: usize,
    /// Inset from each corridor edge.
    pub lateral_margin: f64,
    /// Arc length along the fitted path at which the command yaw is read.
    pub lookahead: f64,
    #[serde(default)]
    pub yaw_mode: YawMode,
}

impl Default for LatticeConfig {
    fn default() -> Self {
        Self {
            horizon: 10.0,
            row_spacing: 1.0,
            lateral_count: 5,
            lateral_margin: 0.11,
            lookahead: 2.0,
            yaw_mode: YawMode::Bearing,
        }
    }
}

impl LatticeConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.horizon > 0.0 && self.row_spacing > 0.0) {
            return Err(invalid("horizon and row_spacing must be positive"));
        }
        if self.horizon / self.row_spacing < 2.0 - 1e-9 {
            return Err(invalid("horizon must cover at least two rows"));
        }
        if self.lateral_count < 3 || self.lateral_count.is_multiple_of(2) {
            return Err(invalid("lateral_count must be odd and at least 3"));
        }
        if !(self.lateral_margin >= 0.0) {
            return Err(invalid("lateral_margin must be non-negative"));
        }
        if !(self.lookahead > 0.0) {
            return Err(invalid("lookahead must be positive"));
        }
        Ok(())
    }

    pub fn max_rows(&self) -> usize {
        (self.horizon / self.row_spacing + 1e-9).floor() as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostParams {
    /// Obstacle cost scale: cost = k / d_col.
    pub k: f64,
    /// Clearances at or below this are infinitely expensive.
    pub d_safe: f64,
    /// Terminal cost per meter of offset from the corridor midline.
    pub terminal_weight: f64,
}

impl Default for CostParams {
    fn default() -> Self {
        Self {
            k: 1.0,
            d_safe: 0.5,
            terminal_weight: 1.0,
        }
    }
}

impl CostParams {
    pub fn validate(&self) -> Result<()> {
        if self.k > 0.0 && self.d_safe > 0.0 && self.terminal_weight > 0.0 {
            Ok(())
        } else {
            Err(invalid("k, d_safe and terminal_weight must be positive"))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatticeNode {
    /// Zero-based row; row `i` sits at arc length `(i + 1)·row_spacing`.
    pub row: usize,
    /// Zero-based column, ordered from right (most negative `d`) to left.
    pub col: usize,
    pub frenet: FrenetPoint,
    pub cartesian: Point2,
    /// Obstacle cost paid on entering this node.
    #[serde(with = "inf_as_null")]
    pub obstacle_cost: f64,
    /// Minimal cost-to-go from this node, including the terminal cost.
    #[serde(with = "inf_as_null")]
    pub value: f64,
    /// Column of the chosen node in the next row.
    pub successor: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Lattice {
    pub rows: Vec<Vec<LatticeNode>>,
    pub lookahead: f64,
    #[serde(default)]
    pub yaw_mode: YawMode,
}

impl Lattice {
    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn nodes(&self) -> impl Iterator<Item = &LatticeNode> {
        self.rows.iter().flatten()
    }

    /// Builds a lattice from explicit node positions, one inner vector per row.
    /// Mostly useful for tests and tooling.
    pub fn from_points(rows: &[Vec<(FrenetPoint, Point2)>], lookahead: f64) -> Result<Self> {
        if rows.is_empty() || rows.iter().any(|r| r.is_empty()) {
            return Err(invalid("lattice rows must be nonempty"));
        }
        let rows = rows
            .iter()
            .enumerate()
            .map(|(r, nodes)| {
                nodes
                    .iter()
                    .enumerate()
                    .map(|(c, &(frenet, cartesian))| LatticeNode {
                        row: r,
                        col: c,
                        frenet,
                        cartesian,
                        obstacle_cost: 0.0,
                        value: f64::INFINITY,
                        successor: None,
                    })
                    .collect()
            })
            .collect();
        Ok(Self {
            rows,
            lookahead,
            yaw_mode: YawMode::default(),
        })
    }
}

#[derive(Debug, Clone)]
pub struct PlanResult {
    /// Start point followed by one waypoint per row.
    pub waypoints: Vec<Point2>,
    pub path: Curve2D,
    /// Heading to steer, read at the lookahead station according to the
    /// lattice's [`YawMode`], in the frame of the waypoints.
    pub command_yaw: f64,
    pub total_cost: f64,
    /// Chosen column per row.
    pub columns: Vec<usize>,
    /// The lattice with obstacle costs, values and successors filled in.
    pub lattice: Lattice,
}

/// Samples `config.lateral_count` nodes per row, evenly spread across the
/// corridor minus the lateral margin, on rows `row_spacing` apart.
/// Rows past the end of the reference are dropped.
pub fn build_lattice(
    reference: &Curve2D,
    half_width: &HalfWidthProfile,
    config: &LatticeConfig,
) -> Result<Lattice> {
    config.validate()?;
    let available = (reference.total_length() / config.row_spacing + 1e-9).floor() as usize;
    let rows = config.max_rows().min(available);
    if rows == 0 {
        return Err(invalid("reference is shorter than one row spacing"));
    }
    let m = config.lateral_count;
    let mut grid = Vec::with_capacity(rows);
    for r in 0..rows {
        let s = ((r + 1) as f64 * config.row_spacing).min(reference.total_length());
        let reach = half_width.at(s) - config.lateral_margin;
        if reach < 0.0 {
            return Err(Error::InfeasibleCorridor { row: r });
        }
        let mut row = Vec::with_capacity(m);
        for c in 0..m {
            let d = -reach + 2.0 * reach * c as f64 / (m - 1) as f64;
            let frenet = FrenetPoint::new(s, d);
            row.push(LatticeNode {
                row: r,
                col: c,
                frenet,
                cartesian: reference.frenet_to_cartesian(frenet)?,
                obstacle_cost: 0.0,
                value: f64::INFINITY,
                successor: None,
            });
        }
        grid.push(row);
    }
    Ok(Lattice {
        rows: grid,
        lookahead: config.lookahead,
        yaw_mode: config.yaw_mode,
    })
}

/// Distance cost between consecutive samples.
pub fn cost_dis(p1: Point2, p2: Point2) -> f64 {
    p1.distance(p2)
}

/// Collision cost at `position` against the nearest obstacle footprint.
///
/// `d_col` is the distance to the closest obstacle edge. The cost is zero with
/// no obstacles, `k / d_col` when `d_col > d_safe`, and infinite otherwise
/// (including `d_col == d_safe`).
pub fn cost_obs(position: Point2, obstacles: &[Obstacle], params: &CostParams) -> f64 {
    let Some(d_col) = obstacles
        .iter()
        .map(|o| o.clearance(position))
        .min_by(f64::total_cmp)
    else {
        return 0.0;
    };
    if d_col > params.d_safe {
        params.k / d_col
    } else {
        f64::INFINITY
    }
}

/// Cost of ending the plan at `node`: weighted distance from the midline.
pub fn terminal_cost(node: &LatticeNode, params: &CostParams) -> f64 {
    params.terminal_weight * node.frenet.d.abs()
}

/// Orders candidates by cost, then by |d|, then by column.
fn better(a: (f64, &LatticeNode), b: (f64, &LatticeNode)) -> bool {
    let (va, na) = a;
    let (vb, nb) = b;
    if va.is_infinite() || vb.is_infinite() {
        return va < vb;
    }
    let scale = va.abs().max(vb.abs()).max(1.0);
    if (va - vb).abs() > TIE_EPS * scale {
        return va < vb;
    }
    let (da, db) = (na.frenet.d.abs(), nb.frenet.d.abs());
    if (da - db).abs() > TIE_EPS {
        return da < db;
    }
    na.col < nb.col
}

/// Exact DP over the lattice from the last row back to `start`.
///
/// Every node is fully connected to the next row. The value of a last-row
/// node is its terminal cost; the value of any other node is the cheapest
/// `cost_dis + cost_obs(successor) + value(successor)`. The plan then follows
/// stored successors from the best row-0 entry.
pub fn plan(
    start: Point2,
    lattice: &Lattice,
    obstacles: &[Obstacle],
    params: &CostParams,
) -> Result<PlanResult> {
    params.validate()?;
    if lattice.rows.is_empty() || lattice.rows.iter().any(|r| r.is_empty()) {
        return Err(invalid("lattice is empty"));
    }
    let mut solved = lattice.clone();
    for node in solved.rows.iter_mut().flatten() {
        node.obstacle_cost = cost_obs(node.cartesian, obstacles, params);
        node.value = f64::INFINITY;
        node.successor = None;
    }

    let n = solved.rows.len();
    for node in solved.rows[n - 1].iter_mut() {
        node.value = terminal_cost(node, params);
    }
    for r in (0..n - 1).rev() {
        let (head, tail) = solved.rows.split_at_mut(r + 1);
        let next = &tail[0];
        for node in head[r].iter_mut() {
            let mut best: Option<(f64, &LatticeNode)> = None;
            for cand in next {
                let v = cost_dis(node.cartesian, cand.cartesian) + cand.obstacle_cost + cand.value;
                if best.is_none_or(|b| better((v, cand), b)) {
                    best = Some((v, cand));
                }
            }
            if let Some((v, cand)) = best {
                node.value = v;
                node.successor = v.is_finite().then_some(cand.col);
            }
        }
    }

    let mut entry: Option<(f64, &LatticeNode)> = None;
    for cand in &solved.rows[0] {
        let v = cost_dis(start, cand.cartesian) + cand.obstacle_cost + cand.value;
        if entry.is_none_or(|b| better((v, cand), b)) {
            entry = Some((v, cand));
        }
    }
    let (total_cost, first) = entry.expect("nonempty row");
    if !total_cost.is_finite() {
        return Err(Error::NoFeasiblePath);
    }

    let mut columns = Vec::with_capacity(n);
    let mut waypoints = Vec::with_capacity(n + 1);
    waypoints.push(start);
    let mut col = first.col;
    for r in 0..n {
        let node = &solved.rows[r][col];
        columns.push(col);
        waypoints.push(node.cartesian);
        if let Some(next) = node.successor {
            col = next;
        }
    }

    let path = Curve2D::build(&waypoints, DEFAULT_SAMPLES_PER_SEGMENT)?;
    let station = lattice.lookahead.min(path.total_length());
    let command_yaw = match lattice.yaw_mode {
        YawMode::Bearing => {
            let v = path.point_at(station)? - start;
            v.y.atan2(v.x)
        }
        YawMode::Tangent => path.yaw_at(station)?,
    };
    Ok(PlanResult {
        waypoints,
        path,
        command_yaw,
        total_cost,
        columns,
        lattice: solved,
    })
}

/// `(s, yaw)` along the planned path every [`YAW_PROFILE_STEP`] meters.
pub fn path_yaw_profile(result: &PlanResult) -> Vec<(f64, f64)> {
    result
        .path
        .sample(YAW_PROFILE_STEP)
        .into_iter()
        .map(|(s, _)| (s, result.path.yaw_at(s).expect("station on path")))
        .collect()
}

/// Serializes infinite costs as JSON `null`.
mod inf_as_null {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else {
            s.serialize_none()
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::INFINITY))
    }
}
