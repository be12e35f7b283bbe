//! Exhaustive-search reference for the lattice planner.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use trackpilot_core::perception::Obstacle;
use trackpilot_core::planner::{CostParams, Lattice};
use trackpilot_core::{FrenetPoint, Point2};

/// Nearest-obstacle collision cost written out from its definition.
pub fn oracle_obstacle_cost(p: Point2, obstacles: &[Obstacle], params: &CostParams) -> f64 {
    if obstacles.is_empty() {
        return 0.0;
    }
    let d_col = obstacles
        .iter()
        .map(|o| ((p.x - o.position.x).powi(2) + (p.y - o.position.y).powi(2)).sqrt() - o.radius)
        .fold(f64::INFINITY, f64::min);
    if d_col > params.d_safe {
        params.k / d_col
    } else {
        f64::INFINITY
    }
}

pub fn path_cost(
    start: Point2,
    lattice: &Lattice,
    cols: &[usize],
    obstacles: &[Obstacle],
    params: &CostParams,
) -> f64 {
    let mut prev = start;
    let mut total = 0.0;
    for (r, &c) in cols.iter().enumerate() {
        let node = &lattice.rows[r][c];
        total += ((node.cartesian.x - prev.x).powi(2) + (node.cartesian.y - prev.y).powi(2)).sqrt();
        total += oracle_obstacle_cost(node.cartesian, obstacles, params);
        prev = node.cartesian;
    }
    let last = &lattice.rows[cols.len() - 1][cols[cols.len() - 1]];
    total + params.terminal_weight * last.frenet.d.abs()
}

/// Exhaustive search over every column sequence. Ties (relative 1e-12) go
/// to the sequence whose first differing row has the smaller |d|, then the
/// smaller column.
pub fn brute_force(
    start: Point2,
    lattice: &Lattice,
    obstacles: &[Obstacle],
    params: &CostParams,
) -> Option<(f64, Vec<usize>)> {
    let widths: Vec<usize> = lattice.rows.iter().map(|r| r.len()).collect();
    let mut cols = vec![0; widths.len()];
    let mut best: Option<(f64, Vec<usize>)> = None;
    loop {
        let c = path_cost(start, lattice, &cols, obstacles, params);
        if c.is_finite() {
            let better = match &best {
                None => true,
                Some((bc, bcols)) => {
                    let scale = c.abs().max(bc.abs()).max(1.0);
                    if (c - bc).abs() > 1e-12 * scale {
                        c < *bc
                    } else {
                        let key = |cs: &[usize]| -> Vec<(f64, usize)> {
                            cs.iter()
                                .enumerate()
                                .map(|(r, &k)| (lattice.rows[r][k].frenet.d.abs(), k))
                                .collect()
                        };
                        key(&cols)
                            .iter()
                            .zip(key(bcols).iter())
                            .find(|(a, b)| a != b)
                            .is_some_and(|(a, b)| a.0 < b.0 - 1e-12 || (a.0 - b.0).abs() <= 1e-12 && a.1 < b.1)
                    }
                }
            };
            if better {
                best = Some((c, cols.clone()));
            }
        }
        // Odometer increment.
        let mut r = cols.len();
        loop {
            if r == 0 {
                return best;
            }
            r -= 1;
            cols[r] += 1;
            if cols[r] < widths[r] {
                break;
            }
            cols[r] = 0;
        }
    }
}

pub fn random_lattice(rng: &mut ChaCha8Rng) -> Lattice {
    let rows = rng.gen_range(1..=5);
    let cols = rng.gen_range(1..=5);
    let points: Vec<Vec<(FrenetPoint, Point2)>> = (0..rows)
        .map(|r| {
            (0..cols)
                .map(|c| {
                    let s = (r + 1) as f64 + rng.gen_range(-0.2..0.2);
                    let d = (c as f64 - (cols - 1) as f64 / 2.0) * 0.3 + rng.gen_range(-0.05..0.05);
                    (FrenetPoint::new(s, d), Point2::new(s, d))
                })
                .collect()
        })
        .collect();
    Lattice::from_points(&points, 2.0).unwrap()
}
