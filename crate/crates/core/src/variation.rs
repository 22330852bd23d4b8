//! Discrete variation measures, upper-gradient checks and ball-wise
//! Poincaré-type inequalities.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::maximal::average_over;
use crate::report::{extended_f64, ratio, within};
use crate::space::{Ball, MetricMeasureSpace, PointMeasure, ScalarField, Shells};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VariationMode {
    /// Edge differences weighted by the mean endpoint mass.
    Graph,
    /// Finite-difference gradient magnitude on a grid sample.
    Grid,
}

impl std::str::FromStr for VariationMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "graph" => Ok(VariationMode::Graph),
            "grid" => Ok(VariationMode::Grid),
            other => Err(Error::Precondition(format!(
                "unknown variation mode {other:?} (expected graph or grid)"
            ))),
        }
    }
}

/// The discrete variation measure `ν_u` of `u`.
///
/// Graph mode: `ν_u({x}) = 1/2 Σ_{y ~ x} w(x, y) |u(x) - u(y)| / ℓ(x, y)`
/// with `w(x, y) = (μ(x) + μ(y)) / 2`. Grid mode: `|∇u(x)| μ(x)` with
/// central differences inside and one-sided differences on the boundary.
pub fn variation_measure(
    space: &MetricMeasureSpace,
    u: &ScalarField,
    mode: VariationMode,
) -> Result<PointMeasure> {
    u.check_len(space, "function")?;
    match mode {
        VariationMode::Graph => {
            let edges = space.edges().ok_or_else(|| {
                Error::Precondition("graph variation needs a graph-backed space".into())
            })?;
            let mut nu = vec![0.0; space.n()];
            for e in edges {
                let w = (space.mass(e.a) + space.mass(e.b)) / 2.0;
                let slope = (u[e.a] - u[e.b]).abs() / e.length;
                let half = 0.5 * w * slope;
                nu[e.a] += half;
                nu[e.b] += half;
            }
            PointMeasure::new(nu)
        }
        VariationMode::Grid => {
            let grid = space.grid().ok_or_else(|| {
                Error::Precondition("grid variation needs a space tagged as a grid sample".into())
            })?;
            let h = grid.spacing;
            let derivative = |at: &dyn Fn(usize) -> f64, i: usize, len: usize| -> f64 {
                if len < 2 {
                    0.0
                } else if i == 0 {
                    (at(1) - at(0)) / h
                } else if i == len - 1 {
                    (at(i) - at(i - 1)) / h
                } else {
                    (at(i + 1) - at(i - 1)) / (2.0 * h)
                }
            };
            let nu = (0..space.n())
                .map(|p| {
                    let (row, col) = (p / grid.cols, p % grid.cols);
                    let dx = derivative(&|c| u[grid.index(row, c)], col, grid.cols);
                    let dy = derivative(&|r| u[grid.index(r, col)], row, grid.rows);
                    dx.hypot(dy) * space.mass(p)
                })
                .collect();
            PointMeasure::new(nu)
        }
    }
}

/// Total mass of [`variation_measure`].
pub fn total_variation(
    space: &MetricMeasureSpace,
    u: &ScalarField,
    mode: VariationMode,
) -> Result<f64> {
    Ok(variation_measure(space, u, mode)?.total())
}

/// A path whose line integral of `g` falls short of the oscillation of `u`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathViolation {
    pub path: Vec<usize>,
    pub oscillation: f64,
    pub integral: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UpperGradientOutcome {
    pub passed: bool,
    pub pairs: usize,
    pub paths: usize,
    /// True when no pair hit the path budget.
    pub exhaustive: bool,
    pub violation: Option<PathViolation>,
}

/// Checks `|u(x) - u(y)| <= ∫_γ g ds` over simple edge paths `γ`. The line
/// integral is the trapezoid rule on each traversed edge.
///
/// Edge weights are nonnegative, so the least integral over all paths is
/// attained by a simple path found with Dijkstra's algorithm; checking that
/// path per pair settles every path at once and `path_budget` never binds.
pub fn upper_gradient_check(
    space: &MetricMeasureSpace,
    u: &ScalarField,
    g: &ScalarField,
    path_budget: usize,
) -> Result<UpperGradientOutcome> {
    u.check_len(space, "function")?;
    g.check_len(space, "upper gradient")?;
    if let Some(i) = g.values().iter().position(|&v| v < 0.0) {
        return Err(Error::Precondition(format!("g is negative at point {i}")));
    }
    if path_budget == 0 {
        return Err(Error::Precondition("path budget must be positive".into()));
    }
    let edges = space
        .edges()
        .ok_or_else(|| Error::Precondition("upper gradients need a graph-backed space".into()))?;
    let n = space.n();
    let mut adjacency: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    for e in edges {
        let w = e.length * (g[e.a] + g[e.b]) / 2.0;
        adjacency[e.a].push((e.b, w));
        adjacency[e.b].push((e.a, w));
    }

    let mut outcome = UpperGradientOutcome {
        passed: true,
        pairs: 0,
        paths: 0,
        exhaustive: true,
        violation: None,
    };
    for x in 0..n {
        let (integral, previous) = cheapest_paths(&adjacency, x);
        for y in x + 1..n {
            let need = (u[x] - u[y]).abs();
            outcome.pairs += 1;
            if integral[y].is_finite() {
                outcome.paths += 1;
            }
            if !within(need, integral[y]) {
                let mut path = vec![y];
                while let Some(p) = previous[*path.last().unwrap()] {
                    path.push(p);
                }
                path.reverse();
                outcome.passed = false;
                outcome.violation = Some(PathViolation {
                    path,
                    oscillation: need,
                    integral: integral[y],
                });
                return Ok(outcome);
            }
        }
    }
    Ok(outcome)
}

/// Single-source least path integrals and predecessors, ties broken by index.
fn cheapest_paths(
    adjacency: &[Vec<(usize, f64)>],
    source: usize,
) -> (Vec<f64>, Vec<Option<usize>>) {
    use std::cmp::Reverse;
    use std::collections::BinaryHeap;

    struct Key(f64);
    impl PartialEq for Key {
        fn eq(&self, other: &Self) -> bool {
            self.cmp(other).is_eq()
        }
    }
    impl Eq for Key {}
    impl PartialOrd for Key {
        fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
            Some(self.cmp(other))
        }
    }
    impl Ord for Key {
        fn cmp(&self, other: &Self) -> std::cmp::Ordering {
            self.0.total_cmp(&other.0)
        }
    }

    let n = adjacency.len();
    let mut best = vec![f64::INFINITY; n];
    let mut previous = vec![None; n];
    let mut heap = BinaryHeap::new();
    best[source] = 0.0;
    heap.push(Reverse((Key(0.0), source)));
    while let Some(Reverse((Key(d), at))) = heap.pop() {
        if d > best[at] {
            continue;
        }
        for &(next, w) in &adjacency[at] {
            let cand = d + w;
            if cand < best[next] {
                best[next] = cand;
                previous[next] = Some(at);
                heap.push(Reverse((Key(cand), next)));
            }
        }
    }
    (best, previous)
}

/// One realizable ball of the Poincaré sweep.
///
/// The ball is `{y : d(center, y) <= radius_limit}`, i.e. the open ball
/// `B(center, r)` for every `r` in `(radius_limit, next distance]`;
/// `radius` is a representative from that interval. Since the right-hand
/// side grows with `r`, the least constant valid on the whole interval is
/// attained as `r` decreases to `radius_limit`, and `rhs` is that limit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoincareRow {
    pub center: usize,
    pub radius: f64,
    pub radius_limit: f64,
    pub size: usize,
    pub lhs: f64,
    pub rhs: f64,
    #[serde(with = "extended_f64")]
    pub constant: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoincareReport {
    pub eta: f64,
    pub normalized: bool,
    #[serde(with = "extended_f64")]
    pub minimal_constant: f64,
    pub worst_ball: Option<PoincareRow>,
    pub per_ball: Vec<PoincareRow>,
}

impl PoincareReport {
    pub fn is_finite(&self) -> bool {
        self.minimal_constant.is_finite()
    }
}

/// Representative open radius for shell `i` of a center.
pub(crate) fn representative_radius(shells: &Shells, i: usize) -> f64 {
    let radii = shells.radii();
    match (radii.get(i + 1), i) {
        (Some(&next), _) => (radii[i] + next) / 2.0,
        (None, 0) => 1.0,
        (None, _) => radii[i] + (radii[i] - radii[i - 1]) / 2.0,
    }
}

/// `∫_B |u - u_B| dμ` over the given points.
pub(crate) fn oscillation_integral(space: &MetricMeasureSpace, u: &[f64], points: &[usize]) -> f64 {
    let avg = average_over(space, u, points);
    points
        .iter()
        .map(|&i| (u[i] - avg).abs() * space.mass(i))
        .fold(0.0, |a, b| a + b)
}

fn merge_sorted(a: &[usize], b: &[usize], out: &mut Vec<usize>) {
    out.clear();
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        if a[i] < b[j] {
            out.push(a[i]);
            i += 1;
        } else {
            out.push(b[j]);
            j += 1;
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
}

fn rows_for_center(
    space: &MetricMeasureSpace,
    u: &ScalarField,
    nu: &PointMeasure,
    eta: f64,
    normalized: bool,
    x: usize,
) -> Vec<PoincareRow> {
    let shells = space.shells(x);
    let order = shells.order();
    let cum_mass = shells.cumulative_mass();
    let mut cum_nu = Vec::with_capacity(shells.len());
    let mut acc = 0.0;
    let mut pos = 0;
    for &end in shells.ends() {
        while pos < end as usize {
            acc += nu[order[pos] as usize];
            pos += 1;
        }
        cum_nu.push(acc);
    }
    // members kept in index order so sums match those over `Ball::members`
    let mut members: Vec<usize> = Vec::with_capacity(order.len());
    let mut merged: Vec<usize> = Vec::with_capacity(order.len());
    (0..shells.len())
        .map(|i| {
            let t = shells.radii()[i];
            let end = shells.ends()[i] as usize;
            let mut fresh: Vec<usize> = order[members.len()..end]
                .iter()
                .map(|&p| p as usize)
                .collect();
            fresh.sort_unstable();
            merge_sorted(&members, &fresh, &mut merged);
            std::mem::swap(&mut members, &mut merged);
            let integral = oscillation_integral(space, u.values(), &members);
            let dilated = shells.up_to(eta * t) - 1;
            let (lhs, rhs) = if normalized {
                (
                    integral / cum_mass[i],
                    t * cum_nu[dilated] / cum_mass[dilated],
                )
            } else {
                (integral, t * cum_nu[dilated])
            };
            PoincareRow {
                center: x,
                radius: representative_radius(shells, i),
                radius_limit: t,
                size: end,
                lhs,
                rhs,
                constant: ratio(lhs, rhs),
            }
        })
        .collect()
}

/// Least constant of the ball-wise Poincaré-type inequality over every
/// realizable ball of the space.
///
/// Unnormalized: `∫_B |u - u_B| dμ <= C r ν(ηB)`. Normalized:
/// `⨍_B |u - u_B| dμ <= C r ν(ηB) / μ(ηB)`.
pub fn check_ball_poincare(
    space: &MetricMeasureSpace,
    u: &ScalarField,
    nu: &PointMeasure,
    eta: f64,
    normalized: bool,
) -> Result<PoincareReport> {
    if !(eta >= 1.0) {
        return Err(Error::Precondition(format!(
            "dilation must be at least 1, got {eta}"
        )));
    }
    u.check_len(space, "function")?;
    nu.check_len(space, "measure")?;
    let per_ball: Vec<PoincareRow> = (0..space.n())
        .into_par_iter()
        .map(|x| rows_for_center(space, u, nu, eta, normalized, x))
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect();
    let mut worst: Option<&PoincareRow> = None;
    for row in &per_ball {
        if worst.is_none_or(|w| row.constant > w.constant) {
            worst = Some(row);
        }
    }
    Ok(PoincareReport {
        eta,
        normalized,
        minimal_constant: worst.map_or(0.0, |w| w.constant),
        worst_ball: worst.cloned(),
        per_ball,
    })
}

/// The inequality evaluated on one concrete open ball `B(x, r)` with
/// `ηB = B(x, ηr)`.
pub fn poincare_ball_constant(
    space: &MetricMeasureSpace,
    u: &ScalarField,
    nu: &PointMeasure,
    b: &Ball,
    eta: f64,
    normalized: bool,
) -> Result<PoincareRow> {
    if !(eta >= 1.0) {
        return Err(Error::Precondition(format!(
            "dilation must be at least 1, got {eta}"
        )));
    }
    let integral = oscillation_integral(space, u.values(), &b.members);
    let dilated: Vec<usize> = (0..space.n())
        .filter(|&y| space.dist(b.center, y) < eta * b.radius)
        .collect();
    let nu_dilated = nu.measure_of(&dilated);
    let (lhs, rhs) = if normalized {
        (
            integral / b.mass(space),
            b.radius * nu_dilated / space.measure_of(&dilated),
        )
    } else {
        (integral, b.radius * nu_dilated)
    };
    Ok(PoincareRow {
        center: b.center,
        radius: b.radius,
        radius_limit: b.radius,
        size: b.len(),
        lhs,
        rhs,
        constant: ratio(lhs, rhs),
    })
}
