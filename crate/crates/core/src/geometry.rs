//! Doubling and dimension constants, length metrics, and the geodesic
//! ball-containment lemma on finite spaces.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::maximal::weak_type_constant;
use crate::space::{shortest_paths, MetricKind, MetricMeasureSpace};

/// Absolute slack on the approximate distance equalities of the lemma
/// search, on top of the caller's `delta`.
pub const GEODESIC_EPS: f64 = 1e-12;

/// Where the least doubling constant is attained.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DoublingWitness {
    pub constant: f64,
    pub center: usize,
    /// `μ(B(center, 2 radius)) / μ(B(center, radius)) == constant`.
    pub radius: f64,
}

/// Least `c_d` with `μ(B(x, 2r)) <= c_d μ(B(x, r))` for all `x` and `r > 0`.
///
/// Both ball masses are step functions of `r` that jump just after a
/// distance value `t` and just after `t / 2`, so evaluating at those
/// breakpoints is exhaustive.
pub fn doubling_witness(space: &MetricMeasureSpace) -> DoublingWitness {
    let per_center: Vec<DoublingWitness> = (0..space.n())
        .into_par_iter()
        .map(|x| {
            let shells = space.shells(x);
            let cum = shells.cumulative_mass();
            let mut breakpoints: Vec<f64> = shells.radii()[1..]
                .iter()
                .flat_map(|&t| [t, t / 2.0])
                .collect();
            breakpoints.sort_by(f64::total_cmp);
            breakpoints.dedup();
            let mut best = DoublingWitness {
                constant: 1.0,
                center: x,
                radius: shells.radii().get(1).copied().unwrap_or(1.0),
            };
            for r in breakpoints {
                let inner = cum[shells.realizable(r) - 1];
                let outer = cum[shells.realizable(2.0 * r) - 1];
                let q = outer / inner;
                if q > best.constant {
                    best = DoublingWitness {
                        constant: q,
                        center: x,
                        radius: r,
                    };
                }
            }
            best
        })
        .collect();
    per_center
        .into_iter()
        .reduce(|a, b| if b.constant > a.constant { b } else { a })
        .expect("spaces are nonempty")
}

pub fn doubling_constant(space: &MetricMeasureSpace) -> f64 {
    doubling_witness(space).constant
}

/// `s = log2 c_d`.
pub fn doubling_dimension(space: &MetricMeasureSpace) -> f64 {
    doubling_constant(space).log2()
}

/// Best constant of the volume lower bound
/// `μ(B(y, r)) / μ(B(x, R)) >= C (r / R)^s` for `y ∈ B(x, R)`,
/// `0 < r <= R < diam`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DimensionAudit {
    pub exponent: f64,
    pub best_constant: f64,
    pub x: usize,
    pub y: usize,
    /// Limits of `r` and `R` at which the infimum is approached.
    pub r: f64,
    #[serde(rename = "R")]
    pub big_r: f64,
}

/// Exhaustive infimum over all admissible `(x, y, r, R)`.
///
/// For `R` in a shell interval `(a_i, a_{i+1}]` of `x` and `r` in a shell
/// interval `(b_j, b_{j+1}]` of `y`, the ratio `(R / r)^s` is smallest for
/// `R` at the left end and `r` at the right end, subject to `r <= R`.
pub fn dimension_audit(space: &MetricMeasureSpace, exponent: f64) -> DimensionAudit {
    let diam = space.diameter();
    let fallback = DimensionAudit {
        exponent,
        best_constant: 1.0,
        x: 0,
        y: 0,
        r: diam,
        big_r: diam,
    };
    let per_center: Vec<Option<DimensionAudit>> = (0..space.n())
        .into_par_iter()
        .map(|x| {
            let sx = space.shells(x);
            let mut best: Option<DimensionAudit> = None;
            for i in 0..sx.len() {
                let a_i = sx.radii()[i];
                if a_i >= diam {
                    break;
                }
                let big_r_hi = sx
                    .radii()
                    .get(i + 1)
                    .copied()
                    .unwrap_or(f64::INFINITY)
                    .min(diam);
                let outer = sx.cumulative_mass()[i];
                for &y in sx.members(i) {
                    let sy = space.shells(y as usize);
                    for j in 0..sy.len() {
                        let b_j = sy.radii()[j];
                        if b_j >= big_r_hi {
                            break;
                        }
                        let b_next = sy.radii().get(j + 1).copied().unwrap_or(f64::INFINITY);
                        let (factor, r, big_r) = if b_next <= a_i {
                            (a_i / b_next, b_next, a_i)
                        } else {
                            let t = a_i.max(b_j);
                            (1.0, t, t)
                        };
                        let c = sy.cumulative_mass()[j] / outer * factor.powf(exponent);
                        if best.is_none_or(|b| c < b.best_constant) {
                            best = Some(DimensionAudit {
                                exponent,
                                best_constant: c,
                                x,
                                y: y as usize,
                                r,
                                big_r,
                            });
                        }
                    }
                }
            }
            best
        })
        .collect();
    per_center
        .into_iter()
        .flatten()
        .reduce(|a, b| {
            if b.best_constant < a.best_constant {
                b
            } else {
                a
            }
        })
        .unwrap_or(fallback)
}

/// The shortest-path metric `ρ` of the space's edges.
pub fn length_metric(space: &MetricMeasureSpace) -> Result<MetricMeasureSpace> {
    let edges = space.edges().ok_or_else(|| {
        Error::Precondition("length metric needs a graph-backed space (no edges stored)".into())
    })?;
    let dist = shortest_paths(space.n(), edges)?;
    Ok(space.with_distances(dist, MetricKind::Graph))
}

/// `max_{x != y} ρ(x, y) / d(x, y)` where `ρ` is the length metric of the
/// stored edges. Exactly 1 on length-metric spaces.
pub fn quasiconvexity_constant(space: &MetricMeasureSpace) -> Result<f64> {
    if space.is_length_metric() {
        return Ok(1.0);
    }
    let rho = length_metric(space)?;
    let n = space.n();
    Ok((0..n)
        .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
        .map(|(i, j)| rho.dist(i, j) / space.dist(i, j))
        .fold(1.0, f64::max))
}

/// Summary of the geometric constants of a space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeometryReport {
    pub doubling_constant: f64,
    pub doubling_dimension: f64,
    /// Only for graph-backed spaces.
    pub quasiconvexity_constant: Option<f64>,
    pub witness: DoublingWitness,
    /// Covering constant of the weak-type estimate.
    pub covering_constant: f64,
    pub dimension_audit: Option<DimensionAudit>,
}

pub fn geometry_report(space: &MetricMeasureSpace, audit: bool) -> GeometryReport {
    let witness = doubling_witness(space);
    let s = witness.constant.log2();
    GeometryReport {
        doubling_constant: witness.constant,
        doubling_dimension: s,
        quasiconvexity_constant: space
            .edges()
            .is_some()
            .then(|| quasiconvexity_constant(space).ok())
            .flatten(),
        witness,
        covering_constant: weak_type_constant(space),
        dimension_audit: audit.then(|| dimension_audit(space, s)),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LemmaBranch {
    /// `d(x, x0) >= r/2`: a center on a geodesic from `x` towards `x0`.
    Far,
    /// `d(x, x0) < r/2`: the ball `B(x0, r/2)` itself.
    Near,
}

/// A ball `B(center, radius)` inside `B(x, r) ∩ B(x0, R)`. When
/// `radius <= 0` the witness degenerates to the point `center`, which must
/// lie in the intersection.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LemmaWitness {
    pub center: usize,
    pub radius: f64,
    pub members: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LemmaOutcome {
    pub branch: LemmaBranch,
    pub witness: Option<LemmaWitness>,
    /// `μ(B(x, r) ∩ B(x0, R))`.
    pub intersection_mass: f64,
    /// Branch candidates examined before success or failure.
    pub candidates: usize,
}

impl LemmaOutcome {
    pub fn succeeded(&self) -> bool {
        self.witness.is_some()
    }
}

fn ball_inside(
    space: &MetricMeasureSpace,
    z: usize,
    radius: f64,
    x0: usize,
    big_r: f64,
    x: usize,
    r: f64,
) -> Option<Vec<usize>> {
    let members: Vec<usize> = if radius > 0.0 {
        (0..space.n())
            .filter(|&y| space.dist(z, y) < radius)
            .collect()
    } else {
        vec![z]
    };
    members
        .iter()
        .all(|&y| space.dist(x, y) < r && space.dist(x0, y) < big_r)
        .then_some(members)
}

/// Searches for a ball of radius `r/2 - delta` inside `B(x, r) ∩ B(x0, R)`.
///
/// Follows the two cases of the continuum argument. In the far case the
/// candidates are points `z` with `d(z, x) ≈ r/2` and
/// `d(z, x0) ≈ d(x, x0) - r/2`, both up to `delta`; on a graph such points
/// exist only up to the mesh, so `delta` should be at least the longest
/// edge. A missing witness is reported, not raised.
pub fn check_geodesic_lemma(
    space: &MetricMeasureSpace,
    x0: usize,
    big_r: f64,
    x: usize,
    r: f64,
    delta: f64,
) -> Result<LemmaOutcome> {
    if !(big_r > 0.0) {
        return Err(Error::NonPositiveRadius(big_r));
    }
    if !(r > 0.0) {
        return Err(Error::NonPositiveRadius(r));
    }
    if !(delta >= 0.0) {
        return Err(Error::Precondition(format!(
            "slack must be nonnegative, got {delta}"
        )));
    }
    if x0 >= space.n() || x >= space.n() {
        return Err(Error::Precondition(
            "lemma points must belong to the space".into(),
        ));
    }
    if !(space.dist(x, x0) < big_r) {
        return Err(Error::Precondition(format!(
            "x = {x} is not in B({x0}, {big_r})"
        )));
    }
    if r > 2.0 * big_r {
        return Err(Error::Precondition(format!(
            "r = {r} exceeds 2R = {}",
            2.0 * big_r
        )));
    }
    let intersection_mass = (0..space.n())
        .filter(|&y| space.dist(x, y) < r && space.dist(x0, y) < big_r)
        .map(|y| space.mass(y))
        .fold(0.0, |a, b| a + b);
    let half = r / 2.0;
    let radius = half - delta;
    let d_x = space.dist(x, x0);

    if d_x < half {
        let witness = ball_inside(space, x0, radius, x0, big_r, x, r).map(|members| LemmaWitness {
            center: x0,
            radius,
            members,
        });
        return Ok(LemmaOutcome {
            branch: LemmaBranch::Near,
            witness,
            intersection_mass,
            candidates: 1,
        });
    }

    let slack = delta + GEODESIC_EPS;
    let mut candidates = 0;
    let mut witness = None;
    for z in 0..space.n() {
        if (space.dist(z, x) - half).abs() > slack
            || (space.dist(z, x0) - (d_x - half)).abs() > slack
        {
            continue;
        }
        candidates += 1;
        if let Some(members) = ball_inside(space, z, radius, x0, big_r, x, r) {
            witness = Some(LemmaWitness {
                center: z,
                radius,
                members,
            });
            break;
        }
    }
    Ok(LemmaOutcome {
        branch: LemmaBranch::Far,
        witness,
        intersection_mass,
        candidates,
    })
}

/// The volume bound `μ(B(x, r) ∩ B) >= μ(B) c_d^{-2} (r / 2R)^s`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmallBallCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

pub fn small_ball_bound(
    space: &MetricMeasureSpace,
    x0: usize,
    big_r: f64,
    x: usize,
    r: f64,
    doubling: f64,
    exponent: f64,
) -> SmallBallCheck {
    let in_ball = |y: usize| space.dist(x0, y) < big_r;
    let lhs: f64 = (0..space.n())
        .filter(|&y| in_ball(y) && space.dist(x, y) < r)
        .map(|y| space.mass(y))
        .fold(0.0, |a, b| a + b);
    let ball_mass: f64 = (0..space.n())
        .filter(|&y| in_ball(y))
        .map(|y| space.mass(y))
        .fold(0.0, |a, b| a + b);
    let rhs = ball_mass / (doubling * doubling) * (r / (2.0 * big_r)).powf(exponent);
    SmallBallCheck {
        lhs,
        rhs,
        holds: lhs >= rhs,
    }
}
