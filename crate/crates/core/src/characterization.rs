//! Pointwise maximal-function inequalities and the level-set construction
//! that turns them into ball-wise Poincaré-type bounds.
//!
//! The hypothesis is
//!
//! ```text
//! |u(x) - u(y)| <= C0 d(x, y) [M_{σ d(x,y), ν}(x) + M_{σ d(x,y), ν}(y)]    for all x, y
//! ```
//!
//! and the conclusion is `∫_B |u - u_B| dμ <= C r ν(ηB)` for every ball,
//! with `η = 3σ`. [`poincare_from_pointwise`] computes the least such `C`
//! and attaches a [`ProofTrace`] per audited ball: the level sets
//! `E_k = {x ∈ B : M_λ(x) <= 2^k}` of the maximal function of
//! `λ = ν|_{τB}`, the suprema `a_k`, the connecting radii `r_k`, the
//! threshold index `k0` and every intermediate inequality, each checked
//! numerically with explicit per-space constants.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::doubling_constant;
use crate::maximal::{weak_type_constant, MaximalTable};
use crate::report::{extended_f64, ratio, within};
use crate::space::{ball, Ball, MetricMeasureSpace, PointMeasure, ScalarField, SpaceDocument};
use crate::variation::{check_ball_poincare, PoincareReport, PoincareRow};

/// Certificate format tag.
pub const CERTIFICATE_FORMAT: &str = "bvcert-certificate/1";

/// Exponent used in place of `log2 c_d` when that value is at most 1; the
/// geometric series of the construction need an exponent above 1.
pub const FALLBACK_EXPONENT: f64 = 2.0;

/// Spaces up to this size have every ball audited by default.
pub const AUDIT_ALL_LIMIT: usize = 200;

/// Balls audited by default on larger spaces.
pub const AUDIT_WORST_DEFAULT: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WorstPair {
    pub x: usize,
    pub y: usize,
    pub distance: f64,
    pub oscillation: f64,
    pub maximal_x: f64,
    pub maximal_y: f64,
    #[serde(with = "extended_f64")]
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointwiseReport {
    pub sigma: f64,
    /// Exponent of the Sobolev-type variant; absent for the measure form.
    #[serde(
        default,
        skip_serializing_if = "Option::is_none",
        with = "opt_extended"
    )]
    pub p: Option<f64>,
    pub c0: Option<f64>,
    #[serde(with = "extended_f64")]
    pub c0_minimal: f64,
    pub passed: bool,
    pub worst_pair: Option<WorstPair>,
    /// `maximal[x * n + y]` is the maximal value at `x` for the pair `(x, y)`.
    #[serde(skip)]
    pub maximal: Vec<f64>,
}

mod opt_extended {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            Some(x) => super::extended_f64::serialize(x, s),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<f64>, D::Error> {
        #[derive(Deserialize)]
        struct W(#[serde(with = "super::extended_f64")] f64);
        Ok(Option::<W>::deserialize(d)?.map(|w| w.0))
    }
}

impl PointwiseReport {
    /// Maximal values `(M(x), M(y))` used for the pair `(x, y)`.
    pub fn pair_maximal(&self, x: usize, y: usize) -> (f64, f64) {
        let n = (self.maximal.len() as f64).sqrt() as usize;
        (self.maximal[x * n + y], self.maximal[y * n + x])
    }
}

fn check_sigma(sigma: f64) -> Result<()> {
    if sigma >= 1.0 {
        Ok(())
    } else {
        Err(Error::Precondition(format!(
            "sigma must be at least 1, got {sigma}"
        )))
    }
}

/// Sweeps all pairs; `maximal_at(x, r)` is the maximal value at `x` for radius bound `r`.
fn pair_sweep(
    space: &MetricMeasureSpace,
    u: &ScalarField,
    maximal_at: impl Fn(usize, f64) -> f64 + Sync,
    sigma: f64,
) -> (f64, Option<WorstPair>, Vec<f64>) {
    let n = space.n();
    let rows: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|x| {
            (0..n)
                .map(|y| {
                    if y == x {
                        0.0
                    } else {
                        maximal_at(x, sigma * space.dist(x, y))
                    }
                })
                .collect()
        })
        .collect();
    let maximal = rows.concat();
    let best: Vec<Option<WorstPair>> = (0..n)
        .into_par_iter()
        .map(|x| {
            let mut best: Option<WorstPair> = None;
            for y in x + 1..n {
                let d = space.dist(x, y);
                let (mx, my) = (maximal[x * n + y], maximal[y * n + x]);
                let osc = (u[x] - u[y]).abs();
                let q = ratio(osc, d * (mx + my));
                if best.is_none_or(|b| q > b.ratio) {
                    best = Some(WorstPair {
                        x,
                        y,
                        distance: d,
                        oscillation: osc,
                        maximal_x: mx,
                        maximal_y: my,
                        ratio: q,
                    });
                }
            }
            best
        })
        .collect();
    let worst = best
        .into_iter()
        .flatten()
        .reduce(|a, b| if b.ratio > a.ratio { b } else { a });
    (worst.map_or(0.0, |w| w.ratio), worst, maximal)
}

fn finish(
    sigma: f64,
    p: Option<f64>,
    c0: Option<f64>,
    (c0_minimal, worst_pair, maximal): (f64, Option<WorstPair>, Vec<f64>),
) -> PointwiseReport {
    let passed = match c0 {
        Some(c) => within(c0_minimal, c),
        None => c0_minimal.is_finite(),
    };
    PointwiseReport {
        sigma,
        p,
        c0,
        c0_minimal,
        passed,
        worst_pair,
        maximal,
    }
}

/// Least `C0` for the pointwise inequality with maximal functions of `ν`
/// restricted to radius `σ d(x, y)`, over all pairs.
///
/// With `ν = g μ` this is the Sobolev-space form; with `ν` a variation
/// measure and `σ = 2τ` it is the oscillation estimate implied by a
/// Poincaré inequality.
pub fn check_pointwise(
    space: &MetricMeasureSpace,
    u: &ScalarField,
    nu: &PointMeasure,
    sigma: f64,
    c0: Option<f64>,
) -> Result<PointwiseReport> {
    check_sigma(sigma)?;
    if let Some(c) = c0 {
        if !(c > 0.0) {
            return Err(Error::Precondition(format!("C0 must be positive, got {c}")));
        }
    }
    u.check_len(space, "function")?;
    nu.check_len(space, "measure")?;
    let table = MaximalTable::of_measure(space, nu);
    let sweep = pair_sweep(space, u, |x, r| table.query(space, x, r), sigma);
    Ok(finish(sigma, None, c0, sweep))
}

/// Least `C` in
/// `|u(x) - u(y)| <= C d [(M_{σd} g^p(x))^{1/p} + (M_{σd} g^p(y))^{1/p}]`.
/// `p = ∞` compares against `g(x) + g(y)` directly.
pub fn check_sobolev_pointwise(
    space: &MetricMeasureSpace,
    u: &ScalarField,
    g: &ScalarField,
    p: f64,
    sigma: f64,
) -> Result<PointwiseReport> {
    check_sigma(sigma)?;
    if !(p > 0.0) {
        return Err(Error::Precondition(format!("p must be positive, got {p}")));
    }
    u.check_len(space, "function")?;
    g.check_len(space, "gradient")?;
    if let Some(i) = g.values().iter().position(|&v| v < 0.0) {
        return Err(Error::Precondition(format!("g is negative at point {i}")));
    }
    let sweep = if p.is_infinite() {
        pair_sweep(space, u, |x, _| g[x], sigma)
    } else {
        let table = MaximalTable::of_function(space, &g.map(|v| v.powf(p)));
        pair_sweep(
            space,
            u,
            |x, r| table.query(space, x, r).powf(1.0 / p),
            sigma,
        )
    };
    Ok(finish(sigma, Some(p), None, sweep))
}

/// Per-space constants used by the construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpaceConstants {
    /// `c_d`.
    pub doubling: f64,
    /// `log2 c_d`.
    pub dimension: f64,
    /// The exponent `s > 1` actually used.
    pub exponent: f64,
    /// Covering constant `C_w` of the weak-type estimate.
    pub covering: f64,
}

pub fn space_constants(space: &MetricMeasureSpace) -> SpaceConstants {
    let doubling = doubling_constant(space);
    let dimension = doubling.log2();
    SpaceConstants {
        doubling,
        dimension,
        exponent: if dimension > 1.0 {
            dimension
        } else {
            FALLBACK_EXPONENT
        },
        covering: weak_type_constant(space),
    }
}

/// Constants of one traced ball, each derived from the previous ones.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceConstants {
    pub c0: f64,
    pub sigma: f64,
    pub doubling: f64,
    pub exponent: f64,
    pub covering: f64,
    /// `min_{x ∈ B, 0 < r <= 2R} μ(B(x, r) ∩ B) / (μ(B) (r/2R)^s)`.
    pub small_ball_observed: f64,
    /// `κ = min(c_d^{-2}, small_ball_observed)`.
    pub small_ball: f64,
    /// `C_r = C_w / κ`, the constant inside `r_k`.
    pub radius: f64,
    /// `D = c_d^m` with `2^m >= τ`, so `μ(τB) <= D μ(B)`.
    pub dilation: f64,
    /// `2 C_r D`, the two-sided constant for `2^{k0}`.
    pub threshold: f64,
    /// `4 C0 C_k0`, for `a_{k0} <= C R λ(τB) / μ(τB)`.
    pub base: f64,
    /// `4 C0 (2 C_r)^{1/s} / (1 - 2^{-(1 - 1/s)})`.
    pub iteration: f64,
    /// Assembled constant of `∫_B |u - u_B| <= C R λ(τB)`.
    pub final_bound: f64,
}

impl TraceConstants {
    pub fn derive(c0: f64, sigma: f64, space: SpaceConstants, small_ball_observed: f64) -> Self {
        let s = space.exponent;
        let small_ball = (1.0 / (space.doubling * space.doubling)).min(small_ball_observed);
        let radius = space.covering / small_ball;
        let tau = 3.0 * sigma;
        let mut m = 0;
        while pow2(m) < tau {
            m += 1;
        }
        let dilation = space.doubling.powi(m);
        let threshold = 2.0 * radius * dilation;
        let base = 4.0 * c0 * threshold;
        let iteration = 4.0 * c0 * (2.0 * radius).powf(1.0 / s) / (1.0 - (-(1.0 - 1.0 / s)).exp2());
        let tail = iteration * 2.0 * space.covering * (-1.0 / s).exp2() / (1.0 - (-1.0 / s).exp2())
            * (threshold * dilation).powf(1.0 / s);
        TraceConstants {
            c0,
            sigma,
            doubling: space.doubling,
            exponent: s,
            covering: space.covering,
            small_ball_observed,
            small_ball,
            radius,
            dilation,
            threshold,
            base,
            iteration,
            final_bound: 2.0 * (base + tail),
        }
    }
}

/// One point of the traced ball.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub index: usize,
    pub mass: f64,
    /// `u(x) - shift`.
    pub value: f64,
    /// `M_λ(x)`.
    pub maximal: f64,
    /// Least `k` with `M_λ(x) <= 2^k`.
    pub level: i32,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LevelFlags {
    /// `u` is `C0 2^{k+1}`-Lipschitz on `E_k`.
    pub lipschitz: bool,
    /// `μ(B \ E_{k-1}) <= C_w λ(τB) / 2^{k-1}`.
    pub weak_type: bool,
    /// For `k > k0`: every `x ∈ E_k` has a `y ∈ E_{k-1}` with `d(x, y) < r_k <= 2R`.
    pub connecting: Option<bool>,
    /// For `k > k0`: `a_k <= a_{k-1} + C0 2^{k+1} r_k` and the summed bound.
    pub iteration: Option<bool>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceLevel {
    pub k: i32,
    /// `|E_k|`.
    pub count: usize,
    /// `μ(E_k)`.
    pub mass: f64,
    /// `μ(B \ E_{k-1})`.
    pub outside_previous: f64,
    /// `a_k = sup_{E_k} |u - shift|`, 0 on an empty level.
    pub sup: f64,
    /// `r_k = 2R (C_r λ(τB) / (2^{k-1} μ(B)))^{1/s}`.
    pub radius: f64,
    /// Nearest distance from a point of `E_k` to `E_{k-1}`, maximized over `E_k`.
    #[serde(with = "extended_f64")]
    pub reach: f64,
    /// Largest `|u(x) - u(y)| / (C0 d(x, y))` over pairs in `E_k`.
    pub slope: f64,
    pub flags: LevelFlags,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdBounds {
    pub lower: f64,
    /// `2^{k0}`.
    pub value: f64,
    pub upper: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceFlags {
    pub lipschitz: bool,
    pub connecting: bool,
    pub iteration: bool,
    pub weak_type: bool,
    pub threshold: bool,
    pub base_estimate: bool,
    pub level_sum: bool,
    pub final_bound: bool,
}

impl TraceFlags {
    pub fn all(&self) -> bool {
        self.lipschitz
            && self.connecting
            && self.iteration
            && self.weak_type
            && self.threshold
            && self.base_estimate
            && self.level_sum
            && self.final_bound
    }

    fn trivial() -> Self {
        TraceFlags {
            lipschitz: true,
            connecting: true,
            iteration: true,
            weak_type: true,
            threshold: true,
            base_estimate: true,
            level_sum: true,
            final_bound: true,
        }
    }
}

/// Record of the level-set construction on one ball `B = B(x0, R)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProofTrace {
    pub ball: Ball,
    pub tau: f64,
    /// Members of `τB`, ascending.
    pub dilated: Vec<usize>,
    /// `λ(τB) = ν(τB)`.
    pub lambda_total: f64,
    /// `μ(B)`.
    pub ball_mass: f64,
    /// `μ(τB)`.
    pub dilated_mass: f64,
    /// `λ(τB) = 0` and `u` constant on `B`.
    pub degenerate: bool,
    pub constants: Option<TraceConstants>,
    pub shift_point: Option<usize>,
    pub shift: f64,
    pub points: Vec<TracePoint>,
    pub levels: Vec<TraceLevel>,
    pub k0: Option<i32>,
    pub k0_bounds: Option<ThresholdBounds>,
    pub a_k0: f64,
    pub a_k0_bound: f64,
    /// `Σ_k a_k μ(E_k \ E_{k-1})`.
    pub level_sum: f64,
    /// `∫_B |u - u_B| dμ`.
    pub final_lhs: f64,
    /// `C R λ(τB)` with the assembled constant.
    pub final_rhs: f64,
    pub verified: TraceFlags,
}

impl ProofTrace {
    pub fn passed(&self) -> bool {
        self.verified.all()
    }

    pub fn level(&self, k: i32) -> Option<&TraceLevel> {
        self.levels.iter().find(|l| l.k == k)
    }
}

#[inline]
pub(crate) fn pow2(k: i32) -> f64 {
    2f64.powi(k)
}

/// Least integer `k` with `v <= 2^k`, for `v > 0`.
pub(crate) fn ceil_log2(v: f64) -> i32 {
    let mut k = v.log2().ceil() as i32;
    while pow2(k - 1) >= v {
        k -= 1;
    }
    while pow2(k) < v {
        k += 1;
    }
    k
}

struct TraceInput<'a> {
    space: &'a MetricMeasureSpace,
    u: &'a ScalarField,
    nu: &'a PointMeasure,
    c0: f64,
    sigma: f64,
    constants: SpaceConstants,
}

/// `M_λ(x)` for the unrestricted maximal function of `λ`.
fn unrestricted_maximal(space: &MetricMeasureSpace, lambda: &[f64], x: usize) -> f64 {
    let shells = space.shells(x);
    let order = shells.order();
    let mut acc = 0.0;
    let mut best: f64 = 0.0;
    let mut pos = 0;
    for (i, &end) in shells.ends().iter().enumerate() {
        while pos < end as usize {
            acc += lambda[order[pos] as usize];
            pos += 1;
        }
        best = best.max(acc / shells.cumulative_mass()[i]);
    }
    best
}

/// Observed small-ball constant of `B = B(x0, R)` with exponent `s`.
fn observed_small_ball(space: &MetricMeasureSpace, b: &Ball, ball_mass: f64, s: f64) -> f64 {
    let two_r = 2.0 * b.radius;
    b.members
        .iter()
        .map(|&x| {
            let shells = space.shells(x);
            let order = shells.order();
            let radii = shells.radii();
            let mut inside = 0.0;
            let mut pos = 0;
            let mut best = f64::INFINITY;
            for (j, &end) in shells.ends().iter().enumerate() {
                while pos < end as usize {
                    let p = order[pos] as usize;
                    if b.contains(p) {
                        inside += space.mass(p);
                    }
                    pos += 1;
                }
                // B(x, r) = {d <= t_j} for r in (t_j, t_{j+1}]; the bound is
                // tightest at the right end of that interval
                let next = radii.get(j + 1).copied().unwrap_or(f64::INFINITY);
                let r = next.min(two_r);
                best = best.min(inside / (ball_mass * (r / two_r).powf(s)));
                if next >= two_r {
                    break;
                }
            }
            best
        })
        .fold(f64::INFINITY, f64::min)
}

fn trace_ball(input: &TraceInput<'_>, b: Ball) -> Result<ProofTrace> {
    let TraceInput {
        space,
        u,
        nu,
        c0,
        sigma,
        constants,
    } = *input;
    let tau = 3.0 * sigma;
    let big_r = b.radius;
    let x0 = b.center;
    let dilated: Vec<usize> = (0..space.n())
        .filter(|&y| space.dist(x0, y) < tau * big_r)
        .collect();
    let lambda_total = nu.measure_of(&dilated);
    let ball_mass = space.measure_of(&b.members);
    let dilated_mass = space.measure_of(&dilated);
    let final_lhs = crate::variation::oscillation_integral(space, u.values(), &b.members);

    if lambda_total == 0.0 {
        let (lo, hi) = b
            .members
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &i| {
                (lo.min(u[i]), hi.max(u[i]))
            });
        if lo != hi {
            return Err(Error::Hypothesis(format!(
                "ν vanishes on {tau}·B({x0}, {big_r}) but u is not constant on B({x0}, {big_r})"
            )));
        }
        return Ok(ProofTrace {
            ball: b,
            tau,
            dilated,
            lambda_total,
            ball_mass,
            dilated_mass,
            degenerate: true,
            constants: None,
            shift_point: None,
            shift: 0.0,
            points: Vec::new(),
            levels: Vec::new(),
            k0: None,
            k0_bounds: None,
            a_k0: 0.0,
            a_k0_bound: 0.0,
            level_sum: 0.0,
            final_lhs,
            final_rhs: 0.0,
            verified: TraceFlags::trivial(),
        });
    }

    let lambda = nu.restricted(&dilated);
    let s = constants.exponent;
    let tc = TraceConstants::derive(
        c0,
        sigma,
        constants,
        observed_small_ball(space, &b, ball_mass, s),
    );

    let maximal: Vec<f64> = b
        .members
        .iter()
        .map(|&x| unrestricted_maximal(space, lambda.masses(), x))
        .collect();
    let levels_of: Vec<i32> = maximal.iter().map(|&m| ceil_log2(m)).collect();
    let k_min = *levels_of.iter().min().expect("balls contain their center");
    let k_max = *levels_of.iter().max().expect("balls contain their center");

    // smallest k with C_r λ(τB) / 2^k <= μ(B)
    let scaled = tc.radius * lambda_total;
    let mut k0 = ceil_log2(scaled / ball_mass);
    while scaled / pow2(k0) > ball_mass {
        k0 += 1;
    }
    while scaled / pow2(k0 - 1) <= ball_mass {
        k0 -= 1;
    }

    // z minimizes |u| over E_{k0}, or over B if E_{k0} is empty (the
    // connecting flags then fail)
    let in_base: Vec<usize> = b
        .members
        .iter()
        .zip(&levels_of)
        .filter(|(_, &l)| l <= k0)
        .map(|(&i, _)| i)
        .collect();
    let pool = if in_base.is_empty() {
        &b.members
    } else {
        &in_base
    };
    let shift_point = pool
        .iter()
        .copied()
        .reduce(|best, i| if u[i].abs() < u[best].abs() { i } else { best })
        .expect("balls are nonempty");
    let shift = u[shift_point];

    let points: Vec<TracePoint> = b
        .members
        .iter()
        .enumerate()
        .map(|(pos, &i)| TracePoint {
            index: i,
            mass: space.mass(i),
            value: u[i] - shift,
            maximal: maximal[pos],
            level: levels_of[pos],
        })
        .collect();

    let k_lo = k_min.min(k0);
    let k_hi = k_max.max(k0 + 1);
    let analysis = analyze_levels(&points, |a, b| space.dist(a, b), c0, k_lo, k_hi);

    let mut levels = Vec::with_capacity((k_hi - k_lo + 1) as usize);
    let ratio_term = (lambda_total / ball_mass).powf(1.0 / s);
    let a_at = |k: i32| -> f64 { analysis.sup[(k - k_lo) as usize] };
    let a_k0 = a_at(k0);
    for k in k_lo..=k_hi {
        let idx = (k - k_lo) as usize;
        let radius = 2.0 * big_r * (scaled / (pow2(k - 1) * ball_mass)).powf(1.0 / s);
        let outside_previous = analysis.outside_previous[idx];
        let flags = LevelFlags {
            lipschitz: within(analysis.slope[idx], pow2(k + 1)),
            weak_type: within(
                outside_previous,
                constants.covering * lambda_total / pow2(k - 1),
            ),
            connecting: (k > k0)
                .then(|| within(radius, 2.0 * big_r) && analysis.reach[idx] < radius),
            iteration: (k > k0).then(|| {
                within(a_at(k), a_at(k - 1) + c0 * pow2(k + 1) * radius)
                    && within(
                        a_at(k),
                        a_k0 + tc.iteration * big_r * ratio_term * pow2(k).powf(1.0 - 1.0 / s),
                    )
            }),
        };
        levels.push(TraceLevel {
            k,
            count: analysis.count[idx],
            mass: analysis.mass[idx],
            outside_previous,
            sup: a_at(k),
            radius,
            reach: analysis.reach[idx],
            slope: analysis.slope[idx],
            flags,
        });
    }

    let k0_bounds = ThresholdBounds {
        lower: lambda_total / (tc.threshold * dilated_mass),
        value: pow2(k0),
        upper: tc.threshold * lambda_total / dilated_mass,
    };
    let threshold_ok = within(k0_bounds.lower, k0_bounds.value)
        && within(k0_bounds.value, k0_bounds.upper)
        && within(dilated_mass, tc.dilation * ball_mass);
    let a_k0_bound = tc.base * big_r * lambda_total / dilated_mass;
    let base_ok = within(a_k0, c0 * pow2(k0 + 1) * 2.0 * big_r) && within(a_k0, a_k0_bound);
    let level_sum: f64 = levels
        .iter()
        .zip(&analysis.level_mass)
        .map(|(l, m)| l.sup * m)
        .fold(0.0, |a, b| a + b);
    let final_rhs = tc.final_bound * big_r * lambda_total;
    let verified = TraceFlags {
        lipschitz: levels.iter().all(|l| l.flags.lipschitz),
        connecting: levels.iter().all(|l| l.flags.connecting.unwrap_or(true)),
        iteration: levels.iter().all(|l| l.flags.iteration.unwrap_or(true)),
        weak_type: levels.iter().all(|l| l.flags.weak_type),
        threshold: threshold_ok,
        base_estimate: base_ok,
        level_sum: within(final_lhs, 2.0 * level_sum),
        final_bound: within(final_lhs, final_rhs) && within(level_sum, final_rhs / 2.0),
    };

    Ok(ProofTrace {
        ball: b,
        tau,
        dilated,
        lambda_total,
        ball_mass,
        dilated_mass,
        degenerate: false,
        constants: Some(tc),
        shift_point: Some(shift_point),
        shift,
        points,
        levels,
        k0: Some(k0),
        k0_bounds: Some(k0_bounds),
        a_k0,
        a_k0_bound,
        level_sum,
        final_lhs,
        final_rhs,
        verified,
    })
}

/// Per-level aggregates over the window `k_lo..=k_hi`, computed from the
/// traced points and a distance oracle. Shared by the pipeline and the
/// auditor's flag recomputation.
pub(crate) struct LevelAnalysis {
    pub count: Vec<usize>,
    pub mass: Vec<f64>,
    pub level_mass: Vec<f64>,
    pub outside_previous: Vec<f64>,
    pub sup: Vec<f64>,
    pub slope: Vec<f64>,
    pub reach: Vec<f64>,
}

pub(crate) fn analyze_levels(
    points: &[TracePoint],
    dist: impl Fn(usize, usize) -> f64,
    c0: f64,
    k_lo: i32,
    k_hi: i32,
) -> LevelAnalysis {
    let width = (k_hi - k_lo + 1) as usize;
    let slot = |k: i32| -> usize { (k.clamp(k_lo, k_hi) - k_lo) as usize };
    let mut count = vec![0; width];
    let mut mass = vec![0.0; width];
    let mut level_mass = vec![0.0; width];
    let mut outside_previous = vec![0.0; width];
    let mut sup = vec![0.0f64; width];
    for (idx, k) in (k_lo..=k_hi).enumerate() {
        for p in points {
            if p.level <= k {
                count[idx] += 1;
                mass[idx] += p.mass;
                sup[idx] = sup[idx].max(p.value.abs());
            }
            if p.level == k {
                level_mass[idx] += p.mass;
            }
            if p.level > k - 1 {
                outside_previous[idx] += p.mass;
            }
        }
    }

    // slope per pair, attributed to the first level containing both points
    let mut pair_slope = vec![0.0f64; width];
    // nearest[j]: distance from a to the nearest point of level <= k_lo + j
    let mut reach = vec![0.0f64; width];
    let c0_free = |a: &TracePoint, b: &TracePoint, d: f64| (a.value - b.value).abs() / (c0 * d);
    for (i, a) in points.iter().enumerate() {
        let mut nearest = vec![f64::INFINITY; width];
        for (j, b) in points.iter().enumerate() {
            if i == j {
                continue;
            }
            let d = dist(a.index, b.index);
            if j > i {
                let k = slot(a.level.max(b.level));
                pair_slope[k] = pair_slope[k].max(c0_free(a, b, d));
            }
            let kb = slot(b.level);
            nearest[kb] = nearest[kb].min(d);
        }
        // a point reaches its own level at distance 0
        let ka = slot(a.level);
        nearest[ka] = 0.0;
        for j in 1..width {
            nearest[j] = nearest[j].min(nearest[j - 1]);
        }
        for idx in 1..width {
            let k = k_lo + idx as i32;
            if a.level <= k {
                reach[idx] = reach[idx].max(nearest[idx - 1]);
            }
        }
    }
    let mut slope = vec![0.0f64; width];
    let mut running = 0.0f64;
    for idx in 0..width {
        running = running.max(pair_slope[idx]);
        slope[idx] = running;
    }
    LevelAnalysis {
        count,
        mass,
        level_mass,
        outside_previous,
        sup,
        slope,
        reach,
    }
}

/// Build the trace for one ball after checking the pointwise hypothesis.
pub fn build_proof_trace(
    space: &MetricMeasureSpace,
    u: &ScalarField,
    nu: &PointMeasure,
    c0: f64,
    sigma: f64,
    b: Ball,
) -> Result<ProofTrace> {
    require_length_metric(space)?;
    let pointwise = check_pointwise(space, u, nu, sigma, Some(c0))?;
    hypothesis_holds(&pointwise, space)?;
    let input = TraceInput {
        space,
        u,
        nu,
        c0,
        sigma,
        constants: space_constants(space),
    };
    trace_ball(&input, b)
}

fn require_length_metric(space: &MetricMeasureSpace) -> Result<()> {
    if space.is_length_metric() {
        Ok(())
    } else {
        Err(Error::Precondition(
            "the construction needs a length metric; resolve the space with geometry::length_metric first"
                .into(),
        ))
    }
}

fn hypothesis_holds(pointwise: &PointwiseReport, space: &MetricMeasureSpace) -> Result<()> {
    if pointwise.passed {
        return Ok(());
    }
    let w = pointwise.worst_pair.expect("a failing sweep has a pair");
    Err(Error::Hypothesis(format!(
        "pointwise inequality fails at pair ({}, {}): least C0 is {} > {}",
        space.label(w.x),
        space.label(w.y),
        w.ratio,
        pointwise.c0.unwrap_or(0.0)
    )))
}

/// Which balls get a proof trace.
#[derive(Debug, Clone, PartialEq)]
pub enum AuditSelection {
    /// Every ball on spaces with at most [`AUDIT_ALL_LIMIT`] points, otherwise
    /// the [`AUDIT_WORST_DEFAULT`] balls of largest oscillation.
    Default,
    All,
    /// The given number of balls with the largest `∫_B |u - u_B|`.
    Worst(usize),
    /// Explicit `(center, radius)` pairs.
    Balls(Vec<(usize, f64)>),
}

fn select_balls(
    space: &MetricMeasureSpace,
    rows: &[PoincareRow],
    selection: &AuditSelection,
) -> Vec<(usize, f64)> {
    let worst = |k: usize| {
        let mut idx: Vec<usize> = (0..rows.len()).collect();
        idx.sort_by(|&a, &b| rows[b].lhs.total_cmp(&rows[a].lhs).then(a.cmp(&b)));
        idx.truncate(k);
        idx.sort_unstable();
        idx.into_iter()
            .map(|i| (rows[i].center, rows[i].radius))
            .collect()
    };
    match selection {
        AuditSelection::Default if space.n() <= AUDIT_ALL_LIMIT => {
            rows.iter().map(|r| (r.center, r.radius)).collect()
        }
        AuditSelection::Default => worst(AUDIT_WORST_DEFAULT),
        AuditSelection::All => rows.iter().map(|r| (r.center, r.radius)).collect(),
        AuditSelection::Worst(k) => worst(*k),
        AuditSelection::Balls(list) => list.clone(),
    }
}

/// Pointwise report, Poincaré report at `η = 3σ`, and proof traces.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CharacterizationCertificate {
    pub format: String,
    /// The space with the function `u` and the measure `nu` attached.
    pub document: SpaceDocument,
    pub c0: f64,
    pub sigma: f64,
    pub eta: f64,
    pub constants: SpaceConstants,
    pub pointwise: PointwiseReport,
    pub poincare: PoincareReport,
    pub traces: Vec<ProofTrace>,
    #[serde(with = "extended_f64")]
    pub overall_constant: f64,
    pub passed: bool,
}

/// Runs the full construction: checks the pointwise hypothesis with
/// `(c0, sigma)`, computes the least constant of
/// `∫_B |u - u_B| dμ <= C r ν(3σ B)` over all balls and traces the
/// selected balls.
pub fn poincare_from_pointwise(
    space: &MetricMeasureSpace,
    u: &ScalarField,
    nu: &PointMeasure,
    c0: f64,
    sigma: f64,
    selection: &AuditSelection,
) -> Result<CharacterizationCertificate> {
    require_length_metric(space)?;
    let pointwise = check_pointwise(space, u, nu, sigma, Some(c0))?;
    hypothesis_holds(&pointwise, space)?;
    let eta = 3.0 * sigma;
    let poincare = check_ball_poincare(space, u, nu, eta, false)?;
    let constants = space_constants(space);
    let input = TraceInput {
        space,
        u,
        nu,
        c0,
        sigma,
        constants,
    };
    let traces = select_balls(space, &poincare.per_ball, selection)
        .into_par_iter()
        .map(|(center, radius)| trace_ball(&input, ball(space, center, radius)?))
        .collect::<Result<Vec<_>>>()?;
    let passed = poincare.is_finite() && traces.iter().all(ProofTrace::passed);
    Ok(CharacterizationCertificate {
        format: CERTIFICATE_FORMAT.to_string(),
        document: SpaceDocument::describe(space, &[("u", u)], &[("nu", nu)]),
        c0,
        sigma,
        eta,
        constants,
        overall_constant: poincare.minimal_constant,
        pointwise,
        poincare,
        traces,
        passed,
    })
}
