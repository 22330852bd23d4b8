//! Independent re-verification of characterization certificates.
//!
//! The auditor rebuilds distances from the embedded space document with its
//! own Dijkstra, recomputes every stored trace quantity with direct loops
//! and re-derives every flag from the stored values. It shares no numerical
//! routine with the pipeline beyond parsing.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::Serialize;

use crate::characterization::{
    CharacterizationCertificate, LevelFlags, ProofTrace, TraceConstants, TraceFlags, TracePoint,
    CERTIFICATE_FORMAT, FALLBACK_EXPONENT,
};
use crate::error::{Error, Result};
use crate::report::within;
use crate::space::MetricSpec;

/// Relative tolerance for recomputed reals.
pub const AUDIT_TOLERANCE: f64 = 1e-9;

/// Discrepancies listed in a report before truncation.
const MAX_LISTED: usize = 50;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditReport {
    pub agreed: bool,
    pub traces_checked: usize,
    pub checks: usize,
    pub discrepancy_count: usize,
    pub discrepancies: Vec<String>,
}

fn agree(a: f64, b: f64) -> bool {
    if a == b {
        return true;
    }
    if !(a.is_finite() && b.is_finite()) {
        return false;
    }
    (a - b).abs() <= AUDIT_TOLERANCE * a.abs().max(b.abs())
}

#[derive(PartialEq)]
struct Item(f64, usize);

impl Eq for Item {}

impl Ord for Item {
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.total_cmp(&self.0).then(other.1.cmp(&self.1))
    }
}

impl PartialOrd for Item {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn dijkstra(adj: &[Vec<(usize, f64)>], source: usize) -> Vec<f64> {
    let mut dist = vec![f64::INFINITY; adj.len()];
    let mut heap = BinaryHeap::new();
    dist[source] = 0.0;
    heap.push(Item(0.0, source));
    while let Some(Item(d, v)) = heap.pop() {
        if d > dist[v] {
            continue;
        }
        for &(w, len) in &adj[v] {
            let nd = d + len;
            if nd < dist[w] {
                dist[w] = nd;
                heap.push(Item(nd, w));
            }
        }
    }
    dist
}

/// Raw data the auditor works from.
struct Data {
    n: usize,
    dist: Vec<f64>,
    mu: Vec<f64>,
    u: Vec<f64>,
    nu: Vec<f64>,
    /// Per point: indices by distance, distances, prefix `μ`, prefix `ν`.
    sorted: Vec<(Vec<usize>, Vec<f64>, Vec<f64>, Vec<f64>)>,
    /// Per point: running maximum of prefix `ν / μ` at shell ends.
    nu_ratio: Vec<Vec<f64>>,
}

impl Data {
    fn d(&self, i: usize, j: usize) -> f64 {
        self.dist[i * self.n + j]
    }

    fn from_certificate(cert: &CharacterizationCertificate) -> Result<Data> {
        let doc = &cert.document;
        let n = doc.mu.len();
        let malformed = |m: &str| Error::Schema(format!("malformed certificate: {m}"));
        let dist = match &doc.metric {
            MetricSpec::Graph { n: gn, edges } => {
                if *gn != n {
                    return Err(malformed("graph size differs from mu"));
                }
                let mut adj = vec![Vec::new(); n];
                for e in edges {
                    if e.a >= n || e.b >= n || !(e.length > 0.0) {
                        return Err(malformed("bad edge"));
                    }
                    adj[e.a].push((e.b, e.length));
                    adj[e.b].push((e.a, e.length));
                }
                let rows: Vec<Vec<f64>> = (0..n).map(|s| dijkstra(&adj, s)).collect();
                let mut dist = vec![0.0; n * n];
                for i in 0..n {
                    for j in 0..n {
                        dist[i * n + j] = rows[i][j].min(rows[j][i]);
                    }
                }
                if dist.iter().any(|d| d.is_infinite()) {
                    return Err(malformed("disconnected graph"));
                }
                dist
            }
            MetricSpec::Matrix { .. } => {
                return Err(malformed("certificates carry a graph metric"));
            }
        };
        let u = doc
            .functions
            .get("u")
            .ok_or_else(|| malformed("function u missing"))?
            .clone();
        let nu = doc
            .measures
            .get("nu")
            .ok_or_else(|| malformed("measure nu missing"))?
            .clone();
        if u.len() != n || nu.len() != n || doc.mu.iter().any(|&m| !(m > 0.0)) {
            return Err(malformed("inconsistent data lengths or masses"));
        }
        let mu = doc.mu.clone();
        let sorted = (0..n)
            .map(|x| {
                let mut idx: Vec<usize> = (0..n).collect();
                idx.sort_by(|&a, &b| dist[x * n + a].total_cmp(&dist[x * n + b]).then(a.cmp(&b)));
                let ds = idx.iter().map(|&j| dist[x * n + j]).collect();
                let mut acc_mu = 0.0;
                let mut acc_nu = 0.0;
                let pm = idx
                    .iter()
                    .map(|&j| {
                        acc_mu += mu[j];
                        acc_mu
                    })
                    .collect();
                let pn = idx
                    .iter()
                    .map(|&j| {
                        acc_nu += nu[j];
                        acc_nu
                    })
                    .collect();
                (idx, ds, pm, pn)
            })
            .collect::<Vec<_>>();
        let nu_ratio = sorted
            .iter()
            .map(
                |(_, ds, pm, pn): &(Vec<usize>, Vec<f64>, Vec<f64>, Vec<f64>)| {
                    let mut best: f64 = 0.0;
                    (0..n)
                        .map(|pos| {
                            if pos + 1 == n || ds[pos + 1] > ds[pos] {
                                best = best.max(pn[pos] / pm[pos]);
                            }
                            best
                        })
                        .collect()
                },
            )
            .collect();
        Ok(Data {
            n,
            dist,
            mu,
            u,
            nu,
            sorted,
            nu_ratio,
        })
    }

    /// `μ({y : d(x, y) < r})`.
    fn mass_lt(&self, x: usize, r: f64) -> f64 {
        let (_, ds, pm, _) = &self.sorted[x];
        let k = ds.partition_point(|&d| d < r);
        if k == 0 {
            0.0
        } else {
            pm[k - 1]
        }
    }

    /// `μ({y : d(x, y) <= t})`.
    fn mass_le(&self, x: usize, t: f64) -> f64 {
        let (_, ds, pm, _) = &self.sorted[x];
        pm[ds.partition_point(|&d| d <= t) - 1]
    }

    fn doubling(&self) -> f64 {
        let mut best: f64 = 1.0;
        for x in 0..self.n {
            let ds = &self.sorted[x].1;
            for &t in ds.iter().filter(|&&t| t > 0.0) {
                for r in [t, t / 2.0] {
                    best = best.max(self.mass_lt(x, 2.0 * r) / self.mass_lt(x, r));
                }
            }
        }
        best
    }

    fn covering(&self) -> f64 {
        let mut best: f64 = 1.0;
        for x in 0..self.n {
            for &t in &self.sorted[x].1 {
                best = best.max(self.mass_le(x, 3.0 * t) / self.mass_le(x, t));
            }
        }
        best
    }

    /// `sup_t` of `λ(d <= t) / μ(d <= t)` over shells with `t < r_max`.
    fn maximal(&self, lambda: &[f64], x: usize, r_max: f64) -> f64 {
        let (order, ds, pm, _) = &self.sorted[x];
        let mut acc = 0.0;
        let mut best: f64 = 0.0;
        for (pos, &j) in order.iter().enumerate() {
            if ds[pos] >= r_max {
                break;
            }
            acc += lambda[j];
            if pos + 1 == self.n || ds[pos + 1] > ds[pos] {
                best = best.max(acc / pm[pos]);
            }
        }
        best
    }

    /// Least `C0` of the pointwise inequality.
    fn pointwise_minimal(&self, sigma: f64) -> f64 {
        let mut best: f64 = 0.0;
        for x in 0..self.n {
            for y in x + 1..self.n {
                let d = self.d(x, y);
                let m = self.maximal_nu(x, sigma * d) + self.maximal_nu(y, sigma * d);
                let osc = (self.u[x] - self.u[y]).abs();
                let q = if osc == 0.0 {
                    0.0
                } else if m == 0.0 {
                    f64::INFINITY
                } else {
                    osc / (d * m)
                };
                best = best.max(q);
            }
        }
        best
    }

    fn maximal_nu(&self, x: usize, r_max: f64) -> f64 {
        let k = self.sorted[x].1.partition_point(|&d| d < r_max);
        if k == 0 {
            0.0
        } else {
            self.nu_ratio[x][k - 1]
        }
    }
}

fn pow2(k: i32) -> f64 {
    2f64.powi(k)
}

fn level_of(v: f64) -> i32 {
    let mut k = 0;
    while pow2(k) < v {
        k += 1;
    }
    while pow2(k - 1) >= v {
        k -= 1;
    }
    k
}

struct Auditor {
    checks: usize,
    found: Vec<String>,
}

impl Auditor {
    fn fail(&mut self, msg: String) {
        self.found.push(msg);
    }

    fn real(&mut self, what: impl Fn() -> String, stored: f64, recomputed: f64) {
        self.checks += 1;
        if !agree(stored, recomputed) {
            self.fail(format!(
                "{}: stored {stored:e}, recomputed {recomputed:e}",
                what()
            ));
        }
    }

    fn exact<T: PartialEq + std::fmt::Debug>(
        &mut self,
        what: impl Fn() -> String,
        stored: T,
        recomputed: T,
    ) {
        self.checks += 1;
        if stored != recomputed {
            self.fail(format!(
                "{}: stored {stored:?}, recomputed {recomputed:?}",
                what()
            ));
        }
    }

    /// Membership list check; points within tolerance of the boundary may go either way.
    fn members(&mut self, what: &str, data: &Data, center: usize, radius: f64, stored: &[usize]) {
        self.checks += 1;
        let sorted_unique =
            stored.windows(2).all(|w| w[0] < w[1]) && stored.iter().all(|&i| i < data.n);
        if !sorted_unique {
            self.fail(format!(
                "{what}: member list is not a sorted list of points"
            ));
            return;
        }
        for y in 0..data.n {
            let d = data.d(center, y);
            let inside = d < radius;
            let listed = stored.binary_search(&y).is_ok();
            let boundary = (d - radius).abs() <= AUDIT_TOLERANCE * radius;
            if inside != listed && !boundary {
                self.fail(format!(
                    "{what}: point {y} at distance {d:e} misclassified for radius {radius:e}"
                ));
            }
        }
    }
}

fn derive_constants(
    c0: f64,
    sigma: f64,
    cd: f64,
    s: f64,
    cw: f64,
    observed: f64,
) -> TraceConstants {
    let small_ball = (1.0 / (cd * cd)).min(observed);
    let radius = cw / small_ball;
    let tau = 3.0 * sigma;
    let m = (0..).find(|&m| pow2(m) >= tau).expect("tau is finite");
    let dilation = cd.powi(m);
    let threshold = 2.0 * radius * dilation;
    let base = 4.0 * c0 * threshold;
    let q = 1.0 - 2f64.powf(-(1.0 - 1.0 / s));
    let iteration = 4.0 * c0 * (2.0 * radius).powf(1.0 / s) / q;
    let h = 2f64.powf(-1.0 / s);
    let tail = iteration * 2.0 * cw * h / (1.0 - h) * (threshold * dilation).powf(1.0 / s);
    TraceConstants {
        c0,
        sigma,
        doubling: cd,
        exponent: s,
        covering: cw,
        small_ball_observed: observed,
        small_ball,
        radius,
        dilation,
        threshold,
        base,
        iteration,
        final_bound: 2.0 * (base + tail),
    }
}

fn oscillation(data: &Data, members: &[usize]) -> f64 {
    let (mut num, mut den) = (0.0, 0.0);
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for &i in members {
        num += data.u[i] * data.mu[i];
        den += data.mu[i];
        lo = lo.min(data.u[i]);
        hi = hi.max(data.u[i]);
    }
    let avg = (num / den).clamp(lo, hi);
    members
        .iter()
        .map(|&i| (data.u[i] - avg).abs() * data.mu[i])
        .fold(0.0, |a, b| a + b)
}

fn sum_over(values: &[f64], members: &[usize]) -> f64 {
    members.iter().map(|&i| values[i]).fold(0.0, |a, b| a + b)
}

fn audit_trace(
    a: &mut Auditor,
    data: &Data,
    cert: &CharacterizationCertificate,
    (cd, s, cw): (f64, f64, f64),
    ti: usize,
    t: &ProofTrace,
) {
    let tag = format!(
        "trace {ti} (center {}, radius {:e})",
        t.ball.center, t.ball.radius
    );
    let at = |what: &str| format!("{tag}: {what}");
    let x0 = t.ball.center;
    let big_r = t.ball.radius;
    if x0 >= data.n || !(big_r > 0.0) {
        a.fail(at("ball outside the space"));
        return;
    }
    let c0 = cert.c0;
    let tau = 3.0 * cert.sigma;
    a.real(|| at("tau"), t.tau, tau);
    a.members(&at("ball"), data, x0, big_r, &t.ball.members);
    a.members(&at("dilated ball"), data, x0, tau * big_r, &t.dilated);
    let members = &t.ball.members;
    let lambda_total = sum_over(&data.nu, &t.dilated);
    let ball_mass = sum_over(&data.mu, members);
    let dilated_mass = sum_over(&data.mu, &t.dilated);
    a.real(|| at("lambda_total"), t.lambda_total, lambda_total);
    a.real(|| at("ball_mass"), t.ball_mass, ball_mass);
    a.real(|| at("dilated_mass"), t.dilated_mass, dilated_mass);
    a.real(|| at("final_lhs"), t.final_lhs, oscillation(data, members));

    if t.lambda_total == 0.0 {
        let constant = members.iter().all(|&i| data.u[i] == data.u[members[0]]);
        a.exact(|| at("degenerate"), t.degenerate, constant);
        a.exact(|| at("levels"), t.levels.len(), 0);
        a.exact(|| at("final_rhs"), t.final_rhs, 0.0);
        let flags = t.verified;
        a.exact(|| at("flags"), flags.all(), constant && t.final_lhs == 0.0);
        return;
    }
    a.exact(|| at("degenerate"), t.degenerate, false);

    // constants
    let observed = {
        let two_r = 2.0 * big_r;
        let mut best = f64::INFINITY;
        for &x in members {
            let mut near: Vec<(f64, f64)> = members
                .iter()
                .map(|&y| (data.d(x, y), data.mu[y]))
                .collect();
            near.sort_by(|a, b| a.0.total_cmp(&b.0));
            let mut prefix = Vec::with_capacity(near.len());
            let mut acc = 0.0;
            for &(_, m) in &near {
                acc += m;
                prefix.push(acc);
            }
            let mut radii: Vec<f64> = data.sorted[x]
                .1
                .iter()
                .copied()
                .filter(|&d| d > 0.0 && d <= two_r)
                .collect();
            radii.push(two_r);
            for r in radii {
                let k = near.partition_point(|&(d, _)| d < r);
                let inside = if k == 0 { 0.0 } else { prefix[k - 1] };
                best = best.min(inside / (t.ball_mass * (r / two_r).powf(s)));
            }
        }
        best
    };
    let Some(tc) = t.constants else {
        a.fail(at("constants missing"));
        return;
    };
    let own = derive_constants(c0, cert.sigma, cd, s, cw, observed);
    let fields = [
        ("c0", tc.c0, own.c0),
        ("sigma", tc.sigma, own.sigma),
        ("doubling", tc.doubling, own.doubling),
        ("exponent", tc.exponent, own.exponent),
        ("covering", tc.covering, own.covering),
        (
            "small_ball_observed",
            tc.small_ball_observed,
            own.small_ball_observed,
        ),
        ("small_ball", tc.small_ball, own.small_ball),
        ("radius constant", tc.radius, own.radius),
        ("dilation", tc.dilation, own.dilation),
        ("threshold constant", tc.threshold, own.threshold),
        ("base constant", tc.base, own.base),
        ("iteration constant", tc.iteration, own.iteration),
        ("final constant", tc.final_bound, own.final_bound),
    ];
    for (name, stored, mine) in fields {
        a.real(|| at(name), stored, mine);
    }

    // points
    let mut lambda = vec![0.0; data.n];
    for &i in &t.dilated {
        lambda[i] = data.nu[i];
    }
    a.exact(|| at("point count"), t.points.len(), members.len());
    let Some(shift_point) = t.shift_point else {
        a.fail(at("shift point missing"));
        return;
    };
    if shift_point >= data.n {
        a.fail(at("shift point outside the space"));
        return;
    }
    a.real(|| at("shift"), t.shift, data.u[shift_point]);
    for (p, &i) in t.points.iter().zip(members) {
        let pt = |w: &str| at(&format!("point {i} {w}"));
        a.exact(|| pt("index"), p.index, i);
        a.real(|| pt("mass"), p.mass, data.mu[i]);
        a.real(|| pt("value"), p.value, data.u[i] - t.shift);
        let m = data.maximal(&lambda, i, f64::INFINITY);
        a.real(|| pt("maximal"), p.maximal, m);
        a.exact(|| pt("level"), p.level, level_of(p.maximal));
    }

    // threshold index from the stored constants
    let scaled = tc.radius * t.lambda_total;
    let mut k0 = level_of(scaled / t.ball_mass);
    while scaled / pow2(k0) > t.ball_mass {
        k0 += 1;
    }
    while scaled / pow2(k0 - 1) <= t.ball_mass {
        k0 -= 1;
    }
    a.exact(|| at("k0"), t.k0, Some(k0));

    let base: Vec<&TracePoint> = t.points.iter().filter(|p| p.level <= k0).collect();
    let pool: Vec<&TracePoint> = if base.is_empty() {
        t.points.iter().collect()
    } else {
        base
    };
    let mut z = pool[0].index;
    for p in &pool {
        if data.u[p.index].abs() < data.u[z].abs() {
            z = p.index;
        }
    }
    a.exact(|| at("shift point"), shift_point, z);

    // levels
    let k_min = t.points.iter().map(|p| p.level).min().unwrap_or(k0);
    let k_max = t.points.iter().map(|p| p.level).max().unwrap_or(k0);
    let ks: Vec<i32> = (k_min.min(k0)..=k_max.max(k0 + 1)).collect();
    let stored_ks: Vec<i32> = t.levels.iter().map(|l| l.k).collect();
    a.exact(|| at("level window"), &stored_ks, &ks);
    if stored_ks != ks {
        return;
    }
    let sup_of = |k: i32| t.levels.iter().find(|l| l.k == k).map_or(0.0, |l| l.sup);
    let a_k0 = sup_of(k0);
    let ratio_term = (t.lambda_total / t.ball_mass).powf(1.0 / s);
    let mut level_sum = 0.0;
    let mut all = TraceFlags {
        lipschitz: true,
        connecting: true,
        iteration: true,
        weak_type: true,
        threshold: true,
        base_estimate: true,
        level_sum: true,
        final_bound: true,
    };
    for l in &t.levels {
        let k = l.k;
        let lv = |w: &str| at(&format!("level {k} {w}"));
        let e_k: Vec<_> = t.points.iter().filter(|p| p.level <= k).collect();
        let e_prev: Vec<_> = t.points.iter().filter(|p| p.level < k).collect();
        a.exact(|| lv("count"), l.count, e_k.len());
        a.real(
            || lv("mass"),
            l.mass,
            e_k.iter().map(|p| p.mass).fold(0.0, |a, b| a + b),
        );
        a.real(
            || lv("outside_previous"),
            l.outside_previous,
            t.points
                .iter()
                .filter(|p| p.level > k - 1)
                .map(|p| p.mass)
                .fold(0.0, |a, b| a + b),
        );
        a.real(
            || lv("sup"),
            l.sup,
            e_k.iter().map(|p| p.value.abs()).fold(0.0, f64::max),
        );
        a.real(
            || lv("radius"),
            l.radius,
            2.0 * big_r * (scaled / (pow2(k - 1) * t.ball_mass)).powf(1.0 / s),
        );
        let mut slope: f64 = 0.0;
        let mut reach: f64 = 0.0;
        for (i, p) in e_k.iter().enumerate() {
            for q in &e_k[i + 1..] {
                slope = slope.max((p.value - q.value).abs() / (c0 * data.d(p.index, q.index)));
            }
            let near = e_prev
                .iter()
                .map(|q| data.d(p.index, q.index))
                .fold(f64::INFINITY, f64::min);
            reach = reach.max(near);
        }
        if k == ks[0] {
            // no previous level inside the window
            reach = 0.0;
        }
        a.real(|| lv("slope"), l.slope, slope);
        a.real(|| lv("reach"), l.reach, reach);
        level_sum += l.sup
            * t.points
                .iter()
                .filter(|p| p.level == k)
                .map(|p| p.mass)
                .fold(0.0, |a, b| a + b);

        // flags from stored values
        let flags = LevelFlags {
            lipschitz: within(l.slope, pow2(k + 1)),
            weak_type: within(
                l.outside_previous,
                tc.covering * t.lambda_total / pow2(k - 1),
            ),
            connecting: (k > k0).then(|| within(l.radius, 2.0 * big_r) && l.reach < l.radius),
            iteration: (k > k0).then(|| {
                within(l.sup, sup_of(k - 1) + c0 * pow2(k + 1) * l.radius)
                    && within(
                        l.sup,
                        a_k0 + tc.iteration * big_r * ratio_term * pow2(k).powf(1.0 - 1.0 / s),
                    )
            }),
        };
        a.exact(|| lv("flags"), l.flags, flags);
        all.lipschitz &= flags.lipschitz;
        all.weak_type &= flags.weak_type;
        all.connecting &= flags.connecting.unwrap_or(true);
        all.iteration &= flags.iteration.unwrap_or(true);
    }

    let a_k0_bound = tc.base * big_r * t.lambda_total / t.dilated_mass;
    a.real(|| at("a_k0"), t.a_k0, a_k0);
    a.real(|| at("a_k0_bound"), t.a_k0_bound, a_k0_bound);
    a.real(|| at("level_sum"), t.level_sum, level_sum);
    a.real(
        || at("final_rhs"),
        t.final_rhs,
        tc.final_bound * big_r * t.lambda_total,
    );
    match t.k0_bounds {
        Some(b) => {
            a.real(
                || at("k0 lower bound"),
                b.lower,
                t.lambda_total / (tc.threshold * t.dilated_mass),
            );
            a.real(|| at("k0 value"), b.value, pow2(k0));
            a.real(
                || at("k0 upper bound"),
                b.upper,
                tc.threshold * t.lambda_total / t.dilated_mass,
            );
            all.threshold = within(b.lower, b.value)
                && within(b.value, b.upper)
                && within(t.dilated_mass, tc.dilation * t.ball_mass);
        }
        None => {
            a.fail(at("k0 bounds missing"));
            all.threshold = false;
        }
    }
    all.base_estimate =
        within(t.a_k0, c0 * pow2(k0 + 1) * 2.0 * big_r) && within(t.a_k0, t.a_k0_bound);
    all.level_sum = within(t.final_lhs, 2.0 * t.level_sum);
    all.final_bound = within(t.final_lhs, t.final_rhs) && within(t.level_sum, t.final_rhs / 2.0);
    a.exact(|| at("verified flags"), t.verified, all);
}

/// Audits a serialized certificate. `Err` means the text is not a
/// well-formed certificate; discrepancies are reported in the result.
pub fn audit_certificate(text: &str) -> Result<AuditReport> {
    let cert: CharacterizationCertificate = serde_json::from_str(text)?;
    if cert.format != CERTIFICATE_FORMAT {
        return Err(Error::Schema(format!(
            "unknown certificate format {:?}",
            cert.format
        )));
    }
    if !(cert.sigma >= 1.0 && cert.c0 > 0.0) {
        return Err(Error::Schema("certificate parameters out of range".into()));
    }
    let data = Data::from_certificate(&cert)?;
    let mut a = Auditor {
        checks: 0,
        found: Vec::new(),
    };

    let cd = data.doubling();
    let dimension = cd.log2();
    let s = if dimension > 1.0 {
        dimension
    } else {
        FALLBACK_EXPONENT
    };
    let cw = data.covering();
    a.real(|| "doubling constant".into(), cert.constants.doubling, cd);
    a.real(
        || "doubling dimension".into(),
        cert.constants.dimension,
        dimension,
    );
    a.real(|| "exponent".into(), cert.constants.exponent, s);
    a.real(|| "covering constant".into(), cert.constants.covering, cw);
    a.real(|| "eta".into(), cert.eta, 3.0 * cert.sigma);

    // pointwise hypothesis
    let p = &cert.pointwise;
    a.real(|| "pointwise sigma".into(), p.sigma, cert.sigma);
    a.real(
        || "pointwise c0_minimal".into(),
        p.c0_minimal,
        data.pointwise_minimal(cert.sigma),
    );
    a.exact(
        || "pointwise passed".into(),
        p.passed,
        within(p.c0_minimal, cert.c0),
    );

    // Poincaré rows
    let rows = &cert.poincare.per_ball;
    let mut best: Option<usize> = None;
    for (i, r) in rows.iter().enumerate() {
        let q = if r.lhs == 0.0 {
            0.0
        } else if r.rhs == 0.0 {
            f64::INFINITY
        } else {
            r.lhs / r.rhs
        };
        a.real(|| format!("poincare row {i} constant"), r.constant, q);
        if best.is_none_or(|b| q > rows[b].constant) {
            best = Some(i);
        }
    }
    let minimal = best.map_or(0.0, |b| rows[b].constant);
    a.real(
        || "poincare minimal constant".into(),
        cert.poincare.minimal_constant,
        minimal,
    );
    a.exact(
        || "poincare worst ball".into(),
        cert.poincare.worst_ball.as_ref(),
        best.map(|b| &rows[b]),
    );
    a.real(|| "overall constant".into(), cert.overall_constant, minimal);
    for (ti, t) in cert.traces.iter().enumerate() {
        if let Some(r) = rows
            .iter()
            .find(|r| r.center == t.ball.center && r.radius == t.ball.radius)
        {
            a.real(
                || format!("trace {ti} oscillation vs poincare row"),
                t.final_lhs,
                r.lhs,
            );
        }
        audit_trace(&mut a, &data, &cert, (cd, s, cw), ti, t);
    }
    let passed = minimal.is_finite() && cert.traces.iter().all(|t| t.verified.all());
    a.exact(|| "certificate passed".into(), cert.passed, passed);

    let count = a.found.len();
    a.found.truncate(MAX_LISTED);
    Ok(AuditReport {
        agreed: count == 0,
        traces_checked: cert.traces.len(),
        checks: a.checks,
        discrepancy_count: count,
        discrepancies: a.found,
    })
}
