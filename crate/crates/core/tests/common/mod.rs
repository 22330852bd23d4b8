//! Brute-force oracles shared by the integration tests. Each works from raw
//! distances and masses only.

#![allow(dead_code)]

use std::collections::BTreeSet;

use bvcert::space::MetricMeasureSpace;

/// `{y : d(x, y) < r}` by direct scan.
pub fn scan_ball(space: &MetricMeasureSpace, x: usize, r: f64) -> Vec<usize> {
    (0..space.n()).filter(|&y| space.dist(x, y) < r).collect()
}

/// Radii in `(0, r_max]`: a uniform grid plus a point between every pair of
/// consecutive distance values and every distance value itself.
pub fn dense_radii(space: &MetricMeasureSpace, x: usize, r_max: f64) -> Vec<f64> {
    let mut ds: Vec<f64> = (0..space.n()).map(|y| space.dist(x, y)).collect();
    ds.sort_by(f64::total_cmp);
    ds.dedup();
    let top = if r_max.is_finite() {
        r_max
    } else {
        ds.last().unwrap() + 1.0
    };
    let mut radii: Vec<f64> = (1..=400).map(|k| top * k as f64 / 400.0).collect();
    for w in ds.windows(2) {
        radii.push(0.5 * (w[0] + w[1]));
        radii.push(w[1]);
    }
    radii.push(ds.last().unwrap() + 1.0);
    radii.push(top);
    radii.retain(|&r| r > 0.0 && r <= top);
    radii
}

/// Distinct balls `B(x, r)` over [`dense_radii`].
pub fn ball_family(space: &MetricMeasureSpace, x: usize, r_max: f64) -> BTreeSet<Vec<usize>> {
    dense_radii(space, x, r_max)
        .into_iter()
        .map(|r| scan_ball(space, x, r))
        .collect()
}

pub fn mass(space: &MetricMeasureSpace, points: &[usize]) -> f64 {
    points.iter().map(|&i| space.mass(i)).sum()
}

/// `max` over the family of `⨍_B |u|`.
pub fn maximal_oracle(space: &MetricMeasureSpace, u: &[f64], x: usize, r_max: f64) -> f64 {
    ball_family(space, x, r_max)
        .iter()
        .map(|b| {
            let num: f64 = b.iter().map(|&i| u[i].abs() * space.mass(i)).sum();
            num / mass(space, b)
        })
        .fold(0.0, f64::max)
}

/// `max` over the family of `ν(B) / μ(B)`.
pub fn maximal_measure_oracle(space: &MetricMeasureSpace, nu: &[f64], x: usize, r_max: f64) -> f64 {
    ball_family(space, x, r_max)
        .iter()
        .map(|b| b.iter().map(|&i| nu[i]).sum::<f64>() / mass(space, b))
        .fold(0.0, f64::max)
}

/// Floyd–Warshall on an edge list.
pub fn floyd_warshall(n: usize, edges: &[(usize, usize, f64)]) -> Vec<Vec<f64>> {
    let mut d = vec![vec![f64::INFINITY; n]; n];
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = 0.0;
    }
    for &(a, b, l) in edges {
        d[a][b] = d[a][b].min(l);
        d[b][a] = d[b][a].min(l);
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = d[i][k] + d[k][j];
                if via < d[i][j] {
                    d[i][j] = via;
                }
            }
        }
    }
    d
}

/// Greedy disjoint selection among closed witness balls of `{M_ν > t}`,
/// largest radius first. Returns `(superlevel mass, mass of the union of the
/// tripled selected balls, Σ μ(selected), Σ ν(selected))` and panics if the
/// tripled balls miss a superlevel point.
pub fn vitali_cover(space: &MetricMeasureSpace, nu: &[f64], t: f64) -> (f64, f64, f64, f64) {
    let n = space.n();
    let closed =
        |x: usize, r: f64| -> Vec<usize> { (0..n).filter(|&y| space.dist(x, y) <= r).collect() };
    // for each point in the superlevel set, its largest witnessing closed ball
    let mut witnesses: Vec<(f64, usize)> = Vec::new();
    let mut superlevel = Vec::new();
    for x in 0..n {
        let mut radii: Vec<f64> = (0..n).map(|y| space.dist(x, y)).collect();
        radii.sort_by(f64::total_cmp);
        radii.dedup();
        let best = radii.iter().rev().copied().find(|&r| {
            let b = closed(x, r);
            b.iter().map(|&i| nu[i]).sum::<f64>() / mass(space, &b) > t
        });
        if let Some(r) = best {
            witnesses.push((r, x));
            superlevel.push(x);
        }
    }
    witnesses.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    let mut chosen: Vec<(f64, usize)> = Vec::new();
    for &(r, x) in &witnesses {
        let disjoint = chosen.iter().all(|&(s, z)| {
            let a = closed(x, r);
            let b = closed(z, s);
            a.iter().all(|p| !b.contains(p))
        });
        if disjoint {
            chosen.push((r, x));
        }
    }
    let mut covered = vec![false; n];
    for &(r, x) in &chosen {
        for y in closed(x, 3.0 * r) {
            covered[y] = true;
        }
    }
    for &x in &superlevel {
        assert!(covered[x], "point {x} of the superlevel set is not covered");
    }
    let union: f64 = (0..n).filter(|&y| covered[y]).map(|y| space.mass(y)).sum();
    let selected_mu: f64 = chosen
        .iter()
        .map(|&(r, x)| mass(space, &closed(x, r)))
        .sum();
    let selected_nu: f64 = chosen
        .iter()
        .map(|&(r, x)| closed(x, r).iter().map(|&i| nu[i]).sum::<f64>())
        .sum();
    (mass(space, &superlevel), union, selected_mu, selected_nu)
}

/// `max μ(B(x, 2r)) / μ(B(x, r))` over the dense radius grid.
pub fn doubling_oracle(space: &MetricMeasureSpace) -> f64 {
    let mut best: f64 = 1.0;
    for x in 0..space.n() {
        for r in dense_radii(space, x, f64::INFINITY) {
            for r in [r, r / 2.0] {
                let small = mass(space, &scan_ball(space, x, r));
                let big = mass(space, &scan_ball(space, x, 2.0 * r));
                best = best.max(big / small);
            }
        }
    }
    best
}

/// `∫_B |u - u_B|` with the naive average.
pub fn oscillation(space: &MetricMeasureSpace, u: &[f64], b: &[usize]) -> f64 {
    let avg = b.iter().map(|&i| u[i] * space.mass(i)).sum::<f64>() / mass(space, b);
    b.iter().map(|&i| (u[i] - avg).abs() * space.mass(i)).sum()
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    a == b || (a - b).abs() <= tol * a.abs().max(b.abs()).max(1e-300)
}
