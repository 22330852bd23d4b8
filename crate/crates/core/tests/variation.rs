mod common;

use bvcert::fixtures::{
    grid_graph, path_graph, random_field, random_graph_space, random_measure, random_space,
    random_tree, sample_grid, two_point,
};
use bvcert::prelude::*;

#[test]
fn two_point_variation_and_poincare() {
    let s = two_point();
    let u = ScalarField::new(vec![0.0, 2.0]).unwrap();
    let nu = variation_measure(&s, &u, VariationMode::Graph).unwrap();
    assert_eq!(nu.masses(), &[1.0, 1.0]);
    assert_eq!(total_variation(&s, &u, VariationMode::Graph).unwrap(), 2.0);
    let row = poincare_ball_constant(&s, &u, &nu, &ball(&s, 0, 1.5).unwrap(), 1.0, false).unwrap();
    assert_eq!((row.lhs, row.rhs), (2.0, 3.0));
    assert_eq!(row.constant, 2.0 / 3.0);
}

#[test]
fn grid_total_variation_of_a_ramp() {
    for n in [4, 8, 16, 32] {
        let s = grid_graph(n);
        let u = sample_grid(&s, |x, _| x);
        let tv = total_variation(&s, &u, VariationMode::Grid).unwrap();
        assert!((tv - 1.0).abs() <= 2.0 / n as f64, "n = {n}: {tv}");
    }
}

#[test]
fn constant_fields_have_no_variation() {
    let s = grid_graph(5);
    let c = ScalarField::constant(25, 0.7);
    for mode in [VariationMode::Graph, VariationMode::Grid] {
        assert_eq!(total_variation(&s, &c, mode).unwrap(), 0.0);
    }
    let nu = random_measure(1, 25);
    for normalized in [false, true] {
        assert_eq!(
            check_ball_poincare(&s, &c, &nu, 3.0, normalized)
                .unwrap()
                .minimal_constant,
            0.0
        );
    }
}

#[test]
fn upper_gradient_examples() {
    let s = path_graph(3, 1.0);
    let u = ScalarField::new(vec![0.0, 1.0, 2.0]).unwrap();
    assert!(
        upper_gradient_check(&s, &u, &ScalarField::constant(3, 1.0), 100)
            .unwrap()
            .passed
    );
    let out = upper_gradient_check(&s, &u, &ScalarField::constant(3, 0.0), 100).unwrap();
    assert!(!out.passed);
    let v = out.violation.unwrap();
    assert!(v.oscillation > v.integral);
}

#[test]
fn edge_slopes_are_upper_gradients_on_trees() {
    for seed in 0..10 {
        let s = random_tree(seed, 12);
        let u = random_field(seed, 12);
        let edges = s.edges().unwrap();
        let g = ScalarField::from_fn(12, |x| {
            edges
                .iter()
                .filter(|e| e.a == x || e.b == x)
                .map(|e| (u[e.a] - u[e.b]).abs() / e.length)
                .fold(0.0, f64::max)
        });
        let out = upper_gradient_check(&s, &u, &g, 1000).unwrap();
        assert!(out.passed && out.exhaustive);
    }
}

/// Least trapezoid integral of `g` over every simple path from `x` to `y`.
fn least_integral_by_enumeration(
    s: &MetricMeasureSpace,
    g: &ScalarField,
    x: usize,
    y: usize,
) -> f64 {
    fn walk(
        s: &MetricMeasureSpace,
        g: &ScalarField,
        at: usize,
        y: usize,
        seen: &mut Vec<bool>,
        acc: f64,
        best: &mut f64,
    ) {
        if at == y {
            *best = best.min(acc);
            return;
        }
        for e in s.edges().unwrap() {
            let next = if e.a == at {
                e.b
            } else if e.b == at {
                e.a
            } else {
                continue;
            };
            if !seen[next] {
                seen[next] = true;
                walk(
                    s,
                    g,
                    next,
                    y,
                    seen,
                    acc + e.length * (g[at] + g[next]) / 2.0,
                    best,
                );
                seen[next] = false;
            }
        }
    }
    let mut seen = vec![false; s.n()];
    seen[x] = true;
    let mut best = f64::INFINITY;
    walk(s, g, x, y, &mut seen, 0.0, &mut best);
    best
}

#[test]
fn upper_gradient_matches_path_enumeration() {
    for seed in 0..40 {
        let s = random_graph_space(seed, 7, 5);
        let u = random_field(seed, 7).map(|v| 3.0 * v);
        let g = random_field(seed + 7, 7).map(f64::abs);
        let mut want = true;
        for x in 0..7 {
            for y in x + 1..7 {
                if (u[x] - u[y]).abs() > least_integral_by_enumeration(&s, &g, x, y) * (1.0 + 1e-10)
                {
                    want = false;
                }
            }
        }
        let out = upper_gradient_check(&s, &u, &g, 1).unwrap();
        assert_eq!(out.passed, want, "seed {seed}");
        if let Some(v) = out.violation {
            let (a, b) = (v.path[0], *v.path.last().unwrap());
            assert!(common::rel_close(
                v.integral,
                least_integral_by_enumeration(&s, &g, a, b),
                1e-12
            ));
            assert!(v.oscillation > v.integral);
            let mut sorted = v.path.clone();
            sorted.sort_unstable();
            sorted.dedup();
            assert_eq!(sorted.len(), v.path.len());
        }
    }
}

#[test]
fn poincare_rows_match_naive_evaluation() {
    for seed in 0..5 {
        let s = random_space(seed, 10);
        let u = random_field(seed, 10);
        let nu = random_measure(seed, 10);
        let report = check_ball_poincare(&s, &u, &nu, 2.0, false).unwrap();
        for row in &report.per_ball {
            let b = common::scan_ball(&s, row.center, row.radius);
            let naive = common::oscillation(&s, u.values(), &b);
            assert!(
                (row.lhs - naive).abs() <= 1e-12 * (1.0 + naive),
                "{row:?} {naive}"
            );
            let dilated: f64 = (0..10)
                .filter(|&y| s.dist(row.center, y) <= 2.0 * row.radius_limit)
                .map(|y| nu[y])
                .sum();
            assert!(common::rel_close(
                row.rhs,
                row.radius_limit * dilated,
                1e-12
            ));
        }
        let max = report
            .per_ball
            .iter()
            .map(|r| r.constant)
            .fold(0.0, f64::max);
        assert_eq!(report.minimal_constant, max);
    }
}

#[test]
fn zero_measure_gives_infinite_constant() {
    let s = two_point();
    let u = ScalarField::new(vec![0.0, 2.0]).unwrap();
    let r = check_ball_poincare(&s, &u, &PointMeasure::zero(2), 1.0, false).unwrap();
    assert_eq!(r.minimal_constant, f64::INFINITY);
    assert!(r.worst_ball.is_some());
}
