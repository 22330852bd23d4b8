//! Seeded test spaces, fields and measures.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::space::{Edge, GridShape, MetricMeasureSpace, PointMeasure, ScalarField};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Two points `a`, `b` at distance 1 with unit masses.
pub fn two_point() -> MetricMeasureSpace {
    MetricMeasureSpace::from_graph("S2", 2, vec![Edge::from((0, 1, 1.0))], vec![1.0, 1.0])
        .and_then(|s| s.with_labels(vec!["a".into(), "b".into()]))
        .expect("valid space")
}

/// Path `0 - 1 - ... - (n-1)` with edge length `step` and point mass `step`.
pub fn path_graph(n: usize, step: f64) -> MetricMeasureSpace {
    let edges = (1..n).map(|i| Edge::from((i - 1, i, step))).collect();
    MetricMeasureSpace::from_graph(format!("path-{n}"), n, edges, vec![step; n])
        .expect("valid space")
}

/// Cycle on `n` points with unit edges and unit masses.
pub fn cycle(n: usize) -> MetricMeasureSpace {
    let edges = (0..n).map(|i| Edge::from((i, (i + 1) % n, 1.0))).collect();
    MetricMeasureSpace::from_graph(format!("cycle-{n}"), n, edges, vec![1.0; n])
        .expect("valid space")
}

/// `rows × cols` grid graph with 4-neighbour edges of length `spacing` and
/// point mass `spacing²`, tagged with its grid shape.
pub fn grid_graph_with(rows: usize, cols: usize, spacing: f64) -> MetricMeasureSpace {
    let shape = GridShape {
        rows,
        cols,
        spacing,
    };
    let mut edges = Vec::new();
    for r in 0..rows {
        for c in 0..cols {
            if c + 1 < cols {
                edges.push(Edge::from((
                    shape.index(r, c),
                    shape.index(r, c + 1),
                    spacing,
                )));
            }
            if r + 1 < rows {
                edges.push(Edge::from((
                    shape.index(r, c),
                    shape.index(r + 1, c),
                    spacing,
                )));
            }
        }
    }
    MetricMeasureSpace::from_graph(
        format!("grid-{rows}x{cols}"),
        rows * cols,
        edges,
        vec![spacing * spacing; rows * cols],
    )
    .and_then(|s| s.with_grid(shape))
    .expect("valid space")
}

/// The unit square sampled on an `n × n` cell-centred grid, spacing `1/n`.
pub fn grid_graph(n: usize) -> MetricMeasureSpace {
    grid_graph_with(n, n, 1.0 / n as f64)
}

/// `f` sampled at the grid coordinates of `space`.
pub fn sample_grid(space: &MetricMeasureSpace, f: impl Fn(f64, f64) -> f64) -> ScalarField {
    let grid = space.grid().expect("grid space");
    ScalarField::from_fn(space.n(), |i| {
        let (x, y) = grid.coords(i);
        f(x, y)
    })
}

/// `sin(πx) sin(πy)` on a grid space.
pub fn sine_bump(space: &MetricMeasureSpace) -> ScalarField {
    use std::f64::consts::PI;
    sample_grid(space, |x, y| (PI * x).sin() * (PI * y).sin())
}

/// Unit square with Euclidean distances, edges along the sides.
pub fn square() -> MetricMeasureSpace {
    let s = std::f64::consts::SQRT_2;
    let d = vec![
        vec![0.0, 1.0, s, 1.0],
        vec![1.0, 0.0, 1.0, s],
        vec![s, 1.0, 0.0, 1.0],
        vec![1.0, s, 1.0, 0.0],
    ];
    let edges = (0..4).map(|i| Edge::from((i, (i + 1) % 4, 1.0))).collect();
    MetricMeasureSpace::from_matrix("square", &d, vec![1.0; 4], Some(edges)).expect("valid space")
}

/// Random connected graph: a random tree plus `extra` chords, integer edge
/// lengths in `1..=4`, masses in `[0.5, 2)`.
pub fn random_graph_space(seed: u64, n: usize, extra: usize) -> MetricMeasureSpace {
    let mut rng = rng(seed);
    let mut edges = Vec::new();
    for i in 1..n {
        let parent = rng.gen_range(0..i);
        edges.push(Edge::from((parent, i, rng.gen_range(1..=4) as f64)));
    }
    if n > 1 {
        for _ in 0..extra {
            let a = rng.gen_range(0..n);
            let b = rng.gen_range(0..n);
            if a != b {
                edges.push(Edge::from((a, b, rng.gen_range(1..=4) as f64)));
            }
        }
    }
    let mass = (0..n).map(|_| rng.gen_range(0.5..2.0)).collect();
    MetricMeasureSpace::from_graph(format!("random-graph-{seed}"), n, edges, mass)
        .expect("valid space")
}

/// Random tree with integer edge lengths.
pub fn random_tree(seed: u64, n: usize) -> MetricMeasureSpace {
    random_graph_space(seed, n, 0).with_name(format!("random-tree-{seed}"))
}

/// Random points in the unit square with Euclidean distances.
pub fn random_euclidean_space(seed: u64, n: usize) -> MetricMeasureSpace {
    let mut rng = rng(seed);
    let pts: Vec<(f64, f64)> = (0..n).map(|_| (rng.gen(), rng.gen())).collect();
    let d: Vec<Vec<f64>> = pts
        .iter()
        .map(|&(x1, y1)| {
            pts.iter()
                .map(|&(x2, y2)| (x1 - x2).hypot(y1 - y2))
                .collect()
        })
        .collect();
    let mass = (0..n).map(|_| rng.gen_range(0.5..2.0)).collect();
    MetricMeasureSpace::from_matrix(format!("random-euclidean-{seed}"), &d, mass, None)
        .expect("valid space")
}

/// Seeded choice among random graphs, trees and Euclidean point clouds.
pub fn random_space(seed: u64, n: usize) -> MetricMeasureSpace {
    match seed % 3 {
        0 => random_graph_space(seed, n, n / 2),
        1 => random_tree(seed, n),
        _ => random_euclidean_space(seed, n),
    }
}

/// Values in `[-1, 1)`.
pub fn random_field(seed: u64, n: usize) -> ScalarField {
    let mut rng = rng(seed ^ 0x5eed_f1e1d);
    ScalarField::new((0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()).expect("finite values")
}

/// Masses in `[0, 2)`, roughly a quarter of them zero.
pub fn random_measure(seed: u64, n: usize) -> PointMeasure {
    let mut rng = rng(seed ^ 0x3ea5_0e);
    let masses = (0..n)
        .map(|_| {
            if rng.gen_bool(0.25) {
                0.0
            } else {
                rng.gen_range(0.0..2.0)
            }
        })
        .collect();
    PointMeasure::new(masses).expect("valid measure")
}
