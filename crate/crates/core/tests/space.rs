mod common;

use bvcert::fixtures::{path_graph, random_graph_space, random_space, two_point};
use bvcert::prelude::*;
use bvcert::space::MetricKind;
use proptest::prelude::*;

#[test]
fn two_point_matrix_space_loads() {
    let s = load_space(r#"{"name":"S2","metric":{"type":"matrix","d":[[0,1],[1,0]]},"mu":[1,1]}"#)
        .unwrap();
    assert_eq!(s.n(), 2);
    assert_eq!(s.name(), "S2");
    assert_eq!(s.kind(), MetricKind::Matrix);
    assert_eq!(s.total_mass(), 2.0);
}

#[test]
fn path_distance_is_edge_sum() {
    let s = load_space(
        r#"{"name":"abc","metric":{"type":"graph","n":3,"edges":[[0,1,1],[1,2,1]]},"mu":[1,1,1],"labels":["a","b","c"]}"#,
    )
    .unwrap();
    assert_eq!(s.dist(0, 2), 2.0);
    assert_eq!(s.label(2), "c");
}

#[test]
fn invalid_documents_are_rejected() {
    let bad = [
        // triangle inequality: 5 > 1 + 1
        r#"{"name":"t","metric":{"type":"matrix","d":[[0,5,1],[5,0,1],[1,1,0]]},"mu":[1,1,1]}"#,
        r#"{"name":"t","metric":{"type":"matrix","d":[[0,1],[2,0]]},"mu":[1,1]}"#,
        r#"{"name":"t","metric":{"type":"matrix","d":[[0,1],[1,0]]},"mu":[1,0]}"#,
        r#"{"name":"t","metric":{"type":"graph","n":3,"edges":[[0,1,1]]},"mu":[1,1,1]}"#,
        r#"{"name":"t","metric":{"type":"graph","n":2,"edges":[[0,1,-1]]},"mu":[1,1]}"#,
        r#"{"name":"t","metric":{"type":"matrix","d":[[0,1],[1,0]]},"mu":[1,1],"functions":{"u":[1]}}"#,
        r#"{"name":"t","metric":{"type":"matrix","d":[[0,1],[1,0]]},"mu":[1,1],"extra":1}"#,
        r#"{"name":"t","metric":{"type":"matrix","d":[[0,1],[1,0]]}"#,
    ];
    for text in bad {
        assert!(load_document(text).is_err(), "accepted {text}");
    }
}

#[test]
fn open_ball_examples() {
    let s = two_point();
    assert_eq!(ball(&s, 0, 1.0).unwrap().members, vec![0]);
    assert_eq!(ball(&s, 0, 1.5).unwrap().members, vec![0, 1]);
    assert!(ball(&s, 0, 0.0).is_err());
    assert_eq!(candidate_radii(&s, 0, 1.0).unwrap(), vec![0.0]);
    assert_eq!(candidate_radii(&s, 0, 2.0).unwrap(), vec![0.0, 1.0]);
}

#[test]
fn graph_distances_match_floyd_warshall() {
    for seed in 0..10 {
        let s = random_graph_space(seed, 25, 15);
        let edges: Vec<(usize, usize, f64)> = s
            .edges()
            .unwrap()
            .iter()
            .map(|e| (e.a, e.b, e.length))
            .collect();
        let fw = common::floyd_warshall(s.n(), &edges);
        for i in 0..s.n() {
            for j in 0..s.n() {
                assert_eq!(s.dist(i, j), fw[i][j]);
            }
        }
    }
}

#[test]
fn document_round_trip_preserves_space() {
    let s = path_graph(6, 0.25);
    let u = ScalarField::from_fn(6, |i| i as f64 * 0.1);
    let doc = SpaceDocument::describe(&s, &[("u", &u)], &[]);
    let text = to_json(&doc);
    let back = load_document(&text).unwrap();
    assert_eq!(back.space, s);
    assert_eq!(back.function("u").unwrap(), &u);
    assert_eq!(
        to_json(&SpaceDocument::describe(&back.space, &[("u", &u)], &[])),
        text
    );
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn ball_equals_direct_scan(seed in 0u64..1000, x in 0usize..10, r in 0.001f64..3.0) {
        let s = random_space(seed, 10);
        let r = r * s.diameter() / 2.0;
        let b = ball(&s, x, r).unwrap();
        prop_assert_eq!(&b.members, &common::scan_ball(&s, x, r));
        prop_assert!(b.contains(x));
    }

    #[test]
    fn candidate_radii_give_the_dense_family(seed in 0u64..1000, x in 0usize..12, frac in 0.05f64..1.2) {
        let s = random_space(seed, 12);
        let r_max = frac * s.diameter();
        let ours: std::collections::BTreeSet<Vec<usize>> = candidate_radii(&s, x, r_max)
            .unwrap()
            .into_iter()
            .map(|t| (0..s.n()).filter(|&y| s.dist(x, y) <= t).collect())
            .collect();
        prop_assert_eq!(ours, common::ball_family(&s, x, r_max));
    }
}
