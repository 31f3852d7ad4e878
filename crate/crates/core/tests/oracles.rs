mod common;

use common::*;
use linkloop::metrics::{clustering_coefficient, gini};
use linkloop::pagerank::{global_pagerank, personalized_pagerank, DEFAULT_TOL};
use linkloop::recommenders::{
    circle_of_trust, common_followed_scores, salsa_authorities, two_hops_scores, wtf_scores,
};

#[test]
fn ppr_matches_dense_solve() {
    for case in 0..50 {
        let g = random_graph(1000 + case, 20);
        let s = g.snapshot();
        for seed in 0..s.node_count() {
            let it = personalized_pagerank(&s, seed, 0.85, DEFAULT_TOL).unwrap();
            let dense = dense_ppr(&s, seed, 0.85);
            assert!(linf(&it, &dense) < 1e-8, "case {case} seed {seed}");
        }
    }
}

#[test]
fn global_pagerank_matches_dense_solve() {
    for case in 0..50 {
        let g = random_graph(2000 + case, 20);
        let s = g.snapshot();
        let it = global_pagerank(&s, 0.85, DEFAULT_TOL).unwrap();
        assert!(linf(&it, &dense_global_pagerank(&s, 0.85)) < 1e-8, "case {case}");
        assert!((it.iter().sum::<f64>() - 1.0).abs() < 1e-9);
    }
}

#[test]
fn neighborhood_counts_match_enumeration() {
    for case in 0..50 {
        let g = random_graph(3000 + case, 50);
        let s = g.snapshot();
        for i in 0..s.node_count() {
            let th = two_hops_scores(&s, i);
            let cf = common_followed_scores(&s, i);
            for j in 0..s.node_count() {
                let candidate = j != i && !g.has_edge(i, j);
                match th.score(j) {
                    Some(v) => {
                        assert!(candidate);
                        assert_eq!(v, brute_two_hops(&g, i, j) as f64, "2h case {case} {i}->{j}");
                    }
                    None => assert!(!candidate),
                }
                match cf.score(j) {
                    Some(v) => assert_eq!(v, brute_common_followed(&g, i, j) as f64, "cf case {case} {i}->{j}"),
                    None => assert!(!candidate),
                }
            }
        }
    }
}

#[test]
fn salsa_matches_dense_power_iteration() {
    for case in 0..60 {
        let g = random_graph(4000 + case, 12);
        let s = g.snapshot();
        for seed in 0..s.node_count() {
            let hubs = circle_of_trust(&s, seed, 0.85, 10).unwrap();
            let got = salsa_authorities(&s, &hubs);
            let want = dense_salsa(&s, &hubs);
            assert_eq!(got.len(), want.len());
            for ((a, x), (b, y)) in got.iter().zip(&want) {
                assert_eq!(a, b);
                assert!((x - y).abs() < 1e-8, "case {case} seed {seed}: {x} vs {y}");
            }
        }
    }
}

#[test]
fn salsa_on_disconnected_hubs() {
    // Hubs 0 and 1 share nothing; hub 2 bridges nothing either.
    let g = graph(8, &[(0, 3), (0, 4), (1, 5), (2, 6), (2, 7), (2, 3)]);
    let s = g.snapshot();
    let got = salsa_authorities(&s, &[0, 1, 2]);
    let want = dense_salsa(&s, &[0, 1, 2]);
    for ((_, x), (_, y)) in got.iter().zip(&want) {
        assert!((x - y).abs() < 1e-12);
    }
}

#[test]
fn wtf_scores_only_candidates() {
    let g = random_graph(77, 12);
    let s = g.snapshot();
    for seed in 0..s.node_count() {
        let sv = wtf_scores(&s, seed, 0.85, 10).unwrap();
        for &(j, v) in sv.entries() {
            assert!(j != seed && !g.has_edge(seed, j));
            assert!(v >= 0.0 && v.is_finite());
        }
    }
}

#[test]
fn gini_and_clustering_anchors() {
    assert!(gini(&[5.0, 5.0, 5.0, 5.0]).abs() < 1e-12);
    assert!((gini(&[0.0, 0.0, 10.0]) - 2.0 / 3.0).abs() < 1e-12);
    let clique = graph(3, &[(0, 1), (1, 0), (1, 2), (2, 1), (0, 2), (2, 0)]);
    assert!((clustering_coefficient(&clique.snapshot()) - 1.0).abs() < 1e-12);
    let cycle = graph(3, &[(0, 1), (1, 2), (2, 0)]);
    assert!((clustering_coefficient(&cycle.snapshot()) - 0.5).abs() < 1e-12);
}

#[test]
fn clustering_matches_dense_matrix_powers() {
    for case in 0..50 {
        let g = random_graph(5000 + case, 30);
        let s = g.snapshot();
        assert!((clustering_coefficient(&s) - dense_clustering(&s)).abs() < 1e-12, "case {case}");
    }
}
