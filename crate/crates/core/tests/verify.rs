use std::collections::BTreeMap;

use proptest::prelude::*;

use chroma_core::graph::{
    gen_complete, gen_cycle, gen_mycielskian, gen_path, gen_random_gnp, gen_star, to_bipartite,
    DirectedGraph,
};
use chroma_core::partition::partition_random;
use chroma_core::protocol::run_distributed;
use chroma_core::runtime::build_local_graphs;
use chroma_core::verify::{
    chromatic_number, color_stats, verify_d1, verify_d2, verify_pd2_sources, Violation,
    ViolationKind, ORACLE_MAX_N,
};
use chroma_core::{AlgorithmConfig, Error, Graph, Mode};

#[test]
fn d1_examples() {
    let p3 = gen_path(3);
    assert!(verify_d1(&p3, &[1, 2, 1]).unwrap().is_empty());
    assert_eq!(
        verify_d1(&p3, &[1, 1, 2]).unwrap(),
        vec![Violation::D1Edge { u: 0, v: 1 }]
    );
    assert_eq!(
        verify_d1(&p3, &[1, 0, 1]).unwrap(),
        vec![Violation::Uncolored { vertex: 1 }]
    );
    assert!(matches!(
        verify_d1(&p3, &[1, 2]),
        Err(Error::SizeMismatch {
            expected: 3,
            actual: 2
        })
    ));
}

#[test]
fn d2_examples() {
    let star = gen_star(4);
    assert!(verify_d2(&star, &[1, 2, 3, 4, 5], false)
        .unwrap()
        .is_empty());

    let v = verify_d2(&star, &[1, 2, 2, 3, 4], true).unwrap();
    assert_eq!(
        v,
        vec![Violation::Pd2Path {
            u: 1,
            middle: 0,
            w: 2
        }]
    );
    assert_eq!(v[0].kind(), ViolationKind::Pd2Path);

    // Partial ignores the center sharing a leaf color; full does not.
    assert!(verify_d2(&star, &[2, 1, 2, 3, 4], true).unwrap().is_empty());
    let v = verify_d2(&star, &[2, 1, 2, 3, 4], false).unwrap();
    assert_eq!(v, vec![Violation::D1Edge { u: 0, v: 2 }]);

    assert!(verify_d2(&gen_path(4), &[1, 2, 3, 1], false)
        .unwrap()
        .is_empty());
    assert_eq!(
        verify_d2(&gen_path(4), &[1, 2, 1, 3], false).unwrap().len(),
        1
    );
}

#[test]
fn pd2_sources_ignore_targets() {
    let b = to_bipartite(&DirectedGraph::from_arcs(2, [(0, 0), (1, 0)]));
    // s0 and s1 share t0; targets all reuse color 1.
    assert_eq!(
        verify_pd2_sources(&b.graph, &[1, 2, 1, 1], 2)
            .unwrap()
            .len(),
        0
    );
    assert_eq!(
        verify_pd2_sources(&b.graph, &[2, 2, 1, 1], 2)
            .unwrap()
            .len(),
        1
    );
    assert_eq!(
        verify_pd2_sources(&b.graph, &[1, 2, 0, 0], 2)
            .unwrap()
            .len(),
        0
    );
    assert!(verify_pd2_sources(&b.graph, &[1, 2, 1, 1], 5).is_err());
}

#[test]
fn color_stats_examples() {
    let s = color_stats(&[1, 2, 1]);
    assert_eq!(s.num_colors, 2);
    assert_eq!(s.histogram, BTreeMap::from([(1, 2), (2, 1)]));
    assert_eq!(color_stats(&[0, 0, 0]).num_colors, 0);
    let k5: Vec<u32> = (1..=5).collect();
    let s = color_stats(&k5);
    assert_eq!(s.num_colors, 5);
    assert!(s.histogram.values().all(|&k| k == 1));
}

#[test]
fn chromatic_oracle_examples() {
    assert_eq!(chromatic_number(&gen_cycle(5), ORACLE_MAX_N).unwrap(), 3);
    assert_eq!(chromatic_number(&gen_cycle(6), ORACLE_MAX_N).unwrap(), 2);
    assert_eq!(chromatic_number(&gen_complete(4), ORACLE_MAX_N).unwrap(), 4);
    assert_eq!(
        chromatic_number(&gen_mycielskian(4).unwrap(), ORACLE_MAX_N).unwrap(),
        4
    );
    assert_eq!(chromatic_number(&Graph::empty(3), ORACLE_MAX_N).unwrap(), 1);
    assert!(matches!(
        chromatic_number(&gen_path(13), ORACLE_MAX_N),
        Err(Error::GraphTooLarge { .. })
    ));
}

/// Counts each violation the way the verifiers do: one per monochromatic
/// edge, one per (pair, middle) for 2-paths, one per uncolored vertex.
fn triple_loop(g: &Graph, c: &[u32], d2: bool, partial: bool) -> (usize, usize, usize) {
    let n = g.num_vertices();
    let zeros = c.iter().filter(|&&x| x == 0).count();
    let mut edges = 0;
    let mut paths = 0;
    for u in 0..n {
        for w in u + 1..n {
            if c[u] == 0 || c[u] != c[w] {
                continue;
            }
            if g.has_edge(u, w) && !(d2 && partial) {
                edges += 1;
            }
            if d2 {
                paths += (0..n)
                    .filter(|&m| g.has_edge(u, m) && g.has_edge(m, w))
                    .count();
            }
        }
    }
    (zeros, edges, paths)
}

fn tally(v: &[Violation]) -> (usize, usize, usize) {
    let count = |k: ViolationKind| v.iter().filter(|x| x.kind() == k).count();
    (
        count(ViolationKind::Uncolored),
        count(ViolationKind::D1Edge),
        count(ViolationKind::D2Path) + count(ViolationKind::Pd2Path),
    )
}

fn graph_and_colors() -> impl Strategy<Value = (Graph, Vec<u32>)> {
    (1usize..=50, 0.0f64..0.4, any::<u64>(), 1u32..6).prop_flat_map(|(n, p, seed, k)| {
        let g = gen_random_gnp(n, p, seed).unwrap();
        (Just(g), proptest::collection::vec(0..=k, n))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn verifiers_match_the_triple_loop((g, c) in graph_and_colors()) {
        prop_assert_eq!(tally(&verify_d1(&g, &c).unwrap()), triple_loop(&g, &c, false, false));
        prop_assert_eq!(tally(&verify_d2(&g, &c, false).unwrap()), triple_loop(&g, &c, true, false));
        prop_assert_eq!(tally(&verify_d2(&g, &c, true).unwrap()), triple_loop(&g, &c, true, true));
    }

    #[test]
    fn oracle_never_beats_a_proper_coloring(
        n in 1usize..=ORACLE_MAX_N,
        p in 0.1f64..0.9,
        seed: u64,
        ranks in 1usize..4,
    ) {
        let g = gen_random_gnp(n, p, seed).unwrap();
        let chi = chromatic_number(&g, ORACLE_MAX_N).unwrap();
        let pm = partition_random(&g, ranks, seed).unwrap();
        let w = build_local_graphs(&g, &pm, 1).unwrap();
        let out = run_distributed(&w, &AlgorithmConfig::new(Mode::D1)).unwrap();
        prop_assert!(verify_d1(&g, &out.coloring).unwrap().is_empty());
        prop_assert!(chi <= color_stats(&out.coloring).num_colors);
    }
}
