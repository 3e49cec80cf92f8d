use std::collections::BTreeSet;

use proptest::prelude::*;

use chroma_core::graph::{
    gen_hex_mesh, gen_path, gen_random_dag, gen_random_gnp, gen_star, to_bipartite,
};
use chroma_core::localcolor::{
    serial_greedy, speculative_color, speculative_color_d2, Color, Coloring, Kernel,
};
use chroma_core::verify::{verify_d1, verify_d2};
use chroma_core::Graph;

const THREADS: [usize; 3] = [1, 2, 4];

fn in_pool<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .unwrap()
        .install(f)
}

fn all(g: &Graph) -> Vec<usize> {
    (0..g.num_vertices()).collect()
}

fn color_d1(g: &Graph, kernel: Kernel, deterministic: bool) -> Coloring {
    let mut c = Coloring::uncolored(g.num_vertices());
    speculative_color(g, &mut c, &all(g), kernel, deterministic);
    c
}

fn color_d2(g: &Graph, partial: bool, deterministic: bool) -> Coloring {
    let mut c = Coloring::uncolored(g.num_vertices());
    speculative_color_d2(g, &mut c, &all(g), partial, deterministic);
    c
}

/// Colors that `v` must avoid: neighbors, plus two-hop vertices for
/// distance-2 (direct neighbors are dropped when `partial`).
fn forbidden(g: &Graph, c: &[Color], v: usize, d2: bool, partial: bool) -> BTreeSet<Color> {
    let mut out = BTreeSet::new();
    for &u in g.neighbors(v) {
        if !(d2 && partial) {
            out.insert(c[u]);
        }
        if d2 {
            out.extend(g.neighbors(u).iter().filter(|&&x| x != v).map(|&x| c[x]));
        }
    }
    out
}

fn assert_first_fit(g: &Graph, c: &[Color], d2: bool, partial: bool) {
    for v in 0..g.num_vertices() {
        let f = forbidden(g, c, v, d2, partial);
        for k in 1..c[v] {
            assert!(
                f.contains(&k),
                "vertex {v} has color {} but {k} is free",
                c[v]
            );
        }
    }
}

#[test]
fn distance2_examples() {
    let star = gen_star(4);
    let full = color_d2(&star, false, true);
    assert_eq!(full.iter().collect::<BTreeSet<_>>().len(), 5);

    let partial = color_d2(&star, true, true);
    let leaves: BTreeSet<_> = partial[1..].iter().collect();
    assert_eq!(leaves.len(), 4);
    assert!(verify_d2(&star, &partial, true).unwrap().is_empty());

    assert_eq!(color_d2(&gen_path(4), false, true).num_colors(), 3);
}

#[test]
fn kernels_proper_across_thread_counts() {
    let graphs = [
        gen_hex_mesh(10, 10, 10).unwrap(),
        gen_random_gnp(400, 0.05, 4).unwrap(),
        gen_star(300),
    ];
    for g in &graphs {
        let delta = g.max_degree();
        for threads in THREADS {
            for kernel in [Kernel::VertexBased, Kernel::EdgeBased] {
                let c = in_pool(threads, || color_d1(g, kernel, false));
                assert!(c.is_complete());
                assert!(
                    verify_d1(g, &c).unwrap().is_empty(),
                    "{kernel:?} t={threads}"
                );
                assert!(c.max_color() as usize <= delta + 1);
            }
            let c = in_pool(threads, || color_d2(g, false, false));
            assert!(
                verify_d2(g, &c, false).unwrap().is_empty(),
                "d2 t={threads}"
            );
            assert!(c.max_color() as usize <= delta * delta + 1);
        }
    }
}

#[test]
fn partial_d2_on_bipartite_graphs() {
    let b = to_bipartite(&gen_random_dag(150, 0.05, 2).unwrap());
    for threads in THREADS {
        let c = in_pool(threads, || color_d2(&b.graph, true, false));
        assert!(verify_d2(&b.graph, &c, true).unwrap().is_empty());
    }
}

#[test]
fn deterministic_is_identical_across_worker_counts() {
    let g = gen_random_gnp(300, 0.04, 12).unwrap();
    let reference = (
        color_d1(&g, Kernel::VertexBased, true),
        color_d2(&g, false, true),
    );
    for threads in THREADS {
        for _ in 0..2 {
            let again = in_pool(threads, || {
                (
                    color_d1(&g, Kernel::EdgeBased, true),
                    color_d2(&g, false, true),
                )
            });
            assert_eq!(again, reference);
        }
    }
    let natural = serial_greedy(&g, &all(&g)).unwrap();
    assert_eq!(natural, reference.0);
}

#[test]
fn recoloring_a_subset_keeps_the_rest() {
    let g = gen_random_gnp(200, 0.05, 3).unwrap();
    let mut c = color_d1(&g, Kernel::VertexBased, false);
    let before = c.clone();
    let worklist: Vec<usize> = (0..200).step_by(7).collect();
    speculative_color(&g, &mut c, &worklist, Kernel::EdgeBased, false);
    assert!(verify_d1(&g, &c).unwrap().is_empty());
    for v in (0..200).filter(|v| v % 7 != 0) {
        assert_eq!(c[v], before[v]);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn greedy_bounds_and_first_fit(n in 1usize..80, p in 0.0f64..0.4, seed: u64) {
        let g = gen_random_gnp(n, p, seed).unwrap();
        let delta = g.max_degree();

        let c = color_d1(&g, Kernel::VertexBased, true);
        prop_assert!(verify_d1(&g, &c).unwrap().is_empty());
        prop_assert!(c.max_color() as usize <= delta + 1);
        assert_first_fit(&g, &c, false, false);

        let c = color_d2(&g, false, true);
        prop_assert!(verify_d2(&g, &c, false).unwrap().is_empty());
        prop_assert!(c.max_color() as usize <= delta * delta + 1);
        assert_first_fit(&g, &c, true, false);

        let c = color_d2(&g, true, true);
        prop_assert!(verify_d2(&g, &c, true).unwrap().is_empty());
        assert_first_fit(&g, &c, true, true);
    }

    #[test]
    fn parallel_kernels_are_proper(n in 1usize..150, p in 0.0f64..0.3, seed: u64, threads in 1usize..5) {
        let g = gen_random_gnp(n, p, seed).unwrap();
        let delta = g.max_degree();
        let (vb, eb, d2) = in_pool(threads, || {
            (
                color_d1(&g, Kernel::VertexBased, false),
                color_d1(&g, Kernel::EdgeBased, false),
                color_d2(&g, false, false),
            )
        });
        for c in [&vb, &eb] {
            prop_assert!(verify_d1(&g, c).unwrap().is_empty());
            prop_assert!(c.max_color() as usize <= delta + 1);
        }
        prop_assert!(verify_d2(&g, &d2, false).unwrap().is_empty());
        prop_assert!(d2.max_color() as usize <= delta * delta + 1);
    }
}
