use proptest::prelude::*;

use chroma_core::graph::{
    gen_hex_mesh, gen_mycielskian, gen_random_dag, gen_random_gnp, gen_star, to_bipartite,
};
use chroma_core::localcolor::{serial_greedy, speculative_color_d2};
use chroma_core::partition::{partition_block, partition_edge_balanced, partition_random};
use chroma_core::protocol::{
    check_conflicts, compute_global_degrees, detect_conflicts_d1, detect_conflicts_d2, gid_rand,
    run_distributed,
};
use chroma_core::runtime::{build_local_graphs, ExchangeScope};
use chroma_core::verify::{chromatic_number, verify_d1, verify_d2};
use chroma_core::{AlgorithmConfig, Coloring, Graph, Mode, PartitionMap, RankWorld, UNCOLORED};

fn config(mode: Mode, deterministic: bool) -> AlgorithmConfig {
    let mut cfg = AlgorithmConfig::new(mode);
    cfg.deterministic = deterministic;
    cfg
}

fn verify_mode(g: &Graph, mode: Mode, colors: &[u32]) -> usize {
    match mode {
        Mode::D1 | Mode::D1TwoGhostLayers => verify_d1(g, colors),
        Mode::D2 => verify_d2(g, colors, false),
        Mode::PD2 => verify_d2(g, colors, true),
    }
    .unwrap()
    .len()
}

/// Per-rank colorings filled from a global assignment, ghosts included.
fn distribute(world: &RankWorld, global: &[u32]) -> Vec<Coloring> {
    let mut colors: Vec<Coloring> = world
        .ranks()
        .iter()
        .map(|lg| {
            let mut c = Coloring::uncolored(lg.num_local());
            for l in 0..lg.owned_count() {
                c[l] = global[lg.gid(l)];
            }
            c
        })
        .collect();
    world
        .exchange_boundary_colors(&mut colors, ExchangeScope::Full)
        .unwrap();
    colors
}

#[test]
fn single_rank_matches_the_serial_path() {
    let g = gen_random_gnp(250, 0.04, 17).unwrap();
    let order: Vec<usize> = (0..g.num_vertices()).collect();
    let pm = partition_block(&g, 1).unwrap();
    for mode in [Mode::D1, Mode::D1TwoGhostLayers, Mode::D2] {
        let w = build_local_graphs(&g, &pm, mode.ghost_layers()).unwrap();
        let out = run_distributed(&w, &config(mode, true)).unwrap();
        let expected = if mode.is_distance2() {
            let mut c = Coloring::uncolored(g.num_vertices());
            speculative_color_d2(&g, &mut c, &order, false, true);
            c
        } else {
            serial_greedy(&g, &order).unwrap()
        };
        assert_eq!(out.coloring, expected, "{mode}");
        assert_eq!(out.rounds.len(), 1);
        assert_eq!(out.rounds[0].bytes_sent, 0);
    }
}

#[test]
fn mycielski_five_across_partitions() {
    let g = gen_mycielskian(5).unwrap();
    let chi = chromatic_number(&g, 64).unwrap();
    assert_eq!(chi, 5);
    let delta = g.max_degree();
    for seed in 0..20 {
        let pm = partition_random(&g, 4, seed).unwrap();
        let w = build_local_graphs(&g, &pm, 1).unwrap();
        let out = run_distributed(&w, &config(Mode::D1, seed % 2 == 0)).unwrap();
        assert_eq!(verify_mode(&g, Mode::D1, &out.coloring), 0);
        let used = out.coloring.num_colors();
        assert!(
            used >= chi && used <= delta + 1,
            "seed {seed}: {used} colors"
        );
    }
}

#[test]
fn d1_detection_on_a_split_edge() {
    let g = Graph::from_edges(2, [(0, 1)]);
    let pm = PartitionMap::new(vec![0, 1], 2).unwrap();
    let w = build_local_graphs(&g, &pm, 1).unwrap();
    let mut colors = distribute(&w, &[1, 1]);
    let counts: Vec<u64> = w
        .ranks()
        .iter()
        .zip(colors.iter_mut())
        .map(|(lg, c)| detect_conflicts_d1(lg, c, &[], false).unwrap())
        .collect();
    assert_eq!(counts, vec![1, 1]);
    // Both ranks uncolor the same global vertex.
    let loser = if gid_rand(0) > gid_rand(1) { 0 } else { 1 };
    let global = w.gather(&colors);
    assert_eq!(global[loser], UNCOLORED);
    assert_eq!(global[1 - loser], 1);
}

fn mono_cut_edges(g: &Graph, pm: &PartitionMap, colors: &[u32]) -> Vec<(usize, usize)> {
    g.edges()
        .filter(|&(u, v)| pm.owner(u) != pm.owner(v) && colors[u] == colors[v])
        .collect()
}

/// Runs one D1 detection on every rank and returns the total count and the
/// gathered owner colors.
fn detect_all_d1(w: &RankWorld, global: &[u32], recolor_degrees: bool) -> (u64, Coloring) {
    let (degrees, _) = compute_global_degrees(w).unwrap();
    let mut colors = distribute(w, global);
    let mut total = 0;
    for ((lg, c), d) in w.ranks().iter().zip(colors.iter_mut()).zip(&degrees) {
        total += detect_conflicts_d1(lg, c, d, recolor_degrees).unwrap();
    }
    (total, w.gather(&colors))
}

#[test]
fn d1_detection_count_bounds() {
    let g = gen_random_gnp(80, 0.15, 5).unwrap();
    let pm = partition_random(&g, 4, 1).unwrap();
    let w = build_local_graphs(&g, &pm, 1).unwrap();
    let global: Vec<u32> = (0..80u64).map(|v| (gid_rand(v) % 3) as u32 + 1).collect();
    let mono = mono_cut_edges(&g, &pm, &global).len() as u64;
    assert!(mono > 0);
    for rd in [false, true] {
        let (count, after) = detect_all_d1(&w, &global, rd);
        assert!(count > 0 && count <= 2 * mono, "count {count} mono {mono}");
        for (u, v) in mono_cut_edges(&g, &pm, &global) {
            assert!(after[u] == UNCOLORED || after[v] == UNCOLORED);
        }
    }
}

#[test]
fn d2_detection_on_a_split_star() {
    let g = gen_star(4);
    let pm = PartitionMap::new(vec![0, 1, 1, 1, 1], 2).unwrap();
    let w = build_local_graphs(&g, &pm, 2).unwrap();
    let run = |global: &[u32], partial: bool| -> u64 {
        let mut colors = distribute(&w, global);
        w.ranks()
            .iter()
            .zip(colors.iter_mut())
            .map(|(lg, c)| detect_conflicts_d2(lg, c, &[], false, partial).unwrap())
            .sum()
    };
    assert_eq!(run(&[1, 2, 3, 4, 5], false), 0);
    assert_eq!(run(&[1, 2, 2, 3, 4], false), 1);
    // Center shares leaf 3's color: a distance-1 clash seen by both ranks.
    assert_eq!(run(&[3, 2, 2, 3, 4], false), 3);
    assert_eq!(run(&[3, 2, 2, 3, 4], true), 1);

    let one_layer = build_local_graphs(&g, &pm, 1).unwrap();
    let mut c = Coloring::uncolored(one_layer.rank(0).num_local());
    assert!(detect_conflicts_d2(one_layer.rank(0), &mut c, &[], false, false).is_err());
}

#[test]
fn global_degrees_match_the_whole_graph() {
    let mesh = gen_hex_mesh(5, 5, 5).unwrap();
    let lonely = Graph::from_edges(4, [(0, 1), (1, 2)]);
    for g in [&mesh, &lonely] {
        for ranks in [1, 3, 4] {
            let pm = partition_random(g, ranks, 2).unwrap();
            let w = build_local_graphs(g, &pm, 2).unwrap();
            let (degrees, traffic) = compute_global_degrees(&w).unwrap();
            for (lg, d) in w.ranks().iter().zip(&degrees) {
                let expected: Vec<u64> = lg.gids().iter().map(|&v| g.degree(v) as u64).collect();
                assert_eq!(d, &expected);
            }
            assert_eq!(traffic.bytes == 0, ranks == 1);
        }
    }
    // Center of the 5x5x5 mesh and the isolated vertex.
    assert_eq!(mesh.degree(62), 6);
    assert_eq!(lonely.degree(3), 0);
}

#[test]
fn pd2_runs_on_bipartite_dags() {
    let b = to_bipartite(&gen_random_dag(120, 0.05, 3).unwrap());
    for ranks in [1, 3, 6] {
        let pm = partition_edge_balanced(&b.graph, ranks, 4).unwrap();
        let w = build_local_graphs(&b.graph, &pm, 2).unwrap();
        let out = run_distributed(&w, &config(Mode::PD2, false)).unwrap();
        assert_eq!(verify_mode(&b.graph, Mode::PD2, &out.coloring), 0);
    }
}

fn arb_mode() -> impl Strategy<Value = Mode> {
    prop::sample::select(vec![Mode::D1, Mode::D1TwoGhostLayers, Mode::D2, Mode::PD2])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn converges_to_a_proper_coloring(
        n in 1usize..90,
        p in 0.0f64..0.3,
        seed: u64,
        ranks in 1usize..9,
        mode in arb_mode(),
        deterministic: bool,
        recolor_degrees: bool,
    ) {
        let g = gen_random_gnp(n, p, seed).unwrap();
        let pm = partition_random(&g, ranks, seed ^ 0x55).unwrap();
        let w = build_local_graphs(&g, &pm, mode.ghost_layers()).unwrap();
        let mut cfg = config(mode, deterministic);
        cfg.recolor_degrees = recolor_degrees;
        let out = run_distributed(&w, &cfg).unwrap();
        prop_assert!(out.coloring.is_complete());
        prop_assert_eq!(verify_mode(&g, mode, &out.coloring), 0);
        prop_assert_eq!(out.rounds.last().unwrap().conflicts, 0);
        let delta = g.max_degree();
        let bound = if mode.is_distance2() { delta * delta + 1 } else { delta + 1 };
        prop_assert!(out.coloring.max_color() as usize <= bound);
    }

    #[test]
    fn loser_is_independent_of_argument_order(
        gids in (0u64..1_000_000, 0u64..1_000_000).prop_filter("distinct", |(a, b)| a != b),
        degrees in (0u64..4, 0u64..4),
        recolor_degrees: bool,
    ) {
        let ids = [gids.0 as usize, gids.1 as usize];
        let deg = [degrees.0, degrees.1];
        let mut forward = vec![7, 7];
        let mut backward = vec![7, 7];
        prop_assert_eq!(check_conflicts(0, 1, &mut forward, &ids, &deg, recolor_degrees).unwrap(), 1);
        prop_assert_eq!(check_conflicts(1, 0, &mut backward, &ids, &deg, recolor_degrees).unwrap(), 1);
        prop_assert_eq!(&forward, &backward);
        if recolor_degrees && deg[0] != deg[1] {
            let lower = if deg[0] < deg[1] { 0 } else { 1 };
            prop_assert_eq!(forward[lower], UNCOLORED);
        }
    }
}
