//! Shared fixtures for the criterion benchmarks.

use chroma_core::graph::{gen_hex_mesh, gen_mycielskian, gen_random_gnp};
use chroma_core::partition::partition_block;
use chroma_core::protocol::Mode;
use chroma_core::runtime::{build_local_graphs, RankWorld};
use chroma_core::Graph;

/// Named inputs small enough for a benchmark iteration to stay under a second.
pub fn fixtures() -> Vec<(&'static str, Graph)> {
    vec![
        ("mesh-24", gen_hex_mesh(24, 24, 24).expect("mesh dims fit")),
        ("myciel-8", gen_mycielskian(8).expect("k in range")),
        (
            "gnp-2000",
            gen_random_gnp(2000, 0.005, 11).expect("p in range"),
        ),
    ]
}

/// Block-partitioned world with the ghost layers `mode` needs.
pub fn world(g: &Graph, ranks: usize, mode: Mode) -> RankWorld {
    let pm = partition_block(g, ranks).expect("ranks >= 1");
    build_local_graphs(g, &pm, mode.ghost_layers()).expect("partition matches graph")
}
