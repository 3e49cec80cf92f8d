use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{DirectedGraph, Graph};
use crate::error::{Error, Result};

/// Face-adjacency graph of an `nx * ny * nz` hexahedral cell grid.
///
/// Cell `(x, y, z)` has id `x + nx * (y + ny * z)`, so contiguous id ranges
/// are slabs along `z`.
pub fn gen_hex_mesh(nx: usize, ny: usize, nz: usize) -> Result<Graph> {
    if nx == 0 || ny == 0 || nz == 0 {
        return Err(Error::InvalidArgument(format!(
            "mesh dimensions must be positive, got {nx}x{ny}x{nz}"
        )));
    }
    let overflow = || Error::InvalidArgument(format!("mesh {nx}x{ny}x{nz} overflows"));
    let n = nx
        .checked_mul(ny)
        .and_then(|p| p.checked_mul(nz))
        .ok_or_else(overflow)?;
    // Each cell stores at most six adjacency entries.
    n.checked_mul(6).ok_or_else(overflow)?;

    let id = |x: usize, y: usize, z: usize| x + nx * (y + ny * z);
    let mut edges = Vec::with_capacity(3 * n);
    for z in 0..nz {
        for y in 0..ny {
            for x in 0..nx {
                let v = id(x, y, z);
                if x + 1 < nx {
                    edges.push((v, id(x + 1, y, z)));
                }
                if y + 1 < ny {
                    edges.push((v, id(x, y + 1, z)));
                }
                if z + 1 < nz {
                    edges.push((v, id(x, y, z + 1)));
                }
            }
        }
    }
    Ok(Graph::from_edges(n, edges))
}

/// Mycielskian iterate of `K2` with chromatic number `k` (`2 <= k <= 12`).
pub fn gen_mycielskian(k: usize) -> Result<Graph> {
    if !(2..=12).contains(&k) {
        return Err(Error::InvalidArgument(format!(
            "mycielskian order must be in 2..=12, got {k}"
        )));
    }
    let mut g = gen_complete(2);
    for _ in 2..k {
        g = mycielski_step(&g);
    }
    Ok(g)
}

/// Vertices `v_i`, shadows `u_i = n + i` adjacent to `N(v_i)`, and a hub `2n`
/// adjacent to every shadow.
fn mycielski_step(g: &Graph) -> Graph {
    let n = g.num_vertices();
    let hub = 2 * n;
    let mut edges = Vec::with_capacity(3 * g.num_edges() + n);
    for (i, j) in g.edges() {
        edges.push((i, j));
        edges.push((i, n + j));
        edges.push((j, n + i));
    }
    edges.extend((0..n).map(|i| (n + i, hub)));
    Graph::from_edges(2 * n + 1, edges)
}

/// Erdős–Rényi `G(n, p)`, reproducible for a given seed.
pub fn gen_random_gnp(n: usize, p: f64, seed: u64) -> Result<Graph> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidArgument(format!(
            "edge probability must lie in [0, 1], got {p}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.random_bool(p) {
                edges.push((u, v));
            }
        }
    }
    Ok(Graph::from_edges(n, edges))
}

/// Random DAG: each arc `u -> v` with `u < v` present with probability `p`.
pub fn gen_random_dag(n: usize, p: f64, seed: u64) -> Result<DirectedGraph> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidArgument(format!(
            "arc probability must lie in [0, 1], got {p}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut arcs = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.random_bool(p) {
                arcs.push((u, v));
            }
        }
    }
    Ok(DirectedGraph::from_arcs(n, arcs))
}

pub fn gen_path(n: usize) -> Graph {
    Graph::from_edges(n, (1..n).map(|v| (v - 1, v)))
}

pub fn gen_cycle(n: usize) -> Graph {
    if n < 3 {
        return gen_path(n);
    }
    Graph::from_edges(n, (0..n).map(|v| (v, (v + 1) % n)))
}

pub fn gen_complete(n: usize) -> Graph {
    Graph::from_edges(n, (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))))
}

/// `K_{1,leaves}` with the center at vertex 0.
pub fn gen_star(leaves: usize) -> Graph {
    Graph::from_edges(leaves + 1, (1..=leaves).map(|v| (0, v)))
}

pub fn gen_petersen() -> Graph {
    let outer = (0..5).map(|i| (i, (i + 1) % 5));
    let inner = (0..5).map(|i| (5 + i, 5 + (i + 2) % 5));
    let spokes = (0..5).map(|i| (i, 5 + i));
    Graph::from_edges(10, outer.chain(inner).chain(spokes))
}
