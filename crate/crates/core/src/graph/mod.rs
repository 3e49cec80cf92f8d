//! Immutable CSR graphs and the preprocessing that produces them.

mod generate;
mod io;

pub use generate::{
    gen_complete, gen_cycle, gen_hex_mesh, gen_mycielskian, gen_path, gen_petersen, gen_random_dag,
    gen_random_gnp, gen_star,
};
pub use io::{
    load_directed_edge_list, load_edge_list, parse_edge_list, read_csr_cache, read_graph,
    write_csr_cache, write_edge_list, EdgeList, CACHE_MAGIC, CACHE_VERSION,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Simple undirected graph in compressed sparse row form.
///
/// Every undirected edge is stored twice (once per endpoint), rows are sorted
/// ascending, and there are no self-loops or duplicate entries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    row_offsets: Vec<usize>,
    col_indices: Vec<usize>,
}

impl Graph {
    /// Builds a graph from an arbitrary edge multiset. See [`preprocess`].
    pub fn from_edges<I>(num_vertices: usize, edges: I) -> Self
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        preprocess(num_vertices, edges)
    }

    /// Wraps existing CSR arrays after checking every structural invariant.
    pub fn from_csr(row_offsets: Vec<usize>, col_indices: Vec<usize>) -> Result<Self> {
        let g = Self {
            row_offsets,
            col_indices,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn empty(num_vertices: usize) -> Self {
        Self {
            row_offsets: vec![0; num_vertices + 1],
            col_indices: Vec::new(),
        }
    }

    #[inline]
    pub fn num_vertices(&self) -> usize {
        self.row_offsets.len() - 1
    }

    /// Number of undirected edges.
    #[inline]
    pub fn num_edges(&self) -> usize {
        self.col_indices.len() / 2
    }

    #[inline]
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.col_indices[self.row_offsets[v]..self.row_offsets[v + 1]]
    }

    #[inline]
    pub fn degree(&self, v: usize) -> usize {
        self.row_offsets[v + 1] - self.row_offsets[v]
    }

    pub fn max_degree(&self) -> usize {
        (0..self.num_vertices())
            .map(|v| self.degree(v))
            .max()
            .unwrap_or(0)
    }

    pub fn row_offsets(&self) -> &[usize] {
        &self.row_offsets
    }

    pub fn col_indices(&self) -> &[usize] {
        &self.col_indices
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.neighbors(u).binary_search(&v).is_ok()
    }

    /// Each undirected edge once, as `(u, v)` with `u < v`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.num_vertices()).flat_map(move |u| {
            self.neighbors(u)
                .iter()
                .copied()
                .filter(move |&v| v > u)
                .map(move |v| (u, v))
        })
    }

    pub fn stats(&self) -> GraphStats {
        stats(self)
    }

    /// Checks offsets, bounds, sortedness, loops, duplicates and symmetry.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidGraph(msg));
        if self.row_offsets.is_empty() {
            return bad("row_offsets must hold at least one entry".into());
        }
        if self.row_offsets[0] != 0 {
            return bad("row_offsets[0] must be 0".into());
        }
        if *self.row_offsets.last().unwrap() != self.col_indices.len() {
            return bad("last row offset must equal the number of column entries".into());
        }
        if self.row_offsets.windows(2).any(|w| w[0] > w[1]) {
            return bad("row_offsets must be non-decreasing".into());
        }
        let n = self.num_vertices();
        for v in 0..n {
            let row = self.neighbors(v);
            if let Some(&u) = row.iter().find(|&&u| u >= n) {
                return bad(format!("vertex {v} has out-of-range neighbor {u}"));
            }
            if row.contains(&v) {
                return bad(format!("self-loop on vertex {v}"));
            }
            if row.windows(2).any(|w| w[0] >= w[1]) {
                return bad(format!("row {v} is unsorted or holds duplicates"));
            }
            for &u in row {
                if !self.has_edge(u, v) {
                    return bad(format!("edge ({v},{u}) has no reverse entry"));
                }
            }
        }
        Ok(())
    }
}

/// Turns an arbitrary edge multiset into a simple, symmetric, sorted CSR graph.
///
/// Self-loops and repeated edges are dropped and every edge is stored in both
/// directions. The vertex count grows if an endpoint lies beyond
/// `num_vertices`.
pub fn preprocess<I>(num_vertices: usize, edges: I) -> Graph
where
    I: IntoIterator<Item = (usize, usize)>,
{
    let mut n = num_vertices;
    let mut pairs = Vec::new();
    for (u, v) in edges {
        n = n.max(u + 1).max(v + 1);
        if u != v {
            pairs.push((u, v));
            pairs.push((v, u));
        }
    }
    csr_from_sorted_pairs(n, pairs)
}

fn csr_from_sorted_pairs(n: usize, mut pairs: Vec<(usize, usize)>) -> Graph {
    pairs.sort_unstable();
    pairs.dedup();
    let mut row_offsets = vec![0usize; n + 1];
    for &(u, _) in &pairs {
        row_offsets[u + 1] += 1;
    }
    for i in 0..n {
        row_offsets[i + 1] += row_offsets[i];
    }
    let col_indices = pairs.into_iter().map(|(_, v)| v).collect();
    Graph {
        row_offsets,
        col_indices,
    }
}

/// Directed graph (out-adjacency CSR) used as input to partial distance-2
/// coloring. Duplicate arcs are removed; self-loops are kept because a
/// diagonal entry is a real nonzero of the matrix it describes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DirectedGraph {
    row_offsets: Vec<usize>,
    col_indices: Vec<usize>,
}

impl DirectedGraph {
    pub fn from_arcs<I>(num_vertices: usize, arcs: I) -> Self
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut n = num_vertices;
        let mut pairs: Vec<(usize, usize)> = arcs
            .into_iter()
            .inspect(|&(u, v)| n = n.max(u + 1).max(v + 1))
            .collect();
        pairs.sort_unstable();
        pairs.dedup();
        let mut row_offsets = vec![0usize; n + 1];
        for &(u, _) in &pairs {
            row_offsets[u + 1] += 1;
        }
        for i in 0..n {
            row_offsets[i + 1] += row_offsets[i];
        }
        Self {
            row_offsets,
            col_indices: pairs.into_iter().map(|(_, v)| v).collect(),
        }
    }

    pub fn num_vertices(&self) -> usize {
        self.row_offsets.len() - 1
    }

    pub fn num_arcs(&self) -> usize {
        self.col_indices.len()
    }

    pub fn successors(&self, v: usize) -> &[usize] {
        &self.col_indices[self.row_offsets[v]..self.row_offsets[v + 1]]
    }

    pub fn arcs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.num_vertices()).flat_map(move |u| self.successors(u).iter().map(move |&v| (u, v)))
    }
}

impl From<&Graph> for DirectedGraph {
    /// Both orientations of every undirected edge.
    fn from(g: &Graph) -> Self {
        Self {
            row_offsets: g.row_offsets.clone(),
            col_indices: g.col_indices.clone(),
        }
    }
}

/// Bipartite representation `B(V_s, V_t, E)` of a directed graph.
///
/// Vertices `0..num_s` form `V_s`; `num_s..num_s + num_t` form `V_t`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BipartiteGraph {
    pub num_s: usize,
    pub num_t: usize,
    pub graph: Graph,
}

impl BipartiteGraph {
    pub fn source_vertex(&self, v: usize) -> usize {
        v
    }

    pub fn target_vertex(&self, u: usize) -> usize {
        self.num_s + u
    }

    pub fn is_source(&self, v: usize) -> bool {
        v < self.num_s
    }
}

/// One undirected edge `(s_v, t_u)` per arc `v -> u`.
pub fn to_bipartite(d: &DirectedGraph) -> BipartiteGraph {
    let n = d.num_vertices();
    let graph = Graph::from_edges(2 * n, d.arcs().map(|(v, u)| (v, n + u)));
    BipartiteGraph {
        num_s: n,
        num_t: n,
        graph,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraphStats {
    pub num_vertices: usize,
    /// Undirected edges, each counted once.
    pub num_edges: usize,
    pub delta_avg: f64,
    pub delta_max: usize,
}

pub fn stats(g: &Graph) -> GraphStats {
    let n = g.num_vertices();
    let delta_avg = if n == 0 {
        0.0
    } else {
        g.col_indices.len() as f64 / n as f64
    };
    GraphStats {
        num_vertices: n,
        num_edges: g.num_edges(),
        delta_avg,
        delta_max: g.max_degree(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn preprocess_drops_duplicates_and_loops() {
        let g = preprocess(0, [(0, 1), (0, 1), (1, 1)]);
        assert_eq!(g.num_vertices(), 2);
        assert_eq!(g.edges().collect::<Vec<_>>(), vec![(0, 1)]);
        g.validate().unwrap();
    }

    #[test]
    fn preprocess_symmetrizes() {
        let g = preprocess(2, [(0, 1)]);
        assert_eq!(g.neighbors(1), &[0]);
    }

    #[test]
    fn preprocess_is_idempotent() {
        let g = preprocess(6, [(5, 0), (2, 3), (3, 2), (1, 4), (4, 4), (0, 5)]);
        let again = preprocess(g.num_vertices(), g.edges());
        assert_eq!(g, again);
    }

    #[test]
    fn stats_of_k4_and_star() {
        let k4 = gen_complete(4);
        let s = stats(&k4);
        assert_eq!((s.num_vertices, s.num_edges, s.delta_max), (4, 6, 3));
        assert_eq!(s.delta_avg, 3.0);

        let star = gen_star(9);
        let s = stats(&star);
        assert_eq!(s.delta_max, 9);
        assert!((s.delta_avg - 1.8).abs() < 1e-12);
    }

    #[test]
    fn from_csr_rejects_asymmetric_rows() {
        let err = Graph::from_csr(vec![0, 1, 1], vec![1]).unwrap_err();
        assert!(matches!(err, Error::InvalidGraph(_)));
        assert!(Graph::from_csr(vec![1, 1], vec![]).is_err());
        assert!(Graph::from_csr(vec![0, 1], vec![0]).is_err());
    }

    #[test]
    fn bipartite_single_arc_and_two_cycle() {
        let b = to_bipartite(&DirectedGraph::from_arcs(2, [(0, 1)]));
        assert_eq!(b.graph.edges().collect::<Vec<_>>(), vec![(0, 3)]);

        let b = to_bipartite(&DirectedGraph::from_arcs(2, [(0, 1), (1, 0)]));
        assert_eq!(b.graph.edges().collect::<Vec<_>>(), vec![(0, 3), (1, 2)]);
    }

    #[test]
    fn bipartite_of_directed_triangle() {
        // Without a diagonal the three arcs map to a perfect matching.
        let c3 = DirectedGraph::from_arcs(3, [(0, 1), (1, 2), (2, 0)]);
        let b = to_bipartite(&c3);
        assert_eq!(b.graph.num_edges(), 3);
        assert!((0..6).all(|v| b.graph.degree(v) == 1));

        // With the diagonal the pattern closes into s0-t1-s1-t2-s2-t0-s0.
        let with_diag =
            DirectedGraph::from_arcs(3, [(0, 1), (1, 2), (2, 0), (0, 0), (1, 1), (2, 2)]);
        let b = to_bipartite(&with_diag);
        assert_eq!(b.graph.num_edges(), 6);
        assert!((0..6).all(|v| b.graph.degree(v) == 2));
        let mut seen = [false; 6];
        let (mut prev, mut cur) = (usize::MAX, 0);
        for _ in 0..6 {
            seen[cur] = true;
            let next = *b.graph.neighbors(cur).iter().find(|&&x| x != prev).unwrap();
            prev = cur;
            cur = next;
        }
        assert_eq!(cur, 0);
        assert!(seen.iter().all(|&s| s));
        for (u, v) in b.graph.edges() {
            assert!(b.is_source(u) != b.is_source(v));
        }
    }
}
