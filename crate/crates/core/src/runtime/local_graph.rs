use std::collections::HashMap;

use crate::graph::Graph;
use crate::localcolor::Color;

/// One rank's view `{V_l + V_g, E_l + E_g}`.
///
/// Local indices `0..owned_count` are owned vertices (ascending global id),
/// followed by first-layer ghosts and then second-layer ghosts, each block
/// ascending by global id.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalGraph {
    pub(crate) rank: usize,
    pub(crate) owned_count: usize,
    pub(crate) layer1_count: usize,
    pub(crate) csr: Graph,
    pub(crate) gids: Vec<usize>,
    pub(crate) ghost_owners: Vec<usize>,
    pub(crate) lookup: HashMap<usize, usize>,
    pub(crate) boundary_d1: Vec<usize>,
    pub(crate) boundary_d2: Vec<usize>,
    /// For each owned vertex, the other ranks that hold a ghost copy.
    pub(crate) holders: Vec<Vec<usize>>,
    pub(crate) ghost_layers: u8,
}

impl LocalGraph {
    pub(crate) fn new(
        rank: usize,
        owned_count: usize,
        layer1_count: usize,
        csr: Graph,
        gids: Vec<usize>,
        ghost_owners: Vec<usize>,
        ghost_layers: u8,
    ) -> Self {
        let lookup = gids.iter().enumerate().map(|(l, &g)| (g, l)).collect();
        let boundary_d1: Vec<usize> = (0..owned_count)
            .filter(|&v| csr.neighbors(v).iter().any(|&u| u >= owned_count))
            .collect();
        let mut in_d1 = vec![false; owned_count];
        for &v in &boundary_d1 {
            in_d1[v] = true;
        }
        let boundary_d2 = (0..owned_count)
            .filter(|&v| {
                in_d1[v]
                    || csr
                        .neighbors(v)
                        .iter()
                        .any(|&u| u < owned_count && in_d1[u])
            })
            .collect();
        Self {
            rank,
            owned_count,
            layer1_count,
            csr,
            gids,
            ghost_owners,
            lookup,
            boundary_d1,
            boundary_d2,
            holders: vec![Vec::new(); owned_count],
            ghost_layers,
        }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn owned_count(&self) -> usize {
        self.owned_count
    }

    pub fn ghost_count(&self) -> usize {
        self.gids.len() - self.owned_count
    }

    /// Ghosts adjacent to at least one owned vertex.
    pub fn first_layer_ghosts(&self) -> std::ops::Range<usize> {
        self.owned_count..self.owned_count + self.layer1_count
    }

    pub fn second_layer_ghosts(&self) -> std::ops::Range<usize> {
        self.owned_count + self.layer1_count..self.gids.len()
    }

    pub fn num_local(&self) -> usize {
        self.gids.len()
    }

    pub fn ghost_layers(&self) -> u8 {
        self.ghost_layers
    }

    /// CSR adjacency over local indices.
    pub fn csr(&self) -> &Graph {
        &self.csr
    }

    #[inline]
    pub fn is_owned(&self, local: usize) -> bool {
        local < self.owned_count
    }

    #[inline]
    pub fn gid(&self, local: usize) -> usize {
        self.gids[local]
    }

    pub fn gids(&self) -> &[usize] {
        &self.gids
    }

    pub fn local_index(&self, gid: usize) -> Option<usize> {
        self.lookup.get(&gid).copied()
    }

    /// Owning rank of any local vertex.
    pub fn owner(&self, local: usize) -> usize {
        if local < self.owned_count {
            self.rank
        } else {
            self.ghost_owners[local - self.owned_count]
        }
    }

    /// Owned vertices adjacent to a ghost.
    pub fn boundary_d1(&self) -> &[usize] {
        &self.boundary_d1
    }

    /// Owned vertices within two hops of an off-rank vertex.
    pub fn boundary_d2(&self) -> &[usize] {
        &self.boundary_d2
    }

    /// Ranks holding a ghost copy of owned vertex `local`.
    pub fn holders(&self, local: usize) -> &[usize] {
        &self.holders[local]
    }

    /// `true` for edges in `E_l` (both endpoints owned).
    pub fn is_local_edge(&self, u: usize, v: usize) -> bool {
        self.is_owned(u) && self.is_owned(v)
    }

    /// Edges of `E_g`, each once as `(ghost, other)`.
    pub fn ghost_edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (self.owned_count..self.num_local()).flat_map(move |g| {
            self.csr
                .neighbors(g)
                .iter()
                .copied()
                .filter(move |&u| u < g)
                .map(move |u| (g, u))
        })
    }
}

/// Copies the ghost entries of a local coloring.
pub fn snapshot_ghost_colors(lg: &LocalGraph, colors: &[Color]) -> Vec<Color> {
    colors[lg.owned_count..].to_vec()
}

/// Writes saved ghost colors back; owned entries are untouched.
pub fn restore_ghost_colors(
    lg: &LocalGraph,
    colors: &mut [Color],
    saved: &[Color],
) -> crate::Result<()> {
    if colors.len() != lg.num_local() {
        return Err(crate::Error::SizeMismatch {
            expected: lg.num_local(),
            actual: colors.len(),
        });
    }
    if saved.len() != lg.ghost_count() {
        return Err(crate::Error::SizeMismatch {
            expected: lg.ghost_count(),
            actual: saved.len(),
        });
    }
    colors[lg.owned_count..].copy_from_slice(saved);
    Ok(())
}
