//! In-process simulation of the distributed environment.
//!
//! Every rank owns a [`LocalGraph`]; ranks interact only through batched
//! `(gid, value)` messages delivered at a barrier and through collectives.
//! Message volume is accounted as a proxy for communication cost.

mod local_graph;

pub use local_graph::{restore_ghost_colors, snapshot_ghost_colors, LocalGraph};

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::localcolor::{Color, Coloring};
use crate::partition::PartitionMap;

/// Bytes charged per `(gid, color)` pair: `u64` id plus `u32` color.
pub const COLOR_PAIR_BYTES: u64 = 12;
/// Bytes charged per global id in setup messages.
pub const GID_BYTES: u64 = 8;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CommCounters {
    pub bytes: u64,
    pub messages: u64,
}

impl std::ops::AddAssign for CommCounters {
    fn add_assign(&mut self, rhs: Self) {
        self.bytes += rhs.bytes;
        self.messages += rhs.messages;
    }
}

/// Which owned vertices push their value to the ranks holding ghost copies.
#[derive(Clone, Copy, Debug)]
pub enum ExchangeScope<'a> {
    /// Every owned vertex that has a ghost copy somewhere.
    Full,
    /// Per rank, the owned local indices that changed.
    Changed(&'a [Vec<usize>]),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GhostMismatch {
    pub rank: usize,
    pub gid: usize,
    pub ghost_color: Color,
    pub owner_color: Color,
}

#[derive(Clone, Debug)]
pub struct RankWorld {
    ranks: Vec<LocalGraph>,
    num_global: usize,
    ghost_layers: u8,
    setup: CommCounters,
}

/// Distributes `g` according to `pm` with one or two ghost layers.
///
/// Owned rows are copied from the input graph. Ghost registration and the
/// second layer are built through accounted message exchanges, so the
/// returned world's [`setup_traffic`](RankWorld::setup_traffic) reflects them.
pub fn build_local_graphs(g: &Graph, pm: &PartitionMap, ghost_layers: u8) -> Result<RankWorld> {
    if pm.num_vertices() != g.num_vertices() {
        return Err(Error::SizeMismatch {
            expected: g.num_vertices(),
            actual: pm.num_vertices(),
        });
    }
    if !(1..=2).contains(&ghost_layers) {
        return Err(Error::Config(format!(
            "ghost_layers must be 1 or 2, got {ghost_layers}"
        )));
    }
    let ranks = pm
        .parts()
        .iter()
        .enumerate()
        .map(|(r, owned)| first_layer_view(g, pm, r, owned))
        .collect();
    let mut world = RankWorld {
        ranks,
        num_global: g.num_vertices(),
        ghost_layers: 1,
        setup: CommCounters::default(),
    };
    world.register_ghosts();
    if ghost_layers == 2 {
        world.add_second_ghost_layer()?;
    }
    Ok(world)
}

fn first_layer_view(g: &Graph, pm: &PartitionMap, rank: usize, owned: &[usize]) -> LocalGraph {
    let mut ghosts: Vec<usize> = owned
        .iter()
        .flat_map(|&v| g.neighbors(v).iter().copied())
        .filter(|&u| pm.owner(u) != rank)
        .collect();
    ghosts.sort_unstable();
    ghosts.dedup();

    let gids: Vec<usize> = owned.iter().chain(&ghosts).copied().collect();
    let lookup: HashMap<usize, usize> = gids.iter().enumerate().map(|(l, &x)| (x, l)).collect();
    let edges = owned.iter().enumerate().flat_map(|(l, &v)| {
        let lookup = &lookup;
        g.neighbors(v).iter().map(move |u| (l, lookup[u]))
    });
    let csr = Graph::from_edges(gids.len(), edges);
    let ghost_owners = ghosts.iter().map(|&x| pm.owner(x)).collect();
    LocalGraph::new(rank, owned.len(), ghosts.len(), csr, gids, ghost_owners, 1)
}

impl RankWorld {
    pub fn num_ranks(&self) -> usize {
        self.ranks.len()
    }

    pub fn num_global_vertices(&self) -> usize {
        self.num_global
    }

    pub fn ghost_layers(&self) -> u8 {
        self.ghost_layers
    }

    pub fn ranks(&self) -> &[LocalGraph] {
        &self.ranks
    }

    pub fn rank(&self, r: usize) -> &LocalGraph {
        &self.ranks[r]
    }

    /// Traffic spent building the world (ghost registration, adjacency lists).
    pub fn setup_traffic(&self) -> CommCounters {
        self.setup
    }

    /// Each rank announces its ghosts to their owners, which record the
    /// requesting rank as a holder.
    fn register_ghosts(&mut self) {
        let mut requests: Vec<BTreeMap<usize, Vec<usize>>> =
            vec![BTreeMap::new(); self.num_ranks()];
        for lg in &self.ranks {
            for ghost in lg.owned_count..lg.num_local() {
                requests[lg.owner(ghost)]
                    .entry(lg.rank)
                    .or_default()
                    .push(lg.gid(ghost));
            }
        }
        for (owner, inbox) in requests.into_iter().enumerate() {
            let lg = &mut self.ranks[owner];
            lg.holders = vec![Vec::new(); lg.owned_count];
            for (from, gids) in inbox {
                self.setup.messages += 1;
                self.setup.bytes += GID_BYTES * gids.len() as u64;
                for gid in gids {
                    let local = lg.lookup[&gid];
                    lg.holders[local].push(from);
                }
            }
        }
    }

    /// Adds the neighbors of first-layer ghosts as second-layer ghosts.
    ///
    /// Owners ship the adjacency list (neighbor gid and owner) of every
    /// boundary vertex to each rank holding it; this happens once.
    pub fn add_second_ghost_layer(&mut self) -> Result<()> {
        if self.ghost_layers == 2 {
            return Ok(());
        }
        type AdjacencyList = (usize, Vec<(usize, usize)>);
        let mut inboxes: Vec<Vec<AdjacencyList>> = vec![Vec::new(); self.num_ranks()];
        for lg in &self.ranks {
            let mut batches: BTreeMap<usize, u64> = BTreeMap::new();
            for v in 0..lg.owned_count {
                if lg.holders[v].is_empty() {
                    continue;
                }
                let adjacency: Vec<(usize, usize)> = lg
                    .csr
                    .neighbors(v)
                    .iter()
                    .map(|&u| (lg.gid(u), lg.owner(u)))
                    .collect();
                let bytes = GID_BYTES + COLOR_PAIR_BYTES * adjacency.len() as u64;
                for &h in &lg.holders[v] {
                    inboxes[h].push((lg.gid(v), adjacency.clone()));
                    *batches.entry(h).or_default() += bytes;
                }
            }
            for bytes in batches.into_values() {
                self.setup.messages += 1;
                self.setup.bytes += bytes;
            }
        }

        for (lg, inbox) in self.ranks.iter_mut().zip(inboxes) {
            let mut gids = lg.gids.clone();
            let mut owners = lg.ghost_owners.clone();
            let mut fresh: BTreeMap<usize, usize> = BTreeMap::new();
            for (_, adjacency) in &inbox {
                for &(x, owner) in adjacency {
                    if !lg.lookup.contains_key(&x) {
                        fresh.insert(x, owner);
                    }
                }
            }
            let mut lookup = lg.lookup.clone();
            for (x, owner) in fresh {
                lookup.insert(x, gids.len());
                gids.push(x);
                owners.push(owner);
            }
            let mut edges: Vec<(usize, usize)> = lg.csr.edges().collect();
            for (ghost, adjacency) in &inbox {
                let gl = *lookup.get(ghost).ok_or_else(|| Error::Protocol {
                    rank: lg.rank,
                    message: format!("adjacency list for unknown vertex {ghost}"),
                })?;
                edges.extend(adjacency.iter().map(|(x, _)| (gl, lookup[x])));
            }
            let csr = Graph::from_edges(gids.len(), edges);
            *lg = LocalGraph::new(
                lg.rank,
                lg.owned_count,
                lg.layer1_count,
                csr,
                gids,
                owners,
                2,
            );
        }
        self.ghost_layers = 2;
        self.register_ghosts();
        Ok(())
    }

    /// Pushes owned colors to every ghost copy. See [`ExchangeScope`].
    pub fn exchange_boundary_colors(
        &self,
        colors: &mut [Coloring],
        scope: ExchangeScope<'_>,
    ) -> Result<CommCounters> {
        self.exchange(colors, scope, COLOR_PAIR_BYTES)
    }

    /// Generic owner-to-ghost value push used for colors and degrees.
    pub fn exchange<T, S>(
        &self,
        values: &mut [S],
        scope: ExchangeScope<'_>,
        item_bytes: u64,
    ) -> Result<CommCounters>
    where
        T: Copy,
        S: AsRef<[T]> + AsMut<[T]>,
    {
        self.check_sizes(values)?;
        let mut outboxes: Vec<BTreeMap<usize, Vec<(usize, T)>>> =
            vec![BTreeMap::new(); self.num_ranks()];
        for (r, lg) in self.ranks.iter().enumerate() {
            let own = values[r].as_ref();
            let mut send = |v: usize| -> Result<()> {
                if !lg.is_owned(v) {
                    return Err(Error::Protocol {
                        rank: r,
                        message: format!("attempt to send non-owned local vertex {v}"),
                    });
                }
                for &h in &lg.holders[v] {
                    outboxes[r].entry(h).or_default().push((lg.gid(v), own[v]));
                }
                Ok(())
            };
            match scope {
                ExchangeScope::Full => (0..lg.owned_count).try_for_each(&mut send)?,
                ExchangeScope::Changed(changed) => changed
                    .get(r)
                    .map_or(Ok(()), |list| list.iter().try_for_each(|&v| send(v)))?,
            }
        }

        let mut counters = CommCounters::default();
        for outbox in outboxes {
            for (dst, batch) in outbox {
                counters.messages += 1;
                counters.bytes += item_bytes * batch.len() as u64;
                self.deliver(dst, &batch, values[dst].as_mut())?;
            }
        }
        Ok(counters)
    }

    fn deliver<T: Copy>(&self, dst: usize, batch: &[(usize, T)], values: &mut [T]) -> Result<()> {
        let lg = &self.ranks[dst];
        for &(gid, value) in batch {
            match lg.local_index(gid) {
                Some(l) if !lg.is_owned(l) => values[l] = value,
                _ => {
                    return Err(Error::Protocol {
                        rank: dst,
                        message: format!("received value for unknown ghost {gid}"),
                    })
                }
            }
        }
        Ok(())
    }

    fn check_sizes<T, S: AsRef<[T]>>(&self, values: &[S]) -> Result<()> {
        if values.len() != self.num_ranks() {
            return Err(Error::SizeMismatch {
                expected: self.num_ranks(),
                actual: values.len(),
            });
        }
        for (lg, v) in self.ranks.iter().zip(values) {
            if v.as_ref().len() != lg.num_local() {
                return Err(Error::SizeMismatch {
                    expected: lg.num_local(),
                    actual: v.as_ref().len(),
                });
            }
        }
        Ok(())
    }

    pub fn allreduce_sum(&self, per_rank: &[u64]) -> Result<u64> {
        self.check_collective(per_rank)?;
        Ok(per_rank.iter().sum())
    }

    pub fn allreduce_max(&self, per_rank: &[u64]) -> Result<u64> {
        self.check_collective(per_rank)?;
        Ok(per_rank.iter().copied().max().unwrap_or(0))
    }

    fn check_collective(&self, per_rank: &[u64]) -> Result<()> {
        if per_rank.len() != self.num_ranks() {
            return Err(Error::SizeMismatch {
                expected: self.num_ranks(),
                actual: per_rank.len(),
            });
        }
        Ok(())
    }

    /// Global coloring assembled from owned entries, indexed by gid.
    pub fn gather(&self, colors: &[Coloring]) -> Coloring {
        let mut global = Coloring::uncolored(self.num_global);
        for (lg, c) in self.ranks.iter().zip(colors) {
            for v in 0..lg.owned_count {
                global[lg.gid(v)] = c[v];
            }
        }
        global
    }

    /// Every ghost whose color differs from its owner's current color.
    pub fn ghost_inconsistencies(&self, colors: &[Coloring]) -> Vec<GhostMismatch> {
        let global = self.gather(colors);
        let mut out = Vec::new();
        for (lg, c) in self.ranks.iter().zip(colors) {
            for l in lg.owned_count..lg.num_local() {
                let gid = lg.gid(l);
                if c[l] != global[gid] {
                    out.push(GhostMismatch {
                        rank: lg.rank,
                        gid,
                        ghost_color: c[l],
                        owner_color: global[gid],
                    });
                }
            }
        }
        out
    }
}
