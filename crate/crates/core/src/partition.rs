//! Vertex-to-rank assignment.

use std::collections::VecDeque;
use std::io::{BufRead, Write};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartitionMap {
    owner: Vec<usize>,
    num_ranks: usize,
}

impl PartitionMap {
    pub fn new(owner: Vec<usize>, num_ranks: usize) -> Result<Self> {
        check_ranks(num_ranks)?;
        if let Some((v, &r)) = owner.iter().enumerate().find(|(_, &r)| r >= num_ranks) {
            return Err(Error::InvalidArgument(format!(
                "vertex {v} assigned to rank {r}, but only {num_ranks} ranks exist"
            )));
        }
        Ok(Self { owner, num_ranks })
    }

    #[inline]
    pub fn owner(&self, v: usize) -> usize {
        self.owner[v]
    }

    pub fn owners(&self) -> &[usize] {
        &self.owner
    }

    pub fn num_ranks(&self) -> usize {
        self.num_ranks
    }

    pub fn num_vertices(&self) -> usize {
        self.owner.len()
    }

    /// Owned vertices of every rank, ascending.
    pub fn parts(&self) -> Vec<Vec<usize>> {
        let mut parts = vec![Vec::new(); self.num_ranks];
        for (v, &r) in self.owner.iter().enumerate() {
            parts[r].push(v);
        }
        parts
    }

    pub fn part_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.num_ranks];
        for &r in &self.owner {
            sizes[r] += 1;
        }
        sizes
    }

    /// Undirected edges whose endpoints live on different ranks.
    pub fn edge_cut(&self, g: &Graph) -> usize {
        g.edges()
            .filter(|&(u, v)| self.owner[u] != self.owner[v])
            .count()
    }

    /// Largest per-rank edge-endpoint count divided by the mean.
    pub fn endpoint_imbalance(&self, g: &Graph) -> f64 {
        let mut load = vec![0usize; self.num_ranks];
        for v in 0..g.num_vertices() {
            load[self.owner[v]] += g.degree(v);
        }
        let total: usize = load.iter().sum();
        if total == 0 {
            return 1.0;
        }
        let mean = total as f64 / self.num_ranks as f64;
        *load.iter().max().unwrap() as f64 / mean
    }

    /// One rank id per line; line `i` holds the owner of vertex `i`.
    pub fn write<W: Write>(&self, mut w: W) -> Result<()> {
        for r in &self.owner {
            writeln!(w, "{r}")?;
        }
        Ok(())
    }

    pub fn read<R: BufRead>(reader: R, num_ranks: usize) -> Result<Self> {
        let mut owner = Vec::new();
        for (idx, line) in reader.lines().enumerate() {
            let line = line?;
            let text = line.trim();
            if text.is_empty() {
                continue;
            }
            owner.push(text.parse().map_err(|_| Error::Parse {
                line: idx + 1,
                message: format!("invalid rank id {text:?}"),
            })?);
        }
        Self::new(owner, num_ranks)
    }
}

fn check_ranks(num_ranks: usize) -> Result<()> {
    if num_ranks == 0 {
        return Err(Error::InvalidArgument("need at least one rank".into()));
    }
    Ok(())
}

/// Contiguous id ranges whose sizes differ by at most one.
pub fn partition_block(g: &Graph, num_ranks: usize) -> Result<PartitionMap> {
    check_ranks(num_ranks)?;
    let n = g.num_vertices();
    let (base, extra) = (n / num_ranks, n % num_ranks);
    let mut owner = Vec::with_capacity(n);
    for r in 0..num_ranks {
        let size = base + usize::from(r < extra);
        owner.extend(std::iter::repeat_n(r, size));
    }
    PartitionMap::new(owner, num_ranks)
}

/// Uniformly random owner per vertex.
pub fn partition_random(g: &Graph, num_ranks: usize, seed: u64) -> Result<PartitionMap> {
    check_ranks(num_ranks)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let owner = (0..g.num_vertices())
        .map(|_| rng.random_range(0..num_ranks))
        .collect();
    PartitionMap::new(owner, num_ranks)
}

/// Greedy BFS-grown parts balancing `degree + 1` per rank.
///
/// Each rank grows from a seeded random unassigned vertex until it reaches
/// the remaining load divided by the remaining ranks; the last rank takes
/// whatever is left.
pub fn partition_edge_balanced(g: &Graph, num_ranks: usize, seed: u64) -> Result<PartitionMap> {
    check_ranks(num_ranks)?;
    let n = g.num_vertices();
    let weight = |v: usize| g.degree(v) + 1;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);

    const FREE: usize = usize::MAX;
    let mut owner = vec![FREE; n];
    let mut queued = vec![false; n];
    let mut cursor = 0;
    let mut remaining: usize = (0..n).map(weight).sum();

    for r in 0..num_ranks - 1 {
        let target = remaining as f64 / (num_ranks - r) as f64;
        let mut load = 0usize;
        let mut queue = VecDeque::new();
        loop {
            let v = match queue.pop_front() {
                Some(v) => v,
                None => {
                    while cursor < n && owner[order[cursor]] != FREE {
                        cursor += 1;
                    }
                    if cursor == n {
                        break;
                    }
                    order[cursor]
                }
            };
            if owner[v] != FREE {
                continue;
            }
            let w = weight(v) as f64;
            let current = load as f64;
            // Stop when taking v lands farther from the target than leaving it.
            if load > 0 && current + w - target > target - current {
                queued[v] = false;
                break;
            }
            owner[v] = r;
            load += weight(v);
            for &u in g.neighbors(v) {
                if owner[u] == FREE && !queued[u] {
                    queued[u] = true;
                    queue.push_back(u);
                }
            }
            if load as f64 >= target {
                break;
            }
        }
        for v in queue {
            queued[v] = false;
        }
        remaining -= load;
    }
    for o in owner.iter_mut().filter(|o| **o == FREE) {
        *o = num_ranks - 1;
    }
    PartitionMap::new(owner, num_ranks)
}
