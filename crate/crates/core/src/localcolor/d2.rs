use std::sync::atomic::{AtomicBool, AtomicU32, Ordering::Relaxed};

use rayon::prelude::*;

use super::{first_fit, Coloring, ForbiddenMask, UNCOLORED};
use crate::graph::Graph;

/// Forbids the colors of every vertex reachable from `v` by a 2-path
/// `v - u - x` (`x != v`), and of the direct neighbors unless `partial`.
#[inline]
fn forbid_two_hop<F>(g: &Graph, v: usize, partial: bool, color: F, mask: &mut ForbiddenMask)
where
    F: Fn(usize) -> u32,
{
    for &u in g.neighbors(v) {
        if !partial {
            mask.forbid(color(u));
        }
        for &x in g.neighbors(u) {
            if x != v {
                mask.forbid(color(x));
            }
        }
    }
}

/// Net-based distance-2 speculate-and-iterate kernel.
///
/// With `partial` only vertices joined by a 2-path must differ; otherwise
/// every pair within distance two must differ. Parallel conflict detection
/// walks each net (a vertex and its adjacency row) and compares the worklist
/// members inside it pairwise. Returns the number of speculate/fix passes.
pub fn speculative_color_d2(
    g: &Graph,
    colors: &mut Coloring,
    worklist: &[usize],
    partial: bool,
    deterministic: bool,
) -> usize {
    for &v in worklist {
        colors[v] = UNCOLORED;
    }
    if worklist.is_empty() {
        return 0;
    }
    if deterministic {
        for &v in worklist {
            let c = first_fit(|mask| forbid_two_hop(g, v, partial, |x| colors[x], mask));
            colors[v] = c;
        }
        return 1;
    }

    let n = g.num_vertices();
    let cells: Vec<AtomicU32> = colors.iter().map(|&c| AtomicU32::new(c)).collect();
    let mut in_work = vec![false; n];
    let mut is_net = vec![false; n];
    let mut pending = worklist.to_vec();
    let mut passes = 0;
    while !pending.is_empty() {
        passes += 1;
        pending.sort_unstable();
        let mut nets = Vec::new();
        for &v in &pending {
            in_work[v] = true;
            for &w in g.neighbors(v).iter().chain(std::iter::once(&v)) {
                if !std::mem::replace(&mut is_net[w], true) {
                    nets.push(w);
                }
            }
        }

        pending.par_iter().for_each(|&v| {
            let c =
                first_fit(|mask| forbid_two_hop(g, v, partial, |x| cells[x].load(Relaxed), mask));
            cells[v].store(c, Relaxed);
        });

        let lost: Vec<AtomicBool> = (0..n).map(|_| AtomicBool::new(false)).collect();
        nets.par_iter().for_each(|&w| {
            let members: Vec<(usize, u32)> = g
                .neighbors(w)
                .iter()
                .filter(|&&a| in_work[a])
                .map(|&a| (a, cells[a].load(Relaxed)))
                .collect();
            for (i, &(a, ca)) in members.iter().enumerate() {
                for &(_, cb) in &members[i + 1..] {
                    // Rows are sorted, so `a` is the smaller index.
                    if ca == cb {
                        lost[a].store(true, Relaxed);
                    }
                }
            }
            if !partial && in_work[w] {
                let cw = cells[w].load(Relaxed);
                for &(a, ca) in &members {
                    if ca == cw {
                        lost[a.min(w)].store(true, Relaxed);
                    }
                }
            }
        });

        for &w in &nets {
            is_net[w] = false;
        }
        for &v in &pending {
            in_work[v] = false;
        }
        let losers: Vec<usize> = pending
            .iter()
            .copied()
            .filter(|&v| lost[v].load(Relaxed))
            .collect();
        for &v in &losers {
            cells[v].store(UNCOLORED, Relaxed);
        }
        pending = losers;
    }
    for (c, cell) in colors.iter_mut().zip(cells) {
        *c = cell.into_inner();
    }
    passes
}
