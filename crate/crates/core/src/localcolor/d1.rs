use std::sync::atomic::{AtomicBool, AtomicU32, Ordering::Relaxed};

use rayon::prelude::*;

use super::{first_fit, Coloring, UNCOLORED};
use crate::graph::Graph;

/// Distance-1 speculate-and-iterate kernel. See
/// [`speculative_color`](super::speculative_color).
pub fn speculative_color_d1(
    g: &Graph,
    colors: &mut Coloring,
    worklist: &[usize],
    edge_based: bool,
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
            colors[v] = first_fit(|mask| {
                for &u in g.neighbors(v) {
                    mask.forbid(colors[u]);
                }
            });
        }
        return 1;
    }

    let cells: Vec<AtomicU32> = colors.iter().map(|&c| AtomicU32::new(c)).collect();
    let mut in_work = vec![false; g.num_vertices()];
    let mut pending = worklist.to_vec();
    let mut passes = 0;
    while !pending.is_empty() {
        passes += 1;
        pending.sort_unstable();
        for &v in &pending {
            in_work[v] = true;
        }
        pending.par_iter().for_each(|&v| {
            let c = first_fit(|mask| {
                for &u in g.neighbors(v) {
                    mask.forbid(cells[u].load(Relaxed));
                }
            });
            cells[v].store(c, Relaxed);
        });

        // Colors are frozen from here on; the smaller index of a clash loses.
        let losers: Vec<usize> = if edge_based {
            let lost: Vec<AtomicBool> =
                (0..pending.len()).map(|_| AtomicBool::new(false)).collect();
            let slot = |v: usize| pending.binary_search(&v).ok();
            let in_work = &in_work;
            let edges: Vec<(usize, usize)> = pending
                .par_iter()
                .flat_map_iter(|&v| {
                    g.neighbors(v)
                        .iter()
                        .filter(move |&&u| u > v && in_work[u])
                        .map(move |&u| (v, u))
                })
                .collect();
            edges.par_iter().for_each(|&(v, u)| {
                if cells[v].load(Relaxed) == cells[u].load(Relaxed) {
                    lost[slot(v).unwrap()].store(true, Relaxed);
                }
            });
            pending
                .iter()
                .zip(&lost)
                .filter(|(_, l)| l.load(Relaxed))
                .map(|(&v, _)| v)
                .collect()
        } else {
            pending
                .par_iter()
                .copied()
                .filter(|&v| {
                    let cv = cells[v].load(Relaxed);
                    g.neighbors(v)
                        .iter()
                        .any(|&u| u > v && in_work[u] && cells[u].load(Relaxed) == cv)
                })
                .collect()
        };

        for &v in &pending {
            in_work[v] = false;
        }
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
