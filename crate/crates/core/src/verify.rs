//! Checkers that run on the undistributed graph, plus small exact oracles.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::localcolor::{Color, UNCOLORED};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ViolationKind {
    Uncolored,
    D1Edge,
    D2Path,
    Pd2Path,
}

/// A constraint broken by a coloring. Vertex ids are global.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Violation {
    Uncolored { vertex: usize },
    D1Edge { u: usize, v: usize },
    D2Path { u: usize, middle: usize, w: usize },
    Pd2Path { u: usize, middle: usize, w: usize },
}

impl Violation {
    pub fn kind(&self) -> ViolationKind {
        match self {
            Violation::Uncolored { .. } => ViolationKind::Uncolored,
            Violation::D1Edge { .. } => ViolationKind::D1Edge,
            Violation::D2Path { .. } => ViolationKind::D2Path,
            Violation::Pd2Path { .. } => ViolationKind::Pd2Path,
        }
    }

    /// The two vertices that must differ (the same vertex twice for `Uncolored`).
    pub fn endpoints(&self) -> (usize, usize) {
        match *self {
            Violation::Uncolored { vertex } => (vertex, vertex),
            Violation::D1Edge { u, v } => (u, v),
            Violation::D2Path { u, w, .. } | Violation::Pd2Path { u, w, .. } => (u, w),
        }
    }
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Violation::Uncolored { vertex } => write!(f, "uncolored vertex {vertex}"),
            Violation::D1Edge { u, v } => write!(f, "edge {u}-{v} shares a color"),
            Violation::D2Path { u, middle, w } => {
                write!(f, "2-path {u}-{middle}-{w} endpoints share a color")
            }
            Violation::Pd2Path { u, middle, w } => {
                write!(
                    f,
                    "2-path {u}-{middle}-{w} endpoints share a color (partial)"
                )
            }
        }
    }
}

fn check_size(g: &Graph, colors: &[Color]) -> Result<()> {
    if colors.len() != g.num_vertices() {
        return Err(Error::SizeMismatch {
            expected: g.num_vertices(),
            actual: colors.len(),
        });
    }
    Ok(())
}

fn uncolored(colors: &[Color]) -> Vec<Violation> {
    colors
        .iter()
        .enumerate()
        .filter(|&(_, &c)| c == UNCOLORED)
        .map(|(vertex, _)| Violation::Uncolored { vertex })
        .collect()
}

fn clash(colors: &[Color], a: usize, b: usize) -> bool {
    colors[a] != UNCOLORED && colors[a] == colors[b]
}

/// Empty iff every vertex is colored and no edge is monochromatic.
pub fn verify_d1(g: &Graph, colors: &[Color]) -> Result<Vec<Violation>> {
    check_size(g, colors)?;
    let mut out = uncolored(colors);
    out.extend(
        g.edges()
            .filter(|&(u, v)| clash(colors, u, v))
            .map(|(u, v)| Violation::D1Edge { u, v }),
    );
    Ok(out)
}

/// Distance-2 check. With `partial` only the endpoints of 2-paths must
/// differ; otherwise adjacent vertices must differ too. A pair joined by
/// several 2-paths is reported once per middle vertex.
pub fn verify_d2(g: &Graph, colors: &[Color], partial: bool) -> Result<Vec<Violation>> {
    check_size(g, colors)?;
    Ok(d2_violations(g, colors, partial, g.num_vertices()))
}

/// Partial distance-2 check restricted to the first `num_sources` vertices,
/// the source side of a bipartite graph. Target colors are ignored.
pub fn verify_pd2_sources(
    g: &Graph,
    colors: &[Color],
    num_sources: usize,
) -> Result<Vec<Violation>> {
    check_size(g, colors)?;
    if num_sources > g.num_vertices() {
        return Err(Error::InvalidArgument(format!(
            "{num_sources} sources for {} vertices",
            g.num_vertices()
        )));
    }
    Ok(d2_violations(g, colors, true, num_sources))
}

fn d2_violations(g: &Graph, colors: &[Color], partial: bool, limit: usize) -> Vec<Violation> {
    let mut out = uncolored(&colors[..limit]);
    if !partial {
        out.extend(
            g.edges()
                .filter(|&(u, v)| u < limit && v < limit && clash(colors, u, v))
                .map(|(u, v)| Violation::D1Edge { u, v }),
        );
    }
    for middle in 0..g.num_vertices() {
        let row = g.neighbors(middle);
        for (i, &u) in row.iter().enumerate() {
            if u >= limit {
                continue;
            }
            for &w in &row[i + 1..] {
                if w < limit && clash(colors, u, w) {
                    out.push(if partial {
                        Violation::Pd2Path { u, middle, w }
                    } else {
                        Violation::D2Path { u, middle, w }
                    });
                }
            }
        }
    }
    out
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColorStats {
    pub num_colors: usize,
    /// Vertex count per nonzero color.
    pub histogram: BTreeMap<Color, usize>,
}

pub fn color_stats(colors: &[Color]) -> ColorStats {
    let mut histogram = BTreeMap::new();
    for &c in colors.iter().filter(|&&c| c != UNCOLORED) {
        *histogram.entry(c).or_insert(0) += 1;
    }
    ColorStats {
        num_colors: histogram.len(),
        histogram,
    }
}

/// Default vertex limit for [`chromatic_number`].
pub const ORACLE_MAX_N: usize = 12;

/// Exact chromatic number by DSatur-ordered backtracking.
///
/// Exponential in the worst case; `max_n` guards against accidental use on
/// large inputs.
pub fn chromatic_number(g: &Graph, max_n: usize) -> Result<usize> {
    let n = g.num_vertices();
    if n > max_n {
        return Err(Error::GraphTooLarge {
            num_vertices: n,
            limit: max_n,
        });
    }
    if n == 0 {
        return Ok(0);
    }
    if g.num_edges() == 0 {
        return Ok(1);
    }
    let order: Vec<usize> = (0..n).collect();
    let upper = crate::localcolor::serial_greedy(g, &order)?.num_colors();
    // Color sets are u128 bitmasks.
    let mut k = 2;
    while k < upper.min(127) {
        if k_colorable(g, k) {
            return Ok(k);
        }
        k += 1;
    }
    Ok(upper)
}

fn k_colorable(g: &Graph, k: usize) -> bool {
    let mut colors = vec![0usize; g.num_vertices()];
    extend(g, k, &mut colors, 0, 0)
}

/// Colors one more vertex, choosing the uncolored vertex with the most
/// distinct neighbor colors (ties: higher degree). New colors are opened
/// one at a time, which removes color-permutation symmetry.
fn extend(g: &Graph, k: usize, colors: &mut [usize], done: usize, used: usize) -> bool {
    if done == colors.len() {
        return true;
    }
    let mut best = None;
    let mut best_key = (0usize, 0usize);
    for v in (0..colors.len()).filter(|&v| colors[v] == 0) {
        let mut seen = 0u128;
        for &u in g.neighbors(v) {
            if colors[u] != 0 {
                seen |= 1 << colors[u];
            }
        }
        let key = (seen.count_ones() as usize, g.degree(v));
        if best.is_none() || key > best_key {
            best = Some((v, seen));
            best_key = key;
        }
    }
    let (v, seen) = best.expect("an uncolored vertex remains");
    for c in 1..=(used + 1).min(k) {
        if seen & (1 << c) == 0 {
            colors[v] = c;
            if extend(g, k, colors, done + 1, used.max(c)) {
                return true;
            }
            colors[v] = 0;
        }
    }
    false
}
