//! On-rank coloring kernels.
//!
//! All kernels run on a CSR graph whose vertices may already carry colors.
//! Only vertices on the worklist are (re)colored; everything else is read-only
//! and acts as a constraint. Color 0 means uncolored.

mod d1;
mod d2;

pub use d1::speculative_color_d1;
pub use d2::speculative_color_d2;

use std::ops::{Deref, DerefMut};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, GraphStats};

pub type Color = u32;

pub const UNCOLORED: Color = 0;

/// Per-vertex colors; `0` is uncolored.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Coloring(Vec<Color>);

impl Coloring {
    pub fn uncolored(n: usize) -> Self {
        Self(vec![UNCOLORED; n])
    }

    pub fn from_vec(colors: Vec<Color>) -> Self {
        Self(colors)
    }

    pub fn into_vec(self) -> Vec<Color> {
        self.0
    }

    /// Number of distinct nonzero colors.
    pub fn num_colors(&self) -> usize {
        let mut seen: Vec<Color> = self.0.iter().copied().filter(|&c| c != 0).collect();
        seen.sort_unstable();
        seen.dedup();
        seen.len()
    }

    pub fn max_color(&self) -> Color {
        self.0.iter().copied().max().unwrap_or(UNCOLORED)
    }

    pub fn is_complete(&self) -> bool {
        self.0.iter().all(|&c| c != UNCOLORED)
    }
}

impl Deref for Coloring {
    type Target = [Color];

    fn deref(&self) -> &[Color] {
        &self.0
    }
}

impl DerefMut for Coloring {
    fn deref_mut(&mut self) -> &mut [Color] {
        &mut self.0
    }
}

impl AsRef<[Color]> for Coloring {
    fn as_ref(&self) -> &[Color] {
        &self.0
    }
}

impl AsMut<[Color]> for Coloring {
    fn as_mut(&mut self) -> &mut [Color] {
        &mut self.0
    }
}

impl From<Vec<Color>> for Coloring {
    fn from(v: Vec<Color>) -> Self {
        Self(v)
    }
}

/// 64-color window of forbidden colors starting at `base`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ForbiddenMask {
    base: Color,
    bits: u64,
}

impl Default for ForbiddenMask {
    fn default() -> Self {
        Self::new()
    }
}

impl ForbiddenMask {
    pub const WIDTH: Color = 64;

    pub fn new() -> Self {
        Self { base: 1, bits: 0 }
    }

    pub fn base(&self) -> Color {
        self.base
    }

    /// Colors outside the current window are ignored.
    #[inline]
    pub fn forbid(&mut self, c: Color) {
        if c >= self.base && c - self.base < Self::WIDTH {
            self.bits |= 1u64 << (c - self.base);
        }
    }

    pub fn is_forbidden(&self, c: Color) -> bool {
        c >= self.base && c - self.base < Self::WIDTH && self.bits & (1u64 << (c - self.base)) != 0
    }

    /// Smallest color of the window not forbidden, if any.
    #[inline]
    pub fn first_free(&self) -> Option<Color> {
        if self.bits == u64::MAX {
            None
        } else {
            Some(self.base + self.bits.trailing_ones())
        }
    }

    /// Slides to the next 64 colors and clears the bits.
    pub fn advance(&mut self) {
        self.base += Self::WIDTH;
        self.bits = 0;
    }
}

/// Smallest positive color not reported by `scan`.
///
/// `scan` forbids the colors of the whole constraint neighborhood; it is
/// re-run once per saturated 64-color window.
#[inline]
pub fn first_fit<F>(mut scan: F) -> Color
where
    F: FnMut(&mut ForbiddenMask),
{
    let mut mask = ForbiddenMask::new();
    loop {
        scan(&mut mask);
        if let Some(c) = mask.first_free() {
            return c;
        }
        mask.advance();
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kernel {
    VertexBased,
    EdgeBased,
    NetBasedD2,
}

/// Kernel selection policy: an explicit override, or the max-degree rule.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KernelChoice {
    pub forced: Option<Kernel>,
    pub max_degree_threshold: usize,
}

impl KernelChoice {
    pub const DEFAULT_THRESHOLD: usize = 6000;

    pub fn with_threshold(max_degree_threshold: usize) -> Result<Self> {
        if max_degree_threshold == 0 {
            return Err(Error::InvalidArgument(
                "edge-based threshold must be positive".into(),
            ));
        }
        Ok(Self {
            forced: None,
            max_degree_threshold,
        })
    }
}

impl Default for KernelChoice {
    fn default() -> Self {
        Self {
            forced: None,
            max_degree_threshold: Self::DEFAULT_THRESHOLD,
        }
    }
}

/// Edge-based iff the maximum degree strictly exceeds the threshold.
pub fn select_kernel(stats: &GraphStats, cfg: &KernelChoice) -> Kernel {
    select_kernel_for_degree(stats.delta_max, cfg)
}

pub fn select_kernel_for_degree(delta_max: usize, cfg: &KernelChoice) -> Kernel {
    if let Some(k) = cfg.forced {
        return k;
    }
    if delta_max > cfg.max_degree_threshold {
        Kernel::EdgeBased
    } else {
        Kernel::VertexBased
    }
}

/// First-fit greedy coloring visiting vertices in `order`.
pub fn serial_greedy(g: &Graph, order: &[usize]) -> Result<Coloring> {
    let n = g.num_vertices();
    if order.len() != n {
        return Err(Error::InvalidArgument(format!(
            "order has {} entries for {n} vertices",
            order.len()
        )));
    }
    let mut seen = vec![false; n];
    for &v in order {
        if v >= n || std::mem::replace(&mut seen[v], true) {
            return Err(Error::InvalidArgument(format!(
                "order is not a permutation (vertex {v})"
            )));
        }
    }
    let mut colors = Coloring::uncolored(n);
    for &v in order {
        colors[v] = first_fit(|mask| {
            for &u in g.neighbors(v) {
                mask.forbid(colors[u]);
            }
        });
    }
    Ok(colors)
}

/// Colors every worklist vertex so that no distance-1 conflict remains among
/// the colored vertices of `g`. Returns the number of speculate/fix passes.
///
/// With `deterministic` the worklist is colored serially in the given order.
/// Otherwise worklist vertices are colored concurrently, conflicting pairs
/// are found per vertex (`VertexBased`) or per edge (`EdgeBased`), the
/// endpoint with the smaller index is uncolored and the losers go around
/// again. `NetBasedD2` delegates to full distance-2 coloring.
pub fn speculative_color(
    g: &Graph,
    colors: &mut Coloring,
    worklist: &[usize],
    kernel: Kernel,
    deterministic: bool,
) -> usize {
    match kernel {
        Kernel::NetBasedD2 => speculative_color_d2(g, colors, worklist, false, deterministic),
        Kernel::VertexBased | Kernel::EdgeBased => speculative_color_d1(
            g,
            colors,
            worklist,
            kernel == Kernel::EdgeBased,
            deterministic,
        ),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{gen_complete, gen_cycle, gen_path, gen_random_gnp};

    #[test]
    fn mask_window_and_advance() {
        let mut m = ForbiddenMask::new();
        assert_eq!(m.first_free(), Some(1));
        m.forbid(1);
        m.forbid(2);
        m.forbid(200);
        assert_eq!(m.first_free(), Some(3));
        assert!(!m.is_forbidden(200));
        for c in 1..=64 {
            m.forbid(c);
        }
        assert_eq!(m.first_free(), None);
        m.advance();
        assert_eq!(m.base(), 65);
        m.forbid(65);
        assert_eq!(m.first_free(), Some(66));
    }

    #[test]
    fn first_fit_crosses_windows() {
        let neighborhood: Vec<Color> = (1..=130).filter(|&c| c != 100).collect();
        let c = first_fit(|m| neighborhood.iter().for_each(|&c| m.forbid(c)));
        assert_eq!(c, 100);
        let full: Vec<Color> = (1..=128).collect();
        assert_eq!(first_fit(|m| full.iter().for_each(|&c| m.forbid(c))), 129);
    }

    #[test]
    fn serial_greedy_small_graphs() {
        assert_eq!(
            serial_greedy(&gen_complete(3), &[0, 1, 2])
                .unwrap()
                .as_ref(),
            &[1, 2, 3]
        );
        assert_eq!(
            serial_greedy(&gen_path(3), &[0, 1, 2]).unwrap().as_ref(),
            &[1, 2, 1]
        );
        // C5 first-fit in natural order: 1,2,1,2 then 3 for the closing vertex.
        let c5 = serial_greedy(&gen_cycle(5), &[0, 1, 2, 3, 4]).unwrap();
        assert_eq!(c5.as_ref(), &[1, 2, 1, 2, 3]);
        assert_eq!(c5.num_colors(), 3);
    }

    #[test]
    fn serial_greedy_rejects_non_permutations() {
        let g = gen_path(3);
        assert!(serial_greedy(&g, &[0, 1]).is_err());
        assert!(serial_greedy(&g, &[0, 1, 1]).is_err());
        assert!(serial_greedy(&g, &[0, 1, 3]).is_err());
    }

    #[test]
    fn kernel_selection_threshold() {
        let cfg = KernelChoice::default();
        assert_eq!(select_kernel_for_degree(77, &cfg), Kernel::VertexBased);
        assert_eq!(select_kernel_for_degree(6000, &cfg), Kernel::VertexBased);
        assert_eq!(select_kernel_for_degree(6001, &cfg), Kernel::EdgeBased);
        let forced = KernelChoice {
            forced: Some(Kernel::EdgeBased),
            ..cfg
        };
        assert_eq!(select_kernel_for_degree(1, &forced), Kernel::EdgeBased);
        assert!(KernelChoice::with_threshold(0).is_err());
    }

    #[test]
    fn speculative_on_k4() {
        let g = gen_complete(4);
        for kernel in [Kernel::VertexBased, Kernel::EdgeBased] {
            for det in [true, false] {
                let mut c = Coloring::uncolored(4);
                speculative_color(&g, &mut c, &[0, 1, 2, 3], kernel, det);
                assert_eq!(c.num_colors(), 4);
            }
        }
    }

    #[test]
    fn speculative_first_fit_forced() {
        // Star center 0 with leaves colored 1 and 2.
        let g = Graph::from_edges(3, [(0, 1), (0, 2)]);
        let mut c = Coloring::from_vec(vec![0, 1, 2]);
        speculative_color(&g, &mut c, &[0], Kernel::VertexBased, false);
        assert_eq!(c[0], 3);
    }

    #[test]
    fn deterministic_single_rank_matches_serial() {
        let g = gen_random_gnp(100, 0.1, 2).unwrap();
        let order: Vec<usize> = (0..100).collect();
        let serial = serial_greedy(&g, &order).unwrap();
        let mut c = Coloring::uncolored(100);
        speculative_color(&g, &mut c, &order, Kernel::VertexBased, true);
        assert_eq!(c, serial);
    }
}
