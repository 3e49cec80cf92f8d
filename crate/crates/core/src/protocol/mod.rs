//! Distributed speculate-and-iterate drivers.
//!
//! Every rank colors its owned vertices, boundary colors are pushed to ghost
//! copies, and each rank uncolors the losers of cross-rank conflicts using a
//! rule every rank evaluates identically. Rounds repeat until a global sum of
//! conflicts is zero.

mod conflict;

pub use conflict::{
    check_conflicts, choose_loser, detect_conflicts_d1, detect_conflicts_d2, gid_rand, Loser,
    VertexKey,
};

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::localcolor::{
    select_kernel_for_degree, speculative_color, speculative_color_d2, Color, Coloring, Kernel,
    KernelChoice, UNCOLORED,
};
use crate::runtime::{
    restore_ghost_colors, snapshot_ghost_colors, CommCounters, ExchangeScope, LocalGraph,
    RankWorld, COLOR_PAIR_BYTES,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Mode {
    #[serde(rename = "d1")]
    D1,
    #[serde(rename = "d1-2gl")]
    D1TwoGhostLayers,
    #[serde(rename = "d2")]
    D2,
    #[serde(rename = "pd2")]
    PD2,
}

impl Mode {
    pub const ALL: [Mode; 4] = [Mode::D1, Mode::D1TwoGhostLayers, Mode::D2, Mode::PD2];

    pub fn ghost_layers(self) -> u8 {
        match self {
            Mode::D1 => 1,
            Mode::D1TwoGhostLayers | Mode::D2 | Mode::PD2 => 2,
        }
    }

    pub fn is_distance2(self) -> bool {
        matches!(self, Mode::D2 | Mode::PD2)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Mode::D1 => "d1",
            Mode::D1TwoGhostLayers => "d1-2gl",
            Mode::D2 => "d2",
            Mode::PD2 => "pd2",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Mode::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown mode {s:?}")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlgorithmConfig {
    pub mode: Mode,
    /// Prefer uncoloring the lower-degree endpoint of a conflict.
    pub recolor_degrees: bool,
    pub kernel: KernelChoice,
    /// Serial on-rank kernels in ascending gid order.
    pub deterministic: bool,
    pub max_rounds: usize,
    /// Run rank supersteps on the rayon pool instead of one after another.
    pub parallel_ranks: bool,
}

impl Default for AlgorithmConfig {
    fn default() -> Self {
        Self {
            mode: Mode::D1,
            recolor_degrees: true,
            kernel: KernelChoice::default(),
            deterministic: false,
            max_rounds: 200,
            parallel_ranks: true,
        }
    }
}

impl AlgorithmConfig {
    pub fn new(mode: Mode) -> Self {
        Self {
            mode,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_rounds == 0 {
            return Err(Error::Config("max_rounds must be at least 1".into()));
        }
        if self.kernel.max_degree_threshold == 0 {
            return Err(Error::Config(
                "edge-based threshold must be positive".into(),
            ));
        }
        match (self.kernel.forced, self.mode.is_distance2()) {
            (Some(Kernel::NetBasedD2), false) => Err(Error::Config(format!(
                "kernel net-based-d2 cannot run mode {}",
                self.mode
            ))),
            (Some(k @ (Kernel::VertexBased | Kernel::EdgeBased)), true) => Err(Error::Config(
                format!("kernel {k:?} cannot run mode {}", self.mode),
            )),
            _ => Ok(()),
        }
    }
}

/// One superstep: local (re)coloring, exchange, detection, allreduce.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RoundReport {
    pub round: usize,
    /// Global sum of conflicts found in this round's detection.
    pub conflicts: u64,
    /// Owned vertices (re)colored per rank.
    pub recolored: Vec<usize>,
    pub bytes_sent: u64,
    pub messages_sent: u64,
    pub color_ms: f64,
    pub comm_ms: f64,
    pub detect_ms: f64,
}

impl RoundReport {
    pub fn recolored_total(&self) -> usize {
        self.recolored.iter().sum()
    }

    pub fn clear_timings(&mut self) {
        self.color_ms = 0.0;
        self.comm_ms = 0.0;
        self.detect_ms = 0.0;
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DistributedColoring {
    /// Indexed by global vertex id.
    pub coloring: Coloring,
    pub rounds: Vec<RoundReport>,
    pub kernel: Kernel,
    /// Traffic before round 0: world construction and degree exchange.
    pub setup: CommCounters,
}

/// Hooks into [`run_distributed_with`] for instrumentation and tests.
pub trait RoundObserver {
    /// After round 0's local coloring, before any exchange.
    fn initial_coloring(&mut self, _world: &RankWorld, _colors: &[Coloring]) {}

    /// After each round's exchange, before detection.
    fn after_exchange(&mut self, _round: usize, _world: &RankWorld, _colors: &[Coloring]) {}
}

/// Observer that ignores every hook.
pub struct NoObserver;

impl RoundObserver for NoObserver {}

/// Global degree of every local vertex, per rank, plus the traffic spent.
///
/// Owned rows are complete, so owners know the true degree; one exchange
/// hands it to all ghost copies.
pub fn compute_global_degrees(world: &RankWorld) -> Result<(Vec<Vec<u64>>, CommCounters)> {
    let mut degrees: Vec<Vec<u64>> = world
        .ranks()
        .iter()
        .map(|lg| {
            let mut d = vec![0u64; lg.num_local()];
            for (v, slot) in d.iter_mut().enumerate().take(lg.owned_count()) {
                *slot = lg.csr().degree(v) as u64;
            }
            d
        })
        .collect();
    let traffic = world.exchange(&mut degrees, ExchangeScope::Full, COLOR_PAIR_BYTES)?;
    Ok((degrees, traffic))
}

pub fn run_distributed(world: &RankWorld, cfg: &AlgorithmConfig) -> Result<DistributedColoring> {
    run_distributed_with(world, cfg, &mut NoObserver)
}

fn elapsed_ms(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

fn per_rank<T, R, F>(parallel: bool, world: &RankWorld, state: &mut [T], f: F) -> Vec<R>
where
    T: Send,
    R: Send,
    F: Fn(&LocalGraph, &mut T) -> R + Sync,
{
    if parallel {
        state
            .par_iter_mut()
            .zip(world.ranks().par_iter())
            .map(|(s, lg)| f(lg, s))
            .collect()
    } else {
        state
            .iter_mut()
            .zip(world.ranks())
            .map(|(s, lg)| f(lg, s))
            .collect()
    }
}

pub fn run_distributed_with(
    world: &RankWorld,
    cfg: &AlgorithmConfig,
    observer: &mut dyn RoundObserver,
) -> Result<DistributedColoring> {
    cfg.validate()?;
    if world.ghost_layers() != cfg.mode.ghost_layers() {
        return Err(Error::Config(format!(
            "mode {} needs {} ghost layer(s), world has {}",
            cfg.mode,
            cfg.mode.ghost_layers(),
            world.ghost_layers()
        )));
    }
    let num_ranks = world.num_ranks();
    let mut setup = world.setup_traffic();
    let degrees = if cfg.recolor_degrees {
        let (d, traffic) = compute_global_degrees(world)?;
        setup += traffic;
        d
    } else {
        vec![Vec::new(); num_ranks]
    };
    let local_max: Vec<u64> = world
        .ranks()
        .iter()
        .map(|lg| {
            (0..lg.owned_count())
                .map(|v| lg.csr().degree(v) as u64)
                .max()
                .unwrap_or(0)
        })
        .collect();
    let delta_max = world.allreduce_max(&local_max)?;
    let kernel = if cfg.mode.is_distance2() {
        Kernel::NetBasedD2
    } else {
        select_kernel_for_degree(delta_max as usize, &cfg.kernel)
    };

    let color_local = |lg: &LocalGraph, colors: &mut Coloring, worklist: &[usize]| match cfg.mode {
        Mode::D1 | Mode::D1TwoGhostLayers => {
            speculative_color(lg.csr(), colors, worklist, kernel, cfg.deterministic);
        }
        Mode::D2 | Mode::PD2 => {
            let partial = cfg.mode == Mode::PD2;
            speculative_color_d2(lg.csr(), colors, worklist, partial, cfg.deterministic);
        }
    };
    let detect = |lg: &LocalGraph, colors: &mut [Color], degrees: &[u64]| match cfg.mode {
        Mode::D1 | Mode::D1TwoGhostLayers => {
            detect_conflicts_d1(lg, colors, degrees, cfg.recolor_degrees)
        }
        Mode::D2 => detect_conflicts_d2(lg, colors, degrees, cfg.recolor_degrees, false),
        Mode::PD2 => detect_conflicts_d2(lg, colors, degrees, cfg.recolor_degrees, true),
    };

    let mut colors: Vec<Coloring> = world
        .ranks()
        .iter()
        .map(|lg| Coloring::uncolored(lg.num_local()))
        .collect();
    let mut saved: Vec<Vec<Color>> = vec![Vec::new(); num_ranks];
    let mut reports: Vec<RoundReport> = Vec::new();

    // Round 0 colors every owned vertex; ghosts are still uncolored.
    let timed = per_rank(cfg.parallel_ranks, world, &mut colors, |lg, c| {
        let start = Instant::now();
        let worklist: Vec<usize> = (0..lg.owned_count()).collect();
        color_local(lg, c, &worklist);
        (lg.owned_count(), elapsed_ms(start))
    });
    observer.initial_coloring(world, &colors);
    let mut report = RoundReport {
        round: 0,
        recolored: timed.iter().map(|t| t.0).collect(),
        color_ms: timed.iter().map(|t| t.1).sum(),
        ..RoundReport::default()
    };
    let mut scope_changed: Option<Vec<Vec<usize>>> = None;

    loop {
        let start = Instant::now();
        let scope = match &scope_changed {
            None => ExchangeScope::Full,
            Some(changed) => ExchangeScope::Changed(changed),
        };
        let traffic = world.exchange_boundary_colors(&mut colors, scope)?;
        report.comm_ms += elapsed_ms(start);
        report.bytes_sent = traffic.bytes;
        report.messages_sent = traffic.messages;
        observer.after_exchange(report.round, world, &colors);

        // Ghost colors are saved before detection may uncolor some of them.
        let mut state: Vec<(&mut Coloring, &mut Vec<Color>, &Vec<u64>)> = colors
            .iter_mut()
            .zip(saved.iter_mut())
            .zip(&degrees)
            .map(|((c, s), d)| (c, s, d))
            .collect();
        let found = per_rank(cfg.parallel_ranks, world, &mut state, |lg, (c, s, d)| {
            let start = Instant::now();
            **s = snapshot_ghost_colors(lg, c);
            let n = detect(lg, c, d);
            n.map(|n| (n, elapsed_ms(start)))
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
        report.detect_ms = found.iter().map(|f| f.1).sum();

        let start = Instant::now();
        let per_rank_conflicts: Vec<u64> = found.iter().map(|f| f.0).collect();
        let conflicts = world.allreduce_sum(&per_rank_conflicts)?;
        report.comm_ms += elapsed_ms(start);
        report.conflicts = conflicts;
        reports.push(report);
        if conflicts == 0 {
            break;
        }
        if reports.len() >= cfg.max_rounds {
            let rounds = reports.len();
            return Err(Error::NonConvergence {
                rounds,
                last: Box::new(reports.pop().expect("at least one round")),
            });
        }

        // Recolor everything left uncolored, ghosts included, then put the
        // ghosts back so they agree with their owners again.
        let mut state: Vec<(&mut Coloring, &Vec<Color>)> =
            colors.iter_mut().zip(saved.iter()).collect();
        let recolor = per_rank(cfg.parallel_ranks, world, &mut state, |lg, (c, s)| {
            let start = Instant::now();
            let mut worklist: Vec<usize> =
                (0..lg.num_local()).filter(|&v| c[v] == UNCOLORED).collect();
            if cfg.deterministic {
                worklist.sort_unstable_by_key(|&v| lg.gid(v));
            }
            color_local(lg, c, &worklist);
            let mut changed: Vec<usize> =
                worklist.into_iter().filter(|&v| lg.is_owned(v)).collect();
            changed.sort_unstable();
            restore_ghost_colors(lg, c, s).map(|()| (changed, elapsed_ms(start)))
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;

        report = RoundReport {
            round: reports.len(),
            recolored: recolor.iter().map(|r| r.0.len()).collect(),
            color_ms: recolor.iter().map(|r| r.1).sum(),
            ..RoundReport::default()
        };
        scope_changed = Some(recolor.into_iter().map(|r| r.0).collect());
    }

    Ok(DistributedColoring {
        coloring: world.gather(&colors),
        rounds: reports,
        kernel,
        setup,
    })
}
