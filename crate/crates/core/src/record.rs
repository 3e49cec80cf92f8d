//! End-to-end run pipeline and its serializable record.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{
    gen_complete, gen_cycle, gen_hex_mesh, gen_mycielskian, gen_path, gen_petersen, gen_random_dag,
    gen_random_gnp, gen_star, load_directed_edge_list, read_graph, stats, to_bipartite,
    DirectedGraph, Graph, GraphStats,
};
use crate::localcolor::{Coloring, Kernel, KernelChoice};
use crate::partition::{partition_block, partition_edge_balanced, partition_random, PartitionMap};
use crate::protocol::{
    run_distributed_with, AlgorithmConfig, Mode, NoObserver, RoundObserver, RoundReport,
};
use crate::runtime::build_local_graphs;
use crate::verify::{color_stats, verify_d1, verify_d2, verify_pd2_sources, Violation};

/// Where the input graph comes from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum GraphSource {
    /// Edge list, Matrix Market or CSR cache.
    File {
        path: PathBuf,
    },
    Mesh {
        nx: usize,
        ny: usize,
        nz: usize,
    },
    Myciel {
        k: usize,
    },
    Path {
        n: usize,
    },
    Cycle {
        n: usize,
    },
    Complete {
        n: usize,
    },
    /// `K_{1,leaves}` with center 0.
    Star {
        leaves: usize,
    },
    Petersen,
    /// `seed` overrides the run seed when present.
    Gnp {
        n: usize,
        p: f64,
        seed: Option<u64>,
    },
    Dag {
        n: usize,
        p: f64,
        seed: Option<u64>,
    },
}

impl FromStr for GraphSource {
    type Err = Error;

    /// `mesh:NX,NY,NZ`, `myciel:K`, `gnp:N,P[,SEED]`, `dag:N,P[,SEED]`,
    /// `path:N`, `cycle:N`, `complete:N`, `star:LEAVES` or `petersen`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = |why: &str| Error::InvalidArgument(format!("generator {s:?}: {why}"));
        if s == "petersen" {
            return Ok(GraphSource::Petersen);
        }
        let (kind, args) = s.split_once(':').ok_or_else(|| bad("expected KIND:ARGS"))?;
        let args: Vec<&str> = args.split(',').map(str::trim).collect();
        let int = |i: usize| -> Result<usize> {
            args[i]
                .parse()
                .map_err(|_| bad(&format!("{:?} is not a count", args[i])))
        };
        let prob = || -> Result<f64> {
            args[1]
                .parse()
                .map_err(|_| bad(&format!("{:?} is not a probability", args[1])))
        };
        let seed = || -> Result<Option<u64>> {
            args.get(2)
                .map(|x| x.parse().map_err(|_| bad(&format!("{x:?} is not a seed"))))
                .transpose()
        };
        match (kind, args.len()) {
            ("mesh", 3) => Ok(GraphSource::Mesh {
                nx: int(0)?,
                ny: int(1)?,
                nz: int(2)?,
            }),
            ("myciel", 1) => Ok(GraphSource::Myciel { k: int(0)? }),
            ("path", 1) => Ok(GraphSource::Path { n: int(0)? }),
            ("cycle", 1) => Ok(GraphSource::Cycle { n: int(0)? }),
            ("complete", 1) => Ok(GraphSource::Complete { n: int(0)? }),
            ("star", 1) => Ok(GraphSource::Star { leaves: int(0)? }),
            ("gnp", 2 | 3) => Ok(GraphSource::Gnp {
                n: int(0)?,
                p: prob()?,
                seed: seed()?,
            }),
            ("dag", 2 | 3) => Ok(GraphSource::Dag {
                n: int(0)?,
                p: prob()?,
                seed: seed()?,
            }),
            _ => Err(bad("unknown kind or wrong argument count")),
        }
    }
}

impl fmt::Display for GraphSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let seed = |s: &Option<u64>| s.map(|s| format!(",{s}")).unwrap_or_default();
        match self {
            GraphSource::File { path } => write!(f, "{}", path.display()),
            GraphSource::Mesh { nx, ny, nz } => write!(f, "mesh:{nx},{ny},{nz}"),
            GraphSource::Myciel { k } => write!(f, "myciel:{k}"),
            GraphSource::Path { n } => write!(f, "path:{n}"),
            GraphSource::Cycle { n } => write!(f, "cycle:{n}"),
            GraphSource::Complete { n } => write!(f, "complete:{n}"),
            GraphSource::Star { leaves } => write!(f, "star:{leaves}"),
            GraphSource::Petersen => f.write_str("petersen"),
            GraphSource::Gnp { n, p, seed: s } => write!(f, "gnp:{n},{p}{}", seed(s)),
            GraphSource::Dag { n, p, seed: s } => write!(f, "dag:{n},{p}{}", seed(s)),
        }
    }
}

/// A graph ready to color. For partial distance-2 runs it is the bipartite
/// representation and `num_sources` is the size of the source side.
#[derive(Clone, Debug)]
pub struct Instance {
    pub graph: Graph,
    pub num_sources: Option<usize>,
}

impl GraphSource {
    /// Builds the undirected input graph, or the bipartite graph for PD2.
    ///
    /// Undirected sources become directed with both orientations per edge
    /// before the bipartite construction.
    pub fn load(&self, mode: Mode, run_seed: u64) -> Result<Instance> {
        if mode != Mode::PD2 {
            return Ok(Instance {
                graph: self.undirected(run_seed)?,
                num_sources: None,
            });
        }
        let d = match self {
            GraphSource::Dag { n, p, seed } => gen_random_dag(*n, *p, seed.unwrap_or(run_seed))?,
            GraphSource::File { path } if !is_csr_cache(path) => load_directed_edge_list(path)?,
            _ => DirectedGraph::from(&self.undirected(run_seed)?),
        };
        let b = to_bipartite(&d);
        Ok(Instance {
            graph: b.graph,
            num_sources: Some(b.num_s),
        })
    }

    fn undirected(&self, run_seed: u64) -> Result<Graph> {
        match self {
            GraphSource::File { path } => read_graph(path),
            GraphSource::Mesh { nx, ny, nz } => gen_hex_mesh(*nx, *ny, *nz),
            GraphSource::Myciel { k } => gen_mycielskian(*k),
            GraphSource::Path { n } => Ok(gen_path(*n)),
            GraphSource::Cycle { n } => Ok(gen_cycle(*n)),
            GraphSource::Complete { n } => Ok(gen_complete(*n)),
            GraphSource::Star { leaves } => Ok(gen_star(*leaves)),
            GraphSource::Petersen => Ok(gen_petersen()),
            GraphSource::Gnp { n, p, seed } => gen_random_gnp(*n, *p, seed.unwrap_or(run_seed)),
            GraphSource::Dag { n, p, seed } => {
                let d = gen_random_dag(*n, *p, seed.unwrap_or(run_seed))?;
                Ok(Graph::from_edges(d.num_vertices(), d.arcs()))
            }
        }
    }
}

fn is_csr_cache(path: &std::path::Path) -> bool {
    use std::io::Read;
    let mut magic = [0u8; 4];
    std::fs::File::open(path)
        .and_then(|mut f| f.read_exact(&mut magic))
        .map(|()| &magic == crate::graph::CACHE_MAGIC)
        .unwrap_or(false)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PartitionKind {
    Block,
    Edge,
    Random,
}

impl PartitionKind {
    pub fn as_str(self) -> &'static str {
        match self {
            PartitionKind::Block => "block",
            PartitionKind::Edge => "edge",
            PartitionKind::Random => "random",
        }
    }

    pub fn apply(self, g: &Graph, ranks: usize, seed: u64) -> Result<PartitionMap> {
        match self {
            PartitionKind::Block => partition_block(g, ranks),
            PartitionKind::Edge => partition_edge_balanced(g, ranks, seed),
            PartitionKind::Random => partition_random(g, ranks, seed),
        }
    }
}

impl fmt::Display for PartitionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PartitionKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "block" => Ok(PartitionKind::Block),
            "edge" => Ok(PartitionKind::Edge),
            "random" => Ok(PartitionKind::Random),
            _ => Err(Error::InvalidArgument(format!("unknown partition {s:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub source: GraphSource,
    pub mode: Mode,
    pub ranks: usize,
    pub partition: PartitionKind,
    pub seed: u64,
    pub recolor_degrees: bool,
    pub deterministic: bool,
    pub eb_threshold: usize,
    pub max_rounds: usize,
    /// PD2 only: count and check source-side colors only.
    pub partial_count: bool,
}

impl RunConfig {
    pub fn new(source: GraphSource, mode: Mode, ranks: usize) -> Self {
        Self {
            source,
            mode,
            ranks,
            partition: PartitionKind::Block,
            seed: 0,
            recolor_degrees: true,
            deterministic: false,
            eb_threshold: KernelChoice::DEFAULT_THRESHOLD,
            max_rounds: 200,
            partial_count: false,
        }
    }

    pub fn algorithm(&self) -> Result<AlgorithmConfig> {
        Ok(AlgorithmConfig {
            mode: self.mode,
            recolor_degrees: self.recolor_degrees,
            kernel: KernelChoice::with_threshold(self.eb_threshold)?,
            deterministic: self.deterministic,
            max_rounds: self.max_rounds,
            parallel_ranks: true,
        })
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PhaseTimes {
    pub load_ms: f64,
    pub setup_ms: f64,
    pub color_ms: f64,
    pub comm_ms: f64,
    pub detect_ms: f64,
    pub verify_ms: f64,
    pub total_ms: f64,
}

impl PhaseTimes {
    /// Local coloring plus conflict detection.
    pub fn comp_ms(&self) -> f64 {
        self.color_ms + self.detect_ms
    }
}

/// Maximum number of violations kept in a record.
pub const VIOLATION_SAMPLE: usize = 20;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verification {
    pub proper: bool,
    pub violations: usize,
    pub sample: Vec<Violation>,
}

impl Verification {
    pub fn from_violations(v: Vec<Violation>) -> Self {
        Self {
            proper: v.is_empty(),
            violations: v.len(),
            sample: v.into_iter().take(VIOLATION_SAMPLE).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PartitionSummary {
    pub edge_cut: usize,
    pub endpoint_imbalance: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub config: RunConfig,
    pub graph: GraphStats,
    pub partition: PartitionSummary,
    pub kernel: Kernel,
    pub rounds: Vec<RoundReport>,
    pub num_rounds: usize,
    pub colors: usize,
    pub max_color: u32,
    /// Owned vertices recolored after round 0, summed over ranks and rounds.
    pub recolored_total: usize,
    pub bytes_sent: u64,
    pub messages_sent: u64,
    pub setup_bytes: u64,
    pub times: PhaseTimes,
    pub verification: Verification,
}

impl RunRecord {
    /// Copy with every wall-clock field zeroed, for reproducibility checks.
    pub fn without_timings(&self) -> Self {
        let mut r = self.clone();
        r.times = PhaseTimes::default();
        r.rounds.iter_mut().for_each(RoundReport::clear_timings);
        r
    }

    pub fn summary_line(&self) -> String {
        format!(
            "mode={} ranks={} rounds={} colors={} proper={}",
            self.config.mode,
            self.config.ranks,
            self.num_rounds,
            self.colors,
            self.verification.proper
        )
    }
}

#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub record: RunRecord,
    pub coloring: Coloring,
}

fn ms(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

/// Loads the graph, partitions it, colors it and verifies the result.
pub fn run_coloring(cfg: &RunConfig) -> Result<RunOutcome> {
    let total = Instant::now();
    let t = Instant::now();
    let instance = cfg.source.load(cfg.mode, cfg.seed)?;
    let load_ms = ms(t);
    let mut outcome = color_instance(cfg, &instance)?;
    outcome.record.times.load_ms = load_ms;
    outcome.record.times.total_ms = ms(total);
    Ok(outcome)
}

/// Same as [`run_coloring`] on an already loaded instance.
pub fn color_instance(cfg: &RunConfig, instance: &Instance) -> Result<RunOutcome> {
    color_instance_with(cfg, instance, &mut NoObserver)
}

pub fn color_instance_with(
    cfg: &RunConfig,
    instance: &Instance,
    observer: &mut dyn RoundObserver,
) -> Result<RunOutcome> {
    let total = Instant::now();
    let algorithm = cfg.algorithm()?;
    if cfg.ranks == 0 {
        return Err(Error::Config("ranks must be at least 1".into()));
    }
    let g = &instance.graph;

    let t = Instant::now();
    let pm = cfg.partition.apply(g, cfg.ranks, cfg.seed)?;
    let world = build_local_graphs(g, &pm, cfg.mode.ghost_layers())?;
    let setup_ms = ms(t);

    let run = run_distributed_with(&world, &algorithm, observer)?;

    let t = Instant::now();
    let partial_sources = match (cfg.mode, cfg.partial_count) {
        (Mode::PD2, true) => instance.num_sources,
        _ => None,
    };
    let violations = match (cfg.mode, partial_sources) {
        (Mode::D1 | Mode::D1TwoGhostLayers, _) => verify_d1(g, &run.coloring)?,
        (Mode::D2, _) => verify_d2(g, &run.coloring, false)?,
        (Mode::PD2, Some(s)) => verify_pd2_sources(g, &run.coloring, s)?,
        (Mode::PD2, None) => verify_d2(g, &run.coloring, true)?,
    };
    let verify_ms = ms(t);
    let counted = &run.coloring[..partial_sources.unwrap_or(g.num_vertices())];

    let sum = |f: fn(&RoundReport) -> f64| run.rounds.iter().map(f).sum::<f64>();
    let times = PhaseTimes {
        load_ms: 0.0,
        setup_ms,
        color_ms: sum(|r| r.color_ms),
        comm_ms: sum(|r| r.comm_ms),
        detect_ms: sum(|r| r.detect_ms),
        verify_ms,
        total_ms: ms(total),
    };
    let record = RunRecord {
        config: cfg.clone(),
        graph: stats(g),
        partition: PartitionSummary {
            edge_cut: pm.edge_cut(g),
            endpoint_imbalance: pm.endpoint_imbalance(g),
        },
        kernel: run.kernel,
        num_rounds: run.rounds.len(),
        colors: color_stats(counted).num_colors,
        max_color: counted.iter().copied().max().unwrap_or(0),
        recolored_total: run
            .rounds
            .iter()
            .skip(1)
            .map(RoundReport::recolored_total)
            .sum(),
        bytes_sent: run.rounds.iter().map(|r| r.bytes_sent).sum(),
        messages_sent: run.rounds.iter().map(|r| r.messages_sent).sum(),
        setup_bytes: run.setup.bytes,
        rounds: run.rounds,
        times,
        verification: Verification::from_violations(violations),
    };
    Ok(RunOutcome {
        record,
        coloring: run.coloring,
    })
}
