//! Distributed-memory speculative graph coloring.
//!
//! Ranks are simulated in-process: each owns a [`LocalGraph`] with one or two
//! ghost layers, colors it with an on-rank kernel, exchanges boundary colors,
//! and repairs cross-rank conflicts until a global allreduce reports none.
//! Distance-1, distance-1 with two ghost layers, distance-2 and partial
//! distance-2 colorings are supported.

pub mod error;
pub mod graph;
pub mod localcolor;
pub mod partition;
pub mod protocol;
pub mod record;
pub mod runtime;
pub mod verify;

pub use error::{Error, Result};
pub use graph::{BipartiteGraph, DirectedGraph, Graph, GraphStats};
pub use localcolor::{Color, Coloring, Kernel, KernelChoice, UNCOLORED};
pub use partition::PartitionMap;
pub use protocol::{AlgorithmConfig, DistributedColoring, Mode, RoundReport};
pub use record::{RunConfig, RunRecord};
pub use runtime::{LocalGraph, RankWorld};
pub use verify::Violation;
