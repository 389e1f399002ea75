//! Parallel community detection (Louvain, Leiden, label propagation) over
//! interchangeable neighbor-community accumulators: a dense per-worker
//! hashtable, a reduced mod-indexed table, a weighted Boyer-Moore vote, or a
//! weighted Misra-Gries sketch whose size does not depend on the graph.

pub mod accumulator;
pub mod bench;
pub mod error;
pub mod generate;
pub mod graph;
pub mod leiden;
pub mod louvain;
pub mod lpa;
pub mod parallel;
pub mod quality;
mod scan;

pub use accumulator::{AccumulatorStrategy, NeighborAccumulator, SubtractionPolicy};
pub use error::{Error, Result};
pub use graph::{Graph, VertexId};
pub use leiden::detect_leiden;
pub use louvain::{detect_louvain, Detection, LeidenConfig, LouvainConfig, PassTrace};
pub use lpa::{detect_lpa, LpaConfig};
pub use quality::{delta_modularity, modularity, CommunityAssignment};
