//! Multi-source epistemic stance graphs: extraction, prediction, crowd
//! aggregation, evaluation statistics and corpus analytics.

pub mod analytics;
pub mod cli;
pub mod error;
pub mod extract;
pub mod graph;
pub mod ingest;
pub mod label;
pub mod mace;
pub mod predict;
pub mod stats;

pub use error::{Error, Result};
pub use graph::{build_graph, EventRef, SentenceGraph, SourceRef, StanceTuple, Token};
pub use label::{coarsen, coarsen_dist, CoarseDistribution, CoarseLabel, StanceDistribution, StanceLabel};
