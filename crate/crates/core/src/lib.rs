//! Connectivity-based vertex distances for sparse graphs, cluster-level
//! density metrics, and a reproducible planted-partition benchmark harness.
//!
//! Vertices that share many neighbors are treated as close. The crate
//! provides three pairwise distances built on that idea (Jaccard,
//! Otsuka-Ochiai and Burt), aggregates them over ground-truth clusters, and
//! correlates the cluster means against intra-cluster density on seeded
//! planted-partition graphs.
//!
//! ```
//! use graphdist::{cluster, distance::DistanceMeasure, ppm};
//!
//! let params = ppm::PpmParams {
//!     clusters: 4,
//!     cluster_size: 10,
//!     p_intra: 0.9,
//!     p_inter: 0.05,
//!     seed: 42,
//! };
//! let (graph, assignment) = ppm::generate(&params).unwrap();
//! let summaries = cluster::cluster_summaries(&graph, &assignment).unwrap();
//! assert_eq!(summaries.len(), 4);
//! assert!(summaries.iter().all(|s| s.mean_jaccard <= 1.0));
//! ```
//!
//! The `parallel` feature (enabled by default) runs pair evaluation,
//! cluster summaries and experiment units on the rayon thread pool.
//! Disabling it leaves a dependency-light sequential build with identical
//! results; the `*_seq` variants expose the sequential paths directly for
//! comparison.

#[cfg(feature = "parallel")]
pub use rayon;

pub mod cluster;
pub mod distance;
pub mod experiment;
pub mod graph;
pub mod io;
pub mod ppm;
pub mod report;
pub mod stats;
mod sum;

pub use cluster::{ClusterSummary, DistanceMeans, MetricsError};
pub use distance::{DistanceMeasure, PairDistance};
pub use graph::{Graph, GraphError, VertexId};
pub use ppm::{ClusterAssignment, PpmParams};
pub use stats::{CorrelationResult, PoolingMode};
