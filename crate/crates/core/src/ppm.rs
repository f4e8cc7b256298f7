//! Seeded planted-partition graph generation.
//!
//! The model places `clusters * cluster_size` vertices into equal-size
//! clusters and draws each vertex pair independently: intra-cluster pairs
//! with probability `p_intra`, inter-cluster pairs with `p_inter`.
//!
//! Generation walks every pair once in lexicographic `(min, max)` order and
//! consumes exactly one draw from a single PCG-64 stream seeded with
//! `params.seed`, so identical parameters reproduce identical edge sets on
//! every run and thread count.

use rand::{RngExt, SeedableRng};
use rand_pcg::Pcg64;
use thiserror::Error;

use crate::graph::{Graph, VertexId};

/// Hard cap on generated vertices; pair enumeration is quadratic.
pub const MAX_VERTICES: usize = 1 << 16;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PpmParams {
    pub clusters: usize,
    pub cluster_size: usize,
    pub p_intra: f64,
    pub p_inter: f64,
    pub seed: u64,
}

#[derive(Debug, Error, PartialEq)]
pub enum PpmError {
    #[error("{name} = {value} is not a probability in [0, 1]")]
    InvalidProbability { name: &'static str, value: f64 },
    #[error("clusters and cluster_size must both be at least 1")]
    EmptyModel,
    #[error("{requested} vertices exceed the generator limit of {limit}")]
    TooManyVertices { requested: usize, limit: usize },
}

impl PpmParams {
    pub fn vertex_count(&self) -> usize {
        self.clusters * self.cluster_size
    }

    fn validate(&self) -> Result<(), PpmError> {
        for (name, value) in [("p_intra", self.p_intra), ("p_inter", self.p_inter)] {
            if !(0.0..=1.0).contains(&value) {
                return Err(PpmError::InvalidProbability { name, value });
            }
        }
        if self.clusters == 0 || self.cluster_size == 0 {
            return Err(PpmError::EmptyModel);
        }
        let requested = self.clusters.saturating_mul(self.cluster_size);
        if requested > MAX_VERTICES {
            return Err(PpmError::TooManyVertices {
                requested,
                limit: MAX_VERTICES,
            });
        }
        Ok(())
    }
}

/// Ground-truth vertex labeling with a per-cluster member index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClusterAssignment {
    labels: Vec<usize>,
    members: Vec<Vec<VertexId>>,
}

impl ClusterAssignment {
    /// Builds the member index from per-vertex labels. The cluster count is
    /// `max(label) + 1`; labels need not be contiguous, but gaps produce
    /// empty clusters that downstream metrics will reject.
    pub fn from_labels(labels: Vec<usize>) -> Self {
        let cluster_count = labels.iter().max().map_or(0, |&m| m + 1);
        let mut members = vec![Vec::new(); cluster_count];
        for (vertex, &label) in labels.iter().enumerate() {
            members[label].push(vertex);
        }
        Self { labels, members }
    }

    pub fn vertex_count(&self) -> usize {
        self.labels.len()
    }

    pub fn cluster_count(&self) -> usize {
        self.members.len()
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn label(&self, v: VertexId) -> usize {
        self.labels[v]
    }

    /// Sorted members of one cluster.
    pub fn members(&self, cluster: usize) -> &[VertexId] {
        &self.members[cluster]
    }

    pub fn clusters(&self) -> impl Iterator<Item = (usize, &[VertexId])> {
        self.members
            .iter()
            .enumerate()
            .map(|(id, m)| (id, m.as_slice()))
    }
}

/// Generates one planted-partition graph and its ground-truth assignment.
pub fn generate(params: &PpmParams) -> Result<(Graph, ClusterAssignment), PpmError> {
    params.validate()?;
    let n = params.vertex_count();
    let size = params.cluster_size;

    let (expected_intra, expected_inter) = expected_edge_counts(params);
    let mut edges: Vec<(VertexId, VertexId)> =
        Vec::with_capacity((expected_intra + expected_inter) as usize + 1024);

    let mut rng = Pcg64::seed_from_u64(params.seed);
    for u in 0..n {
        for v in u + 1..n {
            let p = if u / size == v / size {
                params.p_intra
            } else {
                params.p_inter
            };
            // random::<f64>() is uniform on [0, 1), so p = 0 never fires and
            // p = 1 always does.
            if rng.random::<f64>() < p {
                edges.push((u, v));
            }
        }
    }

    let graph = Graph::from_edges(n, edges).expect("generated pairs are in range and loop-free");
    let labels = (0..n).map(|v| v / size).collect();
    Ok((graph, ClusterAssignment::from_labels(labels)))
}

/// Closed-form expected intra- and inter-cluster edge counts.
pub fn expected_edge_counts(params: &PpmParams) -> (f64, f64) {
    let k = params.clusters as f64;
    let size = params.cluster_size as f64;
    let n = k * size;
    let intra_pairs = k * size * (size - 1.0) / 2.0;
    let total_pairs = n * (n - 1.0) / 2.0;
    (
        intra_pairs * params.p_intra,
        (total_pairs - intra_pairs) * params.p_inter,
    )
}

/// Diagnostic rates for how inter-cluster wiring inflates neighborhoods: a
/// vertex's mean degree grows by `2 * p_inter * (|V| - n_k)` while a pair's
/// mean shared-neighbor count only grows by `p_inter^2 * (|V| - n_k)`. The
/// gap between the two is what pushes Jaccard and Otsuka-Ochiai distances
/// toward 1 as inter-cluster connectivity rises.
pub fn expected_neighborhood_growth(params: &PpmParams) -> (f64, f64) {
    let outside = (params.vertex_count() - params.cluster_size) as f64;
    let degree_rate = 2.0 * params.p_inter * outside;
    let shared_rate = params.p_inter * params.p_inter * outside;
    (degree_rate, shared_rate)
}
