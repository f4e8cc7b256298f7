//! Vertex-to-vertex distances derived from shared connectivity.
//!
//! Two vertices are close when they share many neighbors, independent of
//! whether they are themselves adjacent; this is similarity, not geodesic
//! distance. With `c_v` the open neighborhood of `v`:
//!
//! - Jaccard: `1 - |c_u ∩ c_v| / |c_u ∪ c_v|`, in `[0, 1]`
//! - Otsuka-Ochiai: `1 - |c_u ∩ c_v| / sqrt(|c_u| * |c_v|)`, in `[0, 1]`
//! - Burt: euclidean distance between the two adjacency rows over all
//!   coordinates except `u` and `v` themselves, in `[0, sqrt(|V| - 2)]`
//!
//! A worked example, two triangles `{0,1,2}` and `{3,4,5}` bridged by the
//! edge `(2,3)`: vertex 2 is equally far from 0 and 3 along shortest paths,
//! but shares a neighbor with 0 and nothing with 3.
//!
//! ```
//! use graphdist::{Graph, distance::{jaccard, otsuka_ochiai, burt}};
//!
//! let g = Graph::from_edges(6, [(0,1),(0,2),(1,2),(2,3),(3,4),(3,5),(4,5)]).unwrap();
//! assert_eq!(jaccard(&g, 2, 0), 0.75);
//! assert_eq!(jaccard(&g, 2, 3), 1.0);
//! assert_eq!(burt(&g, 0, 2), 1.0);
//! assert_eq!(burt(&g, 2, 3), 2.0);
//! assert!(otsuka_ochiai(&g, 2, 0) < otsuka_ochiai(&g, 2, 3));
//! ```
//!
//! When both neighborhoods are empty the sets are identical and Jaccard and
//! Otsuka-Ochiai are defined as 0; when exactly one is empty there is no
//! overlap and both are 1. Burt's sum needs no convention.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::graph::{Graph, VertexId};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DistanceMeasure {
    Jaccard,
    OtsukaOchiai,
    Burt,
}

impl DistanceMeasure {
    pub const ALL: [DistanceMeasure; 3] = [
        DistanceMeasure::Jaccard,
        DistanceMeasure::OtsukaOchiai,
        DistanceMeasure::Burt,
    ];

    pub fn name(self) -> &'static str {
        match self {
            DistanceMeasure::Jaccard => "jaccard",
            DistanceMeasure::OtsukaOchiai => "otoc",
            DistanceMeasure::Burt => "burt",
        }
    }
}

impl fmt::Display for DistanceMeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("unknown distance measure `{0}`; expected jaccard, otoc or burt")]
pub struct ParseMeasureError(String);

impl FromStr for DistanceMeasure {
    type Err = ParseMeasureError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "jaccard" => Ok(DistanceMeasure::Jaccard),
            "otoc" | "otsuka-ochiai" | "ochiai" => Ok(DistanceMeasure::OtsukaOchiai),
            "burt" => Ok(DistanceMeasure::Burt),
            other => Err(ParseMeasureError(other.to_string())),
        }
    }
}

/// One evaluated pair, in the order it was requested.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PairDistance {
    pub u: VertexId,
    pub v: VertexId,
    pub value: f64,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DistanceError {
    #[error("pair ({u}, {v}) references a vertex outside the graph's {vertex_count} vertices")]
    PairOutOfRange {
        u: VertexId,
        v: VertexId,
        vertex_count: usize,
    },
}

// The three kernels below receive pre-merged set cardinalities so cluster
// aggregation can share one neighbor-list merge per pair. Single-division
// forms keep closed-form cases (cliques, twins) exact in f64.

pub(crate) fn jaccard_from_parts(deg_u: usize, deg_v: usize, common: usize) -> f64 {
    let union = deg_u + deg_v - common;
    if union == 0 {
        return 0.0; // both neighborhoods empty: identical sets
    }
    (union - common) as f64 / union as f64
}

pub(crate) fn otoc_from_parts(deg_u: usize, deg_v: usize, common: usize) -> f64 {
    if deg_u == 0 && deg_v == 0 {
        return 0.0;
    }
    if deg_u == 0 || deg_v == 0 {
        return 1.0;
    }
    let geo_mean = ((deg_u as u64 * deg_v as u64) as f64).sqrt();
    (geo_mean - common as f64) / geo_mean
}

pub(crate) fn burt_from_parts(deg_u: usize, deg_v: usize, common: usize, adjacent: bool) -> f64 {
    // |c_u Δ c_v| minus the coordinates u and v themselves, which sit in the
    // symmetric difference exactly when the edge (u, v) exists.
    let mut sym_diff = deg_u + deg_v - 2 * common;
    if adjacent {
        sym_diff -= 2;
    }
    (sym_diff as f64).sqrt()
}

/// Jaccard distance `1 - |c_u ∩ c_v| / |c_u ∪ c_v|`.
pub fn jaccard(g: &Graph, u: VertexId, v: VertexId) -> f64 {
    jaccard_from_parts(g.degree(u), g.degree(v), g.common_neighbor_count(u, v))
}

/// Otsuka-Ochiai distance `1 - |c_u ∩ c_v| / sqrt(|c_u| * |c_v|)`.
pub fn otsuka_ochiai(g: &Graph, u: VertexId, v: VertexId) -> f64 {
    otoc_from_parts(g.degree(u), g.degree(v), g.common_neighbor_count(u, v))
}

/// Burt's distance, the root of `sum_{k != u,v} (A_uk - A_vk)^2`, computed
/// through the sparse identity `sqrt(|c_u Δ c_v| - 2*A_uv)` in
/// O(deg(u) + deg(v)).
pub fn burt(g: &Graph, u: VertexId, v: VertexId) -> f64 {
    burt_from_parts(
        g.degree(u),
        g.degree(v),
        g.common_neighbor_count(u, v),
        g.has_edge(u, v),
    )
}

pub fn distance(g: &Graph, measure: DistanceMeasure, u: VertexId, v: VertexId) -> f64 {
    match measure {
        DistanceMeasure::Jaccard => jaccard(g, u, v),
        DistanceMeasure::OtsukaOchiai => otsuka_ochiai(g, u, v),
        DistanceMeasure::Burt => burt(g, u, v),
    }
}

fn validate_pairs(g: &Graph, pairs: &[(VertexId, VertexId)]) -> Result<(), DistanceError> {
    let n = g.vertex_count();
    for &(u, v) in pairs {
        if u >= n || v >= n {
            return Err(DistanceError::PairOutOfRange {
                u,
                v,
                vertex_count: n,
            });
        }
    }
    Ok(())
}

/// Evaluates `measure` over the requested pairs, preserving input order.
///
/// Pairs are independent, so with the `parallel` feature they are spread
/// across the rayon pool; values are identical either way.
pub fn pairwise(
    g: &Graph,
    measure: DistanceMeasure,
    pairs: &[(VertexId, VertexId)],
) -> Result<Vec<PairDistance>, DistanceError> {
    validate_pairs(g, pairs)?;
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        Ok(pairs
            .par_iter()
            .map(|&(u, v)| PairDistance {
                u,
                v,
                value: distance(g, measure, u, v),
            })
            .collect())
    }
    #[cfg(not(feature = "parallel"))]
    {
        Ok(evaluate_pairs(g, measure, pairs))
    }
}

/// Sequential twin of [`pairwise`]; mainly useful for benchmarking the
/// parallel path against a single-thread baseline.
pub fn pairwise_seq(
    g: &Graph,
    measure: DistanceMeasure,
    pairs: &[(VertexId, VertexId)],
) -> Result<Vec<PairDistance>, DistanceError> {
    validate_pairs(g, pairs)?;
    Ok(evaluate_pairs(g, measure, pairs))
}

fn evaluate_pairs(
    g: &Graph,
    measure: DistanceMeasure,
    pairs: &[(VertexId, VertexId)],
) -> Vec<PairDistance> {
    pairs
        .iter()
        .map(|&(u, v)| PairDistance {
            u,
            v,
            value: distance(g, measure, u, v),
        })
        .collect()
}
