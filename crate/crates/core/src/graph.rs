//! Immutable undirected simple graph stored as sorted compressed adjacency.
//!
//! Every vertex owns a sorted list of its open neighborhood (the vertex
//! itself never appears in its own list). The structure is immutable after
//! construction and safe to read from any number of threads.

use thiserror::Error;

/// Dense 0-based vertex index. Valid values are `0..vertex_count` of the
/// owning graph.
pub type VertexId = usize;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("edge ({u}, {v}) references vertex {worst} but the graph has {vertex_count} vertices")]
    EndpointOutOfRange {
        u: VertexId,
        v: VertexId,
        worst: VertexId,
        vertex_count: usize,
    },
    #[error("self-loop ({0}, {0}) is not allowed")]
    SelfLoop(VertexId),
}

/// Undirected simple graph in compressed sparse row form.
///
/// Invariants maintained by construction:
/// - no self-loops,
/// - neighbor lists strictly increasing (no parallel edges),
/// - adjacency is symmetric, and the list lengths sum to `2 * edge_count`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    offsets: Vec<usize>,
    adjacency: Vec<VertexId>,
    edge_count: usize,
}

impl Graph {
    /// Builds a graph from unordered vertex pairs.
    ///
    /// Duplicate pairs collapse to a single edge; a self-loop or an endpoint
    /// `>= vertex_count` is rejected.
    pub fn from_edges(
        vertex_count: usize,
        edges: impl IntoIterator<Item = (VertexId, VertexId)>,
    ) -> Result<Self, GraphError> {
        let mut pairs: Vec<(VertexId, VertexId)> = Vec::new();
        for (u, v) in edges {
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            let worst = u.max(v);
            if worst >= vertex_count {
                return Err(GraphError::EndpointOutOfRange {
                    u,
                    v,
                    worst,
                    vertex_count,
                });
            }
            pairs.push((u.min(v), u.max(v)));
        }
        pairs.sort_unstable();
        pairs.dedup();

        let mut degree = vec![0usize; vertex_count];
        for &(u, v) in &pairs {
            degree[u] += 1;
            degree[v] += 1;
        }
        let mut offsets = Vec::with_capacity(vertex_count + 1);
        let mut acc = 0usize;
        offsets.push(0);
        for &d in &degree {
            acc += d;
            offsets.push(acc);
        }
        let mut cursor = offsets.clone();
        let mut adjacency = vec![0 as VertexId; acc];
        // Pairs come sorted by (min, max), so each row receives its
        // below-diagonal neighbors in order first and then its
        // above-diagonal neighbors in order; every row ends up sorted.
        for &(u, v) in &pairs {
            adjacency[cursor[u]] = v;
            cursor[u] += 1;
            adjacency[cursor[v]] = u;
            cursor[v] += 1;
        }
        Ok(Self {
            offsets,
            adjacency,
            edge_count: pairs.len(),
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    /// Sorted open neighborhood of `v`. Borrowed view, no allocation.
    ///
    /// Panics if `v` is out of range.
    pub fn neighbors(&self, v: VertexId) -> &[VertexId] {
        &self.adjacency[self.offsets[v]..self.offsets[v + 1]]
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    pub fn has_edge(&self, u: VertexId, v: VertexId) -> bool {
        self.neighbors(u).binary_search(&v).is_ok()
    }

    /// `|c_u ∩ c_v|` by linear merge of the two sorted neighbor lists,
    /// O(deg(u) + deg(v)).
    pub fn common_neighbor_count(&self, u: VertexId, v: VertexId) -> usize {
        let a = self.neighbors(u);
        let b = self.neighbors(v);
        let (mut i, mut j, mut count) = (0, 0, 0);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    count += 1;
                    i += 1;
                    j += 1;
                }
            }
        }
        count
    }

    pub fn vertices(&self) -> std::ops::Range<VertexId> {
        0..self.vertex_count()
    }

    /// All edges as `(u, v)` with `u < v`, ascending.
    pub fn edges(&self) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        self.vertices().flat_map(move |u| {
            self.neighbors(u)
                .iter()
                .copied()
                .skip_while(move |&v| v < u)
                .map(move |v| (u, v))
        })
    }
}

#[cfg(test)]
pub(crate) fn two_triangle_graph() -> Graph {
    // Two triangles {0,1,2} and {3,4,5} bridged by the edge (2,3).
    Graph::from_edges(6, [(0, 1), (0, 2), (1, 2), (2, 3), (3, 4), (3, 5), (4, 5)]).unwrap()
}
