//! Cluster-level aggregation: intra-cluster density, mean intra-cluster
//! distances, and graph-wide mean distances.
//!
//! Everything here is a pure read of an immutable [`Graph`], so per-cluster
//! summaries and per-row partial sums parallelize freely; partials are joined
//! in a fixed order so results do not depend on scheduling or thread count.

use rand::SeedableRng;
use rand_pcg::Pcg64;
use thiserror::Error;

use crate::distance::{burt_from_parts, jaccard_from_parts, otoc_from_parts, DistanceMeasure};
use crate::graph::{Graph, VertexId};
use crate::ppm::ClusterAssignment;
use crate::sum::CompensatedSum;

#[derive(Debug, Error, PartialEq)]
pub enum MetricsError {
    #[error("need at least 2 members, got {0}")]
    TooFewMembers(usize),
    #[error("cluster {cluster_id} has {size} members; every cluster needs at least 2")]
    ClusterTooSmall { cluster_id: usize, size: usize },
    #[error("member list names vertex {0} more than once")]
    DuplicateMember(VertexId),
    #[error("vertex {vertex} out of range; the graph has {vertex_count} vertices")]
    VertexOutOfRange {
        vertex: VertexId,
        vertex_count: usize,
    },
    #[error("assignment labels {assignment} vertices but the graph has {graph}")]
    AssignmentMismatch { assignment: usize, graph: usize },
    #[error("graph has {0} vertices; need at least 2 for pair statistics")]
    GraphTooSmall(usize),
    #[error("pair budget {budget} exceeds the {available} distinct vertex pairs")]
    BudgetTooLarge { budget: usize, available: usize },
    #[error("pair budget must be at least 1")]
    EmptyBudget,
}

/// Per-cluster aggregate: realized density plus the mean of each distance
/// over all unordered member pairs.
#[derive(Clone, Debug, PartialEq)]
pub struct ClusterSummary {
    pub cluster_id: usize,
    pub size: usize,
    pub intra_edges: usize,
    pub density: f64,
    pub mean_jaccard: f64,
    pub mean_otoc: f64,
    pub mean_burt: f64,
}

/// The three distance means of one population of pairs.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DistanceMeans {
    pub jaccard: f64,
    pub otoc: f64,
    pub burt: f64,
}

impl DistanceMeans {
    pub fn get(&self, measure: DistanceMeasure) -> f64 {
        match measure {
            DistanceMeasure::Jaccard => self.jaccard,
            DistanceMeasure::OtsukaOchiai => self.otoc,
            DistanceMeasure::Burt => self.burt,
        }
    }
}

/// Checks membership preconditions and returns the members sorted; the
/// canonical order makes every aggregate independent of input permutation.
fn validated_sorted(g: &Graph, members: &[VertexId]) -> Result<Vec<VertexId>, MetricsError> {
    if members.len() < 2 {
        return Err(MetricsError::TooFewMembers(members.len()));
    }
    let n = g.vertex_count();
    let mut sorted = members.to_vec();
    sorted.sort_unstable();
    for w in sorted.windows(2) {
        if w[0] == w[1] {
            return Err(MetricsError::DuplicateMember(w[0]));
        }
    }
    if let Some(&last) = sorted.last() {
        if last >= n {
            return Err(MetricsError::VertexOutOfRange {
                vertex: last,
                vertex_count: n,
            });
        }
    }
    Ok(sorted)
}

/// Counts edges with both endpoints in `sorted_members` (each edge once).
fn count_intra_edges(g: &Graph, sorted_members: &[VertexId]) -> usize {
    let mut edges = 0;
    for &u in sorted_members {
        // Merge u's sorted neighbor list against the sorted member list,
        // counting only neighbors above u so each edge is seen once.
        let nbrs = g.neighbors(u);
        let (mut i, mut j) = (0, 0);
        while i < nbrs.len() && j < sorted_members.len() {
            match nbrs[i].cmp(&sorted_members[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    if nbrs[i] > u {
                        edges += 1;
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
    }
    edges
}

/// Intra-cluster edge count and density `|E_kk| / C(n_k, 2)`.
pub fn intra_cluster_density(
    g: &Graph,
    members: &[VertexId],
) -> Result<(usize, f64), MetricsError> {
    let sorted = validated_sorted(g, members)?;
    let edges = count_intra_edges(g, &sorted);
    let possible = sorted.len() * (sorted.len() - 1) / 2;
    Ok((edges, edges as f64 / possible as f64))
}

struct PairAggregate {
    intra_edges: usize,
    jaccard: CompensatedSum,
    otoc: CompensatedSum,
    burt: CompensatedSum,
}

/// One intersection per pair feeds all three distances and the edge count.
fn aggregate_pairs(
    g: &Graph,
    bit_rows: Option<&BitRows>,
    sorted_members: &[VertexId],
) -> PairAggregate {
    let mut agg = PairAggregate {
        intra_edges: 0,
        jaccard: CompensatedSum::new(),
        otoc: CompensatedSum::new(),
        burt: CompensatedSum::new(),
    };
    for (i, &u) in sorted_members.iter().enumerate() {
        for &v in &sorted_members[i + 1..] {
            let (common, adjacent) = match bit_rows {
                Some(rows) => (rows.common(u, v), rows.has_edge(u, v)),
                None => (g.common_neighbor_count(u, v), g.has_edge(u, v)),
            };
            let (du, dv) = (g.degree(u), g.degree(v));
            if adjacent {
                agg.intra_edges += 1;
            }
            agg.jaccard.add(jaccard_from_parts(du, dv, common));
            agg.otoc.add(otoc_from_parts(du, dv, common));
            agg.burt.add(burt_from_parts(du, dv, common, adjacent));
        }
    }
    agg
}

/// Arithmetic mean of `measure` over all unordered member pairs.
pub fn mean_intra_cluster_distance(
    g: &Graph,
    members: &[VertexId],
    measure: DistanceMeasure,
) -> Result<f64, MetricsError> {
    let sorted = validated_sorted(g, members)?;
    let agg = aggregate_pairs(g, None, &sorted);
    let pairs = (sorted.len() * (sorted.len() - 1) / 2) as f64;
    let sum = match measure {
        DistanceMeasure::Jaccard => agg.jaccard,
        DistanceMeasure::OtsukaOchiai => agg.otoc,
        DistanceMeasure::Burt => agg.burt,
    };
    Ok(sum.total() / pairs)
}

fn summarize_cluster(
    g: &Graph,
    bit_rows: Option<&BitRows>,
    cluster_id: usize,
    members: &[VertexId],
) -> Result<ClusterSummary, MetricsError> {
    // Members from a ClusterAssignment are already sorted, distinct and in
    // range; re-validating keeps the function safe for ad-hoc callers.
    let sorted = validated_sorted(g, members).map_err(|e| match e {
        MetricsError::TooFewMembers(size) => MetricsError::ClusterTooSmall { cluster_id, size },
        other => other,
    })?;
    let agg = aggregate_pairs(g, bit_rows, &sorted);
    let size = sorted.len();
    let pairs = (size * (size - 1) / 2) as f64;
    Ok(ClusterSummary {
        cluster_id,
        size,
        intra_edges: agg.intra_edges,
        density: agg.intra_edges as f64 / pairs,
        mean_jaccard: agg.jaccard.total() / pairs,
        mean_otoc: agg.otoc.total() / pairs,
        mean_burt: agg.burt.total() / pairs,
    })
}

fn check_assignment(g: &Graph, assignment: &ClusterAssignment) -> Result<(), MetricsError> {
    if assignment.vertex_count() != g.vertex_count() {
        return Err(MetricsError::AssignmentMismatch {
            assignment: assignment.vertex_count(),
            graph: g.vertex_count(),
        });
    }
    Ok(())
}

/// One [`ClusterSummary`] per cluster, in cluster-id order.
pub fn cluster_summaries(
    g: &Graph,
    assignment: &ClusterAssignment,
) -> Result<Vec<ClusterSummary>, MetricsError> {
    check_assignment(g, assignment)?;
    let bit_rows = (g.vertex_count() <= BITSET_MAX_VERTICES).then(|| BitRows::build(g));
    let bit_rows = bit_rows.as_ref();
    #[cfg(feature = "parallel")]
    let results: Vec<Result<ClusterSummary, MetricsError>> = {
        use rayon::prelude::*;
        (0..assignment.cluster_count())
            .into_par_iter()
            .map(|c| summarize_cluster(g, bit_rows, c, assignment.members(c)))
            .collect()
    };
    #[cfg(not(feature = "parallel"))]
    let results: Vec<Result<ClusterSummary, MetricsError>> = (0..assignment.cluster_count())
        .map(|c| summarize_cluster(g, bit_rows, c, assignment.members(c)))
        .collect();
    results.into_iter().collect()
}

/// Single-thread twin of [`cluster_summaries`].
pub fn cluster_summaries_seq(
    g: &Graph,
    assignment: &ClusterAssignment,
) -> Result<Vec<ClusterSummary>, MetricsError> {
    check_assignment(g, assignment)?;
    let bit_rows = (g.vertex_count() <= BITSET_MAX_VERTICES).then(|| BitRows::build(g));
    (0..assignment.cluster_count())
        .map(|c| summarize_cluster(g, bit_rows.as_ref(), c, assignment.members(c)))
        .collect()
}

struct RowSums {
    jaccard: CompensatedSum,
    otoc: CompensatedSum,
    burt: CompensatedSum,
}

/// Cap on packed-adjacency size for the all-pairs kernel: graphs up to here
/// (8 MiB of row bits) intersect neighborhoods with word-wide popcounts;
/// larger graphs fall back to sorted-list merges.
const BITSET_MAX_VERTICES: usize = 1 << 13;

/// Row-major packed adjacency for popcount intersections. Same counts as the
/// sorted-list merge, only batched 64 coordinates at a time.
struct BitRows {
    words_per_row: usize,
    bits: Vec<u64>,
}

impl BitRows {
    fn build(g: &Graph) -> Self {
        let n = g.vertex_count();
        let words_per_row = n.div_ceil(64);
        let mut bits = vec![0u64; n * words_per_row];
        for u in 0..n {
            let row = &mut bits[u * words_per_row..(u + 1) * words_per_row];
            for &v in g.neighbors(u) {
                row[v / 64] |= 1 << (v % 64);
            }
        }
        Self {
            words_per_row,
            bits,
        }
    }

    fn row(&self, u: VertexId) -> &[u64] {
        &self.bits[u * self.words_per_row..(u + 1) * self.words_per_row]
    }

    fn common(&self, u: VertexId, v: VertexId) -> usize {
        self.row(u)
            .iter()
            .zip(self.row(v))
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    fn has_edge(&self, u: VertexId, v: VertexId) -> bool {
        self.row(u)[v / 64] >> (v % 64) & 1 == 1
    }
}

/// Sums all three distances over pairs `(u, v)` with `v > u`.
fn row_sums(g: &Graph, bit_rows: Option<&BitRows>, u: VertexId) -> RowSums {
    let mut row = RowSums {
        jaccard: CompensatedSum::new(),
        otoc: CompensatedSum::new(),
        burt: CompensatedSum::new(),
    };
    let du = g.degree(u);
    for v in u + 1..g.vertex_count() {
        let (common, adjacent) = match bit_rows {
            Some(rows) => (rows.common(u, v), rows.has_edge(u, v)),
            None => (g.common_neighbor_count(u, v), g.has_edge(u, v)),
        };
        let dv = g.degree(v);
        row.jaccard.add(jaccard_from_parts(du, dv, common));
        row.otoc.add(otoc_from_parts(du, dv, common));
        row.burt.add(burt_from_parts(du, dv, common, adjacent));
    }
    row
}

fn combine_rows(rows: Vec<RowSums>, pair_count: f64) -> DistanceMeans {
    let mut jaccard = CompensatedSum::new();
    let mut otoc = CompensatedSum::new();
    let mut burt = CompensatedSum::new();
    for row in rows {
        jaccard.merge(row.jaccard);
        otoc.merge(row.otoc);
        burt.merge(row.burt);
    }
    DistanceMeans {
        jaccard: jaccard.total() / pair_count,
        otoc: otoc.total() / pair_count,
        burt: burt.total() / pair_count,
    }
}

fn exact_global_means(g: &Graph) -> DistanceMeans {
    let n = g.vertex_count();
    let pair_count = (n * (n - 1) / 2) as f64;
    let bit_rows = (n <= BITSET_MAX_VERTICES).then(|| BitRows::build(g));
    let bit_rows = bit_rows.as_ref();
    #[cfg(feature = "parallel")]
    let rows: Vec<RowSums> = {
        use rayon::prelude::*;
        (0..n)
            .into_par_iter()
            .map(|u| row_sums(g, bit_rows, u))
            .collect()
    };
    #[cfg(not(feature = "parallel"))]
    let rows: Vec<RowSums> = (0..n).map(|u| row_sums(g, bit_rows, u)).collect();
    combine_rows(rows, pair_count)
}

fn exact_global_means_seq(g: &Graph) -> DistanceMeans {
    let n = g.vertex_count();
    let pair_count = (n * (n - 1) / 2) as f64;
    let bit_rows = (n <= BITSET_MAX_VERTICES).then(|| BitRows::build(g));
    let rows: Vec<RowSums> = (0..n).map(|u| row_sums(g, bit_rows.as_ref(), u)).collect();
    combine_rows(rows, pair_count)
}

/// Number of unordered pairs of `n` vertices.
fn total_pairs(n: usize) -> usize {
    n * (n - 1) / 2
}

/// Maps a linear index in `[0, C(n,2))` to the pair `(u, v)`, `u < v`, in
/// lexicographic order.
fn decode_pair(n: usize, index: usize) -> (VertexId, VertexId) {
    // offset(u) = number of pairs whose first vertex is < u; binary-search
    // the largest u with offset(u) <= index.
    let offset = |u: usize| u * (n - 1) - u * u.saturating_sub(1) / 2;
    let (mut lo, mut hi) = (0usize, n - 1);
    while lo + 1 < hi {
        let mid = (lo + hi) / 2;
        if offset(mid) <= index {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let u = if offset(hi) <= index { hi } else { lo };
    let v = u + 1 + (index - offset(u));
    (u, v)
}

fn sampled_global_means(
    g: &Graph,
    budget: usize,
    seed: u64,
) -> Result<DistanceMeans, MetricsError> {
    let n = g.vertex_count();
    let available = total_pairs(n);
    if budget > available {
        return Err(MetricsError::BudgetTooLarge { budget, available });
    }
    if budget == 0 {
        return Err(MetricsError::EmptyBudget);
    }
    let mut rng = Pcg64::seed_from_u64(seed);
    let mut jaccard = CompensatedSum::new();
    let mut otoc = CompensatedSum::new();
    let mut burt = CompensatedSum::new();
    for index in rand::seq::index::sample(&mut rng, available, budget) {
        let (u, v) = decode_pair(n, index);
        let common = g.common_neighbor_count(u, v);
        let adjacent = g.has_edge(u, v);
        let (du, dv) = (g.degree(u), g.degree(v));
        jaccard.add(jaccard_from_parts(du, dv, common));
        otoc.add(otoc_from_parts(du, dv, common));
        burt.add(burt_from_parts(du, dv, common, adjacent));
    }
    let count = budget as f64;
    Ok(DistanceMeans {
        jaccard: jaccard.total() / count,
        otoc: otoc.total() / count,
        burt: burt.total() / count,
    })
}

/// Mean of each distance over vertex pairs of the whole graph, ignoring any
/// clustering.
///
/// With `pair_budget = None` every one of the `C(|V|, 2)` pairs enters the
/// mean. Otherwise the mean is an estimator over a seeded uniform sample of
/// that many distinct pairs (`seed` defaults to 0).
pub fn global_mean_distances(
    g: &Graph,
    pair_budget: Option<usize>,
    seed: Option<u64>,
) -> Result<DistanceMeans, MetricsError> {
    if g.vertex_count() < 2 {
        return Err(MetricsError::GraphTooSmall(g.vertex_count()));
    }
    match pair_budget {
        None => Ok(exact_global_means(g)),
        Some(budget) => sampled_global_means(g, budget, seed.unwrap_or(0)),
    }
}

/// Single-thread twin of [`global_mean_distances`] (exact mode only).
pub fn global_mean_distances_seq(g: &Graph) -> Result<DistanceMeans, MetricsError> {
    if g.vertex_count() < 2 {
        return Err(MetricsError::GraphTooSmall(g.vertex_count()));
    }
    Ok(exact_global_means_seq(g))
}

/// Convenience wrapper returning only one measure's global mean.
pub fn global_mean_distance(
    g: &Graph,
    measure: DistanceMeasure,
    pair_budget: Option<usize>,
    seed: Option<u64>,
) -> Result<f64, MetricsError> {
    Ok(global_mean_distances(g, pair_budget, seed)?.get(measure))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::two_triangle_graph;
    use crate::ppm::{generate, PpmParams};

    fn clique(n: usize) -> Graph {
        let mut edges = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                edges.push((u, v));
            }
        }
        Graph::from_edges(n, edges).unwrap()
    }

    #[test]
    fn triangle_cluster_density() {
        let g = clique(3);
        assert_eq!(intra_cluster_density(&g, &[0, 1, 2]).unwrap(), (3, 1.0));
    }

    #[test]
    fn edgeless_cluster_density() {
        let g = Graph::from_edges(3, Vec::new()).unwrap();
        assert_eq!(intra_cluster_density(&g, &[0, 1, 2]).unwrap(), (0, 0.0));
    }

    #[test]
    fn k45_cluster_is_exact() {
        let g = clique(45);
        let members: Vec<_> = (0..45).collect();
        assert_eq!(intra_cluster_density(&g, &members).unwrap(), (990, 1.0));
        assert_eq!(
            mean_intra_cluster_distance(&g, &members, DistanceMeasure::Jaccard).unwrap(),
            2.0 / 45.0
        );
        assert_eq!(
            mean_intra_cluster_distance(&g, &members, DistanceMeasure::OtsukaOchiai).unwrap(),
            1.0 / 44.0
        );
        assert_eq!(
            mean_intra_cluster_distance(&g, &members, DistanceMeasure::Burt).unwrap(),
            0.0
        );
    }

    #[test]
    fn singleton_cluster_is_an_error() {
        let g = clique(3);
        assert_eq!(
            mean_intra_cluster_distance(&g, &[1], DistanceMeasure::Jaccard),
            Err(MetricsError::TooFewMembers(1))
        );
    }

    #[test]
    fn duplicate_and_out_of_range_members_rejected() {
        let g = clique(3);
        assert_eq!(
            intra_cluster_density(&g, &[0, 0, 1]),
            Err(MetricsError::DuplicateMember(0))
        );
        assert_eq!(
            intra_cluster_density(&g, &[0, 1, 7]),
            Err(MetricsError::VertexOutOfRange {
                vertex: 7,
                vertex_count: 3
            })
        );
    }

    #[test]
    fn member_order_does_not_matter() {
        let g = two_triangle_graph();
        let a = mean_intra_cluster_distance(&g, &[0, 1, 2], DistanceMeasure::Jaccard).unwrap();
        let b = mean_intra_cluster_distance(&g, &[2, 0, 1], DistanceMeasure::Jaccard).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn two_triangle_summaries() {
        let g = two_triangle_graph();
        let assignment = crate::ppm::ClusterAssignment::from_labels(vec![0, 0, 0, 1, 1, 1]);
        let summaries = cluster_summaries(&g, &assignment).unwrap();
        assert_eq!(summaries.len(), 2);
        for s in &summaries {
            assert_eq!(s.size, 3);
            assert_eq!(s.intra_edges, 3);
            assert_eq!(s.density, 1.0);
        }
    }

    #[test]
    fn empty_cluster_in_assignment_is_reported() {
        let g = clique(4);
        // labels use cluster ids {0, 2}; cluster 1 ends up empty
        let assignment = crate::ppm::ClusterAssignment::from_labels(vec![0, 0, 2, 2]);
        assert_eq!(
            cluster_summaries(&g, &assignment),
            Err(MetricsError::ClusterTooSmall {
                cluster_id: 1,
                size: 0
            })
        );
    }

    #[test]
    fn assignment_size_mismatch_is_reported() {
        let g = clique(4);
        let assignment = crate::ppm::ClusterAssignment::from_labels(vec![0, 0, 1]);
        assert_eq!(
            cluster_summaries(&g, &assignment),
            Err(MetricsError::AssignmentMismatch {
                assignment: 3,
                graph: 4
            })
        );
    }

    #[test]
    fn edgeless_single_cluster_uses_conventions() {
        let g = Graph::from_edges(3, Vec::new()).unwrap();
        let assignment = crate::ppm::ClusterAssignment::from_labels(vec![0, 0, 0]);
        let summaries = cluster_summaries(&g, &assignment).unwrap();
        assert_eq!(summaries[0].density, 0.0);
        assert_eq!(summaries[0].mean_jaccard, 0.0);
        assert_eq!(summaries[0].mean_otoc, 0.0);
        assert_eq!(summaries[0].mean_burt, 0.0);
    }

    #[test]
    fn seq_and_parallel_summaries_agree_bitwise() {
        let params = PpmParams {
            clusters: 8,
            cluster_size: 12,
            p_intra: 0.7,
            p_inter: 0.05,
            seed: 99,
        };
        let (g, assignment) = generate(&params).unwrap();
        let par = cluster_summaries(&g, &assignment).unwrap();
        let seq = cluster_summaries_seq(&g, &assignment).unwrap();
        assert_eq!(par, seq);
    }

    #[test]
    fn shared_edge_only_graph_has_mean_one() {
        let g = Graph::from_edges(2, [(0, 1)]).unwrap();
        let means = global_mean_distances(&g, None, None).unwrap();
        assert_eq!(means.jaccard, 1.0);
        assert_eq!(means.otoc, 1.0);
        assert_eq!(means.burt, 0.0);
    }

    #[test]
    fn global_means_match_seq_bitwise() {
        let params = PpmParams {
            clusters: 4,
            cluster_size: 20,
            p_intra: 0.6,
            p_inter: 0.1,
            seed: 3,
        };
        let (g, _) = generate(&params).unwrap();
        let par = global_mean_distances(&g, None, None).unwrap();
        let seq = global_mean_distances_seq(&g).unwrap();
        assert_eq!(par, seq);
    }

    #[test]
    fn full_budget_sample_matches_exact_mean() {
        let params = PpmParams {
            clusters: 3,
            cluster_size: 10,
            p_intra: 0.8,
            p_inter: 0.2,
            seed: 11,
        };
        let (g, _) = generate(&params).unwrap();
        let n = g.vertex_count();
        let exact = global_mean_distances(&g, None, None).unwrap();
        let sampled = global_mean_distances(&g, Some(n * (n - 1) / 2), Some(5)).unwrap();
        assert!((exact.jaccard - sampled.jaccard).abs() < 1e-12);
        assert!((exact.otoc - sampled.otoc).abs() < 1e-12);
        assert!((exact.burt - sampled.burt).abs() < 1e-12);
    }

    #[test]
    fn oversized_budget_rejected() {
        let g = clique(4);
        assert_eq!(
            global_mean_distances(&g, Some(7), None),
            Err(MetricsError::BudgetTooLarge {
                budget: 7,
                available: 6
            })
        );
    }

    #[test]
    fn tiny_graph_rejected() {
        let g = Graph::from_edges(1, Vec::new()).unwrap();
        assert_eq!(
            global_mean_distances(&g, None, None),
            Err(MetricsError::GraphTooSmall(1))
        );
    }

    #[test]
    fn decode_pair_round_trips_exhaustively() {
        for n in 2..40 {
            let mut index = 0;
            for u in 0..n {
                for v in u + 1..n {
                    assert_eq!(decode_pair(n, index), (u, v), "n={n} index={index}");
                    index += 1;
                }
            }
            assert_eq!(index, total_pairs(n));
        }
    }
}
