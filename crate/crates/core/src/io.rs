//! Edge-list and cluster-assignment text formats.
//!
//! Edge lists are UTF-8 text with one edge per line: two whitespace-separated
//! non-negative integers. Lines starting with `#` are comments. An optional
//! directive `%% vertices N` ahead of the first edge declares the vertex
//! count; without it the distinct ids found in the file become the vertex set
//! (remapped densely when they are not already `0..n`, with the mapping
//! reported back).
//!
//! Assignment files use the same comment convention with one
//! `vertex cluster` pair per line and must label every graph vertex exactly
//! once.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::graph::{Graph, VertexId};
use crate::ppm::ClusterAssignment;

#[derive(Debug, Error)]
pub enum EdgeListError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: expected two non-negative integers, got `{text}`")]
    Malformed {
        path: PathBuf,
        line: usize,
        text: String,
    },
    #[error("{path}:{line}: self-loop ({id}, {id})")]
    SelfLoop { path: PathBuf, line: usize, id: u64 },
    #[error("{path}:{line}: vertex {id} outside the declared range of {declared} vertices")]
    OutOfDeclaredRange {
        path: PathBuf,
        line: usize,
        id: u64,
        declared: usize,
    },
    #[error("{path}:{line}: the vertex count must be declared once, before any edge")]
    MisplacedDeclaration { path: PathBuf, line: usize },
    #[error("{path}:{line}: unknown directive `{text}`")]
    UnknownDirective {
        path: PathBuf,
        line: usize,
        text: String,
    },
}

#[derive(Debug, Error)]
pub enum AssignmentError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: expected `vertex cluster`, got `{text}`")]
    Malformed {
        path: PathBuf,
        line: usize,
        text: String,
    },
    #[error("{path}:{line}: vertex {id} is not a vertex of the graph")]
    UnknownVertex { path: PathBuf, line: usize, id: u64 },
    #[error("{path}:{line}: vertex {id} labeled more than once")]
    DuplicateLabel { path: PathBuf, line: usize, id: u64 },
    #[error("{path}: {missing} of {total} vertices have no cluster label")]
    IncompleteCover {
        path: PathBuf,
        missing: usize,
        total: usize,
    },
}

/// A graph loaded from disk, together with the id remapping applied when the
/// file used sparse vertex ids. `id_map[new] = original`; `None` means file
/// ids were already dense `0..n` (or a `%% vertices` directive fixed the
/// space).
#[derive(Debug)]
pub struct LoadedGraph {
    pub graph: Graph,
    pub id_map: Option<Vec<u64>>,
}

impl LoadedGraph {
    /// Loads a cluster assignment for this graph, translating file ids
    /// through the remap when one was applied.
    pub fn load_assignment(
        &self,
        path: impl AsRef<Path>,
    ) -> Result<ClusterAssignment, AssignmentError> {
        load_assignment(path, self.graph.vertex_count(), self.id_map.as_deref())
    }
}

enum Parsed {
    Skip,
    Vertices(usize),
    Pair(u64, u64),
}

fn parse_line(path: &Path, line_no: usize, line: &str) -> Result<Parsed, EdgeListError> {
    let trimmed = line.trim();
    if trimmed.is_empty() || trimmed.starts_with('#') {
        return Ok(Parsed::Skip);
    }
    if let Some(rest) = trimmed.strip_prefix("%%") {
        let mut tokens = rest.split_whitespace();
        if let (Some("vertices"), Some(n), None) = (tokens.next(), tokens.next(), tokens.next()) {
            if let Ok(n) = n.parse::<usize>() {
                return Ok(Parsed::Vertices(n));
            }
        }
        return Err(EdgeListError::UnknownDirective {
            path: path.to_path_buf(),
            line: line_no,
            text: trimmed.to_string(),
        });
    }
    let mut tokens = trimmed.split_whitespace();
    let (a, b, extra) = (tokens.next(), tokens.next(), tokens.next());
    if let (Some(a), Some(b), None) = (a, b, extra) {
        if let (Ok(a), Ok(b)) = (a.parse::<u64>(), b.parse::<u64>()) {
            return Ok(Parsed::Pair(a, b));
        }
    }
    Err(EdgeListError::Malformed {
        path: path.to_path_buf(),
        line: line_no,
        text: trimmed.to_string(),
    })
}

/// Reads an edge-list file. See the module docs for the format.
pub fn load_edge_list(path: impl AsRef<Path>) -> Result<LoadedGraph, EdgeListError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| EdgeListError::Io {
        path: path.to_path_buf(),
        source,
    })?;

    let mut declared: Option<usize> = None;
    let mut raw_edges: Vec<(u64, u64)> = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        match parse_line(path, line_no, line)? {
            Parsed::Skip => {}
            Parsed::Vertices(n) => {
                // Edges are range-checked as they are read, so the count has
                // to be known before the first one.
                if declared.is_some() || !raw_edges.is_empty() {
                    return Err(EdgeListError::MisplacedDeclaration {
                        path: path.to_path_buf(),
                        line: line_no,
                    });
                }
                declared = Some(n);
            }
            Parsed::Pair(a, b) => {
                if a == b {
                    return Err(EdgeListError::SelfLoop {
                        path: path.to_path_buf(),
                        line: line_no,
                        id: a,
                    });
                }
                if let Some(n) = declared {
                    let worst = a.max(b);
                    if worst >= n as u64 {
                        return Err(EdgeListError::OutOfDeclaredRange {
                            path: path.to_path_buf(),
                            line: line_no,
                            id: worst,
                            declared: n,
                        });
                    }
                }
                raw_edges.push((a, b));
            }
        }
    }

    let (vertex_count, edges, id_map) = match declared {
        Some(n) => {
            let edges = raw_edges
                .iter()
                .map(|&(a, b)| (a as VertexId, b as VertexId))
                .collect::<Vec<_>>();
            (n, edges, None)
        }
        None => {
            let mut ids: Vec<u64> = raw_edges.iter().flat_map(|&(a, b)| [a, b]).collect();
            ids.sort_unstable();
            ids.dedup();
            let dense = ids.last().is_none_or(|&max| max as usize + 1 == ids.len());
            let lookup = |id: u64| -> VertexId {
                if dense {
                    id as VertexId
                } else {
                    ids.binary_search(&id).expect("id collected above")
                }
            };
            let edges = raw_edges
                .iter()
                .map(|&(a, b)| (lookup(a), lookup(b)))
                .collect::<Vec<_>>();
            let n = ids.len();
            (n, edges, if dense { None } else { Some(ids) })
        }
    };

    // Range and loop violations were rejected above, so this cannot fail.
    let graph = Graph::from_edges(vertex_count, edges).expect("edges validated during parse");
    Ok(LoadedGraph { graph, id_map })
}

/// Writes a graph so that loading it back reproduces the same graph,
/// including isolated vertices.
pub fn save_edge_list(graph: &Graph, path: impl AsRef<Path>) -> Result<(), EdgeListError> {
    let path = path.as_ref();
    let io_err = |source| EdgeListError::Io {
        path: path.to_path_buf(),
        source,
    };
    let file = fs::File::create(path).map_err(io_err)?;
    let mut w = BufWriter::new(file);
    (|| {
        writeln!(w, "%% vertices {}", graph.vertex_count())?;
        for (u, v) in graph.edges() {
            writeln!(w, "{u} {v}")?;
        }
        w.flush()
    })()
    .map_err(io_err)
}

/// Reads a `vertex cluster` assignment file covering every vertex of a graph
/// with `vertex_count` vertices. `id_map` translates file ids for graphs that
/// were loaded with a sparse-id remap.
pub fn load_assignment(
    path: impl AsRef<Path>,
    vertex_count: usize,
    id_map: Option<&[u64]>,
) -> Result<ClusterAssignment, AssignmentError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| AssignmentError::Io {
        path: path.to_path_buf(),
        source,
    })?;

    let mut labels: Vec<Option<usize>> = vec![None; vertex_count];
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut tokens = trimmed.split_whitespace();
        let parsed = match (tokens.next(), tokens.next(), tokens.next()) {
            (Some(a), Some(b), None) => match (a.parse::<u64>(), b.parse::<usize>()) {
                (Ok(a), Ok(b)) => Some((a, b)),
                _ => None,
            },
            _ => None,
        };
        let Some((raw_vertex, cluster)) = parsed else {
            return Err(AssignmentError::Malformed {
                path: path.to_path_buf(),
                line: line_no,
                text: trimmed.to_string(),
            });
        };
        let vertex = match id_map {
            Some(map) => map.binary_search(&raw_vertex).ok(),
            None => (raw_vertex < vertex_count as u64).then_some(raw_vertex as VertexId),
        };
        let Some(vertex) = vertex else {
            return Err(AssignmentError::UnknownVertex {
                path: path.to_path_buf(),
                line: line_no,
                id: raw_vertex,
            });
        };
        if labels[vertex].is_some() {
            return Err(AssignmentError::DuplicateLabel {
                path: path.to_path_buf(),
                line: line_no,
                id: raw_vertex,
            });
        }
        labels[vertex] = Some(cluster);
    }

    let missing = labels.iter().filter(|l| l.is_none()).count();
    if missing > 0 {
        return Err(AssignmentError::IncompleteCover {
            path: path.to_path_buf(),
            missing,
            total: vertex_count,
        });
    }
    Ok(ClusterAssignment::from_labels(
        labels.into_iter().map(|l| l.unwrap()).collect(),
    ))
}

/// Writes an assignment as `vertex cluster` lines.
pub fn save_assignment(
    assignment: &ClusterAssignment,
    path: impl AsRef<Path>,
) -> Result<(), std::io::Error> {
    let file = fs::File::create(path)?;
    let mut w = BufWriter::new(file);
    for (vertex, &cluster) in assignment.labels().iter().enumerate() {
        writeln!(w, "{vertex} {cluster}")?;
    }
    w.flush()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::two_triangle_graph;

    fn write_temp(content: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(content.as_bytes()).unwrap();
        f
    }

    #[test]
    fn loads_plain_edge_list() {
        let f = write_temp("0 1\n1 2\n");
        let loaded = load_edge_list(f.path()).unwrap();
        assert_eq!(loaded.graph.vertex_count(), 3);
        assert_eq!(loaded.graph.edge_count(), 2);
        assert!(loaded.id_map.is_none());
    }

    #[test]
    fn comments_and_blank_lines_ignored() {
        let f = write_temp("# a comment\n\n0 1\n# another\n1 2\n");
        let loaded = load_edge_list(f.path()).unwrap();
        assert_eq!(loaded.graph.edge_count(), 2);
    }

    #[test]
    fn declared_vertex_count_keeps_isolated_vertices() {
        let f = write_temp("%% vertices 5\n");
        let loaded = load_edge_list(f.path()).unwrap();
        assert_eq!(loaded.graph.vertex_count(), 5);
        assert_eq!(loaded.graph.edge_count(), 0);
    }

    #[test]
    fn self_loop_rejected_at_parse_stage() {
        let f = write_temp("0 0\n");
        match load_edge_list(f.path()) {
            Err(EdgeListError::SelfLoop { line, id, .. }) => {
                assert_eq!(line, 1);
                assert_eq!(id, 0);
            }
            other => panic!("expected self-loop error, got {other:?}"),
        }
    }

    #[test]
    fn malformed_line_reports_line_number() {
        let f = write_temp("0 1\nnot an edge\n");
        match load_edge_list(f.path()) {
            Err(EdgeListError::Malformed { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected malformed error, got {other:?}"),
        }
    }

    #[test]
    fn out_of_declared_range_rejected() {
        let f = write_temp("%% vertices 3\n0 7\n");
        match load_edge_list(f.path()) {
            Err(EdgeListError::OutOfDeclaredRange { id, declared, .. }) => {
                assert_eq!((id, declared), (7, 3));
            }
            other => panic!("expected range error, got {other:?}"),
        }
    }

    #[test]
    fn declaration_after_edges_rejected() {
        let f = write_temp("0 1\n%% vertices 9\n");
        assert!(matches!(
            load_edge_list(f.path()),
            Err(EdgeListError::MisplacedDeclaration { line: 2, .. })
        ));
        let f = write_temp("%% vertices 4\n%% vertices 4\n");
        assert!(matches!(
            load_edge_list(f.path()),
            Err(EdgeListError::MisplacedDeclaration { line: 2, .. })
        ));
    }

    #[test]
    fn sparse_ids_are_remapped_with_mapping_table() {
        let f = write_temp("10 500\n500 7000\n");
        let loaded = load_edge_list(f.path()).unwrap();
        assert_eq!(loaded.graph.vertex_count(), 3);
        assert_eq!(loaded.id_map.as_deref(), Some(&[10, 500, 7000][..]));
        assert!(loaded.graph.has_edge(0, 1));
        assert!(loaded.graph.has_edge(1, 2));
        assert!(!loaded.graph.has_edge(0, 2));
    }

    #[test]
    fn round_trip_preserves_graph() {
        let g = two_triangle_graph();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("g.edges");
        save_edge_list(&g, &path).unwrap();
        let loaded = load_edge_list(&path).unwrap();
        assert_eq!(loaded.graph, g);
        assert!(loaded.id_map.is_none());
    }

    #[test]
    fn assignment_round_trip_and_errors() {
        let f = write_temp("0 0\n1 0\n2 1\n");
        let assignment = load_assignment(f.path(), 3, None).unwrap();
        assert_eq!(assignment.labels(), &[0, 0, 1]);

        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("a.clusters");
        save_assignment(&assignment, &path).unwrap();
        let reloaded = load_assignment(&path, 3, None).unwrap();
        assert_eq!(reloaded.labels(), assignment.labels());

        let incomplete = write_temp("0 0\n");
        match load_assignment(incomplete.path(), 3, None) {
            Err(AssignmentError::IncompleteCover { missing, total, .. }) => {
                assert_eq!((missing, total), (2, 3));
            }
            other => panic!("expected incomplete cover, got {other:?}"),
        }

        let duplicate = write_temp("0 0\n0 1\n1 0\n2 0\n");
        assert!(matches!(
            load_assignment(duplicate.path(), 3, None),
            Err(AssignmentError::DuplicateLabel { line: 2, .. })
        ));
    }

    #[test]
    fn assignment_respects_id_map() {
        let graph_file = write_temp("10 500\n500 7000\n");
        let loaded = load_edge_list(graph_file.path()).unwrap();
        let asg_file = write_temp("10 0\n500 0\n7000 1\n");
        let assignment = loaded.load_assignment(asg_file.path()).unwrap();
        assert_eq!(assignment.labels(), &[0, 0, 1]);

        let stray = write_temp("10 0\n500 0\n9999 1\n");
        assert!(matches!(
            loaded.load_assignment(stray.path()),
            Err(AssignmentError::UnknownVertex { id: 9999, .. })
        ));
    }
}
