//! End-to-end benchmark harness: generate a suite of planted-partition
//! graphs, summarize every cluster, correlate mean distances against
//! intra-cluster density, and aggregate by inter-cluster probability.
//!
//! Graph-by-seed runs are independent units. With the `parallel` feature
//! they execute concurrently; results are joined in configuration order, so
//! output never depends on scheduling.

use std::path::PathBuf;

use thiserror::Error;

use crate::cluster::{self, ClusterSummary, DistanceMeans};
use crate::ppm::{self, PpmParams};
use crate::stats::{self, CorrelationResult, PoolingMode};
use crate::sum::CompensatedSum;

/// Default pair sample size when exact global means are disabled.
pub const DEFAULT_SAMPLE_BUDGET: usize = 200_000;

#[derive(Clone, Debug, PartialEq)]
pub struct GraphSpec {
    pub name: String,
    pub params: PpmParams,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub graphs: Vec<GraphSpec>,
    /// Each graph runs once per seed offset `0..seeds_per_graph`, with the
    /// unit seed `params.seed + offset`.
    pub seeds_per_graph: usize,
    /// Exact means walk every vertex pair; otherwise a seeded sample of
    /// `sample_budget` pairs estimates them.
    pub exact_global_means: bool,
    pub sample_budget: usize,
    pub output_dir: Option<PathBuf>,
}

impl ExperimentConfig {
    /// Configuration covering the built-in ten-graph suite.
    pub fn builtin(base_seed: u64) -> Self {
        Self {
            graphs: builtin_suite(base_seed),
            seeds_per_graph: 1,
            exact_global_means: true,
            sample_budget: DEFAULT_SAMPLE_BUDGET,
            output_dir: None,
        }
    }
}

/// The built-in benchmark suite: ten graphs of 50 equal-size clusters
/// spanning intra-cluster edge probabilities 0.7-1.0 and inter-cluster
/// probabilities 0-0.2. Graph `i` uses seed `base_seed + i`.
pub fn builtin_suite(base_seed: u64) -> Vec<GraphSpec> {
    const TABLE: [(&str, f64, f64, usize); 10] = [
        ("G1", 1.0, 0.0, 45),
        ("G2", 0.9, 0.1, 37),
        ("G3", 0.9, 0.15, 42),
        ("G4", 0.9, 0.2, 50),
        ("G5", 0.8, 0.1, 53),
        ("G6", 0.8, 0.15, 38),
        ("G7", 0.8, 0.2, 44),
        ("G8", 0.7, 0.1, 39),
        ("G9", 0.7, 0.15, 46),
        ("G10", 0.7, 0.2, 53),
    ];
    TABLE
        .iter()
        .enumerate()
        .map(|(i, &(name, p_intra, p_inter, cluster_size))| GraphSpec {
            name: name.to_string(),
            params: PpmParams {
                clusters: 50,
                cluster_size,
                p_intra,
                p_inter,
                seed: base_seed.wrapping_add(i as u64),
            },
        })
        .collect()
}

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("graph name `{0}` appears more than once")]
    DuplicateGraphName(String),
    #[error("seeds_per_graph must be at least 1")]
    ZeroSeeds,
}

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: invalid value for `{key}`: `{value}`")]
    BadValue {
        line: usize,
        key: String,
        value: String,
    },
    #[error("line {line}: graph entries need `graph NAME CLUSTERS SIZE P_INTRA P_INTER SEED`")]
    BadGraphLine { line: usize },
    #[error("line {line}: expected `key = value` or a `graph` entry")]
    BadLine { line: usize },
}

/// Parses the flat key-value experiment configuration format:
///
/// ```text
/// # comments allowed
/// seeds_per_graph = 5
/// exact_global_means = true
/// sample_budget = 200000
/// output_dir = out/run1
///
/// # name  clusters  cluster_size  p_intra  p_inter  seed
/// graph Dense 20 30 0.9 0.05 42
/// ```
pub fn parse_config(text: &str) -> Result<ExperimentConfig, ConfigError> {
    let mut config = ExperimentConfig {
        graphs: Vec::new(),
        seeds_per_graph: 1,
        exact_global_means: true,
        sample_budget: DEFAULT_SAMPLE_BUDGET,
        output_dir: None,
    };

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        if let Some(rest) = trimmed.strip_prefix("graph ") {
            let fields: Vec<&str> = rest.split_whitespace().collect();
            if fields.len() != 6 {
                return Err(ConfigError::BadGraphLine { line });
            }
            let parse = |_field: &str| ConfigError::BadGraphLine { line };
            let name = fields[0].to_string();
            let clusters = fields[1].parse().map_err(|_| parse(fields[1]))?;
            let cluster_size = fields[2].parse().map_err(|_| parse(fields[2]))?;
            let p_intra = fields[3].parse().map_err(|_| parse(fields[3]))?;
            let p_inter = fields[4].parse().map_err(|_| parse(fields[4]))?;
            let seed = fields[5].parse().map_err(|_| parse(fields[5]))?;
            config.graphs.push(GraphSpec {
                name,
                params: PpmParams {
                    clusters,
                    cluster_size,
                    p_intra,
                    p_inter,
                    seed,
                },
            });
            continue;
        }
        let Some((key, value)) = trimmed.split_once('=') else {
            return Err(ConfigError::BadLine { line });
        };
        let key = key.trim();
        let value = value.trim();
        let bad = || ConfigError::BadValue {
            line,
            key: key.to_string(),
            value: value.to_string(),
        };
        match key {
            "seeds_per_graph" => config.seeds_per_graph = value.parse().map_err(|_| bad())?,
            "exact_global_means" => config.exact_global_means = value.parse().map_err(|_| bad())?,
            "sample_budget" => config.sample_budget = value.parse().map_err(|_| bad())?,
            "output_dir" => config.output_dir = Some(PathBuf::from(value)),
            other => {
                return Err(ConfigError::UnknownKey {
                    line,
                    key: other.to_string(),
                })
            }
        }
    }
    Ok(config)
}

#[derive(Clone, Debug, PartialEq)]
pub struct PerClusterRow {
    pub graph: String,
    pub seed: u64,
    pub cluster_id: usize,
    pub n_k: usize,
    pub density: f64,
    pub mean_jaccard: f64,
    pub mean_otoc: f64,
    pub mean_burt: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PerGraphRow {
    pub graph: String,
    pub seed: u64,
    pub p_intra: f64,
    pub p_inter: f64,
    pub rho_jaccard: CorrelationResult,
    pub rho_otoc: CorrelationResult,
    pub rho_burt: CorrelationResult,
    /// Mean intra-cluster distances, averaged over the graph's clusters.
    pub mean_intra: DistanceMeans,
    /// Mean distances over all vertex pairs, ignoring clusters.
    pub global_mean: DistanceMeans,
}

/// Aggregate over every run sharing one inter-cluster probability.
#[derive(Clone, Debug, PartialEq)]
pub struct GroupedRow {
    pub p_inter: f64,
    pub n_runs: usize,
    pub n_clusters: usize,
    /// Correlations over the group's pooled (density, mean distance) points.
    pub rho_jaccard: CorrelationResult,
    pub rho_otoc: CorrelationResult,
    pub rho_burt: CorrelationResult,
    /// Mean intra-cluster distances over the group's cluster points.
    pub mean_intra: DistanceMeans,
    /// Whole-graph means averaged over the group's runs.
    pub global_mean: DistanceMeans,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PooledCorrelations {
    pub jaccard: CorrelationResult,
    pub otoc: CorrelationResult,
    pub burt: CorrelationResult,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunFailure {
    pub graph: String,
    pub seed: u64,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentResult {
    pub per_cluster: Vec<PerClusterRow>,
    pub per_graph: Vec<PerGraphRow>,
    pub grouped: Vec<GroupedRow>,
    /// Correlations pooling the cluster points of every run with
    /// `p_inter > 0` (density carries no information when clusters are
    /// disconnected cliques).
    pub pooled: PooledCorrelations,
    pub failures: Vec<RunFailure>,
}

struct UnitOutput {
    name: String,
    seed: u64,
    p_intra: f64,
    p_inter: f64,
    summaries: Vec<ClusterSummary>,
    rho_jaccard: CorrelationResult,
    rho_otoc: CorrelationResult,
    rho_burt: CorrelationResult,
    mean_intra: DistanceMeans,
    global_mean: DistanceMeans,
}

fn mean_over_clusters(summaries: &[ClusterSummary]) -> DistanceMeans {
    let mut jaccard = CompensatedSum::new();
    let mut otoc = CompensatedSum::new();
    let mut burt = CompensatedSum::new();
    for s in summaries {
        jaccard.add(s.mean_jaccard);
        otoc.add(s.mean_otoc);
        burt.add(s.mean_burt);
    }
    let n = summaries.len() as f64;
    DistanceMeans {
        jaccard: jaccard.total() / n,
        otoc: otoc.total() / n,
        burt: burt.total() / n,
    }
}

fn run_unit(
    spec: &GraphSpec,
    seed_offset: u64,
    config: &ExperimentConfig,
) -> Result<UnitOutput, RunFailure> {
    let seed = spec.params.seed.wrapping_add(seed_offset);
    let params = PpmParams {
        seed,
        ..spec.params
    };
    let fail = |message: String| RunFailure {
        graph: spec.name.clone(),
        seed,
        message,
    };

    let (graph, assignment) = ppm::generate(&params).map_err(|e| fail(e.to_string()))?;
    let summaries =
        cluster::cluster_summaries(&graph, &assignment).map_err(|e| fail(e.to_string()))?;

    let densities: Vec<f64> = summaries.iter().map(|s| s.density).collect();
    let correlate = |ys: Vec<f64>| stats::pearson(&densities, &ys).map_err(|e| fail(e.to_string()));
    let rho_jaccard = correlate(summaries.iter().map(|s| s.mean_jaccard).collect())?;
    let rho_otoc = correlate(summaries.iter().map(|s| s.mean_otoc).collect())?;
    let rho_burt = correlate(summaries.iter().map(|s| s.mean_burt).collect())?;

    let budget = (!config.exact_global_means).then_some(config.sample_budget);
    let global_mean = cluster::global_mean_distances(&graph, budget, Some(seed))
        .map_err(|e| fail(e.to_string()))?;
    let mean_intra = mean_over_clusters(&summaries);

    Ok(UnitOutput {
        name: spec.name.clone(),
        seed,
        p_intra: params.p_intra,
        p_inter: params.p_inter,
        summaries,
        rho_jaccard,
        rho_otoc,
        rho_burt,
        mean_intra,
        global_mean,
    })
}

fn group_rows(units: &[UnitOutput]) -> Vec<GroupedRow> {
    let mut keys: Vec<f64> = units.iter().map(|u| u.p_inter).collect();
    keys.sort_by(f64::total_cmp);
    keys.dedup();

    keys.into_iter()
        .map(|p_inter| {
            let members: Vec<&UnitOutput> = units.iter().filter(|u| u.p_inter == p_inter).collect();
            let mut points_j = Vec::new();
            let mut points_o = Vec::new();
            let mut points_b = Vec::new();
            let mut intra_j = CompensatedSum::new();
            let mut intra_o = CompensatedSum::new();
            let mut intra_b = CompensatedSum::new();
            let mut global_j = CompensatedSum::new();
            let mut global_o = CompensatedSum::new();
            let mut global_b = CompensatedSum::new();
            let mut n_clusters = 0usize;
            for unit in &members {
                for s in &unit.summaries {
                    points_j.push((s.density, s.mean_jaccard));
                    points_o.push((s.density, s.mean_otoc));
                    points_b.push((s.density, s.mean_burt));
                    intra_j.add(s.mean_jaccard);
                    intra_o.add(s.mean_otoc);
                    intra_b.add(s.mean_burt);
                    n_clusters += 1;
                }
                global_j.add(unit.global_mean.jaccard);
                global_o.add(unit.global_mean.otoc);
                global_b.add(unit.global_mean.burt);
            }
            let correlate = |points: Vec<(f64, f64)>| {
                stats::pooled(&[points], PoolingMode::Concatenate)
                    .unwrap_or(CorrelationResult::undefined(n_clusters))
            };
            let runs = members.len() as f64;
            GroupedRow {
                p_inter,
                n_runs: members.len(),
                n_clusters,
                rho_jaccard: correlate(points_j),
                rho_otoc: correlate(points_o),
                rho_burt: correlate(points_b),
                mean_intra: DistanceMeans {
                    jaccard: intra_j.total() / n_clusters as f64,
                    otoc: intra_o.total() / n_clusters as f64,
                    burt: intra_b.total() / n_clusters as f64,
                },
                global_mean: DistanceMeans {
                    jaccard: global_j.total() / runs,
                    otoc: global_o.total() / runs,
                    burt: global_b.total() / runs,
                },
            }
        })
        .collect()
}

fn pool_nonzero(units: &[UnitOutput]) -> PooledCorrelations {
    let mut points_j = Vec::new();
    let mut points_o = Vec::new();
    let mut points_b = Vec::new();
    for unit in units.iter().filter(|u| u.p_inter > 0.0) {
        for s in &unit.summaries {
            points_j.push((s.density, s.mean_jaccard));
            points_o.push((s.density, s.mean_otoc));
            points_b.push((s.density, s.mean_burt));
        }
    }
    let n = points_j.len();
    let correlate = |points: Vec<(f64, f64)>| {
        stats::pooled(&[points], PoolingMode::Concatenate)
            .unwrap_or(CorrelationResult::undefined(n))
    };
    PooledCorrelations {
        jaccard: correlate(points_j),
        otoc: correlate(points_o),
        burt: correlate(points_b),
    }
}

/// Runs every graph-by-seed unit and assembles all report tables.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentResult, ExperimentError> {
    if config.seeds_per_graph == 0 {
        return Err(ExperimentError::ZeroSeeds);
    }
    for (i, spec) in config.graphs.iter().enumerate() {
        if config.graphs[..i].iter().any(|s| s.name == spec.name) {
            return Err(ExperimentError::DuplicateGraphName(spec.name.clone()));
        }
    }

    let work: Vec<(usize, u64)> = (0..config.graphs.len())
        .flat_map(|g| (0..config.seeds_per_graph as u64).map(move |s| (g, s)))
        .collect();

    #[cfg(feature = "parallel")]
    let outcomes: Vec<Result<UnitOutput, RunFailure>> = {
        use rayon::prelude::*;
        work.par_iter()
            .map(|&(g, s)| run_unit(&config.graphs[g], s, config))
            .collect()
    };
    #[cfg(not(feature = "parallel"))]
    let outcomes: Vec<Result<UnitOutput, RunFailure>> = work
        .iter()
        .map(|&(g, s)| run_unit(&config.graphs[g], s, config))
        .collect();

    let mut units = Vec::new();
    let mut failures = Vec::new();
    for outcome in outcomes {
        match outcome {
            Ok(unit) => units.push(unit),
            Err(failure) => failures.push(failure),
        }
    }

    let mut per_cluster = Vec::new();
    let mut per_graph = Vec::new();
    for unit in &units {
        for s in &unit.summaries {
            per_cluster.push(PerClusterRow {
                graph: unit.name.clone(),
                seed: unit.seed,
                cluster_id: s.cluster_id,
                n_k: s.size,
                density: s.density,
                mean_jaccard: s.mean_jaccard,
                mean_otoc: s.mean_otoc,
                mean_burt: s.mean_burt,
            });
        }
        per_graph.push(PerGraphRow {
            graph: unit.name.clone(),
            seed: unit.seed,
            p_intra: unit.p_intra,
            p_inter: unit.p_inter,
            rho_jaccard: unit.rho_jaccard,
            rho_otoc: unit.rho_otoc,
            rho_burt: unit.rho_burt,
            mean_intra: unit.mean_intra,
            global_mean: unit.global_mean,
        });
    }

    Ok(ExperimentResult {
        grouped: group_rows(&units),
        pooled: pool_nonzero(&units),
        per_cluster,
        per_graph,
        failures,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_config() -> ExperimentConfig {
        ExperimentConfig {
            graphs: vec![
                GraphSpec {
                    name: "A".into(),
                    params: PpmParams {
                        clusters: 4,
                        cluster_size: 8,
                        p_intra: 0.9,
                        p_inter: 0.1,
                        seed: 11,
                    },
                },
                GraphSpec {
                    name: "B".into(),
                    params: PpmParams {
                        clusters: 4,
                        cluster_size: 8,
                        p_intra: 0.7,
                        p_inter: 0.1,
                        seed: 12,
                    },
                },
            ],
            seeds_per_graph: 2,
            exact_global_means: true,
            sample_budget: DEFAULT_SAMPLE_BUDGET,
            output_dir: None,
        }
    }

    #[test]
    fn empty_config_yields_empty_result() {
        let config = ExperimentConfig {
            graphs: Vec::new(),
            ..ExperimentConfig::builtin(0)
        };
        let result = run_experiment(&config).unwrap();
        assert!(result.per_cluster.is_empty());
        assert!(result.per_graph.is_empty());
        assert!(result.grouped.is_empty());
        assert!(result.failures.is_empty());
        assert_eq!(result.pooled.jaccard, CorrelationResult::undefined(0));
    }

    #[test]
    fn row_counts_follow_config() {
        let result = run_experiment(&tiny_config()).unwrap();
        assert_eq!(result.per_graph.len(), 4); // 2 graphs x 2 seeds
        assert_eq!(result.per_cluster.len(), 16); // x 4 clusters
        assert_eq!(result.grouped.len(), 1); // one shared p_inter
        assert_eq!(result.grouped[0].n_runs, 4);
        assert_eq!(result.grouped[0].n_clusters, 16);
        assert!(result.failures.is_empty());
    }

    #[test]
    fn results_are_deterministic() {
        let a = run_experiment(&tiny_config()).unwrap();
        let b = run_experiment(&tiny_config()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn failed_units_are_recorded_not_fatal() {
        let mut config = tiny_config();
        config.graphs.push(GraphSpec {
            name: "bad".into(),
            params: PpmParams {
                clusters: 2,
                cluster_size: 3,
                p_intra: 7.0,
                p_inter: 0.0,
                seed: 0,
            },
        });
        let result = run_experiment(&config).unwrap();
        assert_eq!(result.failures.len(), 2); // both seeds of the bad graph
        assert_eq!(result.failures[0].graph, "bad");
        assert_eq!(result.per_graph.len(), 4); // healthy units unaffected
    }

    #[test]
    fn duplicate_names_rejected() {
        let mut config = tiny_config();
        config.graphs[1].name = "A".into();
        assert!(matches!(
            run_experiment(&config),
            Err(ExperimentError::DuplicateGraphName(name)) if name == "A"
        ));
    }

    #[test]
    fn builtin_suite_shape() {
        let suite = builtin_suite(40);
        assert_eq!(suite.len(), 10);
        assert!(suite.iter().all(|s| s.params.clusters == 50));
        assert_eq!(suite[0].params.vertex_count(), 2250);
        assert_eq!(suite[9].params.vertex_count(), 2650);
        assert_eq!(suite[3].params.seed, 43);
        let totals: usize = suite.iter().map(|s| s.params.vertex_count()).sum();
        assert_eq!(
            totals,
            2250 + 1850 + 2100 + 2500 + 2650 + 1900 + 2200 + 1950 + 2300 + 2650
        );
    }

    #[test]
    fn config_parsing_round_trip() {
        let text = "\
# demo
seeds_per_graph = 3
exact_global_means = false
sample_budget = 5000
output_dir = out/x

graph Dense 4 8 0.9 0.05 42
graph Sparse 4 8 0.5 0.05 43
";
        let config = parse_config(text).unwrap();
        assert_eq!(config.seeds_per_graph, 3);
        assert!(!config.exact_global_means);
        assert_eq!(config.sample_budget, 5000);
        assert_eq!(
            config.output_dir.as_deref(),
            Some(std::path::Path::new("out/x"))
        );
        assert_eq!(config.graphs.len(), 2);
        assert_eq!(config.graphs[1].name, "Sparse");
        assert_eq!(config.graphs[1].params.seed, 43);
    }

    #[test]
    fn config_errors_carry_line_numbers() {
        assert_eq!(
            parse_config("nonsense\n"),
            Err(ConfigError::BadLine { line: 1 })
        );
        assert_eq!(
            parse_config("# ok\nwat = 1\n"),
            Err(ConfigError::UnknownKey {
                line: 2,
                key: "wat".into()
            })
        );
        assert_eq!(
            parse_config("graph OnlyName\n"),
            Err(ConfigError::BadGraphLine { line: 1 })
        );
        assert_eq!(
            parse_config("seeds_per_graph = soon\n"),
            Err(ConfigError::BadValue {
                line: 1,
                key: "seeds_per_graph".into(),
                value: "soon".into()
            })
        );
    }
}
