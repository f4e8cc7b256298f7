//! Command-line front end: generate planted-partition graphs, evaluate
//! vertex distances, summarize clusters, correlate against density, run the
//! full benchmark suite, and export distance matrices.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use graphdist::cluster;
use graphdist::distance::{self, DistanceMeasure};
use graphdist::experiment::{self, ExperimentConfig};
use graphdist::io::{load_edge_list, save_assignment, save_edge_list, LoadedGraph};
use graphdist::ppm::{self, PpmParams};
use graphdist::report;
use graphdist::stats::{self, PoolingMode};
use graphdist::{ClusterAssignment, Graph};

/// Environment variable consulted for the worker-thread count when
/// `--threads` is not given.
const THREADS_ENV: &str = "GRAPHDIST_THREADS";

#[derive(Parser)]
#[command(
    name = "graphdist",
    version,
    about = "Shared-connectivity vertex distances and cluster density benchmarks"
)]
struct Cli {
    /// Base RNG seed override.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Directory for generated files (default: current directory).
    #[arg(long, global = true, value_name = "DIR")]
    output_dir: Option<PathBuf>,

    /// Worker threads (overrides the GRAPHDIST_THREADS environment variable;
    /// default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a planted-partition graph and its ground-truth clusters.
    Generate(GenerateArgs),
    /// Evaluate one distance measure over vertex pairs.
    Distances(DistancesArgs),
    /// Per-cluster density and mean-distance summary.
    Summarize(SummarizeArgs),
    /// Correlate per-cluster mean distances against intra-cluster density.
    Correlate(CorrelateArgs),
    /// Run a full multi-graph experiment and emit CSV tables.
    Experiment(ExperimentArgs),
    /// Export the dense distance matrix of a graph.
    ExportMatrix(ExportMatrixArgs),
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long)]
    clusters: usize,
    #[arg(long)]
    cluster_size: usize,
    #[arg(long)]
    p_intra: f64,
    #[arg(long)]
    p_inter: f64,
    /// Basename for the emitted `<name>.edges` and `<name>.clusters` files.
    #[arg(long, default_value = "ppm")]
    name: String,
}

#[derive(Args)]
struct DistancesArgs {
    /// Edge-list file.
    #[arg(long, value_name = "FILE")]
    graph: PathBuf,
    #[arg(long, default_value = "jaccard")]
    measure: DistanceMeasure,
    /// File with one `u v` pair per line (`#` comments allowed).
    #[arg(long, value_name = "FILE", conflicts_with = "all_pairs")]
    pairs_file: Option<PathBuf>,
    /// Evaluate every unordered vertex pair.
    #[arg(long)]
    all_pairs: bool,
    /// Output CSV path (default: stdout).
    #[arg(long, value_name = "FILE")]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct SummarizeArgs {
    #[arg(long, value_name = "FILE")]
    graph: PathBuf,
    #[arg(long, value_name = "FILE")]
    assignment: PathBuf,
    #[arg(long, value_name = "FILE")]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct CorrelateArgs {
    /// Alternating GRAPH ASSIGNMENT file pairs; several pairs add a pooled
    /// row.
    #[arg(required = true, num_args = 2.., value_name = "FILE")]
    inputs: Vec<PathBuf>,
    /// How the pooled row combines the per-graph point sets.
    #[arg(long, default_value = "concat", value_parser = parse_pooling)]
    pooling: PoolingMode,
}

#[derive(Args)]
struct ExperimentArgs {
    /// Experiment configuration file.
    #[arg(long, value_name = "FILE", conflicts_with = "builtin_suite")]
    config: Option<PathBuf>,
    /// Run the built-in ten-graph benchmark suite.
    #[arg(long)]
    builtin_suite: bool,
    /// Seeds per graph (overrides the config file).
    #[arg(long)]
    seeds: Option<usize>,
    /// Estimate whole-graph means from a pair sample instead of every pair.
    #[arg(long)]
    sampled_global_means: bool,
    /// Pair sample size used with --sampled-global-means.
    #[arg(long)]
    sample_budget: Option<usize>,
}

#[derive(Args)]
struct ExportMatrixArgs {
    #[arg(long, value_name = "FILE")]
    graph: PathBuf,
    #[arg(long, default_value = "jaccard")]
    measure: DistanceMeasure,
    #[arg(long, value_name = "FILE")]
    output: PathBuf,
    /// Refuse matrices holding more than this many values.
    #[arg(long, default_value_t = 100_000_000)]
    max_cells: usize,
}

fn parse_pooling(s: &str) -> Result<PoolingMode, String> {
    match s {
        "concat" => Ok(PoolingMode::Concatenate),
        "mean-rho" => Ok(PoolingMode::MeanOfCoefficients),
        other => Err(format!(
            "unknown pooling mode `{other}`; use concat or mean-rho"
        )),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    configure_threads(cli.threads)?;
    let output_dir = cli.output_dir.clone().unwrap_or_else(|| PathBuf::from("."));
    match cli.command {
        Command::Generate(args) => cmd_generate(args, cli.seed, &output_dir),
        Command::Distances(args) => cmd_distances(args, &output_dir),
        Command::Summarize(args) => cmd_summarize(args, &output_dir),
        Command::Correlate(args) => cmd_correlate(args),
        Command::Experiment(args) => cmd_experiment(args, cli.seed, cli.output_dir.as_deref()),
        Command::ExportMatrix(args) => cmd_export_matrix(args),
    }
}

fn configure_threads(threads: Option<usize>) -> Result<()> {
    let from_env = || {
        std::env::var(THREADS_ENV)
            .ok()
            .and_then(|v| v.parse::<usize>().ok())
    };
    if let Some(n) = threads.or_else(from_env) {
        if n == 0 {
            bail!("--threads must be at least 1");
        }
        graphdist::rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("worker pool already initialized")?;
    }
    Ok(())
}

/// Loads an edge list and, when the file used sparse ids, writes the
/// remapping table next to the other outputs.
fn load_graph_reporting_remap(path: &Path, output_dir: &Path) -> Result<LoadedGraph> {
    let loaded = load_edge_list(path)?;
    if let Some(map) = &loaded.id_map {
        let stem = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "graph".to_string());
        let map_path = output_dir.join(format!("{stem}.idmap"));
        let mut text = String::from("# new_id original_id\n");
        for (new_id, original) in map.iter().enumerate() {
            text.push_str(&format!("{new_id} {original}\n"));
        }
        fs::create_dir_all(output_dir)
            .and_then(|_| fs::write(&map_path, text))
            .with_context(|| format!("writing id map {}", map_path.display()))?;
        eprintln!(
            "note: {} uses sparse vertex ids; remapped densely, mapping written to {}",
            path.display(),
            map_path.display()
        );
    }
    Ok(loaded)
}

fn open_output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    match path {
        Some(p) => {
            let file = fs::File::create(p)
                .with_context(|| format!("creating output file {}", p.display()))?;
            Ok(Box::new(std::io::BufWriter::new(file)))
        }
        None => Ok(Box::new(std::io::BufWriter::new(std::io::stdout()))),
    }
}

fn cmd_generate(args: GenerateArgs, seed: Option<u64>, output_dir: &Path) -> Result<ExitCode> {
    let params = PpmParams {
        clusters: args.clusters,
        cluster_size: args.cluster_size,
        p_intra: args.p_intra,
        p_inter: args.p_inter,
        seed: seed.unwrap_or(0),
    };
    let (graph, assignment) = ppm::generate(&params)?;
    fs::create_dir_all(output_dir).with_context(|| format!("creating {}", output_dir.display()))?;
    let edges_path = output_dir.join(format!("{}.edges", args.name));
    let clusters_path = output_dir.join(format!("{}.clusters", args.name));
    save_edge_list(&graph, &edges_path)?;
    save_assignment(&assignment, &clusters_path)
        .with_context(|| format!("writing {}", clusters_path.display()))?;
    let (expected_intra, expected_inter) = ppm::expected_edge_counts(&params);
    println!(
        "wrote {} ({} vertices, {} edges; expected {:.1} intra + {:.1} inter) and {}",
        edges_path.display(),
        graph.vertex_count(),
        graph.edge_count(),
        expected_intra,
        expected_inter,
        clusters_path.display(),
    );
    Ok(ExitCode::SUCCESS)
}

fn parse_pairs_file(path: &Path) -> Result<Vec<(usize, usize)>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut pairs = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut tokens = trimmed.split_whitespace();
        match (
            tokens.next().and_then(|t| t.parse().ok()),
            tokens.next().and_then(|t| t.parse().ok()),
            tokens.next(),
        ) {
            (Some(u), Some(v), None) => pairs.push((u, v)),
            _ => bail!(
                "{}:{}: expected two vertex ids, got `{trimmed}`",
                path.display(),
                idx + 1
            ),
        }
    }
    Ok(pairs)
}

fn cmd_distances(args: DistancesArgs, output_dir: &Path) -> Result<ExitCode> {
    let loaded = load_graph_reporting_remap(&args.graph, output_dir)?;
    let g = &loaded.graph;
    let pairs: Vec<(usize, usize)> = match (&args.pairs_file, args.all_pairs) {
        (Some(path), _) => parse_pairs_file(path)?,
        (None, true) => {
            let n = g.vertex_count();
            (0..n)
                .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
                .collect()
        }
        (None, false) => bail!("pass --pairs-file FILE or --all-pairs"),
    };
    let distances = distance::pairwise(g, args.measure, &pairs)?;
    let mut out = open_output(args.output.as_deref())?;
    writeln!(out, "u,v,{}", args.measure)?;
    for d in distances {
        writeln!(out, "{},{},{}", d.u, d.v, d.value)?;
    }
    out.flush()?;
    Ok(ExitCode::SUCCESS)
}

fn load_pair(
    graph_path: &Path,
    assignment_path: &Path,
    output_dir: &Path,
) -> Result<(Graph, ClusterAssignment)> {
    let loaded = load_graph_reporting_remap(graph_path, output_dir)?;
    let assignment = loaded.load_assignment(assignment_path)?;
    Ok((loaded.graph, assignment))
}

fn cmd_summarize(args: SummarizeArgs, output_dir: &Path) -> Result<ExitCode> {
    let (graph, assignment) = load_pair(&args.graph, &args.assignment, output_dir)?;
    let summaries = cluster::cluster_summaries(&graph, &assignment)?;
    let mut out = open_output(args.output.as_deref())?;
    writeln!(
        out,
        "cluster_id,n_k,intra_edges,density,mean_jaccard,mean_otoc,mean_burt"
    )?;
    for s in summaries {
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            s.cluster_id,
            s.size,
            s.intra_edges,
            s.density,
            s.mean_jaccard,
            s.mean_otoc,
            s.mean_burt
        )?;
    }
    out.flush()?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_correlate(args: CorrelateArgs) -> Result<ExitCode> {
    if !args.inputs.len().is_multiple_of(2) {
        bail!("inputs must be GRAPH ASSIGNMENT pairs; got an odd count");
    }
    let cwd = PathBuf::from(".");
    let mut point_sets: Vec<Vec<(f64, f64)>> = Vec::new();
    println!("input,measure,rho,n_clusters");
    for chunk in args.inputs.chunks(2) {
        let (graph, assignment) = load_pair(&chunk[0], &chunk[1], &cwd)?;
        let summaries = cluster::cluster_summaries(&graph, &assignment)?;
        let densities: Vec<f64> = summaries.iter().map(|s| s.density).collect();
        let label = chunk[0].display();
        for (measure, ys) in [
            (
                DistanceMeasure::Jaccard,
                summaries.iter().map(|s| s.mean_jaccard).collect::<Vec<_>>(),
            ),
            (
                DistanceMeasure::OtsukaOchiai,
                summaries.iter().map(|s| s.mean_otoc).collect(),
            ),
            (
                DistanceMeasure::Burt,
                summaries.iter().map(|s| s.mean_burt).collect(),
            ),
        ] {
            let r = stats::pearson(&densities, &ys)?;
            println!("{label},{measure},{r},{n}", n = r.n_points);
        }
        point_sets.push(
            summaries
                .iter()
                .map(|s| (s.density, s.mean_jaccard))
                .collect(),
        );
        // keep all three measures for the pooled rows
        point_sets.push(summaries.iter().map(|s| (s.density, s.mean_otoc)).collect());
        point_sets.push(summaries.iter().map(|s| (s.density, s.mean_burt)).collect());
    }
    if args.inputs.len() > 2 {
        // point_sets holds [jaccard, otoc, burt] per input, interleaved
        for (offset, measure) in DistanceMeasure::ALL.into_iter().enumerate() {
            let sets: Vec<Vec<(f64, f64)>> =
                point_sets.iter().skip(offset).step_by(3).cloned().collect();
            let r = stats::pooled(&sets, args.pooling)?;
            println!("pooled,{measure},{r},{n}", n = r.n_points);
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_experiment(
    args: ExperimentArgs,
    seed: Option<u64>,
    output_dir: Option<&Path>,
) -> Result<ExitCode> {
    let mut config: ExperimentConfig = if args.builtin_suite {
        ExperimentConfig::builtin(seed.unwrap_or(0))
    } else if let Some(path) = &args.config {
        let text =
            fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let mut config = experiment::parse_config(&text)?;
        if let Some(base) = seed {
            for (i, spec) in config.graphs.iter_mut().enumerate() {
                spec.params.seed = base.wrapping_add(i as u64);
            }
        }
        config
    } else {
        bail!("pass --builtin-suite or --config FILE");
    };
    if let Some(seeds) = args.seeds {
        config.seeds_per_graph = seeds;
    }
    if args.sampled_global_means {
        config.exact_global_means = false;
    }
    if let Some(budget) = args.sample_budget {
        config.sample_budget = budget;
    }

    let dir = output_dir
        .map(Path::to_path_buf)
        .or_else(|| config.output_dir.clone())
        .unwrap_or_else(|| PathBuf::from("."));

    let result = experiment::run_experiment(&config)?;
    let files = report::emit_csv(&result, &dir)?;
    for file in &files {
        println!("wrote {}", file.display());
    }
    println!("p_inter,rho_jaccard,rho_otoc,rho_burt,mean_intra_jaccard,mean_intra_burt");
    for row in &result.grouped {
        println!(
            "{},{},{},{},{:.4},{:.4}",
            row.p_inter,
            row.rho_jaccard,
            row.rho_otoc,
            row.rho_burt,
            row.mean_intra.jaccard,
            row.mean_intra.burt
        );
    }
    if !result.failures.is_empty() {
        for failure in &result.failures {
            eprintln!(
                "failed: {} (seed {}): {}",
                failure.graph, failure.seed, failure.message
            );
        }
        return Ok(ExitCode::FAILURE);
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_export_matrix(args: ExportMatrixArgs) -> Result<ExitCode> {
    let loaded = load_graph_reporting_remap(&args.graph, &PathBuf::from("."))?;
    report::export_distance_matrix(&loaded.graph, args.measure, &args.output, args.max_cells)?;
    println!(
        "wrote {} ({n} x {n} matrix)",
        args.output.display(),
        n = loaded.graph.vertex_count()
    );
    Ok(ExitCode::SUCCESS)
}
