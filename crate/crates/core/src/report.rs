//! File emission: experiment tables as CSV and dense distance-matrix export.
//!
//! Floating-point values are written with 6 significant digits and rows in a
//! fixed order, so identical results produce byte-identical files.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::distance::{distance, DistanceMeasure};
use crate::experiment::ExperimentResult;
use crate::graph::Graph;
use crate::stats::CorrelationResult;

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(
        "a {vertices} x {vertices} matrix holds {cells} values, over the budget of {budget}; \
         stream the pairs you need instead of materializing the matrix"
    )]
    MatrixTooLarge {
        vertices: usize,
        cells: usize,
        budget: usize,
    },
}

/// Formats with 6 significant digits, in plain decimal notation.
pub(crate) fn sig6(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (5 - magnitude).max(0) as usize;
    format!("{x:.decimals$}")
}

fn fmt_rho(r: &CorrelationResult) -> String {
    match r.rho {
        Some(rho) => sig6(rho),
        None => "NA".to_string(),
    }
}

fn write_file(path: &Path, contents: &str) -> Result<(), ReportError> {
    fs::write(path, contents).map_err(|source| ReportError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Writes `per_cluster.csv`, `per_graph.csv`, `grouped.csv` and `pooled.csv`
/// under `output_dir`, returning the paths written.
pub fn emit_csv(result: &ExperimentResult, output_dir: &Path) -> Result<Vec<PathBuf>, ReportError> {
    fs::create_dir_all(output_dir).map_err(|source| ReportError::Io {
        path: output_dir.to_path_buf(),
        source,
    })?;
    let mut written = Vec::with_capacity(4);

    let mut per_cluster =
        String::from("graph,seed,cluster_id,n_k,density,mean_jaccard,mean_otoc,mean_burt\n");
    for row in &result.per_cluster {
        per_cluster.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            row.graph,
            row.seed,
            row.cluster_id,
            row.n_k,
            sig6(row.density),
            sig6(row.mean_jaccard),
            sig6(row.mean_otoc),
            sig6(row.mean_burt),
        ));
    }
    let path = output_dir.join("per_cluster.csv");
    write_file(&path, &per_cluster)?;
    written.push(path);

    let mut per_graph = String::from(
        "graph,seed,p_intra,p_inter,rho_jaccard,rho_otoc,rho_burt,\
         mean_intra_jaccard,mean_intra_otoc,mean_intra_burt,\
         global_mean_jaccard,global_mean_otoc,global_mean_burt\n",
    );
    for row in &result.per_graph {
        per_graph.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
            row.graph,
            row.seed,
            sig6(row.p_intra),
            sig6(row.p_inter),
            fmt_rho(&row.rho_jaccard),
            fmt_rho(&row.rho_otoc),
            fmt_rho(&row.rho_burt),
            sig6(row.mean_intra.jaccard),
            sig6(row.mean_intra.otoc),
            sig6(row.mean_intra.burt),
            sig6(row.global_mean.jaccard),
            sig6(row.global_mean.otoc),
            sig6(row.global_mean.burt),
        ));
    }
    let path = output_dir.join("per_graph.csv");
    write_file(&path, &per_graph)?;
    written.push(path);

    let mut grouped = String::from(
        "p_inter,n_runs,n_clusters,rho_jaccard,rho_otoc,rho_burt,\
         mean_intra_jaccard,mean_intra_otoc,mean_intra_burt,\
         global_mean_jaccard,global_mean_otoc,global_mean_burt\n",
    );
    for row in &result.grouped {
        grouped.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{}\n",
            sig6(row.p_inter),
            row.n_runs,
            row.n_clusters,
            fmt_rho(&row.rho_jaccard),
            fmt_rho(&row.rho_otoc),
            fmt_rho(&row.rho_burt),
            sig6(row.mean_intra.jaccard),
            sig6(row.mean_intra.otoc),
            sig6(row.mean_intra.burt),
            sig6(row.global_mean.jaccard),
            sig6(row.global_mean.otoc),
            sig6(row.global_mean.burt),
        ));
    }
    let path = output_dir.join("grouped.csv");
    write_file(&path, &grouped)?;
    written.push(path);

    let mut pooled = String::from("measure,rho,n_points\n");
    for (measure, r) in [
        (DistanceMeasure::Jaccard, &result.pooled.jaccard),
        (DistanceMeasure::OtsukaOchiai, &result.pooled.otoc),
        (DistanceMeasure::Burt, &result.pooled.burt),
    ] {
        pooled.push_str(&format!("{},{},{}\n", measure, fmt_rho(r), r.n_points));
    }
    let path = output_dir.join("pooled.csv");
    write_file(&path, &pooled)?;
    written.push(path);

    Ok(written)
}

/// Writes the dense `|V| x |V|` distance matrix as CSV: row `i`, column `j`
/// holds `d(i, j)`; the diagonal is zero and the matrix is symmetric.
///
/// Refuses graphs whose matrix would exceed `max_cells` values.
pub fn export_distance_matrix(
    g: &Graph,
    measure: DistanceMeasure,
    path: impl AsRef<Path>,
    max_cells: usize,
) -> Result<(), ReportError> {
    let path = path.as_ref();
    let n = g.vertex_count();
    let cells = n.saturating_mul(n);
    if cells > max_cells {
        return Err(ReportError::MatrixTooLarge {
            vertices: n,
            cells,
            budget: max_cells,
        });
    }
    let io_err = |source| ReportError::Io {
        path: path.to_path_buf(),
        source,
    };
    let file = fs::File::create(path).map_err(io_err)?;
    let mut w = BufWriter::new(file);

    let render_row = |i: usize| -> String {
        let mut line = String::new();
        for j in 0..n {
            if j > 0 {
                line.push(',');
            }
            if i == j {
                line.push('0');
            } else {
                line.push_str(&sig6(distance(g, measure, i, j)));
            }
        }
        line.push('\n');
        line
    };

    #[cfg(feature = "parallel")]
    let rows: Vec<String> = {
        use rayon::prelude::*;
        (0..n).into_par_iter().map(render_row).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let rows: Vec<String> = (0..n).map(render_row).collect();

    (|| {
        for row in rows {
            w.write_all(row.as_bytes())?;
        }
        w.flush()
    })()
    .map_err(io_err)
}
