//! Subcommand implementations.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde_json::json;

use edgestep::experiments::{self, ExperimentKind};
use edgestep::generator::generate;
use edgestep::graph::snapshot_adjacency;
use edgestep::percolation;
use edgestep::Multigraph;

use crate::config::{RunConfig, RunKind};
use crate::AppError;

/// Generates trajectories, writing one edge-list file per snapshot plus a
/// summary with the per-snapshot structural checks.
pub fn cmd_gen(cfg: &RunConfig) -> Result<(), AppError> {
    let (t_final, snapshots, step_log) = match &cfg.kind {
        RunKind::Gen {
            t_final,
            snapshots,
            step_log,
        } => (*t_final, snapshots.clone(), *step_log),
        RunKind::Experiment(_) => {
            return Err(AppError::usage("config kind is not `gen`"));
        }
    };
    let snapshots = if snapshots.is_empty() {
        vec![t_final]
    } else {
        snapshots
    };
    fs::create_dir_all(&cfg.out_dir).map_err(AppError::runtime)?;

    let mut summary_rows = Vec::new();
    for rep in 0..cfg.replicas {
        let seed = edgestep::seeds::derive_seed(cfg.seed, 0x67656e, rep);
        let trace = generate(
            &cfg.function,
            cfg.convention,
            t_final,
            seed,
            &snapshots,
            step_log,
        )
        .map_err(AppError::runtime)?;
        for (t, g) in &trace.snapshots {
            let name = format!("gen_rep{rep}_t{t}.edges");
            let path = cfg.out_dir.join(&name);
            let mut file = fs::File::create(&path).map_err(AppError::runtime)?;
            g.write_edge_list(&mut file).map_err(AppError::runtime)?;
            let degree_sum: u64 = g.degrees().iter().sum();
            summary_rows.push(json!({
                "replica": rep,
                "seed": seed,
                "t": t,
                "V": g.num_vertices(),
                "max_degree": g.degrees().iter().max().copied().unwrap_or(0),
                "degree_sum": degree_sum,
                "degree_sum_ok": degree_sum == 2 * t,
                "file": name,
            }));
        }
    }
    let summary = json!({
        "format_version": 1,
        "config_text": cfg.raw_text,
        "snapshots": summary_rows,
    });
    let path = cfg.out_dir.join("gen_summary.json");
    fs::write(&path, serde_json::to_string_pretty(&summary).expect("json") + "\n")
        .map_err(AppError::runtime)?;
    println!("wrote {}", path.display());
    Ok(())
}

/// Loads an edge list and runs one percolation pass, emitting the run JSON.
pub fn cmd_percolate(
    graph_path: &Path,
    a: f64,
    r: u32,
    seed: u64,
    c_list: &[f64],
    max_rounds: u64,
    out: Option<&Path>,
) -> Result<(), AppError> {
    let file = fs::File::open(graph_path).map_err(AppError::runtime)?;
    let g = Multigraph::read_edge_list(std::io::BufReader::new(file)).map_err(AppError::usage)?;
    let adj = snapshot_adjacency(&g);
    let run = percolation::run(&g, &adj, a, r, c_list, seed, max_rounds).map_err(AppError::usage)?;
    let record = run.to_record(&g);
    let text = serde_json::to_string_pretty(&record).expect("record serializes") + "\n";
    match out {
        Some(path) => {
            fs::write(path, &text).map_err(AppError::runtime)?;
            println!("wrote {}", path.display());
        }
        None => {
            print!("{text}");
        }
    }
    Ok(())
}

/// Dispatches an experiment config and writes result CSV + JSON.
pub fn cmd_experiment(cfg: &RunConfig) -> Result<(PathBuf, PathBuf), AppError> {
    let kind = match &cfg.kind {
        RunKind::Experiment(kind) => kind.clone(),
        RunKind::Gen { .. } => {
            return Err(AppError::usage(
                "config kind is `gen`; use the gen subcommand",
            ))
        }
    };
    run_experiment(cfg, kind)
}

pub fn run_experiment(cfg: &RunConfig, kind: ExperimentKind) -> Result<(PathBuf, PathBuf), AppError> {
    let experiment_cfg = cfg.experiment(kind);
    let result = experiments::run(&experiment_cfg).map_err(AppError::runtime)?;
    fs::create_dir_all(&cfg.out_dir).map_err(AppError::runtime)?;
    let stem = experiment_cfg.kind.name();
    let csv_path = cfg.out_dir.join(format!("{stem}_result.csv"));
    let json_path = cfg.out_dir.join(format!("{stem}_result.json"));
    fs::write(&csv_path, result.to_csv()).map_err(AppError::runtime)?;

    // JSON carries the full nested result plus the verbatim config text
    let mut value = serde_json::to_value(&result).expect("result serializes");
    value["config_text"] = serde_json::Value::String(cfg.raw_text.clone());
    let mut file = fs::File::create(&json_path).map_err(AppError::runtime)?;
    serde_json::to_writer_pretty(&mut file, &value).map_err(|e| AppError::runtime(e.to_string()))?;
    writeln!(file).map_err(AppError::runtime)?;

    println!("wrote {}", csv_path.display());
    println!("wrote {}", json_path.display());
    Ok((csv_path, json_path))
}
