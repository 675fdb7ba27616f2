//! One-step degree-increment means against their closed form.
//!
//! A trajectory is frozen at each grid time `s`; for chosen vertices the
//! transition `s -> s + 1` is resampled from the frozen state and the
//! empirical mean increment is compared with
//! `(1/s - f(s+1)/(2s)) * d_s(i)` (index per the configured convention).

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{Cell, CellValue, ExperimentConfig};
use crate::error::{Error, Result};
use crate::generator::{generate, one_step_increment_distribution};
use crate::graph::{Multigraph, VertexId};
use crate::seeds::derive_seed;
use crate::stats::deviation_in_se;

/// How to select a probe vertex on a frozen snapshot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VertexPick {
    /// Vertex 1, typically among the largest degrees.
    First,
    /// The maximum-degree vertex (smallest id on ties).
    MaxDegree,
    /// The vertex born in the middle of the current population.
    MidBorn,
    /// The most recently born vertex, typically degree 1.
    LastBorn,
    /// An explicit id; the cell errors if it has not been born.
    Id(u32),
}

impl VertexPick {
    fn resolve(&self, g: &Multigraph) -> VertexId {
        let v = g.num_vertices() as u32;
        match self {
            VertexPick::First => 1,
            VertexPick::MaxDegree => {
                let mut best = 1;
                let mut best_d = 0;
                for (idx, &d) in g.degrees().iter().enumerate() {
                    if d > best_d {
                        best_d = d;
                        best = idx as u32 + 1;
                    }
                }
                best
            }
            VertexPick::MidBorn => (v / 2).max(1),
            VertexPick::LastBorn => v,
            VertexPick::Id(id) => *id,
        }
    }

    fn label(&self) -> String {
        match self {
            VertexPick::First => "first".into(),
            VertexPick::MaxDegree => "max_degree".into(),
            VertexPick::MidBorn => "mid_born".into(),
            VertexPick::LastBorn => "last_born".into(),
            VertexPick::Id(id) => format!("id:{id}"),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RecurrenceParams {
    /// Freeze times, ascending.
    pub s_grid: Vec<u64>,
    /// Vertex selections probed at every freeze time.
    pub picks: Vec<VertexPick>,
    /// One-step resamples per cell.
    pub resamples: u64,
}

const STREAM_GEN: u64 = 0x7263_6767; // "rcgg"
const STREAM_RESAMPLE: u64 = 0x7263_7273; // "rcrs"

pub(super) fn run(cfg: &ExperimentConfig, params: &RecurrenceParams) -> Result<Vec<Cell>> {
    if params.s_grid.is_empty() || !params.s_grid.windows(2).all(|w| w[0] < w[1]) {
        return Err(Error::InvalidParameter {
            name: "s_grid",
            reason: "freeze times must be non-empty and ascending".into(),
        });
    }
    if params.picks.is_empty() {
        return Err(Error::InvalidParameter {
            name: "picks",
            reason: "at least one vertex selection is required".into(),
        });
    }
    if params.resamples < 2 {
        return Err(Error::InvalidParameter {
            name: "resamples",
            reason: "at least two resamples are required".into(),
        });
    }

    let horizon = *params.s_grid.last().unwrap();
    let outcomes: Vec<Result<Vec<Cell>>> = (0..cfg.replicas)
        .into_par_iter()
        .map(|rep| {
            let seed = derive_seed(cfg.master_seed, STREAM_GEN, rep);
            let trace = generate(
                &cfg.function,
                cfg.convention,
                horizon,
                seed,
                &params.s_grid,
                false,
            )?;
            let mut cells = Vec::new();
            for (si, (s, g)) in trace.snapshots.iter().enumerate() {
                for (pi, pick) in params.picks.iter().enumerate() {
                    let vertex = pick.resolve(g);
                    let cell_index = (si * params.picks.len() + pi) as u64;
                    let est = one_step_increment_distribution(
                        g,
                        vertex,
                        &cfg.function,
                        cfg.convention,
                        params.resamples,
                        derive_seed(
                            cfg.master_seed,
                            STREAM_RESAMPLE.wrapping_add(rep),
                            cell_index,
                        ),
                    )?;
                    let mut cell = Cell::new();
                    cell.push("replica", CellValue::UInt(rep))
                        .push("s", CellValue::UInt(*s))
                        .push("pick", CellValue::Text(pick.label()))
                        .push("vertex", CellValue::UInt(vertex as u64))
                        .push("degree", CellValue::UInt(est.degree))
                        .push("theoretical_mean", CellValue::Float(est.theoretical_mean))
                        .push("empirical_mean", CellValue::Float(est.stats.mean))
                        .push("stderr", CellValue::Float(est.stats.stderr))
                        .push(
                            "deviation_se",
                            CellValue::Float(deviation_in_se(&est.stats, est.theoretical_mean)),
                        )
                        .push("zero_variance", CellValue::Bool(est.stats.zero_variance))
                        .push("resamples", CellValue::UInt(params.resamples));
                    cells.push(cell);
                }
            }
            Ok(cells)
        })
        .collect();

    let mut cells = Vec::new();
    for res in outcomes {
        cells.extend(res?);
    }
    Ok(cells)
}
