//! Frequency of the early-vertex high-degree event.
//!
//! For each cell `(n, t)` the experiment estimates the probability that
//! some vertex among the first `n` reaches degree `phi(t) / phi(n)` by time
//! `t`. The normalized early-degree martingale puts this probability near 1
//! for moderate `n`, increasing in `n`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{Cell, CellValue, ExperimentConfig};
use crate::error::{Error, Result};
use crate::generator::Generator;
use crate::normalizer::NormalizerTable;
use crate::seeds::derive_seed;
use crate::stats::summarize;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MaxDegreeParams {
    /// Observation times, ascending.
    pub t_grid: Vec<u64>,
    /// Early-vertex counts, ascending.
    pub n_grid: Vec<u64>,
}

const STREAM: u64 = 0x6d78_6467; // "mxdg"

pub(super) fn run(cfg: &ExperimentConfig, params: &MaxDegreeParams) -> Result<Vec<Cell>> {
    if params.t_grid.is_empty() || !params.t_grid.windows(2).all(|w| w[0] < w[1]) {
        return Err(Error::InvalidParameter {
            name: "t_grid",
            reason: "observation times must be non-empty and ascending".into(),
        });
    }
    if params.n_grid.is_empty() || !params.n_grid.windows(2).all(|w| w[0] < w[1]) {
        return Err(Error::InvalidParameter {
            name: "n_grid",
            reason: "vertex counts must be non-empty and ascending".into(),
        });
    }
    let horizon = *params.t_grid.last().unwrap();
    if *params.n_grid.last().unwrap() > params.t_grid[0] {
        return Err(Error::InvalidParameter {
            name: "n_grid",
            reason: "every n must be at most the smallest observation time".into(),
        });
    }
    if cfg.replicas < 1 {
        return Err(Error::InvalidParameter {
            name: "replicas",
            reason: "at least one replica is required".into(),
        });
    }

    let table = NormalizerTable::build(&cfg.function, horizon)?;
    let mut thresholds = Vec::with_capacity(params.t_grid.len() * params.n_grid.len());
    for &t in &params.t_grid {
        for &n in &params.n_grid {
            thresholds.push(table.phi(t)? / table.phi(n)?);
        }
    }

    let per_replica: Vec<Vec<bool>> = (0..cfg.replicas)
        .into_par_iter()
        .map(|rep| trajectory(cfg, params, &thresholds, rep))
        .collect();

    let n_cells = thresholds.len();
    let mut hits: Vec<Vec<f64>> = vec![Vec::with_capacity(cfg.replicas as usize); n_cells];
    for events in per_replica {
        for (slot, hit) in hits.iter_mut().zip(events) {
            slot.push(f64::from(u8::from(hit)));
        }
    }

    let mut cells = Vec::with_capacity(n_cells);
    for (ti, &t) in params.t_grid.iter().enumerate() {
        for (ni, &n) in params.n_grid.iter().enumerate() {
            let idx = ti * params.n_grid.len() + ni;
            let stats = summarize(&hits[idx]);
            let mut cell = Cell::new();
            cell.push("t", CellValue::UInt(t))
                .push("n", CellValue::UInt(n))
                .push("degree_threshold", CellValue::Float(thresholds[idx]))
                .push("frequency", CellValue::Float(stats.mean))
                .push("stderr", CellValue::Float(stats.stderr))
                .push("zero_variance", CellValue::Bool(stats.zero_variance))
                .push("replicas", CellValue::UInt(cfg.replicas));
            cells.push(cell);
        }
    }
    Ok(cells)
}

/// One trajectory; returns the event indicator for every `(t, n)` cell in
/// row-major order.
fn trajectory(
    cfg: &ExperimentConfig,
    params: &MaxDegreeParams,
    thresholds: &[f64],
    rep: u64,
) -> Vec<bool> {
    let seed = derive_seed(cfg.master_seed, STREAM, rep);
    let mut gen = Generator::new(cfg.function.clone(), cfg.convention, seed);
    let mut events = Vec::with_capacity(thresholds.len());
    for (ti, &t) in params.t_grid.iter().enumerate() {
        gen.run_to(t);
        let g = gen.graph();
        for (ni, &n) in params.n_grid.iter().enumerate() {
            let bound = n.min(g.num_vertices()) as usize;
            let max_deg = g.degrees()[..bound].iter().copied().max().unwrap_or(0);
            events.push(max_deg as f64 >= thresholds[ti * params.n_grid.len() + ni]);
        }
    }
    events
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::edgestep::{EdgeStepFunction, StepIndexConvention};
    use crate::experiments::ExperimentKind;

    #[test]
    fn the_lonely_vertex_always_wins() {
        // f = 0: the single vertex has degree 2t >= phi(t)/phi(n) = t/n
        let params = MaxDegreeParams {
            t_grid: vec![64],
            n_grid: vec![1, 4],
        };
        let cfg = ExperimentConfig {
            function: EdgeStepFunction::constant(0.0).unwrap(),
            convention: StepIndexConvention::Next,
            replicas: 5,
            master_seed: 3,
            kind: ExperimentKind::MaxDegree(params.clone()),
        };
        let cells = run(&cfg, &params).unwrap();
        for cell in cells {
            assert_eq!(cell.number("frequency"), Some(1.0));
        }
    }

    #[test]
    fn n_beyond_the_first_observation_time_is_rejected() {
        let params = MaxDegreeParams {
            t_grid: vec![10, 100],
            n_grid: vec![20],
        };
        let cfg = ExperimentConfig {
            function: EdgeStepFunction::constant(0.0).unwrap(),
            convention: StepIndexConvention::Next,
            replicas: 1,
            master_seed: 0,
            kind: ExperimentKind::MaxDegree(params.clone()),
        };
        assert!(run(&cfg, &params).is_err());
    }
}
