//! Constancy of the normalized early-degree sum.
//!
//! Fix a tracking time `N` and let `D_s` be the total degree at time `s` of
//! the vertices born by time `N`. Then `W_s = D_s / phi(s)` is a martingale
//! with `W_N = 2N / phi(N)` exactly, and its increments obey
//! `|W_{s+1} - W_s| <= 3 / phi(s+1)` deterministically. The experiment
//! estimates `E W_s` on a grid and counts increment-bound violations (which
//! must be zero) along every trajectory.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{Cell, CellValue, ExperimentConfig};
use crate::error::{Error, Result};
use crate::generator::{Generator, Step};
use crate::normalizer::NormalizerTable;
use crate::seeds::derive_seed;
use crate::stats::{deviation_in_se, summarize};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MartingaleParams {
    /// The time `N` up to which vertices count as tracked.
    pub tracked_time: u64,
    /// Times at which the mean of `W` is estimated; ascending.
    pub s_grid: Vec<u64>,
}

const STREAM: u64 = 0x6d61_7274; // "mart"

pub(super) fn run(cfg: &ExperimentConfig, params: &MartingaleParams) -> Result<Vec<Cell>> {
    let n = params.tracked_time;
    if n < 1 {
        return Err(Error::InvalidParameter {
            name: "tracked_time",
            reason: "the tracking time must be at least 1".into(),
        });
    }
    if params.s_grid.is_empty() || !params.s_grid.windows(2).all(|w| w[0] < w[1]) {
        return Err(Error::InvalidParameter {
            name: "s_grid",
            reason: "the grid must be non-empty and strictly increasing".into(),
        });
    }
    if params.s_grid[0] < n {
        return Err(Error::InvalidParameter {
            name: "s_grid",
            reason: format!("grid starts before the tracking time {n}"),
        });
    }
    if cfg.replicas < 1 {
        return Err(Error::InvalidParameter {
            name: "replicas",
            reason: "at least one replica is required".into(),
        });
    }

    let horizon = *params.s_grid.last().unwrap();
    let table = NormalizerTable::build(&cfg.function, horizon)?;
    let expected = 2.0 * n as f64 / table.phi(n)?;

    let per_replica: Vec<Result<(Vec<f64>, u64)>> = (0..cfg.replicas)
        .into_par_iter()
        .map(|rep| trajectory(cfg, params, &table, rep))
        .collect();

    // replica-indexed reduction keeps float sums reproducible
    let mut ws: Vec<Vec<f64>> = vec![Vec::with_capacity(cfg.replicas as usize); params.s_grid.len()];
    let mut violations = 0u64;
    for res in per_replica {
        let (w, v) = res?;
        violations += v;
        for (slot, value) in ws.iter_mut().zip(w) {
            slot.push(value);
        }
    }

    let mut cells = Vec::with_capacity(params.s_grid.len());
    for (idx, &s) in params.s_grid.iter().enumerate() {
        let stats = summarize(&ws[idx]);
        let mut cell = Cell::new();
        cell.push("s", CellValue::UInt(s))
            .push("tracked_time", CellValue::UInt(n))
            .push("mean_w", CellValue::Float(stats.mean))
            .push("stderr_w", CellValue::Float(stats.stderr))
            .push("expected_w", CellValue::Float(expected))
            .push("deviation_se", CellValue::Float(deviation_in_se(&stats, expected)))
            .push("zero_variance", CellValue::Bool(stats.zero_variance))
            .push("increment_violations", CellValue::UInt(violations))
            .push("replicas", CellValue::UInt(cfg.replicas));
        cells.push(cell);
    }
    Ok(cells)
}

/// Runs one trajectory, returning `W` at each grid time plus the number of
/// steps whose increment exceeded `3 / phi(s+1)`.
fn trajectory(
    cfg: &ExperimentConfig,
    params: &MartingaleParams,
    table: &NormalizerTable,
    rep: u64,
) -> Result<(Vec<f64>, u64)> {
    let n = params.tracked_time;
    let seed = derive_seed(cfg.master_seed, STREAM, rep);
    let mut gen = Generator::new(cfg.function.clone(), cfg.convention, seed);
    gen.run_to(n);
    // tracked vertices are exactly those born by time N: ids 1..=V_N
    let tracked_max = gen.graph().num_vertices() as u32;
    let mut d: u64 = 2 * n; // their total degree at time N is the whole degree sum
    debug_assert_eq!(gen.graph().degrees().iter().sum::<u64>(), d);

    let mut w_prev = d as f64 / table.phi(n)?;
    let mut violations = 0u64;
    let mut out = Vec::with_capacity(params.s_grid.len());
    let mut grid = params.s_grid.iter().copied().peekable();
    while grid.peek() == Some(&n) {
        grid.next();
        out.push(w_prev);
    }
    let horizon = *params.s_grid.last().unwrap();
    for s in n..horizon {
        match gen.step() {
            Step::Vertex { target, .. } => {
                d += u64::from(target <= tracked_max);
            }
            Step::Edge { first, second } => {
                d += u64::from(first <= tracked_max) + u64::from(second <= tracked_max);
            }
        }
        let phi_next = table.phi(s + 1)?;
        let w = d as f64 / phi_next;
        if (w - w_prev).abs() > 3.0 / phi_next {
            violations += 1;
        }
        w_prev = w;
        if grid.peek() == Some(&(s + 1)) {
            grid.next();
            out.push(w);
        }
    }
    Ok((out, violations))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::edgestep::{EdgeStepFunction, StepIndexConvention};
    use crate::experiments::ExperimentKind;

    #[test]
    fn all_edge_steps_keep_w_pinned_at_two() {
        // f = 0: one vertex holds all degree and phi(s) = s, so W = 2
        let cfg = ExperimentConfig {
            function: EdgeStepFunction::constant(0.0).unwrap(),
            convention: StepIndexConvention::Next,
            replicas: 8,
            master_seed: 123,
            kind: ExperimentKind::Martingale(MartingaleParams {
                tracked_time: 1,
                s_grid: vec![1, 10, 100],
            }),
        };
        let params = MartingaleParams {
            tracked_time: 1,
            s_grid: vec![1, 10, 100],
        };
        let cells = run(&cfg, &params).unwrap();
        for cell in &cells {
            assert_eq!(cell.number("mean_w"), Some(2.0));
            assert_eq!(cell.number("deviation_se"), Some(0.0));
            assert_eq!(cell.get("zero_variance"), Some(&CellValue::Bool(true)));
            assert_eq!(cell.number("increment_violations"), Some(0.0));
        }
    }

    #[test]
    fn grid_must_start_at_or_after_the_tracking_time() {
        let cfg = ExperimentConfig {
            function: EdgeStepFunction::constant(0.0).unwrap(),
            convention: StepIndexConvention::Next,
            replicas: 1,
            master_seed: 0,
            kind: ExperimentKind::Martingale(MartingaleParams {
                tracked_time: 10,
                s_grid: vec![5],
            }),
        };
        let params = MartingaleParams {
            tracked_time: 10,
            s_grid: vec![5],
        };
        assert!(run(&cfg, &params).is_err());
    }
}
