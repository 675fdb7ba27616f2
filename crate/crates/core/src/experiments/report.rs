//! Deterministic condition report: summability verdicts, the normalizer
//! envelope, and slow-variation ratios, one row per grid point.

use serde::{Deserialize, Serialize};

use super::{Cell, CellValue, ExperimentConfig};
use crate::conditions::{check_conditions, Verdict};
use crate::error::Result;
use crate::normalizer::NormalizerTable;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConditionsParams {
    /// Sample points, ascending.
    pub grid: Vec<u64>,
    /// Partial sums run to this horizon.
    pub tail_horizon: u64,
    /// Normalizer table horizon; ratios `xi(2s)/xi(s)` are reported for
    /// grid points with `2s` inside it.
    pub table_horizon: u64,
}

fn verdict_text(v: Verdict) -> String {
    match v {
        Verdict::Holds => "holds".into(),
        Verdict::Fails => "fails".into(),
        Verdict::Inconclusive => "inconclusive".into(),
    }
}

pub(super) fn run(cfg: &ExperimentConfig, params: &ConditionsParams) -> Result<Vec<Cell>> {
    let report = check_conditions(&cfg.function, &params.grid, params.tail_horizon)?;
    let table = NormalizerTable::build(&cfg.function, params.table_horizon)?;
    let bounds = table.growth_bounds();

    let mut cells = Vec::with_capacity(params.grid.len());
    for (idx, &t) in params.grid.iter().enumerate() {
        let f_t = cfg.function.eval(t)?;
        let residual = report
            .ratio_residuals
            .iter()
            .find(|&&(s, _)| s == t)
            .map(|&(_, r)| r);
        let xi_ratio = if 2 * t <= table.horizon() {
            Some(table.xi(2 * t)? / table.xi(t)?)
        } else {
            None
        };
        let mut cell = Cell::new();
        cell.push("t", CellValue::UInt(t))
            .push("f_t", CellValue::Float(f_t))
            .push("f_log_t", CellValue::Float(report.f_log_t[idx].1))
            .push(
                "ratio_residual",
                residual.map_or(CellValue::Text(String::new()), CellValue::Float),
            )
            .push(
                "xi_ratio_2s",
                xi_ratio.map_or(CellValue::Text(String::new()), CellValue::Float),
            )
            .push("holds_s", CellValue::Text(verdict_text(report.holds_s)))
            .push("s_partial_sum", CellValue::Float(report.s_partial_sum))
            .push(
                "s_tail_estimate",
                report
                    .s_tail_estimate
                    .map_or(CellValue::Text(String::new()), CellValue::Float),
            )
            .push("holds_v_inf", CellValue::Text(verdict_text(report.holds_v_inf)))
            .push("v_partial_sum", CellValue::Float(report.v_partial_sum))
            .push("holds_d0", CellValue::Bool(report.holds_d0))
            .push("gamma", CellValue::Float(report.declared_gamma))
            .push("c1", CellValue::Float(bounds.c1))
            .push("c2", CellValue::Float(bounds.c2));
        cells.push(cell);
    }
    Ok(cells)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::edgestep::{EdgeStepFunction, StepIndexConvention};
    use crate::experiments::ExperimentKind;

    #[test]
    fn power_half_report_says_holds() {
        let params = ConditionsParams {
            grid: vec![10, 100],
            tail_horizon: 10_000,
            table_horizon: 1_000,
        };
        let cfg = ExperimentConfig {
            function: EdgeStepFunction::power(0.5).unwrap(),
            convention: StepIndexConvention::Next,
            replicas: 1,
            master_seed: 0,
            kind: ExperimentKind::Conditions(params.clone()),
        };
        let cells = run(&cfg, &params).unwrap();
        assert_eq!(cells.len(), 2);
        for cell in &cells {
            assert_eq!(
                cell.get("holds_s"),
                Some(&CellValue::Text("holds".into()))
            );
            let ratio = cell.number("xi_ratio_2s").unwrap();
            assert!(ratio > 0.9 && ratio <= 1.0);
        }
    }
}
