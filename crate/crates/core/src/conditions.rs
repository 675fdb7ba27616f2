//! Summability and regularity condition checks for edge-step functions.
//!
//! The process behaves qualitatively differently depending on whether
//!
//! ```text
//! (S)      sum_s f(s)/s  < infinity
//! (V_inf)  sum_s f(s)    = infinity
//! (D_0)    f decreases to 0
//! ```
//!
//! hold. Partial sums are computed numerically; tail verdicts come from the
//! family's closed form (integral comparison), never from extrapolation, so
//! tabulated functions report `Inconclusive` rather than a guess.

use serde::Serialize;

use crate::edgestep::EdgeStepFunction;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Holds,
    Fails,
    Inconclusive,
}

/// Outcome of [`check_conditions`].
#[derive(Debug, Clone, Serialize)]
pub struct ConditionReport {
    /// Verdict for `sum f(s)/s < infinity`.
    pub holds_s: Verdict,
    /// `sum_{s=1}^{tail_horizon} f(s)/s`.
    pub s_partial_sum: f64,
    /// Closed-form bound on the tail `sum_{s>tail_horizon} f(s)/s` when the
    /// series converges; `None` when divergent or inconclusive.
    pub s_tail_estimate: Option<f64>,
    /// Verdict for `sum f(s) = infinity` (holds means divergent).
    pub holds_v_inf: Verdict,
    /// `sum_{s=1}^{tail_horizon} f(s)`.
    pub v_partial_sum: f64,
    /// Whether `f` is certified to decrease to zero: non-increasing on the
    /// grid and known limit zero. For tabulated functions the limit is the
    /// final table entry.
    pub holds_d0: bool,
    /// The declared index of regular variation.
    pub declared_gamma: f64,
    /// `(s, f(2s)/f(s) - 2^-gamma)` along the grid; small residuals support
    /// the declared index. Points with `f(s) = 0` are skipped.
    pub ratio_residuals: Vec<(u64, f64)>,
    /// `(t, f(t) * log t)` along the grid.
    pub f_log_t: Vec<(u64, f64)>,
}

/// Classifies the summability conditions for `f`, with partial sums up to
/// `tail_horizon` and pointwise checks on `grid`.
pub fn check_conditions(
    f: &EdgeStepFunction,
    grid: &[u64],
    tail_horizon: u64,
) -> Result<ConditionReport> {
    if grid.is_empty() {
        return Err(Error::InvalidParameter {
            name: "grid",
            reason: "grid must be non-empty".into(),
        });
    }
    if !grid.windows(2).all(|w| w[0] < w[1]) {
        return Err(Error::InvalidParameter {
            name: "grid",
            reason: "grid must be strictly increasing".into(),
        });
    }
    if tail_horizon < 1 {
        return Err(Error::InvalidParameter {
            name: "tail_horizon",
            reason: "tail horizon must be at least 1".into(),
        });
    }

    let mut s_partial_sum = 0.0;
    let mut v_partial_sum = 0.0;
    for s in 1..=tail_horizon {
        let v = f.eval(s)?;
        s_partial_sum += v / s as f64;
        v_partial_sum += v;
    }

    let (holds_s, s_tail_estimate, holds_v_inf) = classify_tails(f, tail_horizon);

    let mut monotone = true;
    let mut ratio_residuals = Vec::new();
    let mut f_log_t = Vec::new();
    let mut prev: Option<f64> = None;
    let two_pow = 2f64.powf(-f.gamma());
    for &t in grid {
        let v = f.eval(t)?;
        if let Some(p) = prev {
            if v > p {
                monotone = false;
            }
        }
        prev = Some(v);
        if v > 0.0 {
            let v2 = f.eval(2 * t)?;
            ratio_residuals.push((t, v2 / v - two_pow));
        }
        f_log_t.push((t, v * (t as f64).ln()));
    }
    let holds_d0 = monotone && f.limit() == 0.0;

    Ok(ConditionReport {
        holds_s,
        s_partial_sum,
        s_tail_estimate,
        holds_v_inf,
        v_partial_sum,
        holds_d0,
        declared_gamma: f.gamma(),
        ratio_residuals,
        f_log_t,
    })
}

/// Family-specific tail classification.
///
/// ```text
/// constant p:  (S) iff p = 0;          (V_inf) iff p > 0
/// power g:     (S) holds, tail <= H^-g / g;   (V_inf) holds (g < 1)
/// log-power b: (S) iff b > 1, tail <= log(e+H)^(1-b) / (b-1); (V_inf) holds
/// table:       inconclusive unless the tail is exactly constant
/// ```
fn classify_tails(f: &EdgeStepFunction, horizon: u64) -> (Verdict, Option<f64>, Verdict) {
    if let Some(p) = f.constant_level() {
        return if p == 0.0 {
            (Verdict::Holds, Some(0.0), Verdict::Fails)
        } else {
            (Verdict::Fails, None, Verdict::Holds)
        };
    }
    if let Some(gamma) = f.power_exponent() {
        // integral test: sum_{s>H} s^-(1+gamma) <= int_H^inf x^-(1+gamma) dx
        let tail = (horizon as f64).powf(-gamma) / gamma;
        return (Verdict::Holds, Some(tail), Verdict::Holds);
    }
    if let Some(beta) = f.log_power_exponent() {
        return if beta > 1.0 {
            let l = (std::f64::consts::E + horizon as f64).ln();
            let tail = l.powf(1.0 - beta) / (beta - 1.0);
            (Verdict::Holds, Some(tail), Verdict::Holds)
        } else {
            // int dx / (x log^beta x) diverges for beta <= 1
            (Verdict::Fails, None, Verdict::Holds)
        };
    }
    debug_assert!(f.is_table());
    // A table that ends at exactly zero is eventually zero, hence summable;
    // a table ending at a positive constant behaves like that constant.
    let last = f.limit();
    if last == 0.0 {
        (Verdict::Inconclusive, None, Verdict::Inconclusive)
    } else {
        (Verdict::Fails, None, Verdict::Holds)
    }
}
