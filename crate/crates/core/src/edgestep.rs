//! Edge-step functions: the probability schedule `f` of the graph process.
//!
//! At the transition from time `s` to `s + 1` the process performs a
//! vertex-step with probability `f` (evaluated at `s + 1` by default) and an
//! edge-step otherwise. All built-in families take values in `[0, 1]` and
//! are non-increasing:
//!
//! ```text
//! constant   f(t) = p                      p in [0, 1]
//! power      f(t) = t^-gamma               gamma in (0, 1)
//! log-power  f(t) = (log(e + t))^-beta     beta > 0
//! table      f(t) = values[t - 1]          user supplied, held constant
//!                                          past the last entry
//! ```

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which time index feeds the Bernoulli draw for the step out of `G_s`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepIndexConvention {
    /// The transition `s -> s + 1` draws Bernoulli(f(s + 1)). This is the
    /// convention the normalizer `phi` and the degree recurrence are built
    /// on, and the default.
    Next,
    /// The transition `s -> s + 1` draws Bernoulli(f(s)). Exposed for
    /// sensitivity checks only.
    Current,
}

impl StepIndexConvention {
    /// The function argument used for the step out of `G_s`.
    pub fn index(self, s: u64) -> u64 {
        match self {
            StepIndexConvention::Next => s + 1,
            StepIndexConvention::Current => s,
        }
    }
}

impl Default for StepIndexConvention {
    fn default() -> Self {
        StepIndexConvention::Next
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
enum Family {
    Constant { p: f64 },
    Power { gamma: f64 },
    LogPower { beta: f64 },
    Table { values: Vec<f64> },
}

/// An evaluatable edge-step function with its regularity metadata.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeStepFunction {
    #[serde(flatten)]
    family: Family,
    /// Declared index of regular variation (`f(at)/f(t) -> a^-gamma`).
    gamma: f64,
}

/// Values this close outside [0, 1] are treated as floating-point noise and
/// clamped; anything further out is an error.
const RANGE_SLACK: f64 = 1e-12;

impl EdgeStepFunction {
    /// `f(t) = p`.
    pub fn constant(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidParameter {
                name: "p",
                reason: format!("constant level must lie in [0, 1], got {p}"),
            });
        }
        Ok(Self {
            family: Family::Constant { p },
            gamma: 0.0,
        })
    }

    /// `f(t) = t^-gamma` with `gamma` in (0, 1).
    pub fn power(gamma: f64) -> Result<Self> {
        if !(gamma > 0.0 && gamma < 1.0) {
            return Err(Error::InvalidParameter {
                name: "gamma",
                reason: format!("power exponent must lie in (0, 1), got {gamma}"),
            });
        }
        Ok(Self {
            family: Family::Power { gamma },
            gamma,
        })
    }

    /// `f(t) = (log(e + t))^-beta` with `beta > 0`; slowly varying.
    pub fn log_power(beta: f64) -> Result<Self> {
        if !(beta > 0.0) {
            return Err(Error::InvalidParameter {
                name: "beta",
                reason: format!("log exponent must be positive, got {beta}"),
            });
        }
        Ok(Self {
            family: Family::LogPower { beta },
            gamma: 0.0,
        })
    }

    /// A tabulated function: `values[k]` is `f(k + 1)`. The table must be
    /// non-increasing with entries in [0, 1]; past the last entry the
    /// function continues at its final value. `gamma` is the caller's
    /// declared index of regular variation.
    pub fn from_table(values: Vec<f64>, gamma: f64) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidParameter {
                name: "values",
                reason: "table must have at least one entry".into(),
            });
        }
        if !(0.0..=1.0).contains(&gamma) {
            return Err(Error::InvalidParameter {
                name: "gamma",
                reason: format!("declared index must lie in [0, 1], got {gamma}"),
            });
        }
        for (k, w) in values.windows(2).enumerate() {
            if w[1] > w[0] {
                return Err(Error::InvalidParameter {
                    name: "values",
                    reason: format!(
                        "table must be non-increasing, but f({}) = {} < f({}) = {}",
                        k + 1,
                        w[0],
                        k + 2,
                        w[1]
                    ),
                });
            }
        }
        for (k, v) in values.iter().enumerate() {
            if !(0.0..=1.0).contains(v) {
                return Err(Error::InvalidParameter {
                    name: "values",
                    reason: format!("table entry f({}) = {} outside [0, 1]", k + 1, v),
                });
            }
        }
        Ok(Self {
            family: Family::Table { values },
            gamma,
        })
    }

    /// Evaluates `f` at integer time `t >= 1`.
    pub fn eval(&self, t: u64) -> Result<f64> {
        if t < 1 {
            return Err(Error::TimeOutOfDomain { t });
        }
        let raw = match &self.family {
            Family::Table { values } => {
                let idx = (t as usize - 1).min(values.len() - 1);
                values[idx]
            }
            _ => self.raw(t as f64),
        };
        if raw < -RANGE_SLACK || raw > 1.0 + RANGE_SLACK {
            return Err(Error::ValueOutOfRange { t, value: raw });
        }
        Ok(raw.clamp(0.0, 1.0))
    }

    /// Evaluates `f` at a real argument `x >= 1`. The process itself only
    /// evaluates integer times; this entry point exists for the analytic
    /// thresholds `g(a_t)`, `h(a_t)` and condition checks, where rate
    /// sequences like `a_t = log t` land between integers. Tabulated
    /// functions use the floor index.
    pub fn value_at(&self, x: f64) -> Result<f64> {
        if !(x >= 1.0) {
            return Err(Error::TimeOutOfDomain { t: 0 });
        }
        match &self.family {
            Family::Table { values } => {
                let idx = (x.floor() as usize - 1).min(values.len() - 1);
                Ok(values[idx])
            }
            _ => Ok(self.raw(x).clamp(0.0, 1.0)),
        }
    }

    fn raw(&self, x: f64) -> f64 {
        match &self.family {
            Family::Constant { p } => *p,
            Family::Power { gamma } => x.powf(-gamma),
            Family::LogPower { beta } => (std::f64::consts::E + x).ln().powf(-beta),
            Family::Table { .. } => unreachable!("tables are indexed, not evaluated"),
        }
    }

    /// Unchecked probability for hot loops; `t >= 1` is the caller's
    /// responsibility (the generator only produces t >= 1).
    pub(crate) fn prob(&self, t: u64) -> f64 {
        match &self.family {
            Family::Table { values } => {
                let idx = (t as usize - 1).min(values.len() - 1);
                values[idx]
            }
            _ => self.raw(t as f64).clamp(0.0, 1.0),
        }
    }

    /// Declared index of regular variation.
    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// All built-in families are non-increasing; tables are validated on
    /// load, so every constructed function is monotone.
    pub fn is_monotone(&self) -> bool {
        true
    }

    /// The known limit of `f(t)` as `t` grows. Tables continue at their
    /// final entry, so that entry is their limit.
    pub fn limit(&self) -> f64 {
        match &self.family {
            Family::Constant { p } => *p,
            Family::Power { .. } | Family::LogPower { .. } => 0.0,
            Family::Table { values } => *values.last().expect("validated non-empty"),
        }
    }

    /// Short identifier used in reports and file echoes.
    pub fn describe(&self) -> String {
        match &self.family {
            Family::Constant { p } => format!("constant(p={p})"),
            Family::Power { gamma } => format!("power(gamma={gamma})"),
            Family::LogPower { beta } => format!("logpower(beta={beta})"),
            Family::Table { values } => format!("table(len={})", values.len()),
        }
    }

    pub(crate) fn is_table(&self) -> bool {
        matches!(self.family, Family::Table { .. })
    }

    pub(crate) fn log_power_exponent(&self) -> Option<f64> {
        match &self.family {
            Family::LogPower { beta } => Some(*beta),
            _ => None,
        }
    }

    pub(crate) fn power_exponent(&self) -> Option<f64> {
        match &self.family {
            Family::Power { gamma } => Some(*gamma),
            _ => None,
        }
    }

    pub(crate) fn constant_level(&self) -> Option<f64> {
        match &self.family {
            Family::Constant { p } => Some(*p),
            _ => None,
        }
    }
}

/// The infection-rate sequence `a_t` handed to the percolation process.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rate", rename_all = "snake_case")]
pub enum RateSequence {
    /// `a_t = c`.
    Constant { c: f64 },
    /// `a_t = log t`.
    Log,
    /// `a_t = t^alpha`.
    Power { alpha: f64 },
    /// `a_t = |V|`, i.e. infect everything at round zero.
    Full,
}

impl RateSequence {
    pub fn eval(&self, t: u64) -> f64 {
        let x = t as f64;
        match self {
            RateSequence::Constant { c } => *c,
            RateSequence::Log => x.ln(),
            RateSequence::Power { alpha } => x.powf(*alpha),
            RateSequence::Full => f64::INFINITY,
        }
    }

    pub fn describe(&self) -> String {
        match self {
            RateSequence::Constant { c } => format!("const({c})"),
            RateSequence::Log => "log".into(),
            RateSequence::Power { alpha } => format!("power({alpha})"),
            RateSequence::Full => "full".into(),
        }
    }
}
