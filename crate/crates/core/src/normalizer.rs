//! The normalizing functions `phi` and `xi` of the degree martingale.
//!
//! ```text
//! phi(t) = prod_{s=1}^{t-1} (1 + 1/s - f(s+1) / 2s)        phi(1) = 1
//! xi(t)  = phi(t) / t = prod_{r=1}^{t-1} (1 - f(r+1) / 2(r+1))
//! ```
//!
//! `d_t(i) / phi(t)` is a martingale in `t`, and `phi` grows linearly exactly
//! when `sum f(s)/s` converges. The table accumulates `xi` as its running
//! product (every factor lies in `(0, 1]`, so `xi` is exactly non-increasing
//! and the zero schedule gives `xi = 1` bit-exactly) and assembles
//! `phi(t) = t * xi(t)` through the identity above, which keeps the
//! degenerate closed forms (`phi(t) = t` for `f = 0`) exact. The definitional
//! product of `(1 + 1/s - f(s+1)/2s)` factors is kept as an independent
//! route in the test suite.

use std::io::Write;

use crate::edgestep::EdgeStepFunction;
use crate::error::{Error, Result};

/// Table budget: two f64 arrays per horizon step.
const TABLE_BUDGET_BYTES: u64 = 4 << 30;

/// Precomputed `phi(1..=T)` and `xi(1..=T)`.
#[derive(Debug, Clone)]
pub struct NormalizerTable {
    phi: Vec<f64>,
    xi: Vec<f64>,
    horizon: u64,
}

/// Empirical linear-growth envelope `c1 * t <= phi(t) <= c2 * t` over the
/// built horizon. `c2 = xi(1) = 1` always; `c1 = xi(T)` since `xi` is
/// non-increasing. `c1` only stays away from zero when `sum f(s)/s`
/// converges.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct GrowthBounds {
    pub c1: f64,
    pub c2: f64,
    pub horizon: u64,
}

/// Ratios `xi(ceil(a s)) / xi(s)` along a grid, for slow-variation checks.
#[derive(Debug, Clone, serde::Serialize)]
pub struct SlowVariationReport {
    pub a: f64,
    /// `(s, xi(ceil(a s)) / xi(s))` per grid point.
    pub ratios: Vec<(u64, f64)>,
    /// Whether `|ratio - 1|` is non-increasing along the grid.
    pub trend_toward_one: bool,
}

impl NormalizerTable {
    /// Builds the table up to `horizon` (inclusive).
    pub fn build(f: &EdgeStepFunction, horizon: u64) -> Result<Self> {
        if horizon < 1 {
            return Err(Error::InvalidParameter {
                name: "horizon",
                reason: "table horizon must be at least 1".into(),
            });
        }
        let required = horizon.saturating_mul(16);
        if required > TABLE_BUDGET_BYTES {
            return Err(Error::MemoryBudget {
                steps: horizon,
                required_bytes: required,
                budget_bytes: TABLE_BUDGET_BYTES,
            });
        }
        let n = horizon as usize;
        let mut phi = Vec::with_capacity(n);
        let mut xi = Vec::with_capacity(n);
        phi.push(1.0);
        xi.push(1.0);
        let mut x = 1.0f64;
        for s in 1..horizon {
            let fs1 = f.eval(s + 1)?;
            let sf = s as f64;
            x *= 1.0 - fs1 / (2.0 * (sf + 1.0));
            if !x.is_finite() || x <= 0.0 {
                return Err(Error::Overflow { index: s + 1 });
            }
            xi.push(x);
            phi.push((sf + 1.0) * x);
        }
        Ok(Self { phi, xi, horizon })
    }

    pub fn horizon(&self) -> u64 {
        self.horizon
    }

    pub fn phi(&self, t: u64) -> Result<f64> {
        self.lookup(&self.phi, t)
    }

    pub fn xi(&self, t: u64) -> Result<f64> {
        self.lookup(&self.xi, t)
    }

    fn lookup(&self, arr: &[f64], t: u64) -> Result<f64> {
        if t < 1 || t > self.horizon {
            return Err(Error::HorizonExceeded {
                index: t,
                horizon: self.horizon,
            });
        }
        Ok(arr[(t - 1) as usize])
    }

    pub fn phi_values(&self) -> &[f64] {
        &self.phi
    }

    pub fn xi_values(&self) -> &[f64] {
        &self.xi
    }

    /// `xi(ceil(a s)) / xi(s)` for each `s` in the grid.
    pub fn slow_variation_ratios(&self, a: f64, s_grid: &[u64]) -> Result<SlowVariationReport> {
        if !(a > 0.0) {
            return Err(Error::InvalidParameter {
                name: "a",
                reason: format!("scale must be positive, got {a}"),
            });
        }
        let mut ratios = Vec::with_capacity(s_grid.len());
        for &s in s_grid {
            let scaled = (a * s as f64).ceil() as u64;
            let ratio = self.xi(scaled)? / self.xi(s)?;
            ratios.push((s, ratio));
        }
        let trend_toward_one = ratios
            .windows(2)
            .all(|w| (w[1].1 - 1.0).abs() <= (w[0].1 - 1.0).abs());
        Ok(SlowVariationReport {
            a,
            ratios,
            trend_toward_one,
        })
    }

    /// Min/max of `xi` over the horizon, i.e. the empirical constants of the
    /// linear envelope of `phi`.
    pub fn growth_bounds(&self) -> GrowthBounds {
        // xi is non-increasing by construction: max at 1, min at the end.
        GrowthBounds {
            c1: *self.xi.last().expect("non-empty"),
            c2: self.xi[0],
            horizon: self.horizon,
        }
    }

    /// Writes the `(t, phi)` table as two-column CSV.
    pub fn write_phi_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "# format_version = 1")?;
        writeln!(out, "t,phi")?;
        for (idx, p) in self.phi.iter().enumerate() {
            writeln!(out, "{},{}", idx + 1, p)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(f: &EdgeStepFunction, horizon: u64) -> NormalizerTable {
        NormalizerTable::build(f, horizon).unwrap()
    }

    #[test]
    fn zero_function_gives_phi_equals_t() {
        let f = EdgeStepFunction::constant(0.0).unwrap();
        let t = table(&f, 5);
        for s in 1..=5u64 {
            assert!(
                (t.phi(s).unwrap() - s as f64).abs() < 1e-12,
                "phi({s}) = {}",
                t.phi(s).unwrap()
            );
            assert!((t.xi(s).unwrap() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn all_ones_function_matches_direct_products() {
        // phi(2) = 1 + 1 - 1/2 = 1.5; phi(3) = 1.5 * (1 + 1/2 - 1/4) = 1.875
        let f = EdgeStepFunction::constant(1.0).unwrap();
        let t = table(&f, 3);
        assert!((t.phi(2).unwrap() - 1.5).abs() < 1e-15);
        assert!((t.xi(2).unwrap() - 0.75).abs() < 1e-15);
        assert!((t.phi(3).unwrap() - 1.875).abs() < 1e-15);
    }

    #[test]
    fn lookups_outside_the_horizon_fail() {
        let f = EdgeStepFunction::constant(0.0).unwrap();
        let t = table(&f, 10);
        assert!(matches!(
            t.phi(11),
            Err(Error::HorizonExceeded {
                index: 11,
                horizon: 10
            })
        ));
        assert!(t.phi(0).is_err());
    }

    #[test]
    fn xi_ratio_for_all_ones_equals_the_partial_product() {
        let f = EdgeStepFunction::constant(1.0).unwrap();
        let t = table(&f, 16);
        let report = t.slow_variation_ratios(2.0, &[4]).unwrap();
        // xi(8)/xi(4) = prod_{r=4}^{7} (1 - 1/(2(r+1)))
        let expected: f64 = (4..8).map(|r| 1.0 - 1.0 / (2.0 * (r as f64 + 1.0))).product();
        let (s, ratio) = report.ratios[0];
        assert_eq!(s, 4);
        assert!((ratio - expected).abs() < 1e-14, "{ratio} vs {expected}");
    }

    #[test]
    fn zero_function_has_unit_ratios() {
        let f = EdgeStepFunction::constant(0.0).unwrap();
        let t = table(&f, 100);
        let report = t.slow_variation_ratios(3.0, &[1, 10, 33]).unwrap();
        for (_, ratio) in report.ratios {
            assert_eq!(ratio, 1.0);
        }
        assert!(report.trend_toward_one);
    }

    #[test]
    fn growth_bounds_are_the_xi_endpoints() {
        let f = EdgeStepFunction::constant(0.0).unwrap();
        let b = table(&f, 50).growth_bounds();
        assert_eq!((b.c1, b.c2), (1.0, 1.0));

        let f = EdgeStepFunction::power(0.5).unwrap();
        let t = table(&f, 1000);
        let b = t.growth_bounds();
        assert!(b.c1 > 0.0 && b.c1 <= b.c2);
        assert_eq!(b.c1, t.xi(1000).unwrap());
        assert_eq!(b.c2, 1.0);
    }

    #[test]
    fn xi_is_non_increasing_and_matches_phi_over_t() {
        for f in [
            EdgeStepFunction::power(0.5).unwrap(),
            EdgeStepFunction::log_power(2.0).unwrap(),
            EdgeStepFunction::constant(0.3).unwrap(),
        ] {
            let t = table(&f, 20_000);
            let xs = t.xi_values();
            for w in xs.windows(2) {
                assert!(w[1] <= w[0]);
            }
            for s in 1..=t.horizon() {
                let xi = t.xi(s).unwrap();
                let phi_route = t.phi(s).unwrap() / s as f64;
                assert!(
                    (xi - phi_route).abs() <= 1e-12 * xi,
                    "routes disagree at {s}: {xi} vs {phi_route}"
                );
            }
        }
    }

    #[test]
    fn phi_csv_has_two_columns() {
        let f = EdgeStepFunction::constant(0.0).unwrap();
        let t = table(&f, 3);
        let mut buf = Vec::new();
        t.write_phi_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.contains("t,phi"));
        assert!(text.contains("3,3"));
    }
}
